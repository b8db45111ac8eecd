#!/usr/bin/env python3
"""Taylor jets and the flex operator.

A jet carries every partial derivative of a formula up to order 4, computed
by truncated series arithmetic rather than symbolic differentiation or
finite differences.  The flex of a function,

    Flex f = f_y^2 f_xx - 2 f_x f_y f_xy + f_x^2 f_yy,

vanishes identically exactly when all level sets of f are straight lines,
so it is the basic linearity detector for web foliations.
"""

import math

from webgeo import evaluate_jet, flex, parse, partial_derivative


def show_jet(source: str, point, order: int = 3):
    expr = parse(source)
    jet = evaluate_jet(expr, point, order)
    print(f"\n  {source}  at {point}, order {order}")
    for total in range(order + 1):
        row = []
        for i in range(total + 1):
            j = total - i
            row.append(f"d[{i},{j}] = {partial_derivative(jet, i, j):+.6f}")
        print("   ", "   ".join(row))


def main():
    print("=" * 72)
    print("Jets: all partial derivatives from one evaluation")
    print("=" * 72)
    show_jet("x*y + sin(x)", (0.5, 2.0))
    show_jet("y/x", (1.0, 2.0), order=2)

    print()
    print("=" * 72)
    print("Flex: straight level sets have flex zero everywhere")
    print("=" * 72)
    cases = [
        ("3*x - 2*y + 7", (0.3, 0.9), "parallel lines"),
        ("x + sqrt(x^2 - y)", (2.0, 3.0), "tangent lines of the parabola y = x^2"),
        ("y/x", (1.0, 2.0), "lines through the origin"),
        ("x^2 + y^2", (1.0, 1.0), "concentric circles (curved!)"),
    ]
    for source, point, label in cases:
        value = flex(source, point)
        print(f"  Flex {source:<22} at {point} = {value:+.6f}   ({label})")

    print()
    print("Gauge covariance: relabeling levels by Phi(t) = t + t^3 rescales")
    print("the flex by Phi'(f)^3 and cannot change where it vanishes:")
    f = parse("x^2 + y^2")
    relabeled = f + f**3
    point = (0.8, 0.4)
    value = 0.8**2 + 0.4**2
    scale = (1 + 3 * value * value) ** 3
    print(f"  Flex(Phi o f) = {flex(relabeled, point):+.6f}")
    print(f"  Phi'(f)^3 * Flex f = {scale * flex(f, point):+.6f}")


if __name__ == "__main__":
    main()
