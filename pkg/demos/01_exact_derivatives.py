#!/usr/bin/env python3
"""Exact first and second derivatives of coordinate expressions.

Expressions are parsed from infix text into immutable trees and evaluated on
second-order forward-mode numbers: one evaluation returns the value, two
chosen first partials and the mixed second partial, all exact to roundoff.
"""

import math

from paraverify import expressions as ex

coords = ("v", "theta")

for text in ("v^2", "v*sec(theta)", "sin(v*theta) + exp(v/2)"):
    e = ex.parse_expression(text, coords)
    print(f"expression   {text!r}")
    print(f"  printed    {e.to_text()}")
    p = [1.0, math.pi / 4]
    r = ex.eval_hyperdual(e, p, 0, 1)
    print(f"  at (v, theta) = (1, pi/4):")
    print(f"    value            {r.value:+.12f}")
    print(f"    d/dv             {r.d1:+.12f}")
    print(f"    d/dtheta         {r.d2:+.12f}")
    print(f"    d^2/dv dtheta    {r.d12:+.12f}")
    print()

# the mixed partial of v*sec(theta) is sec(theta)*tan(theta) = sqrt(2) at pi/4
e = ex.parse_expression("v*sec(theta)", coords)
r = ex.eval_hyperdual(e, [1.0, math.pi / 4], 0, 1)
print(f"check: d^2/dv dtheta [v sec(theta)] - sqrt(2) = {r.d12 - math.sqrt(2):+.3e}")

# round trip: print then parse, values agree everywhere
reparsed = ex.parse_expression(e.to_text(), coords)
pt = [1.7, 0.9]
print(f"round trip:  |original - reparsed| = "
      f"{abs(ex.eval_value(e, pt) - ex.eval_value(reparsed, pt)):.1e}")
