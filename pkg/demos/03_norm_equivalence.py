"""
Line norm against area norm
===========================

For Paley-Wiener the plain weight W0 = 1/((1+|y|)|E|) already gives an
equivalent area norm.  On the power family it does not: the area norm of
the normalized kernel g_x falls off as phi'(x) grows, and the level-set
weight restores a bounded ratio.
"""

import math

from hbfock import LevelSetGeometry, WeightField, area_norm2, line_norm2, power_model, pw_model, test_fn

pw = pw_model(math.pi)
for shifts in ([0.0], [0.0, 1.3], [-2.0, 0.4, 3.1]):
    F = test_fn("sinc-combination", {"coeffs": [1.0] * len(shifts), "shifts": shifts}, pw)
    line = line_norm2(F, pw).value
    area = area_norm2(F, WeightField("W0", pw), tol_rel=1e-3).value
    print(f"pw    shifts {shifts}: line {line:.6f}  area {area:.6f}  ratio {area / line:.4f}")

pp = power_model(0.75)
for x in (10.0, 100.0):
    g = test_fn("g_x", {"x": x}, pp)
    line = g.exact_norm2()
    r0 = area_norm2(g, WeightField("W0", pp), tol_rel=1e-3).value / line
    geo = LevelSetGeometry(pp, 0.1, 0.5, (x - 24, x + 24))
    r1 = area_norm2(g, WeightField("W_main", pp, eps=0.1, delta=0.5, geometry=geo), tol_rel=1e-3).value / line
    print(f"power g_x at x = {x:5g}: W0 ratio {r0:.4f}   W_main ratio {r1:.4f}")
