"""
Sublevel sets of |Theta| and the weights built from them
========================================================

The weight that represents the de Branges norm as an area norm adds a bump
d_eps(z)^{-1/2} outside {|Theta| < delta}, where d_eps is the distance to
{|Theta| < eps}.  This script traces both level curves, compares d_eps with
min(d0, 1/||k_z||^2) and builds the dyadic interval cover used by the
piecewise-constant variant.
"""

import math

import numpy as np

from hbfock import (LevelSetGeometry, WeightField, d_eps, power_model, pw_model, verify_lev_bounds,
                    whitney_cover)

eps, delta = 0.1, 0.5

# pw with a = 1: |Theta(x+iy)| = exp(-2y), so the curves are horizontal lines
pw = pw_model(1.0)
print("pw   d_eps(0) =", d_eps(pw, 0.0, eps), " expected", math.log(1 / eps) / 2)

# on the power family the curves dip toward the axis where phi' is large
pp = power_model(0.75)
geo = LevelSetGeometry(pp, eps, delta, (0, 40))
b = geo.boundary("eps")
for x in (1.0, 10.0, 30.0):
    i = np.argmin(np.abs(b.xs - x))
    print(f"power  eps-curve height near x = {x:4g}: {b.ylo[i]:.4f}")

# the distance is comparable to min(d0, 1/||k_z||^2) outside Omega_delta
st = verify_lev_bounds(pp, [5.0, 10.0 + 0.01j, 20.0, 35.0 + 0.02j], eps, delta)
for r in st.reports:
    print(f"z = {r.z:.2f}  d_eps = {r.d_eps:.4f}  bound = {r.bound:.4f}  ratio = {r.ratio:.3f}")

# the weight and its cover
W = WeightField("W_main", pp, eps=eps, delta=delta, geometry=geo)
print("W_main |E| at 10, 10+0.05i:", W.relative(np.array([10.0, 10 + 0.05j])))
cov = whitney_cover(pp, eps, delta, (0, 40), geometry=geo)
print(f"cover: {len(cov)} intervals, lengths {cov.lengths.min():.4g} .. {cov.lengths.max():.4g}")
print("invariant violations:", cov.check(pp))
