"""
Hermite-Biehler models and their reproducing kernels
====================================================

A model is fixed by the zeros of E (all in the lower half-plane) plus a
linear phase.  We look at Theta = E#/E, the phase derivative and the
kernel norm on the three built-in families.
"""

import math

import numpy as np

from hbfock import KernelEval, finite_model, ls_model, phase_derivative, power_model, pw_model

# Paley-Wiener: E(z) = exp(-i a z), so phi' = a everywhere
pw = pw_model(math.pi)
print("pw      phi'(0) =", phase_derivative(pw, 0.0))

# a single Blaschke factor: phi'(x) = 1/(1+x^2)
one = finite_model([1j])
print("single  phi'(0) =", phase_derivative(one, 0.0), " |Theta(2i)| =", float(one.abs_theta(2j)[()]))

# the power family: zeros spread so that phi' grows like x^{1/3} for alpha = 0.75
pp = power_model(0.75)
for x in (10.0, 100.0, 1000.0):
    print(f"power   x = {x:6g}   phi'(x)/(x+1)^(1/3) = {phase_derivative(pp, x) / (x + 1) ** (1 / 3):.6f}")

# the ls family has zeros n - delta + i n^{-4 delta}, approaching the axis
ls = ls_model(0.3)
_, pts = ls.zeros.enumerate(3)
print("ls zeros:", np.round(np.sort_complex(pts), 4))

# on the real line ||k_x||^2 = phi'(x)/pi; above it the norm decays like 1/y
k = KernelEval(pp)
for y in (0.0, 0.01, 0.1, 1.0):
    print(f"power   ||k_(100 + {y}i)||^2 = {float(k.knorm2(100 + 1j * y)[0]):.6f}")
print("phi'(100)/pi =", phase_derivative(pp, 100.0) / math.pi)
