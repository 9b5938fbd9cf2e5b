"""Smoke test for the dunkl_strichartz extension module."""
import math

import dunkl_strichartz as ds

s = ds.Structure([0.5])
assert s.d == 1 and abs(s.d_eff - 2.0) < 1e-12
assert abs(s.kernel(1j, [0.0], [3.0]) - 1.0) < 1e-12

# time reversal of the oscillator kernel
k = s.oscillator_kernel(0.4, [0.3], [-0.2])
km = s.oscillator_kernel(-0.4, [0.3], [-0.2])
assert abs(km - k.conjugate()) < 1e-12 * abs(k)
assert s.lens_residual(0.8, [0.3], [0.5]) < 1e-10

b = ds.Basis([0.5], 10)
assert len(b) == 11
assert b.gram_defect() < 1e-12
# spectrum 2k + d_eff
assert b.eigenvalues() == [2.0 * k + s.d_eff for k in range(11)]

q, p, d_eff, ok = ds.admissible_p(1.5, 2.0)
assert ok and abs(2 / p + d_eff / q - d_eff) < 1e-12

r = ds.strichartz([0.5], 8, 1.5, 4, seed=3, time_nodes=64)
assert r.lhs > 0 and r.rhs > 0 and math.isclose(r.ratio, r.lhs / r.rhs, rel_tol=1e-12)
print(r)

lhs, rhs, ratio = ds.kss(0.0, 1.0, -0.5, 0.2, 1.0)
assert abs(ratio - 1.0) < 1e-8, ratio

base = ds.mhls_indicators(2, 1.5)
dil = ds.mhls_indicators(2, 1.5, scale=2.0)
assert abs(dil[2] / base[2] - 1.0) < 1e-8

diag, converged = ds.hartree(0.5, 6, 0.0, steps=8)
assert converged and len(diag) == 1

try:
    ds.Structure([-1.0])
except ValueError:
    pass
else:
    raise AssertionError("negative multiplicity accepted")

print("smoke test passed")
