"""Matrix exponentials by Pade approximation with scaling and squaring.

Compares the default (3,3) and the (6,6) approximants with scipy on a few
matrices, then shows the product chain that gives exp(D c h) at every
Dormand-Prince abscissa from a single Pade evaluation.
"""
import numpy as np
import scipy.linalg

from lldp import PadeOrder, exp_chain, expm, inf_norm

rng = np.random.default_rng(0)

print("relative error against scipy.linalg.expm")
print(f"{'norm':>6} {'kappa':>6} {'(3,3)':>10} {'(6,6)':>10}")
for norm in (0.1, 0.5, 2.0, 5.0, 50.0):
    a = rng.standard_normal((6, 6))
    a *= norm / inf_norm(a)
    exact = scipy.linalg.expm(a)
    m3, kappa = expm(a)
    m6, _ = expm(a, order=PadeOrder(6, 6))
    e3 = inf_norm(m3 - exact) / inf_norm(exact)
    e6 = inf_norm(m6 - exact) / inf_norm(exact)
    print(f"{norm:6.1f} {kappa:6d} {e3:10.2e} {e6:10.2e}")

# one Pade call, eight exponentials
d = rng.standard_normal((4, 4)) - 2.0 * np.eye(4)
h = 0.3
chain = exp_chain(d, h)
print(f"\nchain built with kappa = {chain.kappa}")
for c, m in chain.matrices.items():
    err = inf_norm(m - scipy.linalg.expm(d * float(c) * h)) / inf_norm(m)
    print(f"  c = {str(c):>5}: error {err:.1e}")
