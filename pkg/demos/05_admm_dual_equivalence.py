"""Relaxed ADMM and its exact correspondence to splitting on the dual.

ADMM with scaled dual variables on  min f(x) + g(y) s.t. Ax + By = c  is
the Douglas-Rachford iteration applied to the negative Fenchel dual, with
the dual iterate recoverable as z = gamma*(u - B y).  The demo runs both
from a matched initialization and shows the trajectories coincide to
floating-point accuracy, then uses the correspondence to certify the
measured contraction of the primal iteration.
"""

import numpy as np

from proxsplit import (
    EqConstrainedProblem,
    Quadratic,
    WeightedL1,
    admm_solve,
    contraction_factor,
    rate_bound,
    verify_dual_equivalence,
)
from proxsplit.bench import problem_dual_regularity

rng = np.random.default_rng(7)
n = 6
m = rng.normal(size=(n, n))
f = Quadratic(m @ m.T + np.eye(n), rng.normal(size=n))
g = WeightedL1(rng.uniform(0.2, 1.0, size=n))
a = rng.normal(size=(n, n)) + 3.0 * np.eye(n)
c = rng.normal(size=n)
problem = EqConstrainedProblem(f=f, g=g, A=a, B=-np.eye(n), c=c)

print("max ||z_dual^k - gamma*(u^k - B y^k)|| over 50 iterations:")
z0 = rng.normal(size=n)
for gamma in (0.1, 1.0, 10.0):
    for alpha in (0.5, 1.0):
        dev = verify_dual_equivalence(problem, gamma, alpha, 50, z0)
        print(f"  gamma={gamma:5} alpha={alpha:4}  deviation={dev:.2e}")

# solve and certify
dual = problem_dual_regularity(problem)
gamma_star = 1.0 / np.sqrt(dual.sigma_hat * dual.beta_hat)
print(f"\ndual constants: kappa_hat={dual.kappa_hat:.2f}, "
      f"gamma*={gamma_star:.4f}")

x, y, u, trace = admm_solve(problem, gamma_star, alpha=1.0, tol=1e-12,
                            max_iters=5000)
print(f"solved: {trace.converged} in {trace.iterations} iterations, "
      f"primal residual {np.linalg.norm(a @ x - y - c):.2e}")

# measured contraction in the dual coordinate vs the certified bound
_, _, _, measured = admm_solve(problem, gamma_star, alpha=1.0, tol=1e-12,
                               max_iters=5000, z0=z0,
                               reference=trace.z_final)
bound = rate_bound(contraction_factor(dual.as_regularity(), gamma_star), 1.0)
dist = measured.distances_to(trace.z_final)
ratios = [r for k, r in enumerate(measured.contraction_ratios)
          if not np.isnan(r) and dist[k] > 0.03 * dist[0]]
print(f"certified rate bound {bound:.4f}; measured ratios: "
      f"median {np.median(ratios):.4f}, max {max(ratios):.4f}")
