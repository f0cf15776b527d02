"""
Prime-power weighted solution counting
======================================

Weighting the inequality by p-adic absolute values reshapes which q count
as solutions.  The effective threshold is psi(q) divided by the weights,
and the matching weighted log-sum tracks whether solutions keep coming.
"""

from diolab import (
    ExperimentConfig,
    WeightFn,
    linear_forms_count,
    padic_weighted_psi,
    power_log,
    run_padic,
    solution_counts,
)
from diolab.sampler import sample_points

base = power_log(1.0, 1.0, 0.0)  # psi(q) = 1/q

# f(t) = t on |q|_2 rewards highly even q: |8|_2 = 1/8 divides psi by 1/8,
# boosting the threshold eightfold at q = 8.
weighted = padic_weighted_psi(base, [2], [WeightFn("power", 1.0)])
print("psi(8) =", base(8), " -> weighted threshold at 8:", weighted(8))
print("psi(9) =", round(base(9), 6), " -> weighted threshold at 9:", round(weighted(9), 6))

# Counts along a grid for a handful of sampled points (non-strict
# comparison, matching the weighted-inequality convention).
cfg = ExperimentConfig(family=base, n=1, Q=2000, samples=1, seed=3)
report = run_padic(cfg, [2], [WeightFn("power", 1.0)], n_alphas=3)
print("\nsolution counts for 3 sampled alphas:")
for i, curve in enumerate(report.count_curves):
    print(f"  alpha[{i}] ~ {report.alphas[i][0]:.4f}:", curve[-4:])
print("weighted log-sum partials:", [(q, round(s, 2)) for q, s in report.sum_curve[-4:]])

# Identity weights collapse back to the plain counter.
plain = run_padic(cfg, [2], [WeightFn("const", 1.0)], n_alphas=1)
x = sample_points(cfg.seed, 0, 1, 1)[0]
direct = solution_counts(x, base, cfg.checkpoints, strict=False)
print("\nidentity weights match the plain counter:", plain.count_curves[0] == direct)

# The same membership idea generalizes to systems of linear forms q X + p
# with integer vectors q; at desk scale the enumeration is explicit.
import numpy as np

X = np.array([[0.318, 0.774]])
print("\nlinear-forms solutions, |q| <= 40:", linear_forms_count(X, power_log(0.6, 0.8, 0), 40))
print("same with coprime numerators:    ", linear_forms_count(X, power_log(0.6, 0.8, 0), 40, coprime=True))
