"""
Second-moment lower bounds against exact union measures
=======================================================

The divergence-type lower bound (sum mu)^2 / (sum of pairwise
intersections) never exceeds the measure of the union.  In dimension 1
everything here is exact interval geometry, so the comparison is a hard
inequality, not a statistical one.
"""

import numpy as np

from diolab import (
    EventStats,
    bc_lower_bound,
    exact_event_stats_1d,
    power_log,
    truncated_union_1d,
)

# The classical coprime setting: E_q = {x : ||q x||' < 1/(4q)}.
f = power_log(0.25, 1.0, 0.0)
stats = exact_event_stats_1d(f, 1, 256, coprime=True)
print("exact singles, first few:", np.round(stats.singles[:6], 5))

print("\n     Q    bound     exact union")
for Q in (2, 8, 32, 128, 256):
    bound = bc_lower_bound(stats, Q)
    union = truncated_union_1d(f, 1, Q, coprime=True).value
    print(f"  {Q:4d}   {bound:.5f}   {union:.5f}")

# Synthetic independent events make the bound's limit visible: with
# mu(E_k) = 1/k the pair table is the product model and the bound creeps
# toward 1 as the truncation grows (after an early dip while the first
# huge events dominate).
mu = 1.0 / np.arange(1, 100_001)
model = EventStats(mu, "independence")
print("\nsynthetic independent events, mu(E_k) = 1/k:")
for Q in (16, 256, 4096, 65_536, 100_000):
    print(f"  Q={Q:6d}  bound {bc_lower_bound(model, Q):.5f}")
