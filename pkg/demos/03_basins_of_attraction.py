"""
Basins of attraction
====================

Random initial states in the bistable regime. The sign of the initial
opinion alone decides which opinionated endemic state is reached.
"""

from collections import Counter

from nodsis import ModelParams, State, basin_experiment, check_sign_invariance, integrate

params = ModelParams(beta_bar=0.75, delta=0.3, k_p=0.7, k_x=0.3, u0=0.7)

samples = basin_experiment(params, n_samples=100, seed=42)
tally = Counter((s.initial.x > 0, s.limit_class.value) for s in samples)
for (positive, cls), n in sorted(tally.items()):
    print(f"x(0) {'>' if positive else '<'} 0 -> {cls:9s} {n:3d} samples")

#%%
# A single trajectory keeps its opinion sign for all time.
traj = integrate(State(0.9, -0.05), params)
print(f"\nfrom (0.9, -0.05): limit {traj.limit.eq_class.value} at t = {traj.times[-1]:.1f}")
print("sign preserved:", check_sign_invariance(traj))
print("largest pre-clamp excursion:", traj.max_excursion)

#%%
# Below the first threshold everything dies out.
pre = basin_experiment(params.with_(beta_bar=0.25), n_samples=20, seed=1)
print("\nbeta_bar = 0.25:", Counter(s.limit_class.value for s in pre))
