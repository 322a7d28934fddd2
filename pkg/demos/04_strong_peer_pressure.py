"""
Strong peer pressure: opinion-driven eradication
================================================

With k_x above 1/3 the opinion equation gains infection-free opinionated
fixed points. The averse one is stable, so populations that start averse
eliminate the disease while risk seekers settle at a high endemic level.
"""

import numpy as np

from nodsis import ModelParams, find_equilibria, integrate_many
from nodsis.equilibria import oife_opinions

params = ModelParams(beta_bar=0.75, delta=0.3, k_p=0.7, k_x=0.7, u0=0.9)

print("opinion levels with p = 0 and dx = 0:", np.round(oife_opinions(params), 6))
for e in find_equilibria(params):
    print(f"  {e.eq_class.value:10s} p={e.p:.6f} x={e.x:+.6f}  {e.stability.value}")

#%%
# Note the OIFE opinions do not move with beta_bar or delta.
for beta, delta in ((0.4, 0.1), (0.95, 0.6)):
    print(beta, delta, np.round(oife_opinions(params.with_(beta_bar=beta, delta=delta)), 12))

#%%
rng = np.random.default_rng(42)
init = np.column_stack([rng.uniform(0.05, 1, 8), np.linspace(-0.9, 0.9, 8)])
for (p0, x0), t in zip(init, integrate_many(init, params, record=False)):
    print(f"start ({p0:.2f}, {x0:+.2f}) -> p = {t.final.p:.3g}, x = {t.final.x:+.4f}")
