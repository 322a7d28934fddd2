"""
Equilibria and regimes of the scalar model
==========================================

Walks through the four weak-peer-pressure regimes as the transmissibility
beta_bar grows, printing every equilibrium with its eigenvalues.
"""

import numpy as np

from nodsis import ModelParams, beta_star, find_beta0, find_equilibria, infection_ordering, regime

# Shared constants. Only beta_bar changes below.
base = ModelParams(beta_bar=0.5, delta=0.3, k_p=0.7, k_x=0.3, u0=0.7)

print("first transcritical   beta_bar = delta =", base.delta)
print("fold (OEE pair born)  beta_bar_0 =", find_beta0(base))
print("second transcritical  beta_bar* =", beta_star(base))

#%%
# One representative beta_bar per regime.
for beta in (0.25, 0.36, 0.44, 0.75):
    params = base.with_(beta_bar=beta)
    report = regime(params)
    print(f"\nbeta_bar = {beta}: {report.regime.value}")
    for e in report.equilibria:
        eig = ", ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in e.eigenvalues)
        print(f"  {e.eq_class.value:10s} p={e.p:.6f} x={e.x:+.6f}  [{eig}]  {e.stability.value}")

#%%
# In the bistable regime the opinion decides the infection level.
o = infection_ordering(base.with_(beta_bar=0.75))
print(f"\np_minus = {o.p_minus:.4f} < p_EE = {o.p_ee:.4f} < p_plus = {o.p_plus:.4f}")

#%%
# With low basal urgency the opinion never organises: SIS behaviour only.
low = base.with_(u0=0.2)
counts = {len(find_equilibria(low.with_(beta_bar=float(b)))) for b in np.linspace(0.05, 0.95, 19)}
print("equilibrium counts at u0 = 0.2:", sorted(counts))
