"""
Bifurcation diagram in beta_bar
===============================

Sweeps beta_bar on a 400-point grid and prints the detected events and a
coarse text rendering of the branches. The CSV export is what a plotting
script would consume.
"""

import csv
import sys

from nodsis import ModelParams, SweepConfig, export_diagram, sweep
from nodsis.bifurcation import BRANCH_COLUMNS

for u0 in (0.2, 0.7):
    base = ModelParams(beta_bar=0.5, delta=0.3, k_p=0.7, k_x=0.3, u0=u0)
    d = sweep(SweepConfig(base))
    print(f"\nu0 = {u0}: {len(d.branches)} branches")
    for ev in d.detected_bifurcations:
        names = "/".join(c.value for c in ev.classes)
        print(f"  {ev.kind:13s} at beta_bar = {ev.value:.8f}  ({names})")

    # every 40th grid point, one column per branch
    for br in d.branches:
        pts = br.points[::40]
        cells = " ".join(f"{pt.value:.2f}:{pt.p:.2f}{'s' if pt.stability.value == 'stable' else 'u'}" for pt in pts)
        print(f"  {br.eq_class.value:9s} {cells}")

#%%
# Tabular export, first rows only.
rows, events = export_diagram(d)
w = csv.writer(sys.stdout)
w.writerow(BRANCH_COLUMNS)
w.writerows(rows[:5])
