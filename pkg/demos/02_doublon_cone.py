"""
Two bosons: the doublon cone
============================

Two bosons that start on the same site bind into a doublon when the on-site
interaction U is large. The bound pair still moves, but through a second-order
process with rate t2 = (sqrt(U^2 + 16) - U) / 4, so the pair component n2
spreads in a narrower inner cone than the single-particle component n1.
"""

import numpy as np

from bosewalk import ModelParams, TimeGrid, build_basis, make_product_state, simulate
from bosewalk.observables import growth_rate
from _plot import heatmap

basis = build_basis(25, 2)
psi0 = make_product_state(basis, [0, 0])
grid = TimeGrid(8.0, 0.1)

print(" U   n2 width rate   (sqrt(U^2+16)-U)/4   weight still paired at t=8")
for U in (0.0, 2.0, 4.0, 8.0):
    s, _ = simulate(basis, ModelParams(U=U), psi0, grid, ("components", "statistics"))
    late = s.times >= 2.0
    rate = growth_rate(s.times[late], s["width_n2"][late])
    paired = s["n2"][-1].sum() / 2
    print(f"{U:3.0f}   {rate:12.3f}   {(np.sqrt(U * U + 16) - U) / 4:18.3f}   {paired:10.3f}")
    if U == 4.0:
        heatmap("doublon_n2", s.times, s.sites, s["n2"], "n2, U=4, same-site start")
        heatmap("doublon_n1", s.times, s.sites, s["n1"], "n1, U=4, same-site start")
