"""
Entanglement growth with and without interactions
=================================================

Two bosons in a localising quasiperiodic potential. Without interactions
the entanglement entropy across the central bond saturates quickly. With
U != 0 it keeps creeping up roughly like log t, a few-body echo of
many-body localisation. The ensemble size here is small so the script runs
in about a minute; the acceptance test uses 200 phases per curve.
"""

import numpy as np

from bosewalk import InitialSpec, ModelParams, TimeGrid, build_basis
from bosewalk.ensemble import EnsembleSpec, run_ensemble
from _plot import curves

basis = build_basis(12, 2)
times = np.unique(np.concatenate([np.linspace(0, 20, 11), np.geomspace(20, 200, 20)]))
grid = TimeGrid.explicit(times)
fit = times >= 20

curves_ = {}
for U in (0.0, 2.0):
    avg = run_ensemble(basis, ModelParams(U=U, lam=2.0), InitialSpec("adjacent"), grid,
                       EnsembleSpec(40, seed=1), ("density", "entropy"), cut=0)
    S = avg.mean["entropy"]
    slope = np.polyfit(np.log(times[fit]), S[fit], 1)[0]
    curves_[f"U={U}"] = S
    print(f"U={U}: S(20) = {S[times == 20][0]:.3f}  S(200) = {S[-1]:.3f}  dS/dln t = {slope:.3f}")

curves("entropy_growth", times, curves_, ylabel="mean S_A", logx=True)
