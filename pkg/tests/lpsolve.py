"""Solve an exported LP model with scipy's MILP solver (test helper)."""
import numpy as np

from pwlship.mipexport import LpModel


def solve_lp_model(model: LpModel):
    """Return ``(objective, values)`` or ``None`` if infeasible.  SOS sets are not supported."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    if model.sos:
        raise ValueError("SOS sections need a solver with SOS support")
    names = sorted(model.variables)
    idx = {v: k for k, v in enumerate(names)}
    c = np.zeros(len(names))
    for v, a in model.objective.items():
        c[idx[v]] = a
    A = np.zeros((len(model.rows), len(names)))
    lo = np.full(len(model.rows), -np.inf)
    hi = np.full(len(model.rows), np.inf)
    for r, (terms, sense, rhs) in enumerate(model.rows.values()):
        for v, a in terms.items():
            A[r, idx[v]] = a
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs
    vlo = np.zeros(len(names))
    vhi = np.full(len(names), np.inf)
    for v, (a, b) in model.bounds.items():
        vlo[idx[v]], vhi[idx[v]] = a, b
    integ = np.zeros(len(names))
    for v in model.binaries:
        integ[idx[v]] = 1
        vlo[idx[v]], vhi[idx[v]] = max(vlo[idx[v]], 0), min(vhi[idx[v]], 1)
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=integ,
               bounds=Bounds(vlo, vhi), options={"mip_rel_gap": 1e-9})
    if res.status == 2 or res.x is None:
        return None
    return res.fun, dict(zip(names, res.x))
