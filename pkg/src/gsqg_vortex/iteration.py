"""Safeguarded rearrangement ascent shared by both solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AscentTrace:
    energies: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    reason: str = ""
    rejected: int = 0
    class_preserved: bool = True
    mirror_symmetric: bool = True


def ascend(op, field0, propose, linear=None, max_iter: int = 500, tol_E: float = 1e-10):
    """Iterate ``field <- propose(psi)`` while the objective does not decrease.

    The objective is (1/2) q.K q + linear.q with q = omega*m.  Potentials are
    updated incrementally from the cells whose value changed.  A proposal that
    lowers the objective by more than 1e-12 relative is rejected and ends the
    run; a proposal identical to the current field is an exact fixed point.

    ``propose(psi)`` returns ``(field, info)``.  Returns
    ``(field, psi, objective, last_info, trace)``.
    """
    fld = field0
    q = fld.weights
    psi = op.induced_potential(fld.values)
    lin = np.zeros_like(q) if linear is None else np.asarray(linear, dtype=float)
    E = 0.5 * float(q @ psi) + float(lin @ q)
    trace = AscentTrace(energies=[E])
    last_info = {}
    for it in range(max_iter):
        cand, info = propose(psi)
        trace.class_preserved &= cand.in_class()
        dq = cand.weights - q
        changed = np.flatnonzero(dq)
        info = dict(info, changed=int(changed.size))
        trace.steps.append(info)
        if changed.size == 0:
            last_info = info
            trace.converged, trace.reason = True, "fixed point"
            break
        psi_new = psi + op.potential(changed, dq[changed])
        qn = cand.weights
        E_new = 0.5 * float(qn @ psi_new) + float(lin @ qn)
        if E_new < E - 1e-12 * abs(E):
            trace.rejected += 1
            trace.converged, trace.reason = True, "non-ascent proposal rejected"
            break
        gain = E_new - E
        fld, q, psi, E = cand, qn, psi_new, E_new
        last_info = info
        trace.iterations = it + 1
        trace.energies.append(E)
        trace.mirror_symmetric &= fld.is_mirror_symmetric()
        if gain <= tol_E * abs(E):
            trace.converged, trace.reason = True, "energy stall"
            break
    else:
        trace.reason = "max iterations"
    return fld, psi, E, last_info, trace
