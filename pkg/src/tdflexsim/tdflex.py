"""TDFLEX: per-small-cell training path and slot placement against the macro row."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .deployment import LoadDistribution
from .frame import CellDecision, ContaminationMode, FrameMatrix

DISCARD = None


@dataclass(frozen=True)
class SchedulerParams:
    n_data: int = 8
    gamma: float = 10.0  # linear uplink power multiplier on boosted slots
    b2b_guard: bool = True

    def __post_init__(self):
        if self.n_data < 1:
            raise ValueError("n_data must be >= 1")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")


def _check_counts(n_macro, n_small, n_data):
    for nd, nu in (n_macro, n_small):
        if nd < 0 or nu < 0 or nd + nu != n_data:
            raise ValueError(f"slot counts ({nd}, {nu}) do not sum to N_data={n_data}")


def collisions_pcrd(n_macro, n_small, n_data, b2b_guard=True):
    """ICR slots when the small cell trains in downlink; DISCARD on macro-D/small-U overlap."""
    _check_counts(n_macro, n_small, n_data)
    if b2b_guard and n_macro[0] > n_small[0]:
        return DISCARD
    return n_data - (min(n_macro[0], n_small[0]) + min(n_macro[1], n_small[1]))


def collisions_pcru(n_macro, n_small, n_data):
    """ICR slots when the small cell trains in uplink."""
    _check_counts(n_macro, n_small, n_data)
    return n_data - (min(n_macro[0], n_small[1]) + min(n_macro[1], n_small[0]))


def tdflex_schedule(loads: LoadDistribution, params: SchedulerParams = SchedulerParams()) -> FrameMatrix:
    if loads.n_data != params.n_data:
        raise ValueError(f"loads built for N_data={loads.n_data}, scheduler configured for {params.n_data}")
    nd = np.asarray(loads.n_d, dtype=np.int64)
    if params.b2b_guard:
        modes, boosts, chosen, c_pcrd, c_pcru = _kernels.tdflex_fill(nd, params.n_data)
    else:
        modes, boosts, chosen, c_pcrd, c_pcru = _fill_unguarded(nd, params.n_data)
    frame = FrameMatrix(modes, boosts)
    frame.decisions = _decisions(chosen, c_pcrd, c_pcru, boosts)
    return frame


def _decisions(chosen, c_pcrd, c_pcru, boosts):
    out = []
    for b in range(1, len(chosen)):
        out.append(
            CellDecision(
                cell_id=b,
                c_pcrd=None if c_pcrd[b] < 0 else int(c_pcrd[b]),
                c_pcru=int(c_pcru[b]),
                chosen=ContaminationMode.PCR_D if chosen[b] == 0 else ContaminationMode.PCR_U,
                boosts=int(np.count_nonzero(boosts[b])),
            )
        )
    return out


def _fill_unguarded(nd, n_data):
    # guard disabled: PCR-D competes on its collision count alone
    modes, boosts, chosen, c_pcrd, c_pcru = (np.array(a) for a in _kernels.tdflex_fill(nd, n_data))
    ndm = int(nd[0])
    slots = np.arange(1, n_data + 1)
    for b in range(1, len(nd)):
        nds = int(nd[b])
        cd = collisions_pcrd((ndm, n_data - ndm), (nds, n_data - nds), n_data, b2b_guard=False)
        c_pcrd[b] = cd
        if chosen[b] == 1 and cd <= c_pcru[b]:
            chosen[b] = 0
            modes[b, 0] = 1
            modes[b, 1:] = np.where(slots <= nds, 3, 2)
            boosts[b, :] = False
    return modes, boosts, chosen, c_pcrd, c_pcru
