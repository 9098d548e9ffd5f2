"""TD-LTE baseline: per-cell nearest reference DL:UL split, uplink training everywhere."""

from __future__ import annotations

import numpy as np

from .deployment import LoadDistribution, round_half_away
from .frame import FrameMatrix, SlotMode
from .tdflex import SchedulerParams

# Downlink fractions of TD-LTE configurations 0, 6, 1, 2/3, 4 without special subframes.
DL_FRACTIONS = (2 / 8, 3 / 8, 4 / 8, 6 / 8, 7 / 8)


def nearest_config(l_d: float) -> float:
    """Closest catalog fraction; ties go to the smaller downlink share."""
    best = DL_FRACTIONS[0]
    for f in DL_FRACTIONS[1:]:
        if abs(f - l_d) < abs(best - l_d) - 1e-12:
            best = f
    return best


def tdlte_schedule(loads: LoadDistribution, params: SchedulerParams = SchedulerParams()) -> FrameMatrix:
    n = params.n_data
    cells = len(loads.l_d)
    modes = np.empty((cells, n + 1), dtype=np.int8)
    modes[:, 0] = SlotMode.S_U
    slots = np.arange(1, n + 1)
    for b, l_d in enumerate(loads.l_d):
        nd = int(round_half_away(nearest_config(float(l_d)) * n))
        modes[b, 1:] = np.where(slots <= nd, SlotMode.D, SlotMode.U)
    return FrameMatrix(modes)
