"""Flexible-TDD massive-MIMO HetNet simulator with the TDFLEX frame scheduler."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .beamforming import Direction, SirSample, downlink_sinr, mrc_combine, mrt_precoder, uplink_sinr
from .channel import ChannelSet, draw_fading, link_gain, reciprocal
from .config import SimConfig, parse_config
from .deployment import (
    BaseStation,
    LoadDistribution,
    NetworkTopology,
    User,
    assign_pilots,
    associate,
    deploy,
    draw_loads,
    pathloss,
    sample_ppp,
)
from .frame import FrameMatrix, RegimeLabel, SlotMode, classify_regime, count_icr_collisions, validate
from .sim import rate_from_sinr, run_antenna_sweep, run_frame, run_hetnet, run_two_cell
from .tdflex import SchedulerParams, collisions_pcrd, collisions_pcru, tdflex_schedule
from .tdlte import tdlte_schedule
from .training import estimate_pcrd, estimate_pcru, make_pilot_book
