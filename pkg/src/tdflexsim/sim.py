"""Experiment drivers: frame loop, two-cell regime sweep, HetNet rate CDFs, antenna sweep.

Randomness is split deterministically from the master seed with
``SeedSequence(seed, spawn_key=(drop, ...))``: topology ``(drop, 0)``,
loads ``(drop, frame, 1)``, channels ``(drop, frame, 2, link...)``. Drops are
independent, so they may run in any order or in parallel.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .beamforming import Direction, SirSample, Transmitter, downlink_sinr, mrt_precoder, uplink_sinr
from .channel import BB, BU, UU, ChannelSet, keyed_rng
from .config import SimConfig
from .deployment import BaseStation, NetworkTopology, Tier, User, deploy, draw_loads
from .frame import FrameMatrix, SlotMode, validate
from .tdflex import SchedulerParams, tdflex_schedule
from .tdlte import tdlte_schedule
from .training import DownlinkPilot, estimate

logger = logging.getLogger(__name__)

NOISE_KEY = 4


class Scheduler(str, enum.Enum):
    TDFLEX = "TDFLEX"
    TDLTE = "TDLTE"


SCHEDULERS = {Scheduler.TDFLEX: tdflex_schedule, Scheduler.TDLTE: tdlte_schedule}


def rate_from_sinr(sinr):
    s = np.asarray(sinr, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINR must be non-negative")
    r = np.log2(1.0 + s)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class FramePlan:
    """Who is served in a frame: one active user per cell, the macro's per slot."""

    active: dict[int, User]  # small-cell id -> user trained and served this frame
    macro_slots: list[User | None]  # macro user per data slot 1..N
    contaminated: frozenset[int]  # macro user ids whose pilot collides with an active small-cell user


def plan_frame(topology: NetworkTopology, frame_index: int, n_data: int) -> FramePlan:
    active = {}
    for bs in topology.smalls:
        users = topology.cell_users(bs.id)
        if users:
            active[bs.id] = users[frame_index % len(users)]
    macro_users = topology.cell_users(0)
    by_pilot = {u.pilot_index: u for u in macro_users}
    colliding = sorted({u.pilot_index for u in active.values()} & set(by_pilot))
    if colliding:
        slots = [by_pilot[colliding[(t - 1) % len(colliding)]] for t in range(1, n_data + 1)]
    elif macro_users:
        slots = [macro_users[(frame_index * n_data + t - 1) % len(macro_users)] for t in range(1, n_data + 1)]
    else:
        slots = [None] * n_data
    return FramePlan(active, slots, frozenset(by_pilot[k].id for k in colliding))


@dataclass(frozen=True)
class RunParams:
    gamma: float = 10.0
    noise_power: float = 0.0
    training_noise_power: float | None = None

    @property
    def pilot_noise(self) -> float:
        return self.noise_power if self.training_noise_power is None else self.training_noise_power


def run_frame(
    topology: NetworkTopology,
    channels: ChannelSet,
    frame: FrameMatrix,
    params: RunParams,
    plan: FramePlan,
) -> list[SirSample]:
    """Train in slot 0, then evaluate every active link in each data slot."""
    problems = validate(frame)
    if problems:
        raise ValueError("invalid frame: " + "; ".join(problems))
    if frame.num_cells != topology.num_cells:
        raise ValueError(f"frame has {frame.num_cells} rows, topology {topology.num_cells} cells")

    noise = params.pilot_noise
    macro = topology.macro
    # slot 0: small cells first, their beams feed downlink pilots
    small_est, small_beam = {}, {}
    for b, u in plan.active.items():
        bs = topology.bs(b)
        est = estimate(bs, u, channels, noise_power=noise, rng=channels.rng(NOISE_KEY, b, u.id))
        small_est[b] = est
        small_beam[b] = mrt_precoder(est)
    up_pilots = [u for b, u in plan.active.items() if frame.training(b) == SlotMode.S_U]
    dn_pilots = [
        DownlinkPilot(topology.bs(b), u.pilot_index, small_beam[b])
        for b, u in plan.active.items()
        if frame.training(b) == SlotMode.S_D
    ]
    macro_est = {}
    for u in plan.macro_slots:
        if u is not None and u.id not in macro_est:
            macro_est[u.id] = estimate(
                macro, u, channels, users=up_pilots, pilots=dn_pilots,
                noise_power=noise, rng=channels.rng(NOISE_KEY, 0, u.id),
            )

    samples = []
    for t in range(1, frame.n_data + 1):
        mu = plan.macro_slots[t - 1]
        macro_beam = mrt_precoder(macro_est[mu.id]) if mu is not None else None
        colliders = [b for b, u in plan.active.items() if mu is not None and u.pilot_index == mu.pilot_index]

        txs = []
        if mu is not None:
            if frame.mode(0, t) == SlotMode.D:
                txs.append(Transmitter("bs", 0, macro.tx_power, macro_beam))
            else:
                txs.append(Transmitter("ue", mu.id, mu.ul_power))
        for b, u in plan.active.items():
            if frame.mode(b, t) == SlotMode.D:
                txs.append(Transmitter("bs", b, topology.bs(b).tx_power, small_beam[b]))
            else:
                boost = params.gamma if frame.boosts[b, t] else 1.0
                txs.append(Transmitter("ue", u.id, u.ul_power * boost))

        if mu is not None:
            regime = None
            if colliders:
                regime = max((frame.regime(b, t) for b in colliders), key=lambda r: r.priority)
            if frame.mode(0, t) == SlotMode.D:
                samples.append(downlink_sinr(mu.id, 0, txs, channels, params.noise_power, t, regime))
            else:
                samples.append(
                    uplink_sinr(0, macro_est[mu.id], mu.id, txs, channels, params.noise_power, t, regime)
                )
        for b, u in plan.active.items():
            regime = frame.regime(b, t) if b in colliders else None
            if frame.mode(b, t) == SlotMode.D:
                samples.append(downlink_sinr(u.id, b, txs, channels, params.noise_power, t, regime))
            else:
                samples.append(uplink_sinr(b, small_est[b], u.id, txs, channels, params.noise_power, t, regime))
    return samples


# ---------------------------------------------------------------- two-cell


@dataclass(frozen=True)
class TwoCellRow:
    ratio_db: float
    dl_rcr_db: float
    dl_icr_db: float
    ul_rcr_db: float
    ul_icr_db: float

    @property
    def dl_gap_db(self) -> float:
        return self.dl_rcr_db - self.dl_icr_db

    @property
    def ul_gap_db(self) -> float:
        return self.ul_rcr_db - self.ul_icr_db


def two_cell_draw(ratio_db: float, M: int, seed: int, draw: int, sbs_antennas: int = 2) -> dict[str, float]:
    """Linear SIRs of the four configurations for one channel draw.

    Macro (id 0) serves user 0; the small cell (id 1) serves user 1 and
    contaminates the macro estimate with a downlink pilot. Serving links have
    unit gain and every cross link has gain 1/ratio, so the training-phase
    serving-to-interfering power ratio equals ``ratio``.
    """
    cross = 10.0 ** (-ratio_db / 10.0)

    def gain(kind, a, b):
        if kind == BU and a == b:
            return 1.0
        return cross

    ch = ChannelSet({0: M, 1: sbs_antennas}, gain, seed, key=(draw,))
    macro = BaseStation(0, Tier.MACRO, np.zeros(2), M, 1.0)
    sbs = BaseStation(1, Tier.SMALL, np.zeros(2), sbs_antennas, 1.0)
    mu = User(0, np.zeros(2), 0, 0, 1.0)
    su = User(1, np.zeros(2), 1, 0, 1.0)

    s_est = estimate(sbs, su, ch)
    s_beam = mrt_precoder(s_est)
    m_est = estimate(macro, mu, ch, pilots=[DownlinkPilot(sbs, 0, s_beam)])
    m_beam = mrt_precoder(m_est)

    macro_dl = Transmitter("bs", 0, 1.0, m_beam)
    macro_ul = Transmitter("ue", 0, 1.0)
    small_dl = Transmitter("bs", 1, 1.0, s_beam)
    small_ul = Transmitter("ue", 1, 1.0)
    return {
        # macro downlink slot, measured at the small-cell receiver
        "dl_rcr": downlink_sinr(1, 1, [macro_dl, small_dl], ch).value,
        "dl_icr": uplink_sinr(1, s_est, 1, [macro_dl, small_ul], ch).value,
        # macro uplink slot, measured at the macro array
        "ul_rcr": uplink_sinr(0, m_est, 0, [macro_ul, small_ul], ch).value,
        "ul_icr": uplink_sinr(0, m_est, 0, [macro_ul, small_dl], ch).value,
    }


def run_two_cell(cfg: SimConfig, M: int | None = None, draws: int | None = None) -> list[TwoCellRow]:
    """Mean SIR (averaged in dB) per contamination ratio for RCR and ICR under PCR-D."""
    M = cfg.M if M is None else M
    draws = cfg.two_cell_draws if draws is None else draws
    rows = []
    for ratio in cfg.two_cell_ratios_db:
        acc = {k: [] for k in ("dl_rcr", "dl_icr", "ul_rcr", "ul_icr")}
        for d in range(draws):
            for k, v in two_cell_draw(ratio, M, cfg.seed, d, cfg.sbs_antennas).items():
                acc[k].append(v)
        mean_db = {k: float(np.mean(10 * np.log10(v))) for k, v in acc.items()}
        rows.append(TwoCellRow(ratio, mean_db["dl_rcr"], mean_db["dl_icr"], mean_db["ul_rcr"], mean_db["ul_icr"]))
    return rows


def two_cell_csv(rows: list[TwoCellRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ratio_db", "dl_rcr_db", "dl_icr_db", "ul_rcr_db", "ul_icr_db"])
    for r in rows:
        w.writerow([f"{r.ratio_db:g}"] + [f"{x:.6f}" for x in (r.dl_rcr_db, r.dl_icr_db, r.ul_rcr_db, r.ul_icr_db)])
    return buf.getvalue()


# ---------------------------------------------------------------- HetNet


@dataclass(frozen=True)
class RateSample:
    user: int
    direction: Direction
    rate: float
    frame: int
    scheduler: Scheduler
    drop: int = 0
    slot: int = 0
    M: int = 0


@dataclass
class ExperimentResult:
    samples: dict[tuple[str, str, int], np.ndarray]
    seed: int
    config_hash: str
    drops: int
    records: list[RateSample] = field(default_factory=list, repr=False)

    def rates(self, scheduler, direction, M) -> np.ndarray:
        return self.samples[(Scheduler(scheduler).value, Direction(direction).value, int(M))]


def _reported(sample: SirSample, topology: NetworkTopology, plan: FramePlan) -> bool:
    # small-cell users in downlink; pilot-colliding macro users in uplink at the MBS
    if sample.direction == Direction.DL:
        return topology.users[sample.link_user].serving_bs != 0
    return sample.measured_at == 0 and sample.link_user in plan.contaminated


def simulate_drop(cfg: SimConfig, drop: int, M: int) -> list[RateSample]:
    topo = deploy(
        keyed_rng(cfg.seed, drop, 0),
        area_km2=cfg.area_km2, lambda_sc=cfg.lambda_sc, lambda_u=cfg.lambda_u,
        macro_antennas=M, sbs_antennas=cfg.sbs_antennas,
        p_mbs=cfg.p_mbs, p_sbs=cfg.p_sbs, p_ue=cfg.p_ue, alpha_e=cfg.alpha_e,
    )
    sched = SchedulerParams(n_data=cfg.N_data, gamma=cfg.gamma)
    run = RunParams(gamma=cfg.gamma, noise_power=cfg.noise_power)
    out = []
    for f in range(cfg.frames):
        loads = draw_loads(topo.num_cells, cfg.N_data, keyed_rng(cfg.seed, drop, f, 1))
        plan = plan_frame(topo, f, cfg.N_data)
        if not plan.active:
            continue
        channels = ChannelSet.for_topology(topo, cfg.alpha_e, cfg.seed, key=(drop, f, 2))
        for name, schedule in SCHEDULERS.items():
            frame = schedule(loads, sched)
            for s in run_frame(topo, channels, frame, run, plan):
                if _reported(s, topo, plan):
                    out.append(RateSample(s.link_user, s.direction, rate_from_sinr(s.value), f, name, drop, s.slot, M))
    return out


def _drop_job(args):
    cfg, drop, M = args
    return simulate_drop(cfg, drop, M)


def _collect(cfg: SimConfig, Ms: list[int], threads: int = 1) -> ExperimentResult:
    jobs = [(cfg, d, M) for M in Ms for d in range(cfg.drops)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_drop_job, jobs))
    else:
        chunks = [_drop_job(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    samples = {}
    for sched in Scheduler:
        for direction in Direction:
            for M in Ms:
                vals = [r.rate for r in records if r.scheduler == sched and r.direction == direction and r.M == M]
                samples[(sched.value, direction.value, M)] = np.sort(np.asarray(vals, dtype=float))
    return ExperimentResult(samples, cfg.seed, cfg.config_hash(), cfg.drops, records)


def run_hetnet(cfg: SimConfig, threads: int = 1) -> ExperimentResult:
    return _collect(cfg, [cfg.M], threads)


def run_antenna_sweep(cfg: SimConfig, M_list=None, threads: int = 1) -> ExperimentResult:
    return _collect(cfg, list(cfg.M_list if M_list is None else M_list), threads)


def cdf_rows(result: ExperimentResult):
    for (sched, direction, M), rates in sorted(result.samples.items()):
        n = len(rates)
        for i, r in enumerate(rates, start=1):
            yield sched, direction, M, float(r), i / n


def export_cdf(result: ExperimentResult, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheduler", "direction", "M", "rate_bps_hz", "cdf"])
        for sched, direction, M, r, c in cdf_rows(result):
            w.writerow([sched, direction, M, f"{r:.10g}", f"{c:.10g}"])
    return path
