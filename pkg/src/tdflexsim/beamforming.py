"""MRT precoding, MRC combining and per-slot SINR.

A base station's beam ``w`` is its normalized channel estimate. It is
transmitted as ``conj(w)`` through the downlink row ``h.T``, so a user
receives amplitude ``h^H w``; on receive the same ``w`` is the combiner.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import BB, BU, UU, ChannelSet
from .frame import RegimeLabel


class Direction(str, enum.Enum):
    DL = "DL"
    UL = "UL"


@dataclass(frozen=True)
class SirSample:
    value: float
    direction: Direction
    measured_at: int  # user id for DL, base-station id for UL
    link_user: int
    slot: int = 0
    regime: RegimeLabel | None = None

    @property
    def db(self) -> float:
        return 10.0 * np.log10(self.value) if self.value > 0 else -np.inf


@dataclass(frozen=True)
class Transmitter:
    """An element radiating in a slot: a base station with a beam, or a user."""

    kind: str  # "bs" or "ue"
    id: int
    power: float
    beam: np.ndarray | None = None


def mrt_precoder(estimate) -> np.ndarray:
    h = np.asarray(getattr(estimate, "vector", estimate))
    norm = np.linalg.norm(h)
    if norm == 0:
        raise ValueError("cannot precode on a zero channel estimate")
    return h / norm


def mrc_combine(estimate, received) -> complex:
    h = np.asarray(getattr(estimate, "vector", estimate))
    y = np.asarray(received)
    if h.shape != y.shape:
        raise ValueError(f"estimate shape {h.shape} does not match received {y.shape}")
    norm = np.linalg.norm(h)
    if norm == 0:
        raise ValueError("cannot combine on a zero channel estimate")
    return complex(np.vdot(h, y) / norm)


def _at_user(tx: Transmitter, user: int, channels: ChannelSet) -> float:
    if tx.kind == "bs":
        h = channels.bu(tx.id, user)
        return tx.power * channels.alpha(BU, tx.id, user) * abs(np.vdot(h, tx.beam)) ** 2
    if tx.id == user:
        return 0.0
    return tx.power * channels.alpha(UU, tx.id, user) * abs(channels.uu(tx.id, user)) ** 2


def _at_bs(tx: Transmitter, bs: int, combiner: np.ndarray, channels: ChannelSet) -> float:
    if tx.kind == "ue":
        h = channels.bu(bs, tx.id)
        return tx.power * channels.alpha(BU, bs, tx.id) * abs(np.vdot(combiner, h)) ** 2
    if tx.id == bs:
        return 0.0
    g = channels.bb(bs, tx.id) @ np.conj(tx.beam)
    return tx.power * channels.alpha(BB, bs, tx.id) * abs(np.vdot(combiner, g)) ** 2


def downlink_sinr(
    target_user: int,
    serving_bs: int,
    transmitters: list[Transmitter],
    channels: ChannelSet,
    noise_power: float = 0.0,
    slot: int = 0,
    regime: RegimeLabel | None = None,
) -> SirSample:
    """SINR at ``target_user`` served by ``serving_bs``; everything else co-slot interferes."""
    signal = None
    interference = 0.0
    for tx in transmitters:
        p = _at_user(tx, target_user, channels)
        if tx.kind == "bs" and tx.id == serving_bs:
            signal = p
        else:
            interference += p
    if signal is None:
        raise ValueError(f"serving base station {serving_bs} is not transmitting downlink")
    denom = interference + noise_power
    value = np.inf if denom == 0 else signal / denom
    return SirSample(float(value), Direction.DL, target_user, target_user, slot, regime)


def uplink_sinr(
    serving_bs: int,
    combiner,
    target_user: int,
    transmitters: list[Transmitter],
    channels: ChannelSet,
    noise_power: float = 0.0,
    slot: int = 0,
    regime: RegimeLabel | None = None,
) -> SirSample:
    """Post-MRC SINR at ``serving_bs`` for ``target_user``.

    ``combiner`` is the channel estimate (or its normalized beam); uplink
    power boosts are carried in each transmitter's ``power``.
    """
    v = mrt_precoder(combiner)
    signal = None
    interference = 0.0
    for tx in transmitters:
        p = _at_bs(tx, serving_bs, v, channels)
        if tx.kind == "ue" and tx.id == target_user:
            signal = p
        else:
            interference += p
    if signal is None:
        raise ValueError(f"user {target_user} is not transmitting uplink")
    denom = interference + noise_power
    value = np.inf if denom == 0 else signal / denom
    return SirSample(float(value), Direction.UL, serving_bs, target_user, slot, regime)
