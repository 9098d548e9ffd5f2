"""Pilot books and pilot-contaminated channel estimation.

Pilots are exactly orthogonal, so the estimators compose the despread
result directly: the target's scaled channel, one term per contaminator
sharing the target's pilot, and receiver noise. ``despread`` simulates the
K-symbol training block explicitly and is kept as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import BB, BU, ChannelSet
from .deployment import BaseStation, User


@dataclass(frozen=True)
class PilotBook:
    sequences: np.ndarray  # (K, K), row k is psi_k

    @property
    def size(self) -> int:
        return self.sequences.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.sequences[k]


def make_pilot_book(k: int) -> PilotBook:
    """DFT pilots: unit-modulus entries, rows orthogonal with squared norm K."""
    if k < 1:
        raise ValueError("need at least one pilot")
    n = np.arange(k)
    seq = np.exp(-2j * np.pi * np.outer(n, n) / k)
    seq.setflags(write=False)
    return PilotBook(seq)


@dataclass(frozen=True)
class Contamination:
    source: int
    link: str  # "B2U" (a user's pilot) or "B2B" (a base station's pilot)
    amplitude: float


@dataclass(frozen=True)
class ChannelEstimate:
    bs: int
    user: int
    vector: np.ndarray
    provenance: tuple[Contamination, ...] = field(default_factory=tuple)

    @property
    def contaminated(self) -> bool:
        return bool(self.provenance)


@dataclass(frozen=True)
class DownlinkPilot:
    """A base station sending ``pilot_index`` precoded with unit-norm ``beam``."""

    bs: BaseStation
    pilot_index: int
    beam: np.ndarray


def _noise(m: int, noise_power: float, rng: np.random.Generator | None) -> np.ndarray:
    if noise_power <= 0:
        return np.zeros(m, dtype=complex)
    if rng is None:
        raise ValueError("noise_power > 0 requires an rng")
    x = rng.standard_normal((m, 2))
    return np.sqrt(noise_power / 2.0) * (x[:, 0] + 1j * x[:, 1])


def _clean(serving_bs: BaseStation, target: User, channels: ChannelSet) -> np.ndarray:
    alpha = channels.alpha(BU, serving_bs.id, target.id)
    return np.sqrt(alpha * target.ul_power) * channels.bu(serving_bs.id, target.id)


def estimate(
    serving_bs: BaseStation,
    target_user: User,
    channels: ChannelSet,
    users: list[User] = (),
    pilots: list[DownlinkPilot] = (),
    noise_power: float = 0.0,
    rng: np.random.Generator | None = None,
) -> ChannelEstimate:
    """Despread estimate of ``target_user`` at ``serving_bs``.

    Only uplink ``users`` and downlink ``pilots`` holding the target's pilot
    index contribute; a contaminating base station's effective vector is its
    B2B block applied to the transmitted (conjugated) beam.
    """
    est = _clean(serving_bs, target_user, channels)
    prov = []
    for u in users:
        if u.id == target_user.id or u.pilot_index != target_user.pilot_index:
            continue
        try:
            h = channels.bu(serving_bs.id, u.id)
            alpha = channels.alpha(BU, serving_bs.id, u.id)
        except KeyError as exc:
            raise ValueError(f"no channel from user {u.id} to base station {serving_bs.id}") from exc
        amp = np.sqrt(alpha * u.ul_power)
        est = est + amp * h
        prov.append(Contamination(u.id, "B2U", float(amp)))
    for p in pilots:
        if p.pilot_index != target_user.pilot_index:
            continue
        try:
            g = channels.bb(serving_bs.id, p.bs.id) @ np.conj(p.beam)
            alpha = channels.alpha(BB, serving_bs.id, p.bs.id)
        except KeyError as exc:
            raise ValueError(f"no channel from base station {p.bs.id} to {serving_bs.id}") from exc
        amp = np.sqrt(alpha * p.bs.tx_power)
        est = est + amp * g
        prov.append(Contamination(p.bs.id, "B2B", float(amp)))
    est = est + _noise(est.shape[0], noise_power, rng)
    return ChannelEstimate(serving_bs.id, target_user.id, est, tuple(prov))


def estimate_pcru(serving_bs, target_user, contaminating_users, channels, noise_power=0.0, rng=None):
    """Estimate when other cells' users send the target's pilot in the uplink."""
    return estimate(serving_bs, target_user, channels, users=contaminating_users, noise_power=noise_power, rng=rng)


def estimate_pcrd(serving_bs, target_user, contaminating_pilots, channels, noise_power=0.0, rng=None):
    """Estimate when other base stations send the target's pilot in the downlink."""
    return estimate(serving_bs, target_user, channels, pilots=contaminating_pilots, noise_power=noise_power, rng=rng)


def despread(received: np.ndarray, book: PilotBook, k: int) -> np.ndarray:
    """Correlate an (antennas x K) training block with pilot ``k``.

    Scaled by 1/K so that a lone transmitter sending ``psi_k`` through
    channel ``a`` returns ``a``.
    """
    psi = book[k]
    return received @ np.conj(psi) / book.size


def training_block(terms: list[tuple[np.ndarray, int]], book: PilotBook) -> np.ndarray:
    """Received block for effective channel vectors each sending their pilot."""
    m = terms[0][0].shape[0]
    y = np.zeros((m, book.size), dtype=complex)
    for a, k in terms:
        y += np.outer(a, book[k])
    return y
