"""Reciprocal Rayleigh block-fading channels.

Conventions: a base-station/user channel is stored as the uplink column
``h`` (BS antennas <- user); the downlink row is ``h.T``. A BS/BS block is
stored once per unordered pair and transposed for the reverse direction.
Every link draws from its own RNG stream keyed by ``(seed, key, link)``,
so realizations do not depend on the order in which links are requested,
and an array of M antennas is a prefix of any larger array drawn under the
same key.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .deployment import NetworkTopology, link_distance, pathloss

BU, BB, UU = 1, 2, 3


def draw_fading(rx_antennas: int, tx_antennas: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. CN(0, 1) matrix of shape (rx, tx)."""
    if rx_antennas < 1 or tx_antennas < 1:
        raise ValueError("channel dimensions must be >= 1")
    x = rng.standard_normal((rx_antennas, tx_antennas, 2))
    return (x[..., 0] + 1j * x[..., 1]) / np.sqrt(2.0)


def reciprocal(h: np.ndarray) -> np.ndarray:
    """Reverse-direction channel: the plain (non-conjugate) transpose."""
    return np.asarray(h).T


def link_gain(h: np.ndarray, alpha: float, tx_power: float) -> np.ndarray:
    """Scale a small-scale channel by the amplitude sqrt(alpha * P)."""
    if alpha <= 0 or tx_power <= 0:
        raise ValueError("alpha and tx_power must be positive")
    return np.sqrt(alpha * tx_power) * h


def keyed_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


GainFn = Callable[[int, int, int], float]


class ChannelSet:
    """Lazily drawn channels for one frame, immutable once drawn.

    ``antennas`` maps base-station id to array size; ``gain(kind, a, b)``
    returns the linear large-scale gain of a link (symmetric in a, b).
    """

    def __init__(self, antennas: dict[int, int], gain: GainFn, seed: int, key: tuple[int, ...] = ()):
        self.antennas = dict(antennas)
        self._gain = gain
        self.seed = int(seed)
        self.key = tuple(key)
        self._cache: dict[tuple[int, int, int], np.ndarray] = {}

    @classmethod
    def for_topology(cls, topology: NetworkTopology, alpha_e: float, seed: int, key=()) -> "ChannelSet":
        bs_pos = {b.id: b.position for b in topology.base_stations}
        ue_pos = {u.id: u.position for u in topology.users}

        def gain(kind, a, b):
            if kind == BU:
                return pathloss(link_distance(bs_pos[a], ue_pos[b]), alpha_e)
            if kind == BB:
                return pathloss(link_distance(bs_pos[a], bs_pos[b]), alpha_e)
            return pathloss(link_distance(ue_pos[a], ue_pos[b]), alpha_e)

        antennas = {b.id: b.antennas for b in topology.base_stations}
        return cls(antennas, gain, seed, key)

    def rng(self, *key: int) -> np.random.Generator:
        return keyed_rng(self.seed, *self.key, *key)

    def _draw(self, kind, a, b, rows, cols):
        k = (kind, a, b)
        h = self._cache.get(k)
        if h is None:
            h = draw_fading(rows, cols, self.rng(kind, a, b))
            h.setflags(write=False)
            self._cache[k] = h
        return h

    def bu(self, bs: int, user: int) -> np.ndarray:
        """Uplink vector from ``user`` into the array of ``bs``."""
        return self._draw(BU, bs, user, self.antennas[bs], 1)[:, 0]

    def bb(self, rx_bs: int, tx_bs: int) -> np.ndarray:
        """Matrix (rx antennas x tx antennas) from ``tx_bs`` to ``rx_bs``."""
        if rx_bs == tx_bs:
            raise ValueError("no self channel")
        a, b = min(rx_bs, tx_bs), max(rx_bs, tx_bs)
        h = self._draw(BB, a, b, self.antennas[a], self.antennas[b])
        return h if rx_bs == a else reciprocal(h)

    def uu(self, u1: int, u2: int) -> complex:
        if u1 == u2:
            raise ValueError("no self channel")
        a, b = min(u1, u2), max(u1, u2)
        return complex(self._draw(UU, a, b, 1, 1)[0, 0])

    def alpha(self, kind: int, a: int, b: int) -> float:
        if kind in (BB, UU) and a > b:
            a, b = b, a
        return float(self._gain(kind, a, b))
