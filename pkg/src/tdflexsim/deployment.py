"""Two-tier topology generation, association, pilots and per-frame loads."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

MIN_DISTANCE_M = 1.0


class Tier(str, enum.Enum):
    MACRO = "macro"
    SMALL = "small"


@dataclass(frozen=True, eq=False)
class BaseStation:
    id: int
    tier: Tier
    position: np.ndarray
    antennas: int
    tx_power: float  # W

    def __post_init__(self):
        if self.tx_power <= 0:
            raise ValueError("tx_power must be positive")
        if self.antennas < 1:
            raise ValueError("antennas must be >= 1")


@dataclass(frozen=True, eq=False)
class User:
    id: int
    position: np.ndarray
    serving_bs: int = -1
    pilot_index: int = -1
    ul_power: float = 0.2  # W

    def __post_init__(self):
        if self.ul_power <= 0:
            raise ValueError("ul_power must be positive")


@dataclass
class NetworkTopology:
    macro: BaseStation
    smalls: list[BaseStation]
    users: list[User]
    area_m2: float

    @property
    def base_stations(self) -> list[BaseStation]:
        return [self.macro, *self.smalls]

    @property
    def num_cells(self) -> int:
        return 1 + len(self.smalls)

    def bs(self, bs_id: int) -> BaseStation:
        return self.base_stations[bs_id]

    def cell_users(self, bs_id: int) -> list[User]:
        """Users served by ``bs_id``, ordered by pilot index."""
        return sorted((u for u in self.users if u.serving_bs == bs_id), key=lambda u: u.pilot_index)

    @property
    def num_pilots(self) -> int:
        counts = [len(self.cell_users(b)) for b in range(self.num_cells)]
        return max(counts) if counts else 0


@dataclass
class LoadDistribution:
    l_d: np.ndarray
    n_data: int
    n_d: np.ndarray = field(init=False)

    def __post_init__(self):
        self.l_d = np.asarray(self.l_d, dtype=float)
        if np.any((self.l_d < 0) | (self.l_d > 1)):
            raise ValueError("downlink load fractions must lie in [0, 1]")
        if self.n_data < 1:
            raise ValueError("N_data must be >= 1")
        self.n_d = round_half_away(self.n_data * self.l_d).astype(np.int64)

    @property
    def l_u(self) -> np.ndarray:
        return 1.0 - self.l_d

    @property
    def n_u(self) -> np.ndarray:
        return self.n_data - self.n_d


def round_half_away(x):
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def sample_ppp(density_per_km2: float, area_km2: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP over a square of ``area_km2`` centred at the origin; returns (n, 2) metres."""
    if density_per_km2 < 0:
        raise ValueError("density must be non-negative")
    if area_km2 <= 0:
        raise ValueError("area must be positive")
    n = rng.poisson(density_per_km2 * area_km2)
    half = 500.0 * np.sqrt(area_km2)
    return rng.uniform(-half, half, size=(n, 2))


def pathloss(distance_m, exponent: float):
    """Linear gain d ** -exponent."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if exponent <= 2:
        raise ValueError("pathloss exponent must exceed 2")
    g = d ** (-exponent)
    return float(g) if g.ndim == 0 else g


def link_distance(a, b, min_distance: float = MIN_DISTANCE_M) -> float:
    return max(float(np.hypot(*(np.asarray(a) - np.asarray(b)))), min_distance)


def associate(users: list[User], base_stations: list[BaseStation], exponent: float = 3.0) -> np.ndarray:
    """Index of the base station with the largest mean received power, per user.

    Ties keep the lowest index, which is the macro cell.
    """
    if not base_stations:
        raise ValueError("need at least one base station")
    if not users:
        return np.zeros(0, dtype=np.int64)
    upos = np.array([u.position for u in users], dtype=float)
    bpos = np.array([b.position for b in base_stations], dtype=float)
    power = np.array([b.tx_power for b in base_stations])
    d = np.maximum(np.linalg.norm(upos[:, None, :] - bpos[None, :, :], axis=-1), MIN_DISTANCE_M)
    rx = power[None, :] * pathloss(d, exponent)
    return np.argmax(rx, axis=1).astype(np.int64)


def assign_pilots(topology: NetworkTopology) -> NetworkTopology:
    """Give the users of each cell the pilot indices 0..K_b-1 in user-id order."""
    next_index: dict[int, int] = {}
    users = []
    for u in sorted(topology.users, key=lambda u: u.id):
        k = next_index.get(u.serving_bs, 0)
        next_index[u.serving_bs] = k + 1
        users.append(replace(u, pilot_index=k))
    return replace(topology, users=users)


def draw_loads(num_cells: int, n_data: int, rng: np.random.Generator) -> LoadDistribution:
    """Independent Uniform(0, 1) downlink load fraction per cell."""
    return LoadDistribution(rng.uniform(0.0, 1.0, size=num_cells), n_data)


def deploy(
    rng: np.random.Generator,
    *,
    area_km2: float = 1.0,
    lambda_sc: float = 0.6,
    lambda_u: float = 50.0,
    macro_antennas: int = 128,
    sbs_antennas: int = 2,
    p_mbs: float = 10 ** ((43 - 30) / 10),
    p_sbs: float = 10 ** ((25 - 30) / 10),
    p_ue: float = 10 ** ((23 - 30) / 10),
    alpha_e: float = 3.0,
) -> NetworkTopology:
    """Draw one macro cell with PPP small cells and users, associated and with pilots."""
    macro = BaseStation(0, Tier.MACRO, np.zeros(2), macro_antennas, p_mbs)
    smalls = [
        BaseStation(i + 1, Tier.SMALL, pos, sbs_antennas, p_sbs)
        for i, pos in enumerate(sample_ppp(lambda_sc, area_km2, rng))
    ]
    users = [User(i, pos, ul_power=p_ue) for i, pos in enumerate(sample_ppp(lambda_u, area_km2, rng))]
    serving = associate(users, [macro, *smalls], alpha_e)
    users = [replace(u, serving_bs=int(s)) for u, s in zip(users, serving)]
    topo = NetworkTopology(macro, smalls, users, area_km2 * 1e6)
    return assign_pilots(topo)
