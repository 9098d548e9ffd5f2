"""TDD frame model: slot modes, the frame matrix and regime classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class SlotMode(enum.IntEnum):
    S_U = 0
    S_D = 1
    U = 2
    D = 3

    @property
    def symbol(self) -> str:
        return {0: "SU", 1: "SD", 2: "U", 3: "D"}[int(self)]

    @classmethod
    def from_symbol(cls, sym: str) -> "SlotMode":
        return {"SU": cls.S_U, "SD": cls.S_D, "U": cls.U, "D": cls.D}[sym]


class ContaminationMode(str, enum.Enum):
    PCR_D = "PCR-D"
    PCR_U = "PCR-U"


class ContaminationState(str, enum.Enum):
    RCR = "RCR"
    ICR = "ICR"


_PRIORITY = {
    (ContaminationMode.PCR_D, ContaminationState.RCR): 1,
    (ContaminationMode.PCR_U, ContaminationState.RCR): 2,
    (ContaminationMode.PCR_U, ContaminationState.ICR): 3,
    (ContaminationMode.PCR_D, ContaminationState.ICR): 4,
}
_COLOR = {1: "yellow", 2: "green", 3: "blue", 4: "red"}


@dataclass(frozen=True, order=False)
class RegimeLabel:
    contamination_mode: ContaminationMode
    contamination_state: ContaminationState

    @property
    def priority(self) -> int:
        """Design preference, 1 (best) to 4 (worst)."""
        return _PRIORITY[(self.contamination_mode, self.contamination_state)]

    @property
    def color(self) -> str:
        return _COLOR[self.priority]

    def __lt__(self, other: "RegimeLabel") -> bool:
        return self.priority < other.priority

    def __str__(self) -> str:
        return f"{self.contamination_mode.value}/{self.contamination_state.value}"


def classify_regime(training_path, serving_mode, interferer_mode) -> RegimeLabel:
    """Classify one data slot for a macro user whose pilot collides with a small cell.

    ``training_path`` is the interfering small cell's slot-0 mode. With a
    downlink pilot (PCR-D) the contaminated beam points at the small base
    station, so opposite data directions are harmful; with an uplink pilot
    (PCR-U) it points at the small-cell user, so equal directions are.
    """
    training_path = SlotMode(training_path)
    serving_mode = SlotMode(serving_mode)
    interferer_mode = SlotMode(interferer_mode)
    if training_path not in (SlotMode.S_U, SlotMode.S_D):
        raise ValueError(f"training path must be S_U or S_D, got {training_path.name}")
    if serving_mode not in (SlotMode.U, SlotMode.D) or interferer_mode not in (SlotMode.U, SlotMode.D):
        raise ValueError("data slot modes must be U or D")
    same = serving_mode == interferer_mode
    if training_path == SlotMode.S_D:
        mode = ContaminationMode.PCR_D
        icr = not same
    else:
        mode = ContaminationMode.PCR_U
        icr = same
    return RegimeLabel(mode, ContaminationState.ICR if icr else ContaminationState.RCR)


def count_icr_collisions(macro_row, small_row, training_path) -> int:
    """Number of data slots classified ICR; rows hold data slots only."""
    return _kernels.icr_count(
        np.asarray(macro_row, dtype=np.int8), np.asarray(small_row, dtype=np.int8), int(training_path)
    )


@dataclass(frozen=True)
class CellDecision:
    """Per-small-cell scheduling record. ``c_pcrd`` is None when discarded."""

    cell_id: int
    c_pcrd: int | None
    c_pcru: int
    chosen: ContaminationMode
    boosts: int


@dataclass
class FrameMatrix:
    """Cells x slots grid of modes. Row 0 is the macro cell, column 0 the training slot."""

    modes: np.ndarray
    boosts: np.ndarray = None  # type: ignore[assignment]
    decisions: list[CellDecision] = field(default_factory=list)

    def __post_init__(self):
        self.modes = np.asarray(self.modes, dtype=np.int8)
        if self.modes.ndim != 2 or self.modes.shape[1] < 2:
            raise ValueError("frame matrix needs shape (cells, 1 + N_data) with N_data >= 1")
        if self.boosts is None:
            self.boosts = np.zeros(self.modes.shape, dtype=bool)
        else:
            self.boosts = np.asarray(self.boosts, dtype=bool)
        if self.boosts.shape != self.modes.shape:
            raise ValueError("boost flags must match the mode grid shape")

    @property
    def num_cells(self) -> int:
        return self.modes.shape[0]

    @property
    def n_data(self) -> int:
        return self.modes.shape[1] - 1

    def training(self, cell: int) -> SlotMode:
        return SlotMode(int(self.modes[cell, 0]))

    def mode(self, cell: int, slot: int) -> SlotMode:
        return SlotMode(int(self.modes[cell, slot]))

    def data_row(self, cell: int) -> np.ndarray:
        return self.modes[cell, 1:]

    def n_downlink(self, cell: int) -> int:
        return int(np.count_nonzero(self.modes[cell, 1:] == SlotMode.D))

    def icr_collisions(self, cell: int) -> int:
        return count_icr_collisions(self.data_row(0), self.data_row(cell), self.training(cell))

    def regime(self, cell: int, slot: int) -> RegimeLabel:
        return classify_regime(self.training(cell), self.mode(0, slot), self.mode(cell, slot))

    def to_grid(self) -> str:
        """One line per cell, e.g. ``SU D D U U*``; ``*`` marks boosted slots."""
        lines = []
        for b in range(self.num_cells):
            cells = []
            for j in range(self.modes.shape[1]):
                sym = SlotMode(int(self.modes[b, j])).symbol
                cells.append(sym + ("*" if self.boosts[b, j] else ""))
            lines.append(" ".join(cells))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_grid(cls, text: str) -> "FrameMatrix":
        modes, boosts = [], []
        for line in text.strip().splitlines():
            row_m, row_b = [], []
            for tok in line.split():
                row_b.append(tok.endswith("*"))
                row_m.append(int(SlotMode.from_symbol(tok.rstrip("*"))))
            modes.append(row_m)
            boosts.append(row_b)
        return cls(np.array(modes, dtype=np.int8), np.array(boosts, dtype=bool))

    def decisions_csv(self) -> str:
        lines = ["cell_id,c_pcrd,c_pcru,chosen,boosts"]
        for d in self.decisions:
            cd = "inf" if d.c_pcrd is None else str(d.c_pcrd)
            lines.append(f"{d.cell_id},{cd},{d.c_pcru},{d.chosen.value},{d.boosts}")
        return "\n".join(lines) + "\n"


def validate(frame: FrameMatrix, loads=None) -> list[str]:
    """Check every frame-matrix invariant; returns human-readable violations."""
    problems = []
    modes = frame.modes
    train = modes[:, 0]
    if not np.all(np.isin(train, (SlotMode.S_U, SlotMode.S_D))):
        problems.append("training column holds a data mode")
    if train[0] != SlotMode.S_U:
        problems.append("macro cell must train in uplink (S_U)")
    data = modes[:, 1:]
    if not np.all(np.isin(data, (SlotMode.U, SlotMode.D))):
        problems.append("data slots must be U or D")
    if loads is not None:
        n_d = np.asarray(loads.n_d)
        if len(n_d) != frame.num_cells:
            problems.append(f"loads cover {len(n_d)} cells, frame has {frame.num_cells}")
        else:
            for b in range(frame.num_cells):
                got_d = int(np.count_nonzero(data[b] == SlotMode.D))
                got_u = int(np.count_nonzero(data[b] == SlotMode.U))
                if got_d != n_d[b] or got_u != frame.n_data - n_d[b]:
                    problems.append(f"cell {b}: {got_d} D / {got_u} U slots, load requires {n_d[b]} D")
    boosts = frame.boosts
    if np.any(boosts[0]):
        problems.append("macro row carries boost flags")
    if np.any(boosts[:, 0]):
        problems.append("training slot carries boost flags")
    if np.any(boosts & (modes != SlotMode.U)):
        problems.append("boost flag set on a non-U slot")
    return problems
