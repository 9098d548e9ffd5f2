"""Pure-Python scheduling kernels.

Used when the compiled ``_core`` extension is unavailable, and as the
reference the compiled kernels are checked against. Mode codes follow the
scheduler's beta convention: S_U=0, S_D=1, U=2, D=3.
"""

import numpy as np

S_U, S_D, U, D = 0, 1, 2, 3
PCRD, PCRU = 0, 1


def icr_count(macro_row, small_row, training):
    """Count data slots in ICR for one macro/small-cell row pair."""
    if len(macro_row) != len(small_row):
        raise ValueError("rows must have equal length")
    count = 0
    for m, s in zip(macro_row, small_row):
        if training == S_D:
            if m != s:
                count += 1
        else:
            if m == s:
                count += 1
    return count


def _masks_with_popcount(n, k):
    return [m for m in range(1 << n) if bin(m).count("1") == k]


def bruteforce_min_icr(nd_macro, nd_small, n_data, training):
    """Minimum ICR slot count over every ordering of both rows.

    A row ordering is encoded as the bitmask of its D positions.
    """
    full = (1 << n_data) - 1
    best = n_data + 1
    small_masks = _masks_with_popcount(n_data, nd_small)
    for mm in _masks_with_popcount(n_data, nd_macro):
        for ms in small_masks:
            differ = bin((mm ^ ms) & full).count("1")
            c = differ if training == S_D else n_data - differ
            if c < best:
                best = c
    return best


def tdflex_fill(nd, n_data):
    """Fill the frame matrix for per-cell downlink slot counts ``nd``.

    ``nd[0]`` is the macro cell. Returns ``(modes, boosts, chosen, c_pcrd,
    c_pcru)``; ``c_pcrd`` is -1 where the PCR-D option was discarded.
    """
    n_cells = len(nd)
    modes = [[0] * (n_data + 1) for _ in range(n_cells)]
    boosts = [[False] * (n_data + 1) for _ in range(n_cells)]
    chosen = [PCRD] * n_cells
    c_pcrd = [0] * n_cells
    c_pcru = [0] * n_cells

    ndm = nd[0]
    num = n_data - ndm
    macro = modes[0]
    macro[0] = S_U
    for j in range(1, n_data + 1):
        macro[j] = D if j <= ndm else U

    for b in range(1, n_cells):
        nds = nd[b]
        nus = n_data - nds
        cd = n_data - (min(ndm, nds) + min(num, nus))
        cu = n_data - (min(ndm, nus) + min(num, nds))
        discard = ndm > nds
        c_pcrd[b] = -1 if discard else cd
        c_pcru[b] = cu
        row = modes[b]
        if not discard and cd <= cu:
            chosen[b] = PCRD
            row[0] = S_D
            for j in range(1, n_data + 1):
                row[j] = D if j <= nds else U
        else:
            chosen[b] = PCRU
            row[0] = S_U
            brow = boosts[b]
            for j in range(1, n_data + 1):
                if j <= nus:
                    row[j] = U
                    # reverse-TDD U slot facing a macro D slot
                    brow[j] = macro[j] == D
                else:
                    row[j] = D
    return (
        np.array(modes, dtype=np.int8).reshape(n_cells, n_data + 1),
        np.array(boosts, dtype=bool).reshape(n_cells, n_data + 1),
        np.array(chosen, dtype=np.int8),
        np.array(c_pcrd, dtype=np.int64),
        np.array(c_pcru, dtype=np.int64),
    )
