"""Coupling graphs for the bundled processors and a deterministic parameter generator."""

from __future__ import annotations

import numpy as np

from .device import CrosstalkMatrix, DeviceConfig, QubitParams, Topology


def eagle127_edges() -> list[tuple[int, int]]:
    """127-qubit heavy-hex coupling map in the Eagle numbering.

    Seven rows (14, 15, 15, 15, 15, 15, 14 qubits) joined by six rows of four
    bridge qubits. Bridge rows alternate between columns {0, 4, 8, 12} and
    {2, 6, 10, 14}; the last row starts at column 1.
    """
    rows: list[dict[int, int]] = []
    bridges: list[list[int]] = []
    q = 0
    layout = [(0, 14), (0, 15), (0, 15), (0, 15), (0, 15), (0, 15), (1, 14)]
    for r, (first_col, length) in enumerate(layout):
        rows.append({first_col + k: q + k for k in range(length)})
        q += length
        if r < len(layout) - 1:
            bridges.append(list(range(q, q + 4)))
            q += 4
    assert q == 127
    edges = []
    for row in rows:
        cols = sorted(row)
        edges += [(row[c], row[c + 1]) for c in cols[:-1]]
    for r, bridge in enumerate(bridges):
        cols = (0, 4, 8, 12) if r % 2 == 0 else (2, 6, 10, 14)
        for b, c in zip(bridge, cols):
            edges.append((rows[r][c], b))
            edges.append((b, rows[r + 1][c]))
    return edges


def square_edges(n_rows: int, n_cols: int, drop: tuple[int, ...] = ()) -> tuple[int, list[tuple[int, int]]]:
    """Grid coupling map with some sites removed; returns (n_qubits, edges) densely renumbered."""
    sites = [(r, c) for r in range(n_rows) for c in range(n_cols)]
    keep = [s for i, s in enumerate(sites) if i not in set(drop)]
    index = {s: i for i, s in enumerate(keep)}
    edges = []
    for (r, c), i in index.items():
        for nb in ((r, c + 1), (r + 1, c)):
            j = index.get(nb)
            if j is not None:
                edges.append((i, j))
    return len(keep), edges


def ankaa82_edges() -> tuple[int, list[tuple[int, int]]]:
    # 7 x 12 grid with two corner sites missing.
    return square_edges(7, 12, drop=(0, 83))


def assign_frequencies(n: int, edges, rng: np.random.Generator,
                       lo: float = 4.80, hi: float = 5.20, spacing_mhz: float = 50.0,
                       jitter_mhz: float = 4.0) -> np.ndarray:
    """Greedy colouring onto a ladder of frequency levels so neighbours differ by >= 40 MHz."""
    levels = np.arange(lo, hi + 1e-9, spacing_mhz * 1e-3)
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    level_of = np.full(n, -1)
    for q in range(n):
        used = {level_of[w] for w in adj[q] if level_of[w] >= 0}
        free = [k for k in range(len(levels)) if k not in used]
        level_of[q] = free[rng.integers(len(free))]
    jitter = rng.uniform(-jitter_mhz, jitter_mhz, size=n) * 1e-3
    return levels[level_of] + jitter


def generate_device(name: str, n: int, edges, lattice_kind: str, crosstalk: CrosstalkMatrix,
                    seed: int, dt_ns: float = 2.22) -> DeviceConfig:
    rng = np.random.default_rng(seed)
    f_q = assign_frequencies(n, edges, rng)
    qubits = []
    for i in range(n):
        t1 = rng.uniform(80.0, 200.0)
        t2 = t1 * rng.uniform(0.6, 1.6)
        qubits.append(
            QubitParams(
                id=i,
                f_q=round(float(f_q[i]), 6),
                f_rabi_max=round(float(rng.uniform(21.0, 26.0)), 4),
                t1=round(float(t1), 3),
                t2=round(float(t2), 3),
                readout_p01=round(float(rng.uniform(0.005, 0.02)), 5),
                readout_p10=round(float(rng.uniform(0.01, 0.03)), 5),
            )
        )
    topo = Topology(n_qubits=n, edges=tuple(edges), lattice_kind=lattice_kind)
    return DeviceConfig(name=name, qubits=tuple(qubits), topology=topo, crosstalk=crosstalk, dt_ns=dt_ns).validate()


# Modelling choices for the bundled files; see README "Bundled devices".
EAGLE_HOTSPOT_C = 0.008
EAGLE_NEIGHBOR_C = 0.01
EAGLE_BACKGROUND_C = 0.0003
ANKAA_NEIGHBOR_C = 0.02
ANKAA_BACKGROUND_C = 0.004


def build_eagle127(seed: int = 127) -> DeviceConfig:
    edges = eagle127_edges()
    hotspot = tuple((0, j, EAGLE_HOTSPOT_C) for j in range(1, 127))
    xt = CrosstalkMatrix(entries=hotspot, default_neighbor_c=EAGLE_NEIGHBOR_C, background_c=EAGLE_BACKGROUND_C)
    return generate_device("eagle127", 127, edges, "heavy-hex", xt, seed)


def build_ankaa82(seed: int = 82) -> DeviceConfig:
    n, edges = ankaa82_edges()
    xt = CrosstalkMatrix(default_neighbor_c=ANKAA_NEIGHBOR_C, background_c=ANKAA_BACKGROUND_C)
    return generate_device("ankaa82", n, edges, "square", xt, seed)
