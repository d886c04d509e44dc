"""Simulated processor description: topology, per-qubit physics, crosstalk.

A :class:`DeviceConfig` stands in for a cloud backend. It is immutable once
loaded and may be shared freely between concurrently running scenarios.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DeviceValidationError

LATTICE_KINDS = ("heavy-hex", "square", "custom")
DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class QubitParams:
    id: int
    f_q: float  # GHz
    f_rabi_max: float  # MHz at unit envelope amplitude
    t1: float  # us
    t2: float  # us
    readout_p01: float = 0.0
    readout_p10: float = 0.0
    enabled: bool = True

    def validate(self) -> None:
        if self.id < 0:
            raise DeviceValidationError(f"qubit {self.id}: id must be >= 0")
        if not self.f_q > 0:
            raise DeviceValidationError(f"qubit {self.id}: f_q > 0 violated ({self.f_q})")
        if not self.f_rabi_max > 0:
            raise DeviceValidationError(f"qubit {self.id}: f_rabi_max > 0 violated")
        if not self.t1 > 0:
            raise DeviceValidationError(f"qubit {self.id}: t1 > 0 violated")
        if not 0 < self.t2 <= 2 * self.t1:
            raise DeviceValidationError(
                f"qubit {self.id}: 0 < t2 <= 2*t1 violated (t2={self.t2}, t1={self.t1}); "
                "requires t2 ≤ 2·t1"
            )
        for name in ("readout_p01", "readout_p10"):
            p = getattr(self, name)
            if not 0 <= p < 0.5:
                raise DeviceValidationError(f"qubit {self.id}: {name} must lie in [0, 0.5)")


@dataclass(frozen=True)
class Topology:
    n_qubits: int
    edges: tuple[tuple[int, int], ...]
    lattice_kind: str = "custom"

    def __post_init__(self):
        canon = tuple(sorted({(min(a, b), max(a, b)) for a, b in self.edges}))
        object.__setattr__(self, "edges", canon)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_qubits)]
        for a, b in self.edges:
            if not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise DeviceValidationError(f"edge ({a}, {b}) references an invalid qubit")
            adj[a].append(b)
            adj[b].append(a)
        for row in adj:
            row.sort()
        return adj


@dataclass(frozen=True)
class CrosstalkMatrix:
    """Sparse victim/source coupling table with two fallback tiers."""

    entries: tuple[tuple[int, int, float], ...] = ()
    default_neighbor_c: float = 0.0
    background_c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(v, s): c for v, s, c in self.entries}


@dataclass(frozen=True)
class DeviceConfig:
    name: str
    qubits: tuple[QubitParams, ...]
    topology: Topology
    crosstalk: CrosstalkMatrix = CrosstalkMatrix()
    dt_ns: float = 2.22

    _adj: list = field(init=False, repr=False, compare=False)
    _entries: dict = field(init=False, repr=False, compare=False)
    _edge_set: frozenset = field(init=False, repr=False, compare=False)
    _bfs_cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "_adj", self.topology.neighbors())
        object.__setattr__(self, "_entries", self.crosstalk.as_dict())
        object.__setattr__(self, "_edge_set", frozenset(self.topology.edges))
        object.__setattr__(self, "_bfs_cache", {})

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def dt_us(self) -> float:
        return self.dt_ns * 1e-3

    def enabled_qubits(self) -> list[int]:
        return [q.id for q in self.qubits if q.enabled]

    def is_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._edge_set

    def validate(self) -> "DeviceConfig":
        """Check every invariant, raising :class:`DeviceValidationError` on the first failure."""
        if not self.dt_ns > 0:
            raise DeviceValidationError("dt_ns > 0 violated")
        if self.topology.lattice_kind not in LATTICE_KINDS:
            raise DeviceValidationError(f"unknown lattice_kind {self.topology.lattice_kind!r}")
        for i, q in enumerate(self.qubits):
            if q.id != i:
                raise DeviceValidationError(f"qubit ids must be dense 0..n-1 (found {q.id} at {i})")
            q.validate()
        n = self.n_qubits
        if self.topology.n_qubits != n:
            raise DeviceValidationError("topology size does not match the qubit list")
        for a, b in self.topology.edges:
            if a == b:
                raise DeviceValidationError(f"self-loop on qubit {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise DeviceValidationError(f"edge ({a}, {b}) references an invalid qubit")
        xt = self.crosstalk
        for name in ("default_neighbor_c", "background_c"):
            c = getattr(xt, name)
            if not 0.0 <= c <= 1.0:
                raise DeviceValidationError(f"crosstalk {name} must lie in [0, 1]")
        seen = set()
        for v, s, c in xt.entries:
            if v == s:
                raise DeviceValidationError(f"crosstalk entry ({v}, {v}) is implicit and may not appear")
            if not (0 <= v < n and 0 <= s < n):
                raise DeviceValidationError(f"crosstalk entry ({v}, {s}) references an invalid qubit")
            if not 0.0 <= c <= 1.0:
                raise DeviceValidationError(f"crosstalk entry ({v}, {s}) = {c} outside [0, 1]")
            if (v, s) in seen:
                raise DeviceValidationError(f"duplicate crosstalk entry ({v}, {s})")
            seen.add((v, s))
        enabled = self.enabled_qubits()
        if not enabled:
            raise DeviceValidationError("no enabled qubits")
        if len(components(self)) > 1:
            raise DeviceValidationError("topology is not connected on enabled qubits")
        return self

    def check_qubit(self, q: int, *, require_enabled: bool = True) -> None:
        if not 0 <= q < self.n_qubits:
            raise DeviceValidationError(f"qubit {q} out of range for {self.name} ({self.n_qubits} qubits)")
        if require_enabled and not self.qubits[q].enabled:
            raise DeviceValidationError(f"qubit {q} is disabled on {self.name}")

    def with_crosstalk(self, crosstalk: CrosstalkMatrix) -> "DeviceConfig":
        return replace(self, crosstalk=crosstalk)

    def without_crosstalk(self) -> "DeviceConfig":
        """Copy with every inter-qubit coupling set to zero."""
        return replace(self, crosstalk=CrosstalkMatrix())

    def without_noise(self) -> "DeviceConfig":
        """Copy with perfect readout (coherence is switched separately via SimParams)."""
        qs = tuple(replace(q, readout_p01=0.0, readout_p10=0.0) for q in self.qubits)
        return replace(self, qubits=qs)


def _bfs(cfg: DeviceConfig, sources: Iterable[int]) -> np.ndarray:
    dist = np.full(cfg.n_qubits, -1, dtype=np.int64)
    queue: deque[int] = deque()
    for s in sources:
        if cfg.qubits[s].enabled and dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        for w in cfg._adj[u]:
            if dist[w] < 0 and cfg.qubits[w].enabled:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distances_from(cfg: DeviceConfig, sources: Sequence[int]) -> np.ndarray:
    """Multi-source hop distances over enabled qubits; -1 marks unreachable or disabled."""
    key = tuple(sorted(set(sources)))
    cached = cfg._bfs_cache.get(key)
    if cached is None:
        cached = _bfs(cfg, key)
        cached.setflags(write=False)
        cfg._bfs_cache[key] = cached
    return cached


def graph_distance(cfg: DeviceConfig, a: int, b: int) -> int:
    """Shortest-path hop count between two enabled qubits."""
    cfg.check_qubit(a)
    cfg.check_qubit(b)
    d = int(distances_from(cfg, [a])[b])
    if d < 0:
        raise DeviceValidationError(f"qubits {a} and {b} are in different components")
    return d


def components(cfg: DeviceConfig) -> list[list[int]]:
    """Connected components of the enabled subgraph."""
    seen = np.zeros(cfg.n_qubits, dtype=bool)
    comps = []
    for q in cfg.enabled_qubits():
        if seen[q]:
            continue
        d = _bfs(cfg, [q])
        members = [int(i) for i in np.flatnonzero(d >= 0)]
        seen[members] = True
        comps.append(members)
    return comps


def coupling(cfg: DeviceConfig, victim: int, source: int) -> float:
    cfg.check_qubit(victim, require_enabled=False)
    cfg.check_qubit(source, require_enabled=False)
    if victim == source:
        return 1.0
    c = cfg._entries.get((victim, source))
    if c is not None:
        return c
    if cfg.is_edge(victim, source):
        return cfg.crosstalk.default_neighbor_c
    return cfg.crosstalk.background_c


# -- serialization ---------------------------------------------------------

def device_to_dict(cfg: DeviceConfig) -> dict:
    return {
        "name": cfg.name,
        "dt_ns": cfg.dt_ns,
        "lattice_kind": cfg.topology.lattice_kind,
        "qubits": [
            {
                "id": q.id,
                "f_q_ghz": q.f_q,
                "f_rabi_max_mhz": q.f_rabi_max,
                "t1_us": q.t1,
                "t2_us": q.t2,
                "readout_p01": q.readout_p01,
                "readout_p10": q.readout_p10,
                "enabled": q.enabled,
            }
            for q in cfg.qubits
        ],
        "edges": [[a, b] for a, b in cfg.topology.edges],
        "crosstalk": {
            "default_neighbor_c": cfg.crosstalk.default_neighbor_c,
            "background_c": cfg.crosstalk.background_c,
            "entries": [{"victim": v, "source": s, "c": c} for v, s, c in cfg.crosstalk.entries],
        },
    }


def device_from_dict(obj: dict) -> DeviceConfig:
    try:
        qubits = tuple(
            QubitParams(
                id=int(q["id"]),
                f_q=float(q["f_q_ghz"]),
                f_rabi_max=float(q["f_rabi_max_mhz"]),
                t1=float(q["t1_us"]),
                t2=float(q["t2_us"]),
                readout_p01=float(q.get("readout_p01", 0.0)),
                readout_p10=float(q.get("readout_p10", 0.0)),
                enabled=bool(q.get("enabled", True)),
            )
            for q in obj["qubits"]
        )
        edges = tuple((int(a), int(b)) for a, b in obj["edges"])
        xt = obj.get("crosstalk", {})
        crosstalk = CrosstalkMatrix(
            entries=tuple(
                (int(e["victim"]), int(e["source"]), float(e["c"])) for e in xt.get("entries", [])
            ),
            default_neighbor_c=float(xt.get("default_neighbor_c", 0.0)),
            background_c=float(xt.get("background_c", 0.0)),
        )
        for a, b in edges:
            if a == b:
                raise DeviceValidationError(f"self-loop on qubit {a}")
        topo = Topology(n_qubits=len(qubits), edges=edges, lattice_kind=obj.get("lattice_kind", "custom"))
        cfg = DeviceConfig(
            name=str(obj["name"]),
            qubits=qubits,
            topology=topo,
            crosstalk=crosstalk,
            dt_ns=float(obj.get("dt_ns", 2.22)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DeviceValidationError):
            raise
        raise DeviceValidationError(f"device file does not match the schema: {exc!r}") from exc
    return cfg.validate()


def dumps_device(cfg: DeviceConfig) -> str:
    """Canonical JSON text (fixed key order, two-space indent, trailing newline)."""
    return json.dumps(device_to_dict(cfg), indent=2) + "\n"


def resolve_device_path(path: str | os.PathLike) -> Path:
    """Find a device file: as given, then in $QH_DATA_DIR, then among bundled configs."""
    p = Path(path)
    if p.exists():
        return p
    candidates = []
    env = os.environ.get("QH_DATA_DIR")
    if env:
        candidates.append(Path(env) / p.name)
    candidates.append(DATA_DIR / p.name)
    for c in candidates:
        if c.exists():
            return c
    raise FileNotFoundError(f"device file not found: {path}")


def load_device(path: str | os.PathLike) -> DeviceConfig:
    p = resolve_device_path(path)
    text = p.read_text(encoding="utf-8")
    return loads_device(text)


def loads_device(text: str) -> DeviceConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeviceValidationError(f"malformed device JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise DeviceValidationError("device JSON must be an object")
    return device_from_dict(obj)


def save_device(cfg: DeviceConfig, path: str | os.PathLike) -> None:
    from .io import atomic_write_text

    atomic_write_text(path, dumps_device(cfg))


def bundled_device(name: str) -> DeviceConfig:
    """Load one of the bundled configs by file name (``eagle127.json``, ``ankaa82.json``)."""
    if not name.endswith(".json"):
        name += ".json"
    return load_device(DATA_DIR / name)
