"""Gate unitaries and their embedding into an n-qubit register (qubit 0 is the most significant bit)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScheduleError

_S2 = 1.0 / np.sqrt(2.0)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
H = _S2 * np.array([[1, 1], [1, -1]], dtype=complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
ISWAP = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


SINGLE_QUBIT = ("X", "SX", "RX", "RZ", "H")
TWO_QUBIT = ("CX", "CZ", "ISWAP")


def gate_matrix(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    fixed = {"X": X, "SX": SX, "H": H, "CX": CX, "CZ": CZ, "ISWAP": ISWAP}
    if name in fixed:
        return fixed[name]
    if name == "RX":
        return rx(params[0])
    if name == "RZ":
        return rz(params[0])
    raise ScheduleError(f"unknown gate {name!r}")


@dataclass(frozen=True)
class GateUnitary:
    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    @property
    def matrix(self) -> np.ndarray:
        return gate_matrix(self.name, self.params)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        want = 2 if self.name in TWO_QUBIT else 1
        if len(self.targets) != want:
            raise ScheduleError(f"{self.name} acts on {want} qubit(s), got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ScheduleError(f"repeated target in {self.targets}")


def embed(U: np.ndarray, targets, n: int) -> np.ndarray:
    """Full 2^n x 2^n operator acting as ``U`` on ``targets`` and identity elsewhere."""
    k = len(targets)
    if U.shape != (2**k, 2**k):
        raise ScheduleError(f"matrix of shape {U.shape} does not act on {k} qubit(s)")
    if any(not 0 <= t < n for t in targets):
        raise ScheduleError(f"targets {targets} outside a {n}-qubit register")
    rest = [q for q in range(n) if q not in targets]
    order = list(targets) + rest
    full = np.kron(U, np.eye(2 ** (n - k)))
    # full acts on qubits in `order`; permute back to natural order.
    full = full.reshape([2] * (2 * n))
    inv = np.argsort(order)
    perm = list(inv) + [n + i for i in inv]
    return full.transpose(perm).reshape(2**n, 2**n)
