"""A small cluster-factored statevector simulator.

The register is stored as a tensor product of independent clusters. Every
qubit starts in its own singleton cluster and two clusters are merged only
when a CX gate couples them, so circuits with sparse entanglement stay cheap.
Within a cluster, amplitude index bits follow ``qubit_ids`` with the first id
as the most significant bit.

Supported gates are H, X, Ry(theta) and CX, plus a full computational-basis
measurement that collapses the register back to classical singletons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("H", "X", "Ry"):
            raise ValueError(f"unsupported single-qubit gate {self.kind!r}")
        if self.kind == "Ry" and (self.theta is None or not math.isfinite(self.theta)):
            raise ValueError("Ry needs a finite angle")

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF
        if self.kind == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)


H = Gate("H")
X = Gate("X")


def Ry(theta: float) -> Gate:
    return Gate("Ry", float(theta))


class Cluster:
    """A group of qubits sharing one (possibly entangled) amplitude vector."""

    __slots__ = ("qubit_ids", "amplitudes")

    def __init__(self, qubit_ids: list[int], amplitudes: np.ndarray):
        self.qubit_ids = list(qubit_ids)
        self.amplitudes = amplitudes

    @classmethod
    def basis(cls, qubit: int, bit: int = 0) -> "Cluster":
        amps = np.zeros(2, dtype=complex)
        amps[bit] = 1.0
        return cls([qubit], amps)

    @property
    def size(self) -> int:
        return len(self.qubit_ids)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.size)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


class QuantumRegister:
    """Mutable register of ``num_qubits`` qubits, initialised to ``|0...0>``.

    Gate methods mutate in place and return ``self``.
    """

    def __init__(self, num_qubits: int):
        if isinstance(num_qubits, bool) or not isinstance(num_qubits, (int, np.integer)) or num_qubits < 1:
            raise ValueError(f"a register needs at least one qubit, got {num_qubits!r}")
        self.num_qubits = int(num_qubits)
        self._owner: list[Cluster] = [Cluster.basis(q) for q in range(self.num_qubits)]

    def _check_qubit(self, q) -> int:
        if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or not 0 <= q < self.num_qubits:
            raise IndexError(f"qubit id {q!r} out of range for {self.num_qubits} qubits")
        return int(q)

    @property
    def clusters(self) -> list[Cluster]:
        """Distinct clusters ordered by their smallest qubit id."""
        seen, out = set(), []
        for c in self._owner:
            if id(c) not in seen:
                seen.add(id(c))
                out.append(c)
        return out

    def cluster_of(self, q: int) -> Cluster:
        return self._owner[self._check_qubit(q)]

    def apply_1q(self, gate: Gate, q: int) -> "QuantumRegister":
        q = self._check_qubit(q)
        cluster = self._owner[q]
        u = gate.matrix
        if cluster.size == 1:
            cluster.amplitudes = u @ cluster.amplitudes
            return self
        axis = cluster.qubit_ids.index(q)
        psi = np.tensordot(u, cluster.tensor(), axes=([1], [axis]))
        cluster.amplitudes = np.moveaxis(psi, 0, axis).reshape(-1)
        return self

    def h(self, q: int) -> "QuantumRegister":
        return self.apply_1q(H, q)

    def x(self, q: int) -> "QuantumRegister":
        return self.apply_1q(X, q)

    def ry(self, theta: float, q: int) -> "QuantumRegister":
        return self.apply_1q(Ry(theta), q)

    def _merge(self, a: Cluster, b: Cluster) -> Cluster:
        merged = Cluster(a.qubit_ids + b.qubit_ids, np.kron(a.amplitudes, b.amplitudes))
        for q in merged.qubit_ids:
            self._owner[q] = merged
        return merged

    def apply_cx(self, control: int, target: int) -> "QuantumRegister":
        control, target = self._check_qubit(control), self._check_qubit(target)
        if control == target:
            raise ValueError("CX control and target must differ")
        cluster = self._owner[control]
        if self._owner[target] is not cluster:
            cluster = self._merge(cluster, self._owner[target])
        psi = cluster.tensor().copy()
        ac = cluster.qubit_ids.index(control)
        at = cluster.qubit_ids.index(target)
        index = [slice(None)] * cluster.size
        index[ac] = 1
        index = tuple(index)
        psi[index] = np.flip(psi[index], axis=at - 1 if at > ac else at).copy()
        cluster.amplitudes = psi.reshape(-1)
        return self

    cx = apply_cx

    def probability_of(self, q: int, outcome: int) -> float:
        """Marginal probability that measuring qubit ``q`` yields ``outcome``."""
        q = self._check_qubit(q)
        if outcome not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
        cluster = self._owner[q]
        probs = np.abs(cluster.tensor()) ** 2
        axis = cluster.qubit_ids.index(q)
        p = float(np.take(probs, outcome, axis=axis).sum())
        return min(max(p, 0.0), 1.0)

    def measure_all(self, rng: np.random.Generator) -> np.ndarray:
        """Sample every cluster once and collapse to classical singletons.

        Clusters are sampled in order of their smallest qubit id, each with a
        single ``rng.random()`` draw, so the outcome is a pure function of the
        generator state.
        """
        bits = np.zeros(self.num_qubits, dtype=np.int8)
        for cluster in self.clusters:
            probs = np.abs(cluster.amplitudes) ** 2
            cdf = np.cumsum(probs)
            k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            k = min(k, probs.size - 1)
            m = cluster.size
            for pos, q in enumerate(cluster.qubit_ids):
                bits[q] = (k >> (m - 1 - pos)) & 1
        self._owner = [Cluster.basis(q, int(bits[q])) for q in range(self.num_qubits)]
        return bits

    def check_invariants(self, atol: float = 1e-10) -> None:
        ids = [q for c in self.clusters for q in c.qubit_ids]
        if sorted(ids) != list(range(self.num_qubits)):
            raise AssertionError("clusters do not partition the register")
        for c in self.clusters:
            if c.amplitudes.shape != (2**c.size,):
                raise AssertionError(f"cluster {c.qubit_ids} has wrong amplitude length")
            if abs(c.norm() - 1.0) > atol:
                raise AssertionError(f"cluster {c.qubit_ids} norm {c.norm()!r}")

    def dump(self) -> list[tuple[list[int], np.ndarray]]:
        """Debug view: ``(qubit_ids, amplitudes)`` per cluster."""
        return [(list(c.qubit_ids), c.amplitudes.copy()) for c in self.clusters]

    def __repr__(self):
        sizes = [c.size for c in self.clusters]
        return f"QuantumRegister(num_qubits={self.num_qubits}, cluster_sizes={sizes})"


def new_register(num_qubits: int) -> QuantumRegister:
    return QuantumRegister(num_qubits)
