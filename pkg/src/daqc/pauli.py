"""Two-body Pauli Hamiltonians as sparse coupling vectors and interaction graphs.

A Hamiltonian of the form  sum_{i<j} sum_{mu,nu} h[i,j,mu,nu] s_i^mu s_j^nu
(s^mu the Pauli matrices, hbar = 1) is stored as a mapping from keys
``(i, j, mu, nu)`` to real coupling strengths.  Keys are kept in lexicographic
order on ``(i, j, mu, nu)`` with the axis ordering x < y < z, which fixes a
stable position (the canonical index) for every coupling in the vectorized
form.  Absent keys mean a coupling of exactly zero; explicitly stored zeros
are allowed and count as part of the declared support.

The connectivity of a Hamiltonian is a weighted multigraph: one edge per key,
labeled by the axis pair, so a qubit pair may carry up to nine edges.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

import numpy as np

from .errors import SimulabilityError, ValidationError

AXES = ("x", "y", "z")

#: Significant digits used when printing coupling strengths; 17 digits
#: round-trip any IEEE double exactly.
FLOAT_DIGITS = 17


class CouplingKey(NamedTuple):
    """Identifier of one two-body term: qubits ``i < j`` and axes ``mu``, ``nu``."""

    i: int
    j: int
    mu: str
    nu: str

    def __str__(self) -> str:
        return f"({self.i},{self.j},{self.mu},{self.nu})"


def validate_key(key: CouplingKey, n_qubits: int | None = None) -> CouplingKey:
    """Check the key invariants (0 <= i < j < n_qubits, axes in {x,y,z})."""
    i, j, mu, nu = key
    if not (isinstance(i, int) and isinstance(j, int)):
        raise ValidationError(f"qubit indices must be integers, got {key}")
    if mu not in AXES or nu not in AXES:
        raise ValidationError(f"axes must be in {AXES}, got {key}")
    if not 0 <= i < j:
        raise ValidationError(f"key requires 0 <= i < j, got {key}")
    if n_qubits is not None and j >= n_qubits:
        raise ValidationError(f"key {key} out of range for {n_qubits} qubits")
    return CouplingKey(i, j, mu, nu)


class CouplingVector:
    """Immutable sparse vector of two-body coupling strengths.

    Entries iterate in canonical (lexicographic) key order.  Lookups of
    absent keys return 0.0.
    """

    __slots__ = ("_n_qubits", "_entries")

    def __init__(
        self,
        n_qubits: int,
        entries: Union[Mapping[CouplingKey, float], Iterable[tuple[CouplingKey, float]]] = (),
    ):
        if not isinstance(n_qubits, int) or n_qubits < 1:
            raise ValidationError(f"n_qubits must be a positive integer, got {n_qubits!r}")
        if isinstance(entries, Mapping):
            entries = entries.items()
        cleaned: dict[CouplingKey, float] = {}
        for raw_key, raw_value in entries:
            key = validate_key(CouplingKey(*raw_key), n_qubits)
            value = float(raw_value)
            if not math.isfinite(value):
                raise ValidationError(f"coupling {key} has non-finite value {raw_value!r}")
            if key in cleaned:
                raise ValidationError(f"duplicate coupling key {key}")
            cleaned[key] = value
        self._n_qubits = n_qubits
        self._entries = dict(sorted(cleaned.items()))

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    def keys(self) -> tuple[CouplingKey, ...]:
        """All declared keys in canonical order (including explicit zeros)."""
        return tuple(self._entries)

    def items(self) -> tuple[tuple[CouplingKey, float], ...]:
        return tuple(self._entries.items())

    def values_array(self) -> np.ndarray:
        """Declared values as a float array, in canonical key order."""
        return np.array(list(self._entries.values()), dtype=float)

    def support(self) -> tuple[CouplingKey, ...]:
        """Keys with a nonzero coupling, in canonical order."""
        return tuple(k for k, v in self._entries.items() if v != 0.0)

    def support_graph(self) -> "InteractionGraph":
        return InteractionGraph(self._n_qubits, self.support())

    def declared_graph(self) -> "InteractionGraph":
        return InteractionGraph(self._n_qubits, self.keys())

    def get(self, key: CouplingKey, default: float = 0.0) -> float:
        return self._entries.get(key, default)

    def restricted(self, keys: Iterable[CouplingKey]) -> "CouplingVector":
        """Sub-vector declaring exactly the given keys (absent ones become 0)."""
        return CouplingVector(self._n_qubits, {validate_key(CouplingKey(*k), self._n_qubits): self[k] for k in keys})

    def __getitem__(self, key: CouplingKey) -> float:
        return self._entries.get(key, 0.0)

    def __contains__(self, key: CouplingKey) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[CouplingKey]:
        return iter(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CouplingVector):
            return NotImplemented
        return self._n_qubits == other._n_qubits and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self._n_qubits, tuple(self._entries.items())))

    def __repr__(self) -> str:
        return f"CouplingVector(n_qubits={self._n_qubits}, entries={self._entries!r})"

    def __add__(self, other: "CouplingVector") -> "CouplingVector":
        if not isinstance(other, CouplingVector):
            return NotImplemented
        if other._n_qubits != self._n_qubits:
            raise ValidationError("cannot add coupling vectors of different system sizes")
        merged = dict(self._entries)
        for key, value in other._entries.items():
            merged[key] = merged.get(key, 0.0) + value
        return CouplingVector(self._n_qubits, merged)

    def __sub__(self, other: "CouplingVector") -> "CouplingVector":
        if not isinstance(other, CouplingVector):
            return NotImplemented
        if other._n_qubits != self._n_qubits:
            raise ValidationError("cannot subtract coupling vectors of different system sizes")
        merged = dict(self._entries)
        for key, value in other._entries.items():
            merged[key] = merged.get(key, 0.0) - value
        return CouplingVector(self._n_qubits, merged)

    # -- plain-text serialization ------------------------------------------

    def to_text(self) -> str:
        """Record format: header ``n_qubits=N`` then ``i j mu nu value`` lines."""
        lines = [f"n_qubits={self._n_qubits}"]
        for (i, j, mu, nu), value in self._entries.items():
            lines.append(f"{i} {j} {mu} {nu} {value:.{FLOAT_DIGITS}g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CouplingVector":
        n_qubits = None
        entries: dict[CouplingKey, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("n_qubits="):
                if n_qubits is not None:
                    raise ValidationError(f"line {lineno}: duplicate n_qubits header")
                try:
                    n_qubits = int(line.split("=", 1)[1])
                except ValueError as exc:
                    raise ValidationError(f"line {lineno}: bad n_qubits header {line!r}") from exc
                continue
            if n_qubits is None:
                raise ValidationError(f"line {lineno}: coupling before n_qubits header")
            parts = line.split()
            if len(parts) != 5:
                raise ValidationError(f"line {lineno}: expected 'i j mu nu value', got {line!r}")
            try:
                key = CouplingKey(int(parts[0]), int(parts[1]), parts[2], parts[3])
                value = float(parts[4])
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: cannot parse {line!r}") from exc
            if key in entries:
                raise ValidationError(f"line {lineno}: duplicate coupling key {key}")
            entries[key] = value
        if n_qubits is None:
            raise ValidationError("missing n_qubits header")
        return cls(n_qubits, entries)

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "CouplingVector":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_text(fh.read())


@dataclass(frozen=True)
class InteractionGraph:
    """Edge set of a coupling vector, viewed as a weighted multigraph support.

    Each key is one edge; parallel edges with different axis labels are
    distinct.  Degrees count edge endpoints, so every key incident to a
    vertex contributes 1.
    """

    n_qubits: int
    edges: frozenset[CouplingKey] = field(default_factory=frozenset)

    def __init__(self, n_qubits: int, edges: Iterable[CouplingKey] = ()):
        if not isinstance(n_qubits, int) or n_qubits < 1:
            raise ValidationError(f"n_qubits must be a positive integer, got {n_qubits!r}")
        edge_set = frozenset(validate_key(CouplingKey(*e), n_qubits) for e in edges)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "edges", edge_set)

    @classmethod
    def from_support(cls, vector: CouplingVector) -> "InteractionGraph":
        """Graph of the nonzero couplings."""
        return cls(vector.n_qubits, vector.support())

    @classmethod
    def from_declared(cls, vector: CouplingVector) -> "InteractionGraph":
        """Graph of every declared key, zeros included (defect-support reading)."""
        return cls(vector.n_qubits, vector.keys())

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> tuple[CouplingKey, ...]:
        return tuple(sorted(self.edges))

    def vertex_degree(self, vertex: int) -> int:
        return sum(1 for e in self.edges if vertex in (e.i, e.j))

    def degree(self) -> int:
        """Maximum multigraph degree over all vertices (0 for an empty graph)."""
        counts = [0] * self.n_qubits
        for e in self.edges:
            counts[e.i] += 1
            counts[e.j] += 1
        return max(counts, default=0)

    def is_subgraph_of(self, other: "InteractionGraph") -> bool:
        return self.n_qubits == other.n_qubits and self.edges <= other.edges

    def union(self, other: "InteractionGraph") -> "InteractionGraph":
        if self.n_qubits != other.n_qubits:
            raise ValidationError("graph union requires matching system sizes")
        return InteractionGraph(self.n_qubits, self.edges | other.edges)

    def subgraph_on(self, vertices: Iterable[int]) -> "InteractionGraph":
        """Edges with both endpoints inside the given vertex set."""
        keep = set(vertices)
        return InteractionGraph(self.n_qubits, (e for e in self.edges if e.i in keep and e.j in keep))


def canonical_index(key: CouplingKey, universe: Iterable[CouplingKey]) -> int:
    """Position of ``key`` in an ordered key universe.

    Raises a lookup error naming the key when it is not part of the universe.
    """
    for idx, candidate in enumerate(universe):
        if candidate == key:
            return idx
    raise KeyError(f"coupling key {CouplingKey(*key)} not in universe")


def vector_p_norm(vector: CouplingVector, p: float) -> float:
    """p-norm of the declared entries: (sum |v|^p)^(1/p).

    ``p=inf`` gives the maximum absolute entry and ``p=-inf`` the minimum
    absolute entry over the declared support (not a norm, but kept with the
    usual sign convention).  Finite ``p`` must be positive.
    """
    values = np.abs(vector.values_array())
    if p == math.inf:
        return float(values.max()) if values.size else 0.0
    if p == -math.inf:
        if not values.size:
            raise ValidationError("minus-infinity norm of an empty vector is undefined")
        return float(values.min())
    p = float(p)
    if not math.isfinite(p) or p <= 0:
        raise ValidationError(f"norm order must be positive or +/-inf, got {p!r}")
    if not values.size:
        return 0.0
    if p == 1.0:
        return float(values.sum())
    if p == 2.0:
        return float(np.linalg.norm(values))
    # rescale for overflow safety on large p
    top = values.max()
    if top == 0.0:
        return 0.0
    return float(top * np.power(np.power(values / top, p).sum(), 1.0 / p))


def hadamard_divide(
    a: CouplingVector,
    b: CouplingVector,
    indeterminate_policy: str = "error",
) -> CouplingVector:
    """Elementwise division a/b over the declared keys of ``b``.

    Keys where both entries are zero are indeterminate (0/0); the policy
    decides whether to raise (``error``), emit 0 (``zero``) or drop the key
    (``skip``).  A nonzero numerator over a zero denominator always raises:
    the target coupling would not be reachable from the source.
    """
    if indeterminate_policy not in ("error", "zero", "skip"):
        raise ValidationError(f"unknown indeterminate policy {indeterminate_policy!r}")
    if a.n_qubits != b.n_qubits:
        raise ValidationError("hadamard division requires matching system sizes")
    for key in a.support():
        if b[key] == 0.0:
            raise SimulabilityError(f"nonzero coupling {key} divided by zero source coupling")
    result: dict[CouplingKey, float] = {}
    for key, den in b.items():
        num = a[key]
        if den != 0.0:
            result[key] = num / den
        elif indeterminate_policy == "zero":
            result[key] = 0.0
        elif indeterminate_policy == "error":
            raise ValidationError(f"indeterminate 0/0 at key {key}")
        # skip: omit the key
    return CouplingVector(a.n_qubits, result)


def graph_difference(d: InteractionGraph, s: InteractionGraph) -> InteractionGraph:
    """Edges of ``d`` that are not in ``s``; the vertex set is unchanged."""
    if d.n_qubits != s.n_qubits:
        raise ValidationError("graph difference requires matching system sizes")
    return InteractionGraph(d.n_qubits, d.edges - s.edges)


def degree(g: InteractionGraph) -> int:
    """Maximum multigraph degree of ``g`` (module-level alias)."""
    return g.degree()
