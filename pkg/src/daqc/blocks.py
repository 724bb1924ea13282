"""Single-qubit-gate block patterns and the resulting coupling sign matrix.

Sandwiching an analog evolution between layers of Pauli gates conjugates the
interaction Hamiltonian, which can only flip the sign of each two-body term:
g s^a g' = +/- s^a for g a Pauli or the identity.  A pattern is a string over
``IXYZ`` with one gate per qubit; the sign matrix collects the sign picked up
by every coupling under every pattern.
"""

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PatternExhaustionError, ValidationError
from .pauli import AXES, CouplingKey, InteractionGraph

GATES = "IXYZ"

#: sign of g s^a g' for gate g (rows, order IXYZ) and axis a (cols, order xyz)
_SIGN_TABLE = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]],
    dtype=np.int8,
)
_GATE_INDEX = {g: k for k, g in enumerate(GATES)}
_AXIS_INDEX = {a: k for k, a in enumerate(AXES)}


def validate_pattern(pattern: str, n_qubits: int | None = None) -> str:
    if not isinstance(pattern, str) or not pattern:
        raise ValidationError(f"pattern must be a nonempty string, got {pattern!r}")
    bad = set(pattern) - set(GATES)
    if bad:
        raise ValidationError(f"pattern {pattern!r} uses gates outside {GATES}: {sorted(bad)}")
    if n_qubits is not None and len(pattern) != n_qubits:
        raise ValidationError(f"pattern {pattern!r} has length {len(pattern)}, expected {n_qubits}")
    return pattern


def conjugation_sign(gate: str, axis: str) -> int:
    """+1 if the gate commutes with the axis Pauli (identity or same axis), else -1."""
    try:
        return int(_SIGN_TABLE[_GATE_INDEX[gate], _AXIS_INDEX[axis]])
    except KeyError as exc:
        raise ValidationError(f"unknown gate/axis pair ({gate!r}, {axis!r})") from exc


def block_sign(pattern: str, key: CouplingKey) -> int:
    """Sign of the coupling ``key`` during an analog block sandwiched by ``pattern``."""
    validate_pattern(pattern)
    if len(pattern) <= key.j:
        raise ValidationError(f"pattern {pattern!r} too short for key {key}")
    return conjugation_sign(pattern[key.i], key.mu) * conjugation_sign(pattern[key.j], key.nu)


def _pattern_columns(patterns: Sequence[str], rows: Sequence[CouplingKey]) -> np.ndarray:
    """Sign matrix entries, one vectorized column per pattern."""
    i_idx = np.array([k.i for k in rows], dtype=np.intp)
    j_idx = np.array([k.j for k in rows], dtype=np.intp)
    mu_idx = np.array([_AXIS_INDEX[k.mu] for k in rows], dtype=np.intp)
    nu_idx = np.array([_AXIS_INDEX[k.nu] for k in rows], dtype=np.intp)
    out = np.empty((len(rows), len(patterns)), dtype=np.int8)
    for col, pattern in enumerate(patterns):
        gates = np.array([_GATE_INDEX[g] for g in pattern], dtype=np.intp)
        out[:, col] = _SIGN_TABLE[gates[i_idx], mu_idx] * _SIGN_TABLE[gates[j_idx], nu_idx]
    return out


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """Dense +/-1 matrix: rows are coupling keys, columns are gate patterns."""

    rows: tuple[CouplingKey, ...]
    patterns: tuple[str, ...]
    entries: np.ndarray  # shape (len(rows), len(patterns)), values in {+1, -1}

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.patterns))

    def to_csv(self) -> str:
        """CSV with the row key in the first column and patterns as headers."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", *self.patterns])
        for alpha, key in enumerate(self.rows):
            writer.writerow([f"{key.i}:{key.j}:{key.mu}:{key.nu}",
                             *(int(v) for v in self.entries[alpha])])
        return buf.getvalue()


def build_sign_matrix(patterns: Sequence[str], rows: Sequence[CouplingKey]) -> SignMatrix:
    """Entry-complete sign matrix for the given patterns and coupling keys."""
    if not patterns:
        raise ValidationError("at least one pattern is required")
    if not rows:
        raise ValidationError("at least one coupling row is required")
    n_min = max(k.j for k in rows) + 1
    for p in patterns:
        validate_pattern(p)
        if len(p) < n_min:
            raise ValidationError(f"pattern {p!r} too short for rows up to qubit {n_min - 1}")
    if len(set(patterns)) != len(patterns):
        raise ValidationError("duplicate gate patterns add no expressive power")
    entries = _pattern_columns(patterns, rows)
    entries.setflags(write=False)
    return SignMatrix(tuple(rows), tuple(patterns), entries)


def pattern_alphabet(source_support: InteractionGraph) -> str:
    """Per-qubit gate alphabet needed to flip signs on the given support.

    ZZ-only supports need only ``IX`` (an X on either endpoint flips a ZZ
    term); anything with other axes gets the full Pauli alphabet.
    """
    if all(e.mu == "z" and e.nu == "z" for e in source_support.edges):
        return "IX"
    return GATES


def pattern_space_size(source_support: InteractionGraph) -> int:
    return len(pattern_alphabet(source_support)) ** source_support.n_qubits


def generate_candidate_patterns(
    source_support: InteractionGraph,
    requested: int,
    rng_seed: int,
) -> list[str]:
    """Deterministic, duplicate-free pattern list with the identity first.

    The identity pattern is always element 0; the rest are sampled from the
    seeded stream, so growing ``requested`` with the same seed extends the
    previous list (prefix property).
    """
    if requested < 1:
        raise ValidationError(f"requested must be >= 1, got {requested}")
    n = source_support.n_qubits
    alphabet = pattern_alphabet(source_support)
    total = len(alphabet) ** n
    if requested > total:
        raise PatternExhaustionError(
            f"requested {requested} patterns but only {total} exist over {alphabet!r}^{n}"
        )
    identity = "I" * n
    patterns = [identity]
    seen = {identity}
    rng = np.random.default_rng(rng_seed)
    chunk = max(64, requested)
    while len(patterns) < requested:
        draws = rng.integers(0, len(alphabet), size=(chunk, n))
        for row in draws:
            candidate = "".join(alphabet[g] for g in row)
            if candidate not in seen:
                seen.add(candidate)
                patterns.append(candidate)
                if len(patterns) == requested:
                    break
    return patterns
