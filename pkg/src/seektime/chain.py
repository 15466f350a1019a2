"""Parsing, validation and structural classification of transition matrices.

Everything downstream consumes :class:`StochasticMatrix`, so this module is
the single place where input is checked. Accepted matrices are exactly
row-renormalized, and their storage is frozen, so they can be shared freely
across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    NonnegativityError,
    ParseError,
    ShapeError,
    StochasticityError,
    UnknownStateError,
)

DEFAULT_ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class StochasticMatrix:
    """A validated row-stochastic transition matrix with state labels.

    ``entries[i, j]`` is the probability of moving from state ``i`` to state
    ``j``. Rows sum to 1 in working precision and all entries lie in
    ``[0, 1]``. Do not construct directly; go through
    :func:`validate_stochastic`.
    """

    entries: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ShapeError(f"transition matrix must be square, got shape {entries.shape}")
        if entries.shape[0] < 1:
            raise ShapeError("transition matrix must have at least one state")
        if len(self.labels) != entries.shape[0]:
            raise ShapeError(
                f"{len(self.labels)} labels for {entries.shape[0]} states"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ParseError("state labels must be unique")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def state_index(self, name: str | int) -> int:
        """Resolve a state given by label or integer index."""
        if isinstance(name, int):
            if 0 <= name < self.n:
                return name
            raise UnknownStateError(f"state index {name} out of range 0..{self.n - 1}")
        if name in self.labels:
            return self.labels.index(name)
        try:
            idx = int(name)
        except ValueError:
            raise UnknownStateError(f"unknown state label {name!r}") from None
        if 0 <= idx < self.n:
            return idx
        raise UnknownStateError(f"state index {idx} out of range 0..{self.n - 1}")


@dataclass(frozen=True)
class ChainStructure:
    """Reachability structure of a chain.

    ``period`` is the gcd of closed-walk lengths through any state of an
    irreducible chain, and ``None`` for reducible chains, where it is not a
    single well-defined number.
    """

    irreducible: bool
    period: int | None
    communicating_classes: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def aperiodic(self) -> bool:
        return self.period == 1


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"s{i}" for i in range(n))


def parse_matrix(raw: bytes | str, format: str) -> tuple[np.ndarray, tuple[str, ...]]:
    """Decode CSV or JSON text into an unvalidated (entries, labels) candidate.

    CSV: one row per line, comma-separated decimal floats; lines starting
    with ``#`` are ignored; labels default to ``s0..s{n-1}``.
    JSON: an object with a required ``"matrix"`` key (array of arrays of
    numbers) and an optional ``"states"`` key (array of strings).

    The result still has to pass :func:`validate_stochastic`.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    if format == "csv":
        return _parse_csv(raw)
    if format == "json":
        return _parse_json(raw)
    raise ValueError(f"unknown format {format!r}, expected 'csv' or 'json'")


def _parse_csv(text: str) -> tuple[np.ndarray, tuple[str, ...]]:
    rows: list[list[float]] = []
    row_lines: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        values = []
        for colno, cell in enumerate(stripped.split(","), start=1):
            cell = cell.strip()
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"expected a number, got {cell!r}", line=lineno, column=colno
                ) from None
        rows.append(values)
        row_lines.append(lineno)
    if not rows:
        raise ParseError("no matrix rows found in CSV input")
    n = len(rows)
    for values, lineno in zip(rows, row_lines):
        if len(values) != n:
            raise ShapeError(
                f"row at line {lineno} has {len(values)} entries, expected {n} "
                f"(matrix must be square)"
            )
    return np.array(rows, dtype=float), default_labels(n)


def _parse_json(text: str) -> tuple[np.ndarray, tuple[str, ...]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ParseError('JSON input must be an object with a "matrix" key')
    matrix = doc["matrix"]
    if not isinstance(matrix, list) or not matrix:
        raise ShapeError('"matrix" must be a non-empty array of rows')
    n = len(matrix)
    rows = []
    for i, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != n:
            raise ShapeError(f'"matrix" row {i} does not have {n} entries')
        for j, cell in enumerate(row):
            if not isinstance(cell, (int, float)) or isinstance(cell, bool):
                raise ParseError(f'non-numeric entry at "matrix"[{i}][{j}]: {cell!r}')
        rows.append([float(x) for x in row])
    labels = doc.get("states")
    if labels is None:
        labels = default_labels(n)
    else:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise ParseError('"states" must be an array of strings')
        if len(labels) != n:
            raise ShapeError(f'{len(labels)} entries in "states" for {n} matrix rows')
    return np.array(rows, dtype=float), tuple(labels)


def validate_stochastic(
    candidate: np.ndarray,
    labels: tuple[str, ...] | None = None,
    tol: float = DEFAULT_ROW_SUM_TOL,
) -> StochasticMatrix:
    """Check nonnegativity and row sums, then renormalize rows exactly.

    Each row sum must be within ``tol`` of 1; accepted rows are divided by
    their sum so downstream linear algebra can rely on exact stochasticity.
    Sub-tolerance drift in honest float input is repaired silently rather
    than rejected.
    """
    entries = np.asarray(candidate, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ShapeError(f"transition matrix must be square, got shape {entries.shape}")
    if not np.all(np.isfinite(entries)):
        bad = np.argwhere(~np.isfinite(entries))[0]
        raise NonnegativityError(
            f"entry ({bad[0]}, {bad[1]}) is not finite: {entries[bad[0], bad[1]]}"
        )
    if np.any(entries < 0):
        bad = np.argwhere(entries < 0)[0]
        raise NonnegativityError(
            f"negative probability at ({bad[0]}, {bad[1]}): {entries[bad[0], bad[1]]}"
        )
    sums = entries.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > tol):
        row = int(np.argmax(off))
        raise StochasticityError(
            f"row {row} sums to {float(sums[row])!r}, which is off 1 by more than tol={tol}"
        )
    entries = entries / sums[:, None]
    n = entries.shape[0]
    # division leaves rows 1 ulp off 1; push the residual into the largest
    # entry so the sums are exactly 1 in working precision
    for _ in range(2):
        sums = entries.sum(axis=1)
        if np.all(sums == 1.0):
            break
        entries[np.arange(n), entries.argmax(axis=1)] += 1.0 - sums
    if labels is None:
        labels = default_labels(n)
    return StochasticMatrix(entries=entries, labels=tuple(labels))


def load_matrix(
    raw: bytes | str, format: str, tol: float = DEFAULT_ROW_SUM_TOL
) -> StochasticMatrix:
    """Parse and validate in one call."""
    entries, labels = parse_matrix(raw, format)
    return validate_stochastic(entries, labels, tol=tol)


def classify_structure(P: StochasticMatrix) -> ChainStructure:
    """Decide irreducibility and (if irreducible) the period of the chain.

    The directed graph has an edge i -> j exactly when ``entries[i, j] > 0``
    (strict test; tiny entries are kept, not truncated). Irreducibility is
    strong connectivity; the period is the gcd of ``level(u) + 1 - level(v)``
    over all edges inside the component, with levels taken from a BFS.

    Periodic irreducible chains are fine for every consumer in this package,
    which only ever needs time-averaged limits.
    """
    A = P.entries > 0
    graph = csr_matrix(A)
    n_components, labels = connected_components(graph, directed=True, connection="strong")
    classes: dict[int, list[int]] = {}
    for state, comp in enumerate(labels):
        classes.setdefault(int(comp), []).append(state)
    # canonical order: classes sorted by their smallest member
    ordered = tuple(
        tuple(members) for members in sorted(classes.values(), key=lambda c: c[0])
    )
    irreducible = n_components == 1
    period = _bfs_period(A) if irreducible else None
    return ChainStructure(
        irreducible=irreducible, period=period, communicating_classes=ordered
    )


def _bfs_period(adjacency: np.ndarray) -> int:
    """gcd of (level(u) + 1 - level(v)) over edges of a strongly connected graph."""
    n = adjacency.shape[0]
    level = np.full(n, -1, dtype=int)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(adjacency[u])[0]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    g = 0
    us, vs = np.nonzero(adjacency)
    for u, v in zip(us, vs):
        g = math.gcd(g, int(level[u]) + 1 - int(level[v]))
        if g == 1:
            break
    return g if g > 0 else 1
