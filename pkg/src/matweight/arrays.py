"""Arrays over finite labelled alphabets: index maps, ampliation, enumeration.

An :class:`AWSet` is a finite alphabet of labelled points, each carrying a
payload (a complex scalar, a vector, a tuple of per-block components, or the
distinguished zero-weight symbol :data:`THETA`) plus a weight rule supplied by
:mod:`matweight.weights`.  An :class:`Array` stores point indices in row-major
order; all indices in this module are 0-based.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceError

__all__ = [
    "THETA",
    "THETA_LABEL",
    "Point",
    "AWSet",
    "Array",
    "Injection",
    "PointMap",
    "EnumCaps",
    "subarray",
    "ampliate",
    "count_arrays",
    "enumerate_arrays",
    "hadamard_matrix",
    "hadamard_array",
    "sign_pair",
    "parse_array",
    "format_array",
]

THETA_LABEL = "Theta"


class _Theta:
    """Singleton payload for the distinguished zero-weight symbol."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Theta"


THETA = _Theta()

#: Maximum number of arrays enumerate_arrays will agree to generate.
ENUMERATION_LIMIT = 10**9


@dataclass(frozen=True)
class Point:
    """A labelled alphabet element with an arbitrary payload."""

    label: str
    payload: object


def _validate_label(label: str) -> None:
    if not label or any(c in label for c in ",;:|@ \t\n"):
        raise InputError(f"invalid point label {label!r}")


@dataclass(frozen=True)
class AWSet:
    """Finite alphabet with a weight rule.

    ``rule`` is any object implementing the weight-rule protocol from
    :mod:`matweight.weights` (``KIND`` attribute plus ``values(X, grids)``).
    """

    points: tuple[Point, ...]
    rule: object = None

    def __post_init__(self):
        if not self.points:
            raise InputError("alphabet must be nonempty")
        labels = [p.label for p in self.points]
        for lab in labels:
            _validate_label(lab)
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate labels in alphabet: {labels}")
        if sum(1 for p in self.points if p.payload is THETA) > 1:
            raise InputError("the zero-weight symbol may appear at most once")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.points)

    def index(self, label: str) -> int:
        for i, p in enumerate(self.points):
            if p.label == label:
                return i
        raise InputError(f"unknown label {label!r}; alphabet has {self.labels}")

    @property
    def theta_index(self) -> int | None:
        for i, p in enumerate(self.points):
            if p.payload is THETA:
                return i
        return None

    def scalar_payloads(self) -> np.ndarray:
        """Payloads as a complex vector; THETA maps to 0."""
        out = np.zeros(len(self.points), dtype=complex)
        for i, p in enumerate(self.points):
            if p.payload is THETA:
                continue
            try:
                out[i] = complex(p.payload)
            except TypeError as exc:
                raise InputError(
                    f"point {p.label!r} has non-scalar payload {p.payload!r}"
                ) from exc
        return out

    def vector_payloads(self) -> np.ndarray:
        """Payloads as a (p, d) complex matrix of vectors."""
        try:
            out = np.asarray([np.asarray(p.payload, dtype=complex) for p in self.points])
        except (TypeError, ValueError) as exc:
            raise InputError("alphabet payloads are not uniform vectors") from exc
        if out.ndim != 2:
            raise InputError(f"expected vector payloads, got shape {out.shape}")
        return out

    def with_rule(self, rule) -> "AWSet":
        return AWSet(self.points, rule)


@dataclass(frozen=True)
class Array:
    """An m x n array of alphabet indices, stored row-major."""

    alphabet: AWSet
    rows: int
    cols: int
    cells: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError(f"degenerate array shape {self.rows}x{self.cols}")
        if len(self.cells) != self.rows * self.cols:
            raise InputError(
                f"cell count {len(self.cells)} != {self.rows}*{self.cols}"
            )
        p = len(self.alphabet)
        if any(c < 0 or c >= p for c in self.cells):
            raise InputError("cell index out of range for alphabet")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def grid(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=np.intp).reshape(self.rows, self.cols)

    def entry(self, j: int, k: int) -> int:
        return self.cells[j * self.cols + k]

    def point(self, j: int, k: int) -> Point:
        return self.alphabet.points[self.entry(j, k)]

    def key(self) -> tuple:
        return (self.rows, self.cols, self.cells)

    def __str__(self) -> str:
        return format_array(self)


def array_from_grid(X: AWSet, grid) -> Array:
    g = np.asarray(grid, dtype=np.intp)
    if g.ndim != 2:
        raise InputError("grid must be 2-D")
    return Array(X, g.shape[0], g.shape[1], tuple(int(c) for c in g.ravel()))


def array_from_labels(X: AWSet, rows: Sequence[Sequence[str]]) -> Array:
    cells = tuple(X.index(lab) for row in rows for lab in row)
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise InputError("ragged rows in array literal")
    return Array(X, len(rows), ncols, cells)


@dataclass(frozen=True)
class Injection:
    """A one-to-one map recorded as its image list (0-based)."""

    images: tuple[int, ...]
    target: int

    def __post_init__(self):
        if not self.images:
            raise InputError("injection needs a nonempty domain")
        if len(set(self.images)) != len(self.images):
            raise InputError(f"images not pairwise distinct: {self.images}")
        if min(self.images) < 0 or max(self.images) >= self.target:
            raise InputError(f"images {self.images} out of range [0, {self.target})")

    def __len__(self) -> int:
        return len(self.images)

    @staticmethod
    def identity(n: int) -> "Injection":
        return Injection(tuple(range(n)), n)

    def after(self, other: "Injection") -> "Injection":
        """Composition self o other (other first)."""
        if other.target != len(self.images):
            raise InputError("injection composition size mismatch")
        return Injection(tuple(self.images[i] for i in other.images), self.target)


@dataclass(frozen=True)
class PointMap:
    """A map from alphabet points to scalars or to another alphabet.

    ``target is None`` means a scalar map; ``values`` then holds one complex
    number per source point.  Otherwise ``values`` holds target point indices.
    """

    source: AWSet
    values: tuple
    target: AWSet | None = None

    def __post_init__(self):
        if len(self.values) != len(self.source):
            raise InputError("PointMap must assign a value to every source point")
        if self.target is not None:
            p = len(self.target)
            if any(not (0 <= int(v) < p) for v in self.values):
                raise InputError("target index out of range in PointMap")

    @property
    def is_scalar(self) -> bool:
        return self.target is None

    def scalar_values(self) -> np.ndarray:
        if not self.is_scalar:
            raise InputError("PointMap has an alphabet target, not scalars")
        return np.asarray(self.values, dtype=complex)

    def scaled(self, c: complex) -> "PointMap":
        if not self.is_scalar:
            raise InputError("only scalar maps can be scaled")
        return PointMap(self.source, tuple(complex(c) * complex(v) for v in self.values))

    @staticmethod
    def identity(X: AWSet) -> "PointMap":
        return PointMap(X, tuple(range(len(X))), X)

    @staticmethod
    def constant_one(X: AWSet) -> "PointMap":
        return PointMap(X, (1.0 + 0.0j,) * len(X))

    @staticmethod
    def characteristic(X: AWSet, label: str) -> "PointMap":
        i = X.index(label)
        return PointMap(X, tuple(1.0 + 0j if k == i else 0.0 + 0j for k in range(len(X))))


def compose(psi: PointMap, phi: PointMap) -> PointMap:
    """psi o phi; phi must target psi's source alphabet."""
    if phi.target is None or phi.target is not psi.source:
        raise InputError("composition requires phi to target psi's source")
    return PointMap(phi.source, tuple(psi.values[int(i)] for i in phi.values), psi.target)


def subarray(A: Array, alpha: Injection | Sequence[int], beta: Injection | Sequence[int]) -> Array:
    """Restrict ``A`` to the rows/columns selected by two injections."""
    ai = alpha.images if isinstance(alpha, Injection) else tuple(int(i) for i in alpha)
    bi = beta.images if isinstance(beta, Injection) else tuple(int(i) for i in beta)
    if isinstance(alpha, Injection) and alpha.target != A.rows:
        raise InputError(f"row injection targets [{alpha.target}], array has {A.rows} rows")
    if isinstance(beta, Injection) and beta.target != A.cols:
        raise InputError(f"column injection targets [{beta.target}], array has {A.cols} cols")
    if len(set(ai)) != len(ai) or len(set(bi)) != len(bi):
        raise InputError("selections must be one-to-one")
    if ai and (min(ai) < 0 or max(ai) >= A.rows):
        raise InputError("row selection out of range")
    if bi and (min(bi) < 0 or max(bi) >= A.cols):
        raise InputError("column selection out of range")
    if not ai or not bi:
        raise InputError("empty selection")
    nc = A.cols
    cells = tuple(A.cells[a * nc + b] for a in ai for b in bi)
    return Array(A.alphabet, len(ai), len(bi), cells)


def ampliate(phi: PointMap, A: Array):
    """Apply ``phi`` to every entry.

    Returns a complex matrix for scalar maps, an :class:`Array` over the
    target alphabet otherwise.
    """
    if A.alphabet is not phi.source and A.alphabet != phi.source:
        raise InputError("array is not over the map's source alphabet")
    if phi.is_scalar:
        vals = phi.scalar_values()
        return vals[A.grid()]
    cells = tuple(int(phi.values[c]) for c in A.cells)
    return Array(phi.target, A.rows, A.cols, cells)


@dataclass(frozen=True)
class EnumCaps:
    """Bounds for the array enumeration stream.

    Shapes with ``rows <= R``, ``cols <= C`` and ``rows*cols <= cells`` are
    enumerated exhaustively in canonical order (by rows*cols, then rows, then
    lexicographic cells).  Shapes within R x C whose cell count exceeds
    ``cells`` receive a seeded uniform random supplement of ``samples`` arrays
    in total.
    """

    rows: int = 4
    cols: int = 4
    cells: int = 9
    samples: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.cells < 1:
            raise InputError("caps must be positive")
        if self.samples < 0:
            raise InputError("sample count must be nonnegative")

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "cells": self.cells,
            "samples": self.samples,
            "seed": self.seed,
        }


def _exhaustive_shapes(caps: EnumCaps) -> list[tuple[int, int]]:
    shapes = [
        (m, n)
        for m in range(1, caps.rows + 1)
        for n in range(1, caps.cols + 1)
        if m * n <= caps.cells
    ]
    shapes.sort(key=lambda s: (s[0] * s[1], s[0]))
    return shapes


def _sampled_shapes(caps: EnumCaps) -> list[tuple[int, int]]:
    shapes = [
        (m, n)
        for m in range(1, caps.rows + 1)
        for n in range(1, caps.cols + 1)
        if m * n > caps.cells
    ]
    shapes.sort(key=lambda s: (s[0] * s[1], s[0]))
    return shapes


def count_arrays(X: AWSet, caps: EnumCaps) -> int:
    """Number of arrays the exhaustive part of the stream will produce."""
    p = len(X)
    return sum(p ** (m * n) for m, n in _exhaustive_shapes(caps))


def enumerate_arrays(X: AWSet, caps: EnumCaps = EnumCaps()) -> Iterator[Array]:
    """Deterministic stream of arrays over ``X`` within ``caps``.

    The exhaustive part is emitted in canonical order; the seeded random
    supplement (for in-bounds shapes above the cell cap) follows it, with
    duplicates dropped.
    """
    total = count_arrays(X, caps)
    if total > ENUMERATION_LIMIT:
        raise ResourceError(
            f"enumeration would produce about {total} arrays (limit {ENUMERATION_LIMIT})"
        )
    p = len(X)
    for m, n in _exhaustive_shapes(caps):
        for cells in itertools.product(range(p), repeat=m * n):
            yield Array(X, m, n, cells)
    shapes = _sampled_shapes(caps)
    if not shapes or caps.samples == 0:
        return
    rng = np.random.default_rng(caps.seed)
    k = len(shapes)
    base, rem = divmod(caps.samples, k)
    seen: set[tuple] = set()
    for i, (m, n) in enumerate(shapes):
        quota = base + (1 if i < rem else 0)
        if quota == 0:
            continue
        draws = rng.integers(0, p, size=(quota, m * n))
        for row in draws:
            cells = tuple(int(c) for c in row)
            key = (m, n, cells)
            if key in seen:
                continue
            seen.add(key)
            yield Array(X, m, n, cells)


def hadamard_matrix(m: int) -> np.ndarray:
    """The m-th term of the recursive +/-1 certificate family.

    Shape (m+1) x 2**m; satisfies A A^T = 2**m I.
    """
    if m < 0:
        raise InputError("level must be nonnegative")
    if m > 20:
        raise ResourceError(f"level {m} exceeds the supported maximum of 20")
    A = np.ones((1, 1), dtype=np.int8)
    for k in range(m):
        w = 2**k
        top = np.concatenate([np.ones((1, w), np.int8), -np.ones((1, w), np.int8)], axis=1)
        A = np.concatenate([top, np.concatenate([A, A], axis=1)], axis=0)
    return A


def sign_pair(X: AWSet) -> tuple[int, int] | None:
    """Indices of the points with scalar payloads 1 and -1, if both exist."""
    plus = minus = None
    for i, p in enumerate(X.points):
        if p.payload is THETA:
            continue
        try:
            z = complex(p.payload)
        except TypeError:
            return None
        if z == 1:
            plus = i
        elif z == -1:
            minus = i
    if plus is None or minus is None:
        return None
    return plus, minus


def hadamard_array(m: int, X: AWSet) -> Array:
    """The level-m certificate matrix as an array over ``X``.

    ``X`` must contain points with payloads 1 and -1.
    """
    pair = sign_pair(X)
    if pair is None:
        raise InputError("alphabet lacks points with payloads 1 and -1")
    plus, minus = pair
    H = hadamard_matrix(m)
    grid = np.where(H > 0, plus, minus)
    return array_from_grid(X, grid)


def parse_array(text: str, X: AWSet) -> Array:
    """Parse the array literal format: rows split by ';', cells by ','."""
    rows = [r.strip() for r in text.strip().split(";") if r.strip()]
    if not rows:
        raise InputError("empty array literal")
    table = [[tok.strip() for tok in r.split(",")] for r in rows]
    return array_from_labels(X, table)


def format_array(A: Array) -> str:
    labels = A.alphabet.labels
    nc = A.cols
    return ";".join(
        ",".join(labels[A.cells[j * nc + k]] for k in range(nc)) for j in range(A.rows)
    )
