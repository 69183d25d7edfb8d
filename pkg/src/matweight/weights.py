"""Array-weight rules: exact values, direction-tagged bounds, axiom checking.

A weight rule assigns a nonnegative value to every array over its alphabet.
Rules with closed-form values (trace/operator norms, entry sums and maxima,
weighted l1 projective norms, zero-append suprema, scalings, l1-sums) are
*exact*; the disjoint-union weight is only ever bracketed, see
:func:`coproduct_bounds`.

Every rule implements ``values(X, grids) -> ndarray`` for a stack of
same-shape index grids, which keeps bulk evaluation (axiom checking, ratio
scans) in batched LAPACK calls.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .arrays import (
    THETA,
    THETA_LABEL,
    Array,
    AWSet,
    EnumCaps,
    Point,
    array_from_grid,
    enumerate_arrays,
    format_array,
)
from .errors import InputError, ResourceError, UnsupportedError

__all__ = [
    "WeightBound",
    "WeightedSet",
    "OperatorNormInherited",
    "TraceNormScalar",
    "PolyhedralSpace",
    "PolyhedralMinNorm",
    "WeightedL1Projective",
    "EntryWeightSum",
    "EntryWeightMax",
    "ZeroAppend",
    "ScaledRule",
    "L1SumRule",
    "DisjointUnionRule",
    "min_inherited",
    "amax_inherited",
    "ma_set",
    "mina_set",
    "min_findim",
    "amax_weighted_l1",
    "l1_sum_alphabet",
    "scaled",
    "zero_appended",
    "zero_singleton",
    "disjoint_union",
    "weight",
    "weight_value",
    "batch_weight_values",
    "zx_weight",
    "coproduct_bounds",
    "l1sum_norm",
    "min_finitedim_norm",
    "check_axioms",
    "AxiomViolation",
    "AxiomReport",
]

#: slack for comparing exact weights computed in floating point
_CMP_ABS = 1e-9
_CMP_REL = 1e-9


@dataclass(frozen=True)
class WeightBound:
    """A weight value tagged with the side it certifies."""

    value: float
    direction: str  # "exact" | "lower" | "upper"
    witness: object = None

    def __post_init__(self):
        if self.direction not in ("exact", "lower", "upper"):
            raise InputError(f"bad direction tag {self.direction!r}")
        if not math.isfinite(self.value) or self.value < -1e-12:
            raise InputError(f"weight value must be finite and nonnegative: {self.value}")


@dataclass(frozen=True)
class WeightedSet:
    """A finite set of labels with nonnegative weights."""

    labels: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise InputError("labels and weights must align")
        if any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise InputError("weights must be finite and nonnegative")

    def weight_of(self, label: str) -> float:
        return self.weights[self.labels.index(label)]


# ---------------------------------------------------------------------------
# payload access (cached per alphabet)
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=512)
def _scalar_payloads(X: AWSet) -> np.ndarray:
    return X.scalar_payloads()


@functools.lru_cache(maxsize=512)
def _vector_payloads(X: AWSet) -> np.ndarray:
    return X.vector_payloads()


def _check_no_theta(X: AWSet, grids: np.ndarray, kind: str) -> None:
    ti = X.theta_index
    if ti is not None and np.any(grids == ti):
        raise InputError(f"rule {kind} has no semantics for the zero-weight symbol")


def _as_grids(grids) -> np.ndarray:
    g = np.asarray(grids, dtype=np.intp)
    if g.ndim == 2:
        g = g[None, :, :]
    if g.ndim != 3:
        raise InputError("expected one or a stack of 2-D index grids")
    return g


# ---------------------------------------------------------------------------
# rule classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorNormInherited:
    """Scalar payloads inherited from the minimal matrix-norm on C."""

    KIND = "InheritedOpNorm"

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        _check_no_theta(X, g, self.KIND)
        return linalg.operator_norms(_scalar_payloads(X)[g])


@dataclass(frozen=True)
class TraceNormScalar:
    """Scalar payloads with the maximal (trace-norm) matrix structure on C."""

    KIND = "AmaxScalar"

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        _check_no_theta(X, g, self.KIND)
        return linalg.trace_norms(_scalar_payloads(X)[g])


@dataclass(frozen=True)
class PolyhedralSpace:
    """A normed space whose dual ball has finitely many extreme directions.

    Supported kinds: ``"C"`` (scalars), ``"l1"`` and ``"linf"`` of a given
    dimension.
    """

    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("C", "l1", "linf"):
            raise UnsupportedError(f"unsupported space kind {self.kind!r}")
        if self.dim < 1:
            raise InputError("dimension must be positive")
        if self.kind == "C" and self.dim != 1:
            raise InputError("scalar space has dimension 1")
        if self.kind == "l1" and self.dim > 12:
            raise ResourceError("l1 dual vertex enumeration capped at dimension 12")

    def dual_vertices(self) -> np.ndarray:
        if self.kind == "C":
            return np.ones((1, 1), dtype=complex)
        if self.kind == "linf":
            return np.eye(self.dim, dtype=complex)
        # l1: sign patterns with the first coordinate pinned to +1 (a global
        # phase does not change an operator norm)
        rows = []
        for signs in itertools.product((1.0, -1.0), repeat=self.dim - 1):
            rows.append((1.0,) + signs)
        return np.asarray(rows, dtype=complex)


def _golden_max(f, lo: float, hi: float, iters: int = 60):
    """Golden-section maximisation of a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
    return (c, fc) if fc >= fd else (d, fd)


def _min_norm_single(space: PolyhedralSpace, tensor: np.ndarray) -> float:
    """sup over the dual unit ball of the operator norm of the paired matrix.

    ``tensor`` has shape (m, n, d).  The maximum over the listed extreme
    directions is exact for real data; a coordinate-wise unimodular phase
    ascent guards complex inputs.
    """
    if space.kind == "C":
        return float(linalg.operator_norm(tensor[:, :, 0]))
    verts = space.dual_vertices()
    mats = np.einsum("mnd,kd->kmn", tensor, verts)
    vals = linalg.operator_norms(mats)
    best_k = int(np.argmax(vals))
    best = float(vals[best_k])
    if not np.any(np.abs(tensor.imag) > 0):
        return best
    # phase ascent from the best vertex, one coordinate at a time
    phi = verts[best_k].copy()

    def value(v):
        return float(linalg.operator_norm(np.einsum("mnd,d->mn", tensor, v)))

    for _ in range(4):
        improved = False
        for i in range(space.dim):
            base = phi.copy()

            def f(theta, i=i, base=base):
                v = base.copy()
                v[i] = abs(v[i]) * np.exp(1j * theta)
                return value(v)

            th0 = float(np.angle(phi[i]))
            th, fv = _golden_max(f, th0 - math.pi, th0 + math.pi)
            if fv > best + 1e-12:
                phi[i] = abs(phi[i]) * np.exp(1j * th)
                best = fv
                improved = True
        if not improved:
            break
    return best


def min_finitedim_norm(space: PolyhedralSpace, tensor) -> WeightBound:
    """Minimal matrix-norm of an array of vectors from a polyhedral space.

    ``tensor`` is the (m, n, d) stack of entry coordinates.  For ``space`` =
    C this is the operator norm of the scalar matrix.
    """
    t = np.asarray(tensor, dtype=complex)
    if t.ndim == 2:
        t = t[:, :, None]
    if t.ndim != 3 or t.shape[2] != space.dim:
        raise InputError(f"tensor shape {t.shape} does not match dimension {space.dim}")
    return WeightBound(_min_norm_single(space, t), "exact")


@dataclass(frozen=True)
class PolyhedralMinNorm:
    """Vector payloads inherited from the minimal matrix-norm on a polyhedral space."""

    KIND = "InheritedFiniteDimMIN"
    space: PolyhedralSpace = PolyhedralSpace("C")

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        _check_no_theta(X, g, self.KIND)
        vecs = _vector_payloads(X)
        if vecs.shape[1] != self.space.dim:
            raise InputError("payload dimension does not match the space")
        return np.asarray([_min_norm_single(self.space, vecs[gi]) for gi in g])


@dataclass(frozen=True)
class WeightedL1Projective:
    """Vector payloads with the maximal structure over a weighted l1 space.

    The value of an array is the weighted sum over coordinates of the trace
    norm of that coordinate's slice.
    """

    KIND = "AmaxWeightedL1"
    weights: tuple[float, ...] = (1.0,)

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        _check_no_theta(X, g, self.KIND)
        vecs = _vector_payloads(X)
        d = vecs.shape[1]
        if d != len(self.weights):
            raise InputError("payload dimension does not match the weight vector")
        coords = vecs[g]  # (N, m, n, d)
        slices = np.moveaxis(coords, -1, 1)  # (N, d, m, n)
        N = slices.shape[0]
        tr = linalg.trace_norms(slices.reshape(N * d, *slices.shape[2:])).reshape(N, d)
        return tr @ np.asarray(self.weights)


@dataclass(frozen=True)
class EntryWeightSum:
    """Sum of per-entry point weights (the greatest extension of a weight)."""

    KIND = "MA"
    point_weights: tuple[float, ...] = ()

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        w = np.asarray(self.point_weights, dtype=float)
        if len(w) != len(X):
            raise InputError("point weights do not match the alphabet")
        return w[g].sum(axis=(1, 2))


@dataclass(frozen=True)
class EntryWeightMax:
    """Maximum per-entry point weight (the least extension of a weight)."""

    KIND = "mA"
    point_weights: tuple[float, ...] = ()

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        w = np.asarray(self.point_weights, dtype=float)
        if len(w) != len(X):
            raise InputError("point weights do not match the alphabet")
        return w[g].max(axis=(1, 2))


@dataclass(frozen=True)
class ZeroAppend:
    """Least extension of an inner rule to an alphabet with the symbol Theta.

    The value of an array is the supremum of the inner weight over all
    Theta-free subarrays (0 for the empty family).  Requires Theta to be the
    last alphabet point, which :func:`zero_appended` guarantees.
    """

    KIND = "ZX"
    inner: object = None

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        return np.asarray([self._single(X, gi) for gi in g])

    def _single(self, X: AWSet, grid: np.ndarray) -> float:
        return _zx_single(X, self.inner, grid)[0]


def _zx_inner_alphabet(X: AWSet, inner) -> AWSet:
    ti = X.theta_index
    if ti is None or ti != len(X) - 1:
        raise InputError("zero-append rule expects Theta as the final alphabet point")
    return AWSet(X.points[:-1], inner)


def _zx_single(X: AWSet, inner, grid: np.ndarray) -> tuple[float, object]:
    """Exact zero-append weight of one grid, with the maximising submatrix."""
    sub = _zx_inner_alphabet(X, inner)
    ti = len(X) - 1
    theta = grid == ti
    m, n = grid.shape
    if not theta.any():
        return float(inner.values(sub, grid[None])[0]), "full array"
    transposed = False
    if m > n:
        grid, theta = grid.T, theta.T
        m, n = n, m
        transposed = True
    if m > 16:
        raise ResourceError("zero-append search supports at most 16 rows/columns")
    best, best_witness = 0.0, "empty family"
    rows = list(range(m))
    for r in range(1, m + 1):
        for row_set in itertools.combinations(rows, r):
            ok_cols = ~theta[list(row_set)].any(axis=0)
            if not ok_cols.any():
                continue
            piece = grid[np.ix_(list(row_set), np.flatnonzero(ok_cols))]
            val = float(inner.values(sub, piece[None])[0])
            if val > best:
                best = val
                rr, cc = row_set, tuple(int(c) for c in np.flatnonzero(ok_cols))
                best_witness = {
                    "rows": cc if transposed else rr,
                    "cols": rr if transposed else cc,
                }
    return best, best_witness


@dataclass(frozen=True)
class ScaledRule:
    """A positive multiple of an inner rule."""

    KIND = "Scaled"
    factor: float = 1.0
    inner: object = None

    def __post_init__(self):
        if not (self.factor > 0 and math.isfinite(self.factor)):
            raise InputError("scale factor must be positive and finite")

    def values(self, X: AWSet, grids) -> np.ndarray:
        return self.factor * self.inner.values(X, grids)


@dataclass(frozen=True)
class L1SumRule:
    """Entrywise block projections summed: the l1-direct-sum matrix norm.

    Each alphabet payload is a tuple with one component per block rule.
    """

    KIND = "L1Sum"
    blocks: tuple = ()

    def values(self, X: AWSet, grids) -> np.ndarray:
        g = _as_grids(grids)
        total = np.zeros(g.shape[0])
        for b, rule in enumerate(self.blocks):
            comps = []
            for p in X.points:
                if p.payload is THETA or len(p.payload) != len(self.blocks):
                    raise InputError("payloads must be tuples with one component per block")
                comps.append(Point(p.label, p.payload[b]))
            total += rule.values(AWSet(tuple(comps), rule), g)
        return total


@dataclass(frozen=True)
class DisjointUnionRule:
    """Marker rule for a disjoint union of alphabets.

    The weight is defined through a supremum over test maps and has no exact
    finite computation; use :func:`coproduct_bounds` for a certified bracket.
    """

    KIND = "DisjointUnion"
    cofactors: tuple = ()
    owners: tuple = ()  # (cofactor index, point index within it) per union point

    def values(self, X: AWSet, grids) -> np.ndarray:
        raise UnsupportedError(
            "the disjoint-union weight is not exactly computable; "
            "use coproduct_bounds for a certified lower/upper bracket"
        )


# ---------------------------------------------------------------------------
# alphabet builders
# ---------------------------------------------------------------------------


def _scalar_points(pairs) -> tuple[Point, ...]:
    items = pairs.items() if isinstance(pairs, dict) else pairs
    return tuple(Point(str(lab), complex(val)) for lab, val in items)


def min_inherited(pairs) -> AWSet:
    """Alphabet of scalars with the minimal (operator-norm) structure."""
    return AWSet(_scalar_points(pairs), OperatorNormInherited())


def amax_inherited(pairs) -> AWSet:
    """Alphabet of scalars with the maximal (trace-norm) structure."""
    return AWSet(_scalar_points(pairs), TraceNormScalar())


def ma_set(ws: WeightedSet, payloads=None) -> AWSet:
    """Greatest array-weight extending a weighted set (entry sums)."""
    pts = _weighted_points(ws, payloads)
    return AWSet(pts, EntryWeightSum(tuple(float(w) for w in ws.weights)))


def mina_set(ws: WeightedSet, payloads=None) -> AWSet:
    """Least array-weight extending a weighted set (entry maxima)."""
    pts = _weighted_points(ws, payloads)
    return AWSet(pts, EntryWeightMax(tuple(float(w) for w in ws.weights)))


def _weighted_points(ws: WeightedSet, payloads) -> tuple[Point, ...]:
    if payloads is None:
        payloads = [complex(w) for w in ws.weights]
    if len(payloads) != len(ws.labels):
        raise InputError("payloads must align with the weighted set")
    return tuple(
        Point(lab, pay if pay is THETA else pay)
        for lab, pay in zip(ws.labels, payloads)
    )


def min_findim(labels, vectors, space: PolyhedralSpace) -> AWSet:
    """Alphabet of vectors with the minimal structure on a polyhedral space."""
    pts = tuple(
        Point(str(lab), tuple(complex(c) for c in vec)) for lab, vec in zip(labels, vectors)
    )
    return AWSet(pts, PolyhedralMinNorm(space))


def amax_weighted_l1(labels, vectors, weights) -> AWSet:
    """Alphabet of weighted-l1 coefficient vectors with the maximal structure."""
    pts = tuple(
        Point(str(lab), tuple(complex(c) for c in vec)) for lab, vec in zip(labels, vectors)
    )
    return AWSet(pts, WeightedL1Projective(tuple(float(w) for w in weights)))


def l1_sum_alphabet(points, blocks) -> AWSet:
    """Alphabet of elements of an l1-direct sum.

    ``points`` is a sequence of (label, components) with one component per
    block rule in ``blocks``.
    """
    blocks = tuple(blocks)
    pts = []
    for lab, comps in points:
        comps = tuple(comps)
        if len(comps) != len(blocks):
            raise InputError("component count must match the block rules")
        pts.append(Point(str(lab), comps))
    return AWSet(tuple(pts), L1SumRule(blocks))


def scaled(X: AWSet, factor: float) -> AWSet:
    return X.with_rule(ScaledRule(float(factor), X.rule))


def zero_appended(X: AWSet) -> AWSet:
    """Append the zero-weight symbol Theta with the least compatible weight."""
    if X.theta_index is not None:
        raise InputError("alphabet already contains the zero-weight symbol")
    return AWSet(X.points + (Point(THETA_LABEL, THETA),), ZeroAppend(X.rule))


def zero_singleton() -> AWSet:
    """The one-point alphabet {Theta} with identically zero weights."""
    return AWSet((Point(THETA_LABEL, THETA),), EntryWeightSum((0.0,)))


def disjoint_union(*cofactors: AWSet) -> AWSet:
    """Underlying alphabet of the coproduct of array-weighted sets.

    Labels must be unique across cofactors.  The attached rule refuses exact
    evaluation; use :func:`coproduct_bounds`.
    """
    if not cofactors:
        raise InputError("need at least one cofactor")
    pts, owners = [], []
    for lam, X in enumerate(cofactors):
        for i, p in enumerate(X.points):
            pts.append(p)
            owners.append((lam, i))
    return AWSet(tuple(pts), DisjointUnionRule(tuple(cofactors), tuple(owners)))


# ---------------------------------------------------------------------------
# evaluation entry points
# ---------------------------------------------------------------------------


def _rule_of(X: AWSet):
    if X.rule is None:
        raise InputError("alphabet has no weight rule attached")
    return X.rule


def batch_weight_values(X: AWSet, grids) -> np.ndarray:
    """Exact weights for a stack of same-shape index grids over ``X``."""
    return _rule_of(X).values(X, grids)


def weight_value(X: AWSet, A: Array) -> float:
    return float(batch_weight_values(X, A.grid()[None])[0])


def weight(X: AWSet, A: Array) -> WeightBound:
    """Exact weight of one array over ``X``.

    Raises for the disjoint-union rule, whose weight is only bracketed.
    """
    if A.alphabet != X:
        raise InputError("array is not over the given alphabet")
    return WeightBound(weight_value(X, A), "exact")


def zx_weight(X: AWSet, A: Array) -> WeightBound:
    """Exact zero-append weight with the maximising Theta-free submatrix."""
    rule = _rule_of(X)
    if not isinstance(rule, ZeroAppend):
        raise InputError("zx_weight requires a zero-append rule")
    if A.alphabet != X:
        raise InputError("array is not over the given alphabet")
    val, witness = _zx_single(X, rule.inner, A.grid())
    return WeightBound(val, "exact", witness)


def l1sum_norm(blocks) -> WeightBound:
    """Sum of per-block weights for same-shape arrays (the l1-sum norm)."""
    blocks = list(blocks)
    if not blocks:
        raise InputError("need at least one block")
    shape = blocks[0][1].shape
    total = 0.0
    for X, A in blocks:
        if A.shape != shape:
            raise InputError(f"block shape {A.shape} != {shape}")
        total += weight_value(X, A)
    return WeightBound(total, "exact")


# ---------------------------------------------------------------------------
# coproduct bracket
# ---------------------------------------------------------------------------


def _amax_identity_contractive(X: AWSet, caps: EnumCaps) -> bool:
    """Check at caps that payload identity into the trace-norm scalars is
    completely contractive on ``X`` (Theta maps to 0)."""
    try:
        payloads = X.scalar_payloads()
    except InputError:
        return False
    for shape_grids in _grids_by_shape(X, caps):
        vals = batch_weight_values(X, shape_grids)
        imgs = linalg.trace_norms(payloads[shape_grids])
        zero = vals <= 1e-12
        if np.any(imgs[zero] > 1e-9):
            return False
        ok = ~zero
        if np.any(imgs[ok] > vals[ok] * (1 + _CMP_REL) + _CMP_ABS):
            return False
    return True


def _grids_by_shape(X: AWSet, caps: EnumCaps):
    """Enumerated index grids grouped into (N, m, n) stacks per shape."""
    groups: dict[tuple[int, int], list] = {}
    order: list[tuple[int, int]] = []
    for A in enumerate_arrays(X, caps):
        if A.shape not in groups:
            groups[A.shape] = []
            order.append(A.shape)
        groups[A.shape].append(A.cells)
    for shape in order:
        m, n = shape
        yield np.asarray(groups[shape], dtype=np.intp).reshape(-1, m, n)


def coproduct_bounds(
    A: Array,
    caps: EnumCaps = EnumCaps(),
    test_maps: tuple[str, ...] = ("zx", "amax", "zero"),
) -> tuple[WeightBound, WeightBound]:
    """Certified bracket for the disjoint-union weight of ``A``.

    The lower bound is the best value over a fixed library of test maps whose
    complete contractivity on each cofactor is either proven (zero-append
    retractions, the zero map) or verified at ``caps`` (scalar identity into
    the trace-norm scalars).  The upper bound is the sum of the entries'
    1x1 weights in their own cofactors.
    """
    D = A.alphabet
    rule = _rule_of(D)
    if not isinstance(rule, DisjointUnionRule):
        raise InputError("coproduct_bounds requires a disjoint-union alphabet")
    cofactors, owners = rule.cofactors, rule.owners

    w11 = []
    for lam, idx in owners:
        Xl = cofactors[lam]
        w11.append(float(batch_weight_values(Xl, np.asarray([[[idx]]]))[0]))
    upper_val = float(sum(w11[c] for c in A.cells))

    candidates: list[tuple[float, str]] = []
    skipped: list[str] = []
    if "zero" in test_maps:
        candidates.append((0.0, "zero map"))
    if "zx" in test_maps:
        for lam, Xl in enumerate(cofactors):
            Z = zero_appended(Xl)
            ti = len(Z) - 1
            cells = tuple(
                owners[c][1] if owners[c][0] == lam else ti for c in A.cells
            )
            img = Array(Z, A.rows, A.cols, cells)
            val = zx_weight(Z, img).value
            candidates.append((val, f"zero-append retraction onto cofactor {lam}"))
    if "amax" in test_maps:
        ok = True
        for lam, Xl in enumerate(cofactors):
            if not _amax_identity_contractive(Xl, caps):
                ok = False
                skipped.append(
                    f"scalar identity into trace-norm scalars (cofactor {lam} not verified contractive at caps)"
                )
                break
        if ok:
            payload = np.zeros((A.rows, A.cols), dtype=complex)
            for j in range(A.rows):
                for k in range(A.cols):
                    p = A.point(j, k)
                    payload[j, k] = 0.0 if p.payload is THETA else complex(p.payload)
            candidates.append(
                (linalg.trace_norm(payload), "scalar identity into trace-norm scalars")
            )

    best_val, best_map = max(candidates, key=lambda t: t[0])
    best_val = min(best_val, upper_val)
    lower = WeightBound(best_val, "lower", {"test_map": best_map, "skipped": skipped})
    upper = WeightBound(upper_val, "upper", "sum of entrywise 1x1 weights")
    return lower, upper


# ---------------------------------------------------------------------------
# axiom verifier
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def _injections(m: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for j in range(1, m + 1):
        out.extend(itertools.permutations(range(m), j))
    return tuple(out)


@functools.lru_cache(maxsize=64)
def _splits(m: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    out = []
    for j in range(1, m):
        for alpha in itertools.permutations(range(m), j):
            rest = [i for i in range(m) if i not in alpha]
            for gamma in itertools.permutations(rest):
                out.append((alpha, tuple(gamma)))
    return tuple(out)


class _WeightTable:
    """Memoised exact weights keyed by (rows, cols, cells)."""

    def __init__(self, X: AWSet):
        self.X = X
        self.table: dict[tuple, float] = {}

    def prefill(self, caps: EnumCaps) -> int:
        n = 0
        for grids in _grids_by_shape(self.X, caps):
            vals = batch_weight_values(self.X, grids)
            m, ncols = grids.shape[1], grids.shape[2]
            for g, v in zip(grids, vals):
                self.table[(m, ncols, tuple(int(c) for c in g.ravel()))] = float(v)
                n += 1
        return n

    def value(self, m: int, n: int, cells: tuple[int, ...]) -> float:
        key = (m, n, cells)
        v = self.table.get(key)
        if v is None:
            g = np.asarray(cells, dtype=np.intp).reshape(1, m, n)
            v = float(batch_weight_values(self.X, g)[0])
            self.table[key] = v
        return v


@dataclass(frozen=True)
class AxiomViolation:
    axiom: int
    array: str
    detail: str
    lhs: float
    rhs: float


@dataclass
class AxiomReport:
    rule_kind: str
    caps: EnumCaps
    seed: int
    n_arrays: int = 0
    n_exhaustive: int = 0
    n_sampled: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({len(self.violations)} violations)"
        return (
            f"axioms[{self.rule_kind}] arrays={self.n_arrays} "
            f"exhaustive={self.n_exhaustive} sampled={self.n_sampled}: {status}"
        )


def _exceeds(lhs: float, rhs: float) -> bool:
    return lhs > rhs + _CMP_ABS + _CMP_REL * abs(rhs)


def check_axioms(
    X: AWSet,
    caps: EnumCaps = EnumCaps(),
    exhaustive_budget: int = 200_000,
    sample_budget: int = 100_000,
) -> AxiomReport:
    """Verify the array-weight axioms on the enumerated stream.

    Per array this checks nonnegativity, monotonicity under every (or a
    seeded sample of) injection pair, and subadditivity over complementary
    row and column splits.  Arrays are processed in canonical order
    exhaustively until ``exhaustive_budget`` comparisons are spent; the
    remainder receive ``sample_budget`` sampled comparisons in total.
    """
    report = AxiomReport(rule_kind=getattr(X.rule, "KIND", "?"), caps=caps, seed=caps.seed)
    table = _WeightTable(X)
    table.prefill(caps)
    arrays = list(enumerate_arrays(X, caps))
    report.n_arrays = len(arrays)

    def cells_of(grid_rows, alpha, beta):
        return tuple(grid_rows[a][b] for a in alpha for b in beta)

    def check_one(A: Array, alpha, beta, grid_rows, wA):
        j, k = len(alpha), len(beta)
        sub = cells_of(grid_rows, alpha, beta)
        ws = table.value(j, k, sub)
        if _exceeds(ws, wA):
            report.violations.append(
                AxiomViolation(2, format_array(A), f"alpha={alpha} beta={beta}", ws, wA)
            )

    def check_row_split(A: Array, alpha, gamma, grid_rows, wA):
        n = A.cols
        full = tuple(range(n))
        w1 = table.value(len(alpha), n, cells_of(grid_rows, alpha, full))
        w2 = table.value(len(gamma), n, cells_of(grid_rows, gamma, full))
        if _exceeds(wA, w1 + w2):
            report.violations.append(
                AxiomViolation(3, format_array(A), f"alpha={alpha} gamma={gamma}", wA, w1 + w2)
            )

    def check_col_split(A: Array, beta, delta, grid_rows, wA):
        m = A.rows
        full = tuple(range(m))
        w1 = table.value(m, len(beta), cells_of(grid_rows, full, beta))
        w2 = table.value(m, len(delta), cells_of(grid_rows, full, delta))
        if _exceeds(wA, w1 + w2):
            report.violations.append(
                AxiomViolation(4, format_array(A), f"beta={beta} delta={delta}", wA, w1 + w2)
            )

    budget = exhaustive_budget
    leftover: list[Array] = []
    for A in arrays:
        m, n = A.shape
        wA = table.value(m, n, A.cells)
        if wA < -1e-12 or not math.isfinite(wA):
            report.violations.append(
                AxiomViolation(1, format_array(A), "weight not finite/nonnegative", wA, 0.0)
            )
            continue
        pairs = len(_injections(m)) * len(_injections(n))
        splits = len(_splits(m)) + len(_splits(n))
        if budget - (pairs + splits) < 0:
            leftover.append(A)
            continue
        budget -= pairs + splits
        report.n_exhaustive += pairs + splits
        grid_rows = [list(A.cells[r * n : (r + 1) * n]) for r in range(m)]
        for alpha in _injections(m):
            for beta in _injections(n):
                check_one(A, alpha, beta, grid_rows, wA)
        for alpha, gamma in _splits(m):
            check_row_split(A, alpha, gamma, grid_rows, wA)
        for beta, delta in _splits(n):
            check_col_split(A, beta, delta, grid_rows, wA)

    if leftover and sample_budget > 0:
        rng = np.random.default_rng(caps.seed + 1)
        idx = rng.integers(0, len(leftover), size=sample_budget)
        for t in range(sample_budget):
            A = leftover[int(idx[t])]
            m, n = A.shape
            wA = table.value(m, n, A.cells)
            grid_rows = [list(A.cells[r * n : (r + 1) * n]) for r in range(m)]
            kind = int(rng.integers(0, 3))
            if kind == 0:
                j = int(rng.integers(1, m + 1))
                k = int(rng.integers(1, n + 1))
                alpha = tuple(int(i) for i in rng.permutation(m)[:j])
                beta = tuple(int(i) for i in rng.permutation(n)[:k])
                check_one(A, alpha, beta, grid_rows, wA)
            elif kind == 1 and m > 1:
                j = int(rng.integers(1, m))
                perm = [int(i) for i in rng.permutation(m)]
                check_row_split(A, tuple(perm[:j]), tuple(perm[j:]), grid_rows, wA)
            elif kind == 2 and n > 1:
                k = int(rng.integers(1, n))
                perm = [int(i) for i in rng.permutation(n)]
                check_col_split(A, tuple(perm[:k]), tuple(perm[k:]), grid_rows, wA)
            report.n_sampled += 1

    report.violations.sort(key=lambda v: (v.axiom, v.array, v.detail))
    return report
