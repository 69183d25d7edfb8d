"""Completely bounded map diagnostics: cbnd ratios, bounded range numbers,
and array-freeness certificates.

All estimates scan the canonical enumeration stream; lower bounds on the
complete bound constant are maxima of image/source weight ratios, upper
bounds on the bounded range number are minima of weight/sqrt(m*n).  A few
structurally solved cases are reported exact and certified.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .arrays import (
    Array,
    AWSet,
    EnumCaps,
    PointMap,
    enumerate_arrays,
    hadamard_array,
    hadamard_matrix,
    sign_pair,
)
from .errors import InputError, UnsupportedError
from .weights import (
    DisjointUnionRule,
    EntryWeightMax,
    EntryWeightSum,
    OperatorNormInherited,
    batch_weight_values,
)

__all__ = [
    "CbndReport",
    "BrnReport",
    "ArrayFreeReport",
    "cbnd_estimate",
    "brn_estimate",
    "array_free_report",
    "FREE_CERTIFIED",
    "NOT_FREE_CERTIFIED",
    "UNRESOLVED",
]

FREE_CERTIFIED = "FREE_CERTIFIED"
NOT_FREE_CERTIFIED = "NOT_FREE_CERTIFIED"
UNRESOLVED = "UNRESOLVED"

_ZERO = 1e-12


@dataclass
class CbndReport:
    """Lower bound on the complete bound constant of a point map."""

    lower_bound: float
    witness: Array | None
    zero_weight_violation: Array | None
    caps: EnumCaps
    exact: bool = False
    exact_reason: str | None = None
    n_arrays: int = 0

    @property
    def certified_unbounded(self) -> bool:
        return self.zero_weight_violation is not None


@dataclass
class BrnReport:
    """Upper bound on the bounded range number of an alphabet."""

    upper_bound: float
    witness: Array | None
    certificate: list | None
    exact_value: float | None
    exact_reason: str | None
    caps: EnumCaps
    n_arrays: int = 0


@dataclass
class ArrayFreeReport:
    label: str
    classification: str
    reason: str
    certificate: list | None
    cbnd_lower: float | None
    caps: EnumCaps


def _require_exact_rule(X: AWSet) -> None:
    if X.rule is None or isinstance(X.rule, DisjointUnionRule):
        raise UnsupportedError(
            "estimates need an exactly computable weight rule on the alphabet"
        )


def _stream(X: AWSet, caps: EnumCaps, hadamard_levels, extra_arrays) -> list[Array]:
    arrays = list(enumerate_arrays(X, caps))
    if hadamard_levels:
        if sign_pair(X) is None:
            raise InputError("hadamard levels need payloads 1 and -1 in the alphabet")
        for m in hadamard_levels:
            arrays.append(hadamard_array(m, X))
    arrays.extend(extra_arrays)
    return arrays


def _grouped(arrays: list[Array]):
    """Group a stream into (shape, indices, grid stack) preserving order."""
    groups: dict[tuple[int, int], list[int]] = {}
    order: list[tuple[int, int]] = []
    for i, A in enumerate(arrays):
        if A.shape not in groups:
            groups[A.shape] = []
            order.append(A.shape)
        groups[A.shape].append(i)
    for shape in order:
        idx = groups[shape]
        m, n = shape
        stack = np.asarray(
            [arrays[i].cells for i in idx], dtype=np.intp
        ).reshape(-1, m, n)
        yield shape, idx, stack


def _map_group(fn, groups, threads: int):
    groups = list(groups)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, groups))
    return [fn(g) for g in groups]


def _image_values(phi: PointMap, target, stack: np.ndarray) -> np.ndarray:
    if phi.is_scalar:
        vals = phi.scalar_values()
        imgs = vals[stack]
        if target == "min":
            return linalg.operator_norms(imgs)
        if target == "amax":
            return linalg.trace_norms(imgs)
        raise UnsupportedError(f"unknown scalar target {target!r}")
    mapped = np.asarray(phi.values, dtype=np.intp)[stack]
    return batch_weight_values(phi.target, mapped)


def cbnd_estimate(
    phi: PointMap,
    target="min",
    caps: EnumCaps = EnumCaps(),
    hadamard_levels: tuple[int, ...] = (),
    extra_arrays: tuple[Array, ...] = (),
    threads: int = 1,
) -> CbndReport:
    """Scan image/source weight ratios over the enumeration stream.

    ``target`` is ``"min"`` or ``"amax"`` for scalar maps (the image matrix
    is measured in the operator or trace norm), and ignored for maps into
    another alphabet.  The witness is the first maximiser in canonical
    stream order; a source array of weight 0 with nonzero image weight is
    recorded as a violation certifying the map not completely bounded.
    """
    X = phi.source
    _require_exact_rule(X)
    if not phi.is_scalar:
        _require_exact_rule(phi.target)
    arrays = _stream(X, caps, hadamard_levels, extra_arrays)

    def eval_group(item):
        shape, idx, stack = item
        src = batch_weight_values(X, stack)
        img = _image_values(phi, target, stack)
        return idx, src, img

    best_ratio, best_idx = 0.0, None
    violation_idx = None
    for idx, src, img in _map_group(eval_group, _grouped(arrays), threads):
        zero = src <= _ZERO
        bad = zero & (img > 1e-9)
        if bad.any():
            cand = idx[int(np.argmax(bad))]
            if violation_idx is None or cand < violation_idx:
                violation_idx = cand
        ratios = np.where(zero, 0.0, img / np.where(zero, 1.0, src))
        k = int(np.argmax(ratios))  # first maximiser within the group
        r, i = float(ratios[k]), idx[k]
        if best_idx is None or r > best_ratio or (r == best_ratio and i < best_idx):
            best_ratio, best_idx = r, i

    exact, reason = _cbnd_exactness(phi, target)
    return CbndReport(
        lower_bound=best_ratio,
        witness=arrays[best_idx] if best_idx is not None else None,
        zero_weight_violation=arrays[violation_idx] if violation_idx is not None else None,
        caps=caps,
        exact=exact and violation_idx is None,
        exact_reason=reason if violation_idx is None else None,
        n_arrays=len(arrays),
    )


def _cbnd_exactness(phi: PointMap, target) -> tuple[bool, str | None]:
    if not phi.is_scalar and phi.target == phi.source and tuple(phi.values) == tuple(
        range(len(phi.source))
    ):
        return True, "identity map is completely isometric"
    if isinstance(phi.source.rule, EntryWeightSum):
        return True, "entry-sum source: complete bound equals the 1x1 bound constant"
    return False, None


def brn_estimate(
    X: AWSet,
    caps: EnumCaps = EnumCaps(),
    hadamard_levels: tuple[int, ...] = (),
    threads: int = 1,
) -> BrnReport:
    """Upper-bound the bounded range number inf w(A)/sqrt(m*n).

    ``hadamard_levels`` appends the recursive sign-matrix certificate when
    the alphabet carries payloads 1 and -1 under the operator-norm rule;
    the certified bound at level m is 1/sqrt(m+1) (computed numerically up
    to level 12, analytically beyond).
    """
    _require_exact_rule(X)
    arrays = list(enumerate_arrays(X, caps))

    def eval_group(item):
        shape, idx, stack = item
        vals = batch_weight_values(X, stack)
        return idx, vals / math.sqrt(shape[0] * shape[1])

    best_ratio, best_idx = math.inf, None
    for idx, ratios in _map_group(eval_group, _grouped(arrays), threads):
        k = int(np.argmin(ratios))  # first minimiser within the group
        r, i = float(ratios[k]), idx[k]
        if best_idx is None or r < best_ratio or (r == best_ratio and i < best_idx):
            best_ratio, best_idx = r, i

    certificate = None
    if hadamard_levels and isinstance(X.rule, OperatorNormInherited) and sign_pair(X):
        certificate = []
        for m in sorted(set(int(m) for m in hadamard_levels)):
            if m <= 12:
                H = hadamard_matrix(m).astype(float)
                val = linalg.operator_norm(H) / math.sqrt((m + 1) * 2**m)
            else:
                val = 1.0 / math.sqrt(m + 1)
            certificate.append((m, float(val)))
        best_ratio = min(best_ratio, min(v for _, v in certificate))

    exact_value, exact_reason = _brn_exactness(X)
    if exact_value is not None:
        best_ratio = min(best_ratio, exact_value)
    return BrnReport(
        upper_bound=float(best_ratio),
        witness=arrays[best_idx] if best_idx is not None else None,
        certificate=certificate,
        exact_value=exact_value,
        exact_reason=exact_reason,
        caps=caps,
        n_arrays=len(arrays),
    )


def _brn_exactness(X: AWSet) -> tuple[float | None, str | None]:
    rule = X.rule
    if isinstance(rule, EntryWeightSum):
        return float(min(rule.point_weights)), "entry-sum weight: attained at the lightest 1x1 array"
    if isinstance(rule, EntryWeightMax):
        return 0.0, "entry-max weight: constant n x n arrays have ratio w/n -> 0"
    if isinstance(rule, OperatorNormInherited) and len(X) == 1:
        c = abs(complex(X.points[0].payload))
        return float(c), "singleton scalar alphabet: every array is c times the all-ones matrix"
    return None, None


def array_free_report(
    X: AWSet, label: str, caps: EnumCaps = EnumCaps()
) -> ArrayFreeReport:
    """Classify a point as array-free, certified not array-free, or unresolved.

    FREE requires a structural certificate (positive exact bounded range
    number, or a positive-weight point of an entry-sum alphabet).  NOT FREE
    requires a generated sequence with a proven growth formula, never just a
    large sampled ratio.
    """
    _require_exact_rule(X)
    x = X.index(label)
    rule = X.rule

    brn = brn_estimate(X, caps)
    if brn.exact_value is not None and brn.exact_value > 0:
        return ArrayFreeReport(
            label,
            FREE_CERTIFIED,
            "finite alphabet with positive exact bounded range number: "
            "every point is array-free",
            None,
            None,
            caps,
        )

    if isinstance(rule, EntryWeightSum):
        w = rule.point_weights[x]
        if w > 0:
            return ArrayFreeReport(
                label,
                FREE_CERTIFIED,
                f"entry-sum alphabet: characteristic map has bound constant 1/{w}, "
                "hence is completely bounded",
                None,
                1.0 / w,
                caps,
            )
        return ArrayFreeReport(
            label,
            NOT_FREE_CERTIFIED,
            "zero-weight point: the 1x1 array has weight 0 but image weight 1",
            None,
            None,
            caps,
        )

    if isinstance(rule, EntryWeightMax):
        w = rule.point_weights[x]
        if w <= 0:
            return ArrayFreeReport(
                label,
                NOT_FREE_CERTIFIED,
                "zero-weight point: the 1x1 array has weight 0 but image weight 1",
                None,
                None,
                caps,
            )
        cert = [(n, n / w) for n in range(1, caps.rows + 1)]
        return ArrayFreeReport(
            label,
            NOT_FREE_CERTIFIED,
            f"constant n x n arrays keep weight {w} while the image norm grows "
            "like n (ratio n/w is unbounded)",
            cert,
            None,
            caps,
        )

    pair = sign_pair(X)
    if (
        isinstance(rule, OperatorNormInherited)
        and pair is not None
        and x in pair
    ):
        cert = []
        for m in range(0, 13):
            H = hadamard_matrix(m).astype(float)
            J = np.ones_like(H)
            indicator = (J + H) / 2 if x == pair[0] else (J - H) / 2
            ratio = linalg.operator_norm(indicator) / (2 ** (m / 2))
            cert.append((m, float(ratio)))
        return ArrayFreeReport(
            label,
            NOT_FREE_CERTIFIED,
            "sign-matrix certificate: the characteristic image on the level-m "
            "certificate has ratio at least (sqrt(m+1)-1)/2, unbounded in m",
            cert,
            None,
            caps,
        )

    chi = PointMap.characteristic(X, label)
    rep = cbnd_estimate(chi, "min", caps)
    if rep.zero_weight_violation is not None:
        return ArrayFreeReport(
            label,
            NOT_FREE_CERTIFIED,
            "a zero-weight array has nonzero image weight under the characteristic map",
            None,
            rep.lower_bound,
            caps,
        )
    return ArrayFreeReport(
        label,
        UNRESOLVED,
        "no structural certificate applies at these caps",
        None,
        rep.lower_bound,
        caps,
    )
