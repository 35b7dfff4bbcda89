"""Total-degree-truncated Taylor series on C^d with exactness tracking.

A :class:`TruncatedSeries` stores the coefficients ``a_n`` of an entire
function ``f(z) = sum_n a_n z^n`` for all multi-indices with
``||n|| = n_1 + ... + n_d <= cutoff``, together with two pieces of
bookkeeping:

* ``exact_degree`` (E): coefficients with ``||n|| <= E`` are guaranteed to
  equal the represented function's true Taylor coefficients.  ``E = -1``
  means no guarantee at all.
* ``is_polynomial``: the stored table is the whole function, so absent
  indices are genuine zeros even beyond the cutoff.

Operations only ever shrink the guaranteed region; nothing here attempts
tail estimates for non-polynomial data.  All values are immutable and every
operation is a pure function of its inputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

Index = tuple[int, ...]

#: angles per axis for the boundary sampling grid of :func:`seminorm_bound`
GRID_ANGLES = 64
#: beyond this dimension only the coefficient upper bound is computed
GRID_MAX_DIM = 3


class ApproximationWarning(UserWarning):
    """The returned series carries no exactness guarantee (exact_degree = -1)."""


def index_order(n: Index) -> int:
    """Total degree ``||n|| = n_1 + ... + n_d``."""
    return sum(n)


def index_factorial(n: Index) -> int:
    """``n! = n_1! n_2! ... n_d!``."""
    out = 1
    for e in n:
        out *= math.factorial(e)
    return out


def index_binomial(n: Index, k: Index) -> int:
    """Product of per-axis binomial coefficients ``C(n_j, k_j)``."""
    out = 1
    for a, b in zip(n, k):
        out *= math.comb(a, b)
    return out


def falling_factorial(n: Index, k: Index) -> int:
    """``n!/(n-k)!`` as a product of per-axis falling factorials (needs k <= n)."""
    out = 1
    for a, b in zip(n, k):
        out *= math.perm(a, b)
    return out


def graded_key(n: Index) -> tuple[int, Index]:
    """Sort key implementing graded lexicographic order."""
    return (sum(n), n)


def monomial_basis(dim: int, degree: int) -> list[Index]:
    """All multi-indices with ``||n|| <= degree`` in graded-lex order."""
    out = [n for n in product(range(degree + 1), repeat=dim) if sum(n) <= degree]
    out.sort(key=graded_key)
    return out


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficient table of an entire function on ``||n|| <= cutoff``.

    Absent indices are zero.  ``exact_degree`` and ``is_polynomial`` follow
    the module-level contract; the constructor normalizes the table (integer
    index tuples, complex values, exact zeros dropped) and enforces the
    structural invariants.
    """

    dim: int
    cutoff: int
    exact_degree: int
    is_polynomial: bool
    coeffs: Mapping[Index, complex]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")
        if not -1 <= self.exact_degree <= self.cutoff:
            raise ValueError(
                f"exact_degree {self.exact_degree} outside [-1, {self.cutoff}]"
            )
        if self.is_polynomial and self.exact_degree != self.cutoff:
            raise ValueError("a polynomial series must be exact up to its cutoff")
        clean: dict[Index, complex] = {}
        for raw_idx, raw_c in self.coeffs.items():
            idx = tuple(int(e) for e in raw_idx)
            if len(idx) != self.dim:
                raise ValueError(f"index {idx} does not match dim {self.dim}")
            if any(e < 0 for e in idx):
                raise ValueError(f"negative entry in index {idx}")
            if sum(idx) > self.cutoff:
                raise ValueError(f"index {idx} exceeds cutoff {self.cutoff}")
            c = complex(raw_c)
            if c != 0:
                clean[idx] = c
        object.__setattr__(self, "coeffs", clean)

    def coefficient(self, idx: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(int(e) for e in idx), 0j)

    def sorted_indices(self) -> list[Index]:
        return sorted(self.coeffs, key=graded_key)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_exact_coefficient(self) -> float:
        """Largest coefficient magnitude over the guaranteed-exact region."""
        if self.is_polynomial:
            return max((abs(c) for c in self.coeffs.values()), default=0.0)
        e = self.exact_degree
        return max(
            (abs(c) for n, c in self.coeffs.items() if sum(n) <= e), default=0.0
        )


@dataclass(frozen=True)
class SemiNormSpec:
    """Sup-norm over the closed polydisc ``{ |z_j| <= m * epsilon }``."""

    m: int
    epsilon: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"semi-norm index m must be >= 1, got {self.m}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def radius(self) -> float:
        return self.m * self.epsilon


class Bounds(NamedTuple):
    lower: float
    upper: float


def make_series(
    dim: int,
    cutoff: int,
    entries: Iterable[tuple[Sequence[int], complex]] | Mapping[Index, complex],
    is_polynomial: bool = False,
) -> TruncatedSeries:
    """Build a series from (index, coefficient) pairs; exact_degree = cutoff.

    The constructor trusts the caller's exactness claim; downstream
    operations only ever shrink it.
    """
    if isinstance(entries, Mapping):
        items: Iterable = entries.items()
    else:
        items = entries
    coeffs: dict[Index, complex] = {}
    for raw_idx, c in items:
        idx = tuple(int(e) for e in raw_idx)
        if idx in coeffs:
            raise ValueError(f"duplicate index {idx}")
        coeffs[idx] = complex(c)
    return TruncatedSeries(dim, cutoff, cutoff, bool(is_polynomial), coeffs)


def zero_series(dim: int, cutoff: int) -> TruncatedSeries:
    """The identically-zero function (polynomial, fully exact)."""
    return TruncatedSeries(dim, cutoff, cutoff, True, {})


def monomial(
    dim: int, cutoff: int, idx: Sequence[int], coeff: complex = 1.0
) -> TruncatedSeries:
    return make_series(dim, cutoff, [(tuple(idx), coeff)], is_polynomial=True)


def linear_combine(
    terms: Iterable[tuple[complex, TruncatedSeries]]
) -> TruncatedSeries:
    """Coefficientwise ``sum w_i * f_i``.

    All series must share dim and cutoff.  The result is exact to the
    minimum of the exact degrees and polynomial iff every input is.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("linear_combine needs at least one term")
    dims = {s.dim for _, s in terms}
    cutoffs = {s.cutoff for _, s in terms}
    if len(dims) > 1 or len(cutoffs) > 1:
        raise ValueError(
            f"shape mismatch: dims {sorted(dims)}, cutoffs {sorted(cutoffs)}"
        )
    acc: dict[Index, complex] = {}
    for w, s in terms:
        w = complex(w)
        if w == 0:
            continue
        for idx in s.sorted_indices():
            acc[idx] = acc.get(idx, 0j) + w * s.coeffs[idx]
    exact = min(s.exact_degree for _, s in terms)
    poly = all(s.is_polynomial for _, s in terms)
    return TruncatedSeries(dims.pop(), cutoffs.pop(), exact, poly, acc)


def differentiate(f: TruncatedSeries, order: Sequence[int]) -> TruncatedSeries:
    """Partial derivative D^order: coefficient of z^m becomes ((m+order)!/m!) a_{m+order}.

    Over-differentiating a polynomial yields the zero series.  For a
    polynomial the result stays fully exact; otherwise the guaranteed region
    shrinks by ``||order||``.
    """
    order = tuple(int(e) for e in order)
    if len(order) != f.dim:
        raise ValueError(f"order {order} does not match dim {f.dim}")
    if any(e < 0 for e in order):
        raise ValueError(f"negative entry in derivative order {order}")
    total = sum(order)
    if total == 0:
        return f
    out: dict[Index, complex] = {}
    for idx in f.sorted_indices():
        if all(i >= o for i, o in zip(idx, order)):
            m = tuple(i - o for i, o in zip(idx, order))
            out[m] = f.coeffs[idx] * falling_factorial(idx, order)
    exact = f.cutoff if f.is_polynomial else max(-1, f.exact_degree - total)
    return TruncatedSeries(f.dim, f.cutoff, exact, f.is_polynomial, out)


def multiply_coordinate(f: TruncatedSeries, axis: int) -> TruncatedSeries:
    """Multiply by the coordinate z_axis (axis is 1-based).

    Coefficients pushed past the cutoff are dropped; if any nonzero one is,
    the result is no longer a whole polynomial, but the kept table is still
    exact (multiplication by z only shifts known coefficients).
    """
    if not 1 <= axis <= f.dim:
        raise ValueError(f"axis {axis} out of range for dim {f.dim}")
    ax = axis - 1
    out: dict[Index, complex] = {}
    dropped = False
    for idx in f.sorted_indices():
        shifted = idx[:ax] + (idx[ax] + 1,) + idx[ax + 1 :]
        if sum(shifted) > f.cutoff:
            dropped = True
            continue
        out[shifted] = f.coeffs[idx]
    poly = f.is_polynomial and not dropped
    exact = f.cutoff if f.is_polynomial else min(f.cutoff, f.exact_degree + 1)
    return TruncatedSeries(f.dim, f.cutoff, exact, poly, out)


def translate(f: TruncatedSeries, shift: Sequence[complex]) -> TruncatedSeries:
    """Shift of argument: returns the coefficients of ``f(z + shift)``.

    The coefficient of z^m is ``sum_k C(m+k, k) a_{m+k} shift^k`` over stored
    indices.  For a polynomial this is exact.  Otherwise the missing tail of
    f contaminates every output coefficient, so the result is flagged
    exactness-free (exact_degree = -1) and an ApproximationWarning is
    emitted; rank tests that consume such rows are tolerance-based.
    """
    shift = tuple(complex(s) for s in shift)
    if len(shift) != f.dim:
        raise ValueError(f"shift {shift} does not match dim {f.dim}")
    if all(s == 0 for s in shift):
        return f
    out: dict[Index, complex] = {}
    for idx in f.sorted_indices():
        c = f.coeffs[idx]
        for m in product(*(range(e + 1) for e in idx)):
            w: complex = c * index_binomial(idx, m)
            for j in range(f.dim):
                e = idx[j] - m[j]
                if e:
                    w *= shift[j] ** e
            out[m] = out.get(m, 0j) + w
    if f.is_polynomial:
        return TruncatedSeries(f.dim, f.cutoff, f.cutoff, True, out)
    warnings.warn(
        "translating a non-polynomial truncation: the result has no "
        "exactness guarantee",
        ApproximationWarning,
        stacklevel=2,
    )
    return TruncatedSeries(f.dim, f.cutoff, -1, False, out)


def evaluate(f: TruncatedSeries, point: Sequence[complex]) -> complex:
    """Value of the stored polynomial at the point (no tail correction)."""
    point = tuple(complex(p) for p in point)
    if len(point) != f.dim:
        raise ValueError(f"point {point} does not match dim {f.dim}")
    total = 0j
    for idx in f.sorted_indices():
        term = f.coeffs[idx]
        for zj, e in zip(point, idx):
            if e:
                term *= zj**e
        total += term
    return total


def with_cutoff(f: TruncatedSeries, cutoff: int) -> TruncatedSeries:
    """Re-truncate (or extend) the table to a new total-degree cutoff."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    if cutoff == f.cutoff:
        return f
    if cutoff > f.cutoff:
        exact = cutoff if f.is_polynomial else f.exact_degree
        return TruncatedSeries(f.dim, cutoff, exact, f.is_polynomial, dict(f.coeffs))
    kept = {i: c for i, c in f.coeffs.items() if sum(i) <= cutoff}
    if f.is_polynomial:
        dropped = len(kept) < len(f.coeffs)
        # kept coefficients are still the true ones even if the tail was cut
        return TruncatedSeries(f.dim, cutoff, cutoff, not dropped, kept)
    return TruncatedSeries(f.dim, cutoff, min(f.exact_degree, cutoff), False, kept)


def coefficient_vector(f: TruncatedSeries, degree: int) -> np.ndarray:
    """Coefficients of f over monomial_basis(dim, degree), graded-lex order."""
    basis = monomial_basis(f.dim, degree)
    return np.array([f.coefficient(n) for n in basis], dtype=complex)


def _boundary_grid_max(f: TruncatedSeries, radius: float) -> float:
    """Max of |f| over the product grid of GRID_ANGLES points per boundary circle."""
    angles = 2.0 * np.pi * np.arange(GRID_ANGLES) / GRID_ANGLES
    ring = radius * np.exp(1j * angles)
    max_pow = max(max(idx) for idx in f.coeffs)
    powers = ring[:, None] ** np.arange(max_pow + 1)[None, :]
    values = np.zeros((GRID_ANGLES,) * f.dim, dtype=complex)
    for idx in f.sorted_indices():
        term = f.coeffs[idx] * powers[:, idx[0]]
        for e in idx[1:]:
            term = np.multiply.outer(term, powers[:, e])
        values += term
    return float(np.max(np.abs(values)))


def seminorm_bound(f: TruncatedSeries, spec: SemiNormSpec) -> Bounds:
    """Two-sided estimate of ``sup |f|`` over the polydisc of the spec.

    upper = sum |a_n| r^||n|| with r = m * epsilon, always a true upper bound
    for the stored polynomial.  lower = max of |f| over a deterministic grid
    on the distinguished boundary |z_j| = r (dims <= GRID_MAX_DIM; beyond
    that only the upper bound is computed and lower is reported as 0).
    """
    r = spec.radius
    upper = 0.0
    for idx in f.sorted_indices():
        upper += abs(f.coeffs[idx]) * r ** sum(idx)
    if f.is_zero() or f.dim > GRID_MAX_DIM:
        return Bounds(0.0, upper)
    lower = _boundary_grid_max(f, r)
    return Bounds(min(lower, upper), upper)
