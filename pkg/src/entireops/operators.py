"""Operator algebra on truncated series.

Three layers:

* :class:`WeylOperator` — finite sums of terms ``c * z^alpha * D^beta`` with
  symbolic composition and commutators (normal ordering: coordinate powers
  to the left of derivative powers).
* :class:`ConvolutionSymbol` — a constant-coefficient differential operator
  encoded by the Taylor data ``b_n`` of its characteristic function
  ``sum_n b_n lambda^n / n!``; it acts as ``f -> sum_n b_n D^n f / n!`` and
  pairs with series through ``(F, f) = sum_n a_n b_n``.
* :class:`CROperator` — the one-axis family ``T = M_F - a * z_axis`` whose
  commutator with every coordinate partial is ``delta_{axis,k} * a * I``.
  Any operator with that commutator table has this shape: adding ``a * z``
  back produces an operator commuting with all partials, i.e. a convolution
  operator, so the relation is structural here rather than checked.

:func:`verify_commutation` re-derives the commutator table numerically on
monomials, independently of the symbolic route, as a guard against ordering
bugs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .series import (
    Index,
    TruncatedSeries,
    differentiate,
    falling_factorial,
    graded_key,
    index_factorial,
    index_order,
    linear_combine,
    monomial,
    monomial_basis,
    multiply_coordinate,
    zero_series,
)

TermKey = tuple[Index, Index]  # (zpow, dpow)


def _unit(dim: int, axis: int) -> Index:
    return tuple(1 if j == axis - 1 else 0 for j in range(dim))


@dataclass(frozen=True)
class WeylOperator:
    """Normal-ordered polynomial differential operator sum c * z^zpow * D^dpow.

    Each term differentiates first (dpow), then multiplies by the monomial
    z^zpow, then scales by c.  At most one term per (zpow, dpow) pair is
    stored and zero coefficients are absent, so equality of the term tables
    is equality of operators.
    """

    dim: int
    terms: Mapping[TermKey, complex]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        clean: dict[TermKey, complex] = {}
        for (zpow, dpow), raw in self.terms.items():
            zpow = tuple(int(e) for e in zpow)
            dpow = tuple(int(e) for e in dpow)
            if len(zpow) != self.dim or len(dpow) != self.dim:
                raise ValueError(f"term ({zpow}, {dpow}) does not match dim {self.dim}")
            if any(e < 0 for e in zpow + dpow):
                raise ValueError(f"negative exponent in term ({zpow}, {dpow})")
            c = complex(raw)
            if c != 0:
                clean[(zpow, dpow)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(
        cls, dim: int, triples: Iterable[tuple[complex, Sequence[int], Sequence[int]]]
    ) -> WeylOperator:
        acc: dict[TermKey, complex] = {}
        for c, zpow, dpow in triples:
            key = (tuple(int(e) for e in zpow), tuple(int(e) for e in dpow))
            acc[key] = acc.get(key, 0j) + complex(c)
        return cls(dim, acc)

    @classmethod
    def zero(cls, dim: int) -> WeylOperator:
        return cls(dim, {})

    @classmethod
    def identity(cls, dim: int) -> WeylOperator:
        z = (0,) * dim
        return cls(dim, {(z, z): 1.0})

    @classmethod
    def derivative(cls, dim: int, order: Sequence[int]) -> WeylOperator:
        z = (0,) * dim
        return cls(dim, {(z, tuple(int(e) for e in order)): 1.0})

    @classmethod
    def coordinate(cls, dim: int, axis: int) -> WeylOperator:
        z = (0,) * dim
        return cls(dim, {(_unit(dim, axis), z): 1.0})

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_keys(self) -> list[TermKey]:
        return sorted(self.terms, key=lambda t: (graded_key(t[0]), graded_key(t[1])))

    def __add__(self, other: WeylOperator) -> WeylOperator:
        if not isinstance(other, WeylOperator):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dim mismatch: {self.dim} vs {other.dim}")
        acc = dict(self.terms)
        for key, c in other.terms.items():
            acc[key] = acc.get(key, 0j) + c
        return WeylOperator(self.dim, acc)

    def __neg__(self) -> WeylOperator:
        return WeylOperator(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: WeylOperator) -> WeylOperator:
        return self + (-other)

    def __rmul__(self, scalar: complex) -> WeylOperator:
        return WeylOperator(
            self.dim, {k: complex(scalar) * c for k, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, WeylOperator):
            return _compose(self, other)
        return WeylOperator(
            self.dim, {k: c * complex(other) for k, c in self.terms.items()}
        )


def _compose(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    """Normal-ordered product a b via D^beta z^alpha rewriting.

    Per axis, D^p z^q = sum_k C(p, k) * q!/(q-k)! * z^(q-k) D^(p-k); the
    multivariate rule is the product over axes.
    """
    if a.dim != b.dim:
        raise ValueError(f"dim mismatch: {a.dim} vs {b.dim}")
    out: dict[TermKey, complex] = {}
    for za, da in a.sorted_keys():
        ca = a.terms[(za, da)]
        for zb, db in b.sorted_keys():
            cb = b.terms[(zb, db)]
            for k in product(*(range(min(p, q) + 1) for p, q in zip(da, zb))):
                w = ca * cb
                for p, q, kk in zip(da, zb, k):
                    if kk:
                        w *= math.comb(p, kk) * math.perm(q, kk)
                key = (
                    tuple(x + y - kk for x, y, kk in zip(za, zb, k)),
                    tuple(x + y - kk for x, y, kk in zip(da, db, k)),
                )
                out[key] = out.get(key, 0j) + w
    return WeylOperator(a.dim, out)


def commutator(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    """Normal-ordered ``a b - b a``."""
    return _compose(a, b) - _compose(b, a)


def apply_weyl(op: WeylOperator, f: TruncatedSeries) -> TruncatedSeries:
    """Apply the operator term by term through series primitives."""
    if op.dim != f.dim:
        raise ValueError(f"dim mismatch: operator {op.dim} vs series {f.dim}")
    if op.is_zero():
        return zero_series(f.dim, f.cutoff)
    parts: list[tuple[complex, TruncatedSeries]] = []
    for zpow, dpow in op.sorted_keys():
        g = differentiate(f, dpow)
        for axis in range(1, f.dim + 1):
            for _ in range(zpow[axis - 1]):
                g = multiply_coordinate(g, axis)
        parts.append((op.terms[(zpow, dpow)], g))
    return linear_combine(parts)


@dataclass(frozen=True)
class ConvolutionSymbol:
    """Characteristic-function data of a convolution operator.

    ``bcoeffs[n]`` is the coefficient ``b_n`` in the expansion
    ``sum_n b_n lambda^n / n!`` of the characteristic function.  Only
    finitely supported (polynomial) symbols are representable, which keeps
    every action decidable at finite truncation.
    """

    dim: int
    bcoeffs: Mapping[Index, complex]
    polynomial: bool = True

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not self.polynomial:
            raise ValueError("only polynomial (finitely supported) symbols are supported")
        clean: dict[Index, complex] = {}
        for raw_idx, raw in self.bcoeffs.items():
            idx = tuple(int(e) for e in raw_idx)
            if len(idx) != self.dim:
                raise ValueError(f"index {idx} does not match dim {self.dim}")
            if any(e < 0 for e in idx):
                raise ValueError(f"negative entry in index {idx}")
            c = complex(raw)
            if c != 0:
                clean[idx] = c
        object.__setattr__(self, "bcoeffs", clean)

    @property
    def max_order(self) -> int:
        """Largest total degree in the support (0 for the zero symbol)."""
        return max((sum(n) for n in self.bcoeffs), default=0)

    def sorted_support(self) -> list[Index]:
        return sorted(self.bcoeffs, key=graded_key)

    def as_weyl(self) -> WeylOperator:
        dim = self.dim
        zero = (0,) * dim
        return WeylOperator(
            dim,
            {(zero, n): c / index_factorial(n) for n, c in self.bcoeffs.items()},
        )


def apply_convolution(sym: ConvolutionSymbol, f: TruncatedSeries) -> TruncatedSeries:
    """Action ``f -> sum_n b_n D^n f / n!`` of the convolution operator."""
    if sym.dim != f.dim:
        raise ValueError(f"dim mismatch: symbol {sym.dim} vs series {f.dim}")
    if not sym.bcoeffs:
        return zero_series(f.dim, f.cutoff)
    parts = [
        (sym.bcoeffs[n] / index_factorial(n), differentiate(f, n))
        for n in sym.sorted_support()
    ]
    return linear_combine(parts)


def dual_pairing(sym: ConvolutionSymbol, f: TruncatedSeries) -> complex:
    """The pairing ``(F, f) = sum_n a_n b_n`` over the symbol's support.

    Exact only where the series coefficients are trustworthy: for a
    polynomial every index is (absent means genuinely zero), otherwise the
    support must sit inside the guaranteed-exact region.
    """
    if sym.dim != f.dim:
        raise ValueError(f"dim mismatch: symbol {sym.dim} vs series {f.dim}")
    total = 0j
    for n in sym.sorted_support():
        if not f.is_polynomial and index_order(n) > f.exact_degree:
            raise ValueError(
                f"pairing not determined at this truncation: symbol index {n} "
                f"lies beyond exact_degree {f.exact_degree}"
            )
        total += sym.bcoeffs[n] * f.coefficient(n)
    return total


def characteristic_roundtrip(sym: ConvolutionSymbol, point: Sequence[complex]) -> complex:
    """Evaluate the characteristic function ``sum_n b_n point^n / n!``."""
    point = tuple(complex(p) for p in point)
    if len(point) != sym.dim:
        raise ValueError(f"point {point} does not match dim {sym.dim}")
    total = 0j
    for n in sym.sorted_support():
        term = sym.bcoeffs[n] / index_factorial(n)
        for zj, e in zip(point, n):
            if e:
                term *= zj**e
        total += term
    return total


@dataclass(frozen=True)
class CROperator:
    """One-axis operator ``T = M_conv - a * z_axis`` with nonzero ladder constant a."""

    dim: int
    axis: int
    a: complex
    conv: ConvolutionSymbol

    def __post_init__(self) -> None:
        if not 1 <= self.axis <= self.dim:
            raise ValueError(f"axis {self.axis} out of range for dim {self.dim}")
        a = complex(self.a)
        if a == 0:
            raise ValueError("the ladder constant a must be nonzero")
        object.__setattr__(self, "a", a)
        if self.conv.dim != self.dim:
            raise ValueError(
                f"symbol dim {self.conv.dim} does not match operator dim {self.dim}"
            )

    def as_weyl(self) -> WeylOperator:
        return self.conv.as_weyl() + (-self.a) * WeylOperator.coordinate(
            self.dim, self.axis
        )


def apply_cr_operator(op: CROperator, f: TruncatedSeries) -> TruncatedSeries:
    """``T f = (convolution part of T) f - a * z_axis * f``."""
    if op.dim != f.dim:
        raise ValueError(f"dim mismatch: operator {op.dim} vs series {f.dim}")
    return linear_combine(
        [
            (1.0, apply_convolution(op.conv, f)),
            (-op.a, multiply_coordinate(f, op.axis)),
        ]
    )


@dataclass(frozen=True)
class CommutationReport:
    """Worst commutator defect per (operator axis, partial axis) pair."""

    residuals: Mapping[tuple[int, int], float]
    max_residual: float
    probe_degree: int
    tolerance: float
    passed: bool


def verify_commutation(
    ops: Sequence[CROperator],
    probe_degree: int,
    *,
    expected_a: Sequence[complex] | None = None,
    tolerance: float = 1e-12,
) -> CommutationReport:
    """Numerically re-check the commutator table on monomials.

    For every operator T (claiming ladder constant a on its axis) and every
    partial D_k, applies ``T D_k - D_k T - delta * a * I`` to each monomial
    of total degree <= probe_degree and records the largest residual
    coefficient.  ``expected_a`` overrides the claimed constants, which lets
    callers confirm that a deliberate mismatch is detected.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("at least one operator required")
    dims = {op.dim for op in ops}
    if len(dims) > 1:
        raise ValueError(f"operators disagree on dim: {sorted(dims)}")
    dim = dims.pop()
    if probe_degree < 0:
        raise ValueError(f"probe_degree must be >= 0, got {probe_degree}")
    if expected_a is None:
        claimed = [op.a for op in ops]
    else:
        claimed = [complex(a) for a in expected_a]
        if len(claimed) != len(ops):
            raise ValueError("expected_a must align with the operator list")

    cutoff = probe_degree + 1  # z-multiplication never overflows the probes
    basis = monomial_basis(dim, probe_degree)
    residuals: dict[tuple[int, int], float] = {}
    for op, a_claim in zip(ops, claimed):
        for k in range(1, dim + 1):
            ek = _unit(dim, k)
            worst = 0.0
            for n in basis:
                probe = monomial(dim, cutoff, n)
                defect = linear_combine(
                    [
                        (1.0, apply_cr_operator(op, differentiate(probe, ek))),
                        (-1.0, differentiate(apply_cr_operator(op, probe), ek)),
                        (-(a_claim if k == op.axis else 0.0), probe),
                    ]
                )
                worst = max(worst, defect.max_exact_coefficient())
            key = (op.axis, k)
            residuals[key] = max(worst, residuals.get(key, 0.0))
    max_residual = max(residuals.values())
    return CommutationReport(
        residuals=residuals,
        max_residual=max_residual,
        probe_degree=probe_degree,
        tolerance=tolerance,
        passed=max_residual <= tolerance,
    )
