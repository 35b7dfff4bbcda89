"""Finite-truncation completeness tests for derivative and translate systems.

Whether the span of ``{D^n f}`` (or of a family of translates ``f(. + s)``)
is dense in the space of all entire functions cannot be decided from finite
data.  What can be computed is the rank of the system's coefficient matrix
over the monomials of total degree <= N: the reports therefore state
completeness AT TRUNCATION (N, max_order) only, and expose the singular
value profile so borderline cases can be judged.

Rows of derivative matrices grow factorially with the order, so each row is
normalized to unit max-magnitude before the rank computation; the relative
rank threshold then behaves uniformly across orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .series import (
    TruncatedSeries,
    coefficient_vector,
    differentiate,
    monomial_basis,
    translate,
)


@dataclass(frozen=True)
class SpanMatrix:
    """Coefficient rows of a function system over the degree-<=N monomials.

    Row i holds the coefficients of the i-th system member in graded-lex
    order over ``monomial_basis(dim, truncation)``; ``row_labels`` carries
    the generating data (derivative orders or translation points).
    """

    matrix: np.ndarray
    row_labels: tuple
    truncation: int
    dim: int
    source: str  # "derivative" | "translate"
    max_order: int | None = None

    def __post_init__(self) -> None:
        ambient = math.comb(self.truncation + self.dim, self.dim)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != ambient:
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match ambient "
                f"dimension {ambient}"
            )
        if self.matrix.shape[0] != len(self.row_labels):
            raise ValueError("row_labels must align with the matrix rows")


@dataclass(frozen=True)
class CompletenessReport:
    rank: int
    ambient_dim: int
    complete_at_truncation: bool
    truncation: int
    max_order: int | None
    tolerance: float
    singular_values: tuple[float, ...]


@dataclass(frozen=True)
class ApproximationResult:
    """Least-squares combination of derivative rows matching a target."""

    orders: tuple
    coefficients: tuple[complex, ...]
    residual: float

    def coefficient(self, order: Sequence[int]) -> complex:
        key = tuple(int(e) for e in order)
        for label, c in zip(self.orders, self.coefficients):
            if label == key:
                return c
        raise KeyError(f"no derivative order {key} in this result")


def derivative_span(
    f: TruncatedSeries, truncation: int, max_order: int
) -> SpanMatrix:
    """Rows: truncations to degree <= truncation of D^n f for ||n|| <= max_order.

    Every row must be exact, so a non-polynomial f has to be exact to degree
    truncation + max_order.
    """
    if truncation < 0 or max_order < 0:
        raise ValueError("truncation and max_order must be >= 0")
    required = truncation + max_order
    if not f.is_polynomial and f.exact_degree < required:
        raise ValueError(
            f"derivative span needs exact_degree >= {required} "
            f"(truncation {truncation} + max_order {max_order}), "
            f"have {f.exact_degree}"
        )
    orders = monomial_basis(f.dim, max_order)
    rows = [coefficient_vector(differentiate(f, n), truncation) for n in orders]
    return SpanMatrix(
        matrix=np.array(rows, dtype=complex),
        row_labels=tuple(orders),
        truncation=truncation,
        dim=f.dim,
        source="derivative",
        max_order=max_order,
    )


def translate_span(
    f: TruncatedSeries, truncation: int, samples: Sequence[Sequence[complex]]
) -> SpanMatrix:
    """Rows: truncations of f(. + s) for each sample point s.

    Exact for polynomial f; otherwise the rows are truncation approximations
    (translate emits its advisory warning) and downstream rank decisions are
    tolerance-based.
    """
    samples = [tuple(complex(c) for c in s) for s in samples]
    if not samples:
        raise ValueError("at least one translation sample required")
    rows = [coefficient_vector(translate(f, s), truncation) for s in samples]
    return SpanMatrix(
        matrix=np.array(rows, dtype=complex),
        row_labels=tuple(samples),
        truncation=truncation,
        dim=f.dim,
        source="translate",
    )


def sample_box(
    dim: int,
    count: int,
    seed: int,
    low: float = -1.0,
    high: float = 1.0,
) -> list[tuple[float, ...]]:
    """Seeded uniform draw of real sample points from the box [low, high]^dim."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(low, high, size=(count, dim))
    return [tuple(float(c) for c in row) for row in pts]


def rank_report(span: SpanMatrix, tolerance: float) -> CompletenessReport:
    """Numerical rank of the (row-normalized) span matrix via SVD.

    rank = number of singular values above tolerance * largest; the full
    spectrum is returned as diagnostics.  Deterministic for fixed input.
    """
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if span.matrix.shape[0] == 0:
        raise ValueError("empty span matrix")
    m = span.matrix.copy()
    for i in range(m.shape[0]):
        peak = np.max(np.abs(m[i]))
        if peak > 0:
            m[i] /= peak
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        rank = 0
    else:
        rank = int(np.sum(sv > tolerance * sv[0]))
    ambient = span.matrix.shape[1]
    return CompletenessReport(
        rank=rank,
        ambient_dim=ambient,
        complete_at_truncation=rank == ambient,
        truncation=span.truncation,
        max_order=span.max_order,
        tolerance=tolerance,
        singular_values=tuple(float(s) for s in sv),
    )


def approximate_target(
    f: TruncatedSeries,
    target: TruncatedSeries,
    truncation: int,
    max_order: int,
) -> ApproximationResult:
    """Least-squares solve for ``sum_n c_n D^n f = target`` in coefficient norm.

    The target must be a polynomial of degree <= truncation; the residual is
    the Euclidean norm of the defect over the degree-<=truncation monomials.
    """
    if target.dim != f.dim:
        raise ValueError(f"dim mismatch: generator {f.dim} vs target {target.dim}")
    if not target.is_polynomial:
        raise ValueError("the approximation target must be a polynomial")
    if any(sum(n) > truncation for n in target.coeffs):
        raise ValueError(f"target degree exceeds truncation {truncation}")
    span = derivative_span(f, truncation, max_order)
    a = span.matrix.T
    t = coefficient_vector(target, truncation)
    c, _, _, _ = np.linalg.lstsq(a, t, rcond=None)
    residual = float(np.linalg.norm(a @ c - t))
    return ApproximationResult(
        orders=span.row_labels,
        coefficients=tuple(complex(v) for v in c),
        residual=residual,
    )
