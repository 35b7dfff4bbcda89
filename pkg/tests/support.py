"""Shared builders for the test suite: the two shipped operator families."""

from __future__ import annotations

import entireops as eo


def gaussian_problem(degree: int, a: complex = 1.0) -> eo.AxisKernelProblem:
    """Axis problem for f' = a z f (squared-exponential solution)."""
    return eo.AxisKernelProblem((0, 1), a, (1,), degree)


def airy_problem(degree: int, a: complex = 1.0) -> eo.AxisKernelProblem:
    """Axis problem for f'' = a z f with seed (1, 0)."""
    return eo.AxisKernelProblem((0, 0, 1), a, (1, 0), degree)


def partial_symbol(dim: int, axis: int, order: int = 1, b: complex = 1.0) -> eo.ConvolutionSymbol:
    idx = tuple(order if j == axis - 1 else 0 for j in range(dim))
    return eo.ConvolutionSymbol(dim, {idx: b})


def gaussian_family(dim: int) -> list[eo.CROperator]:
    """T_j = D_j - z_j on every axis."""
    return [
        eo.CROperator(dim, j, 1.0, partial_symbol(dim, j, order=1, b=1.0))
        for j in range(1, dim + 1)
    ]


def airy_family(dim: int) -> list[eo.CROperator]:
    """T_j = D_j^2 - z_j on every axis (symbol b = 2 so that b/2! = 1)."""
    return [
        eo.CROperator(dim, j, 1.0, partial_symbol(dim, j, order=2, b=2.0))
        for j in range(1, dim + 1)
    ]


def max_coeff_diff(f: eo.TruncatedSeries, expected: dict) -> float:
    """Largest deviation between a coefficient table and an expected dict."""
    keys = set(f.coeffs) | {tuple(k) for k in expected}
    return max(
        (abs(f.coefficient(k) - complex(expected.get(tuple(k), 0))) for k in keys),
        default=0.0,
    )
