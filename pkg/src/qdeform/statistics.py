"""Photon-counting statistics of the deformed coherent states.

With x = |z|^2 the occupation probabilities are
P(n) = q^{n(n+1)/2} x^n / (s^n [n]_q! N(x)), the mean and second moment of
the number operator follow from the derivatives of N,

    <N> = x N'(x)/N(x),        <N^2> = x^2 N''(x)/N(x) + <N>,

and the Mandel parameter Q = x (N''/N' - N'/N) measures the deviation from
Poisson counting.  Near x = 0 it behaves as Q = -q(1-q) x / (s(1+q)) + ...,
sub-Poissonian for q < 1 (the sign flips for q > 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import FockTruncation, TridiagonalOperator, ladder_entries
from .coherent import (_check_disk, _norm_value, _term_ratios, domain_radius,
                       normalization)
from .qcore import (CompensatedSum, ConvergenceError, DeformParams, DomainError,
                    structure_function)

__all__ = [
    "StatsPoint",
    "SlopeCheck",
    "photon_pdf",
    "monomial_expectation",
    "stats_point",
    "mandel_smallx_check",
    "dressed_boson_matrices",
]


@dataclass(frozen=True)
class StatsPoint:
    """Number statistics of |z> at x = |z|^2."""

    x: float
    mean_n: float
    second_moment: float
    mandel_q: float


@dataclass(frozen=True)
class SlopeCheck:
    measured_slope: float
    predicted_slope: float
    rel_error: float


def photon_pdf(p: DeformParams, x: float, n: int) -> float:
    """Probability of finding n quanta in |z>, x = |z|^2."""
    _check_disk(p, x)
    if n != int(n) or n < 0:
        raise DomainError(f"occupation number must be a nonnegative integer, got {n}")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    ratios = _term_ratios(p, x)
    term = 1.0
    for _ in range(n):
        term *= next(ratios)
    return term / _norm_value(p, x)


def stats_point(p: DeformParams, x: float) -> StatsPoint:
    """<N>, <N^2> and Mandel Q at x = |z|^2, from the series derivatives.

    At x = 0 all three vanish (Q by its continuity limit).
    """
    _check_disk(p, x)
    if x == 0.0:
        return StatsPoint(0.0, 0.0, 0.0, 0.0)
    e = normalization(p, x)
    mean = x * e.d1 / e.value
    second = x * x * e.d2 / e.value + mean
    mandel = x * (e.d2 / e.d1 - e.d1 / e.value)
    return StatsPoint(x=x, mean_n=mean, second_moment=second, mandel_q=mandel)


def monomial_expectation(p: DeformParams, z: complex, s_pow: int, r_pow: int,
                         tol: float = 1e-12) -> complex:
    """Expectation <(b^dag)^s b^r> of dressed-boson monomials in |z>.

    Evaluates conj(z)^s z^r / N(x) times the series
    sum_n sqrt(g_{n+s} g_{n+r}) x^n / n! with
    g_m = q^{m(m+1)/2} m! / (s^m [m]_q!), truncated once the geometric tail
    falls below ``tol`` relative to the accumulated sum.
    """
    if s_pow != int(s_pow) or s_pow < 0 or r_pow != int(r_pow) or r_pow < 0:
        raise DomainError("monomial powers must be nonnegative integers")
    z = complex(z)
    x = abs(z) ** 2
    _check_disk(p, x)
    norm = _norm_value(p, x)
    prefactor = z.conjugate() ** s_pow * z ** r_pow / norm

    class _GStream:
        """Consecutive ratios g_{m+1}/g_m = q^{m+1} (m+1) / (s [m+1]_q),
        i.e. (m+1) times the normalization term ratio at argument 1."""

        __slots__ = ("ratios", "m")

        def __init__(self) -> None:
            self.ratios = _term_ratios(p, 1.0)
            self.m = 0

        def next_ratio(self) -> float:
            self.m += 1
            return self.m * next(self.ratios)

    stream_s = _GStream()
    g_s = 1.0
    for _ in range(s_pow):
        g_s *= stream_s.next_ratio()
    stream_r = _GStream()
    g_r = 1.0
    for _ in range(r_pow):
        g_r *= stream_r.next_ratio()

    term = math.sqrt(g_s * g_r)
    acc = CompensatedSum(term)
    if x == 0.0:
        return prefactor * acc.value

    max_terms = 500_000
    prev_ratio = math.inf
    decreasing = 0
    for n in range(max_terms):
        ratio = math.sqrt(stream_s.next_ratio() * stream_r.next_ratio()) * x / (n + 1)
        term *= ratio
        acc.add(term)
        decreasing = decreasing + 1 if ratio <= prev_ratio else 0
        prev_ratio = ratio
        if ratio < 1.0 and decreasing >= 3:
            tail = term * ratio / (1.0 - ratio)
            if tail <= tol * abs(acc.value):
                return prefactor * acc.value
    raise ConvergenceError(
        f"monomial expectation series (s={s_pow}, r={r_pow}) did not converge "
        f"within {max_terms} terms")


def mandel_smallx_check(p: DeformParams, h: float | None = None) -> SlopeCheck:
    """Measure the small-x slope of Q and compare with -q(1-q)/(s(1+q)).

    The slope is taken from Q(x)/x at x in {h, 2h} with Richardson
    extrapolation (Q is odd to leading order, so this removes the O(h)
    error of the one-sided quotient).
    """
    if h is None:
        radius = domain_radius(p).radius
        h = 1e-4 * min(1.0, radius)
    if not (h > 0.0):
        raise DomainError(f"step must be positive, got {h}")
    q1 = stats_point(p, h).mandel_q / h
    q2 = stats_point(p, 2.0 * h).mandel_q / (2.0 * h)
    measured = 2.0 * q1 - q2
    predicted = -p.q * (1.0 - p.q) / (p.scale * (1.0 + p.q))
    return SlopeCheck(measured_slope=measured, predicted_slope=predicted,
                      rel_error=abs(measured - predicted) / abs(predicted))


def dressed_boson_matrices(p: DeformParams, t: FockTruncation
                           ) -> tuple[TridiagonalOperator, TridiagonalOperator]:
    """Undeformed boson operators assembled from the deformed ladder.

    b = a sqrt(N / phi(N)) applied on n >= 1 (phi(0) = 0 makes the dressing
    singular on the vacuum, where b|0> = 0 holds directly); entries come out
    as sqrt(n), and b^dag is the transpose.
    """
    d = t.dim
    x = ladder_entries(p, d)
    entries = np.empty(d - 1)
    for m in range(1, d):
        entries[m - 1] = x[m - 1] * math.sqrt(m / structure_function(p, m))
    zeros_off = np.zeros(d - 1)
    zeros_diag = np.zeros(d)
    b = TridiagonalOperator(d, zeros_off, zeros_diag, entries)
    b_dag = TridiagonalOperator(d, entries, zeros_diag, zeros_off)
    return b, b_dag
