"""q-arithmetic core: deformed integers and factorials, Pochhammer products,
the oscillator structure function and the lattice calculus (q-derivative and
q-integral) on the scale s = l^2 q^lambda.

Conventions used throughout the package:

* ``[n]_q = (1 - q^n) / (1 - q)`` with q > 0 and q != 1,
* the structure function ``phi(n) = s q^{-n} [n]_q = s (1 - q^{-n}) / (q - 1)``,
* the lattice derivative ``D f(x) = s (f(x) - f(x/q)) / ((q - 1) x)``,
* the lattice integral over (0, a] as the weighted sum on ``{a q^{-k}}``.

All series and lattice sums are accumulated with compensated (Neumaier)
summation so that algebraic identities can be checked near 1e-12 without
drowning in rounding noise.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "Q_ONE_BAND",
    "DomainError",
    "ConvergenceError",
    "CompensatedSum",
    "DeformParams",
    "SeriesEval",
    "q_number",
    "q_factorial",
    "q_pochhammer",
    "pochhammer_infinite",
    "structure_function",
    "q_derivative",
    "q_integral",
    "q_integral_with_bound",
]

#: half-width of the excluded band around q = 1
Q_ONE_BAND = 1e-12


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A truncated series or lattice sum failed to reach its tolerance."""


class CompensatedSum:
    """Neumaier compensated accumulator.

    Keeps a running error term so that long sums of terms with very
    different magnitudes stay accurate to a few ulp of the result.
    """

    __slots__ = ("_hi", "_lo")

    def __init__(self, start: float = 0.0) -> None:
        self._hi = float(start)
        self._lo = 0.0

    def add(self, x: float) -> None:
        s = self._hi + x
        if abs(self._hi) >= abs(x):
            self._lo += (self._hi - s) + x
        else:
            self._lo += (x - s) + self._hi
        self._hi = s

    @property
    def value(self) -> float:
        return self._hi + self._lo


def _check_q(q: float) -> None:
    if not (q > 0.0) or not math.isfinite(q):
        raise DomainError(f"q must be a positive finite real, got {q}")
    if abs(q - 1.0) <= Q_ONE_BAND:
        raise DomainError(
            f"q = {q} lies in the excluded band |q - 1| <= {Q_ONE_BAND}; "
            "the q -> 1 limit is probed with |q - 1| = 1e-6 instead"
        )


def _check_index(n: int) -> None:
    if n != int(n) or n < 0:
        raise DomainError(f"index must be a nonnegative integer, got {n}")


@dataclass(frozen=True)
class DeformParams:
    """Deformation triple (q, l, lambda).

    Requires q > 0 with |q - 1| > 1e-12 and l != 0.  The derived scale
    ``s = l^2 q^lambda`` must be strictly positive and finite; it multiplies
    every dimensionful quantity in the algebra.
    """

    q: float
    l: float
    lmbda: float

    def __post_init__(self) -> None:
        _check_q(self.q)
        if self.l == 0.0 or not math.isfinite(self.l):
            raise DomainError(f"l must be a nonzero finite real, got {self.l}")
        if not math.isfinite(self.lmbda):
            raise DomainError(f"lambda must be finite, got {self.lmbda}")
        try:
            s = self.l * self.l * self.q ** self.lmbda
        except OverflowError:
            s = math.inf
        if not (s > 0.0 and math.isfinite(s)):
            raise DomainError(f"scale l^2 q^lambda = {s} must be positive and finite")

    @property
    def scale(self) -> float:
        """The overall scale l^2 q^lambda of the ladder algebra."""
        return self.l * self.l * self.q ** self.lmbda

    @property
    def log_q(self) -> float:
        """log q, computed as log1p(q - 1) to keep full accuracy near q = 1."""
        return math.log1p(self.q - 1.0)


@dataclass(frozen=True)
class SeriesEval:
    """Value of a power series together with its first two derivatives with
    respect to the series argument, a rigorous bound on the truncation error
    of ``value``, and the number of terms consumed."""

    value: float
    d1: float
    d2: float
    tail_bound: float
    terms_used: int


def q_number(n: int, q: float) -> float:
    """Deformed integer [n]_q = (1 - q^n)/(1 - q).

    Evaluated as expm1(n log q) / (q - 1), which is free of the cancellation
    the naive ratio suffers for q near 1.
    """
    _check_q(q)
    _check_index(n)
    if n == 0:
        return 0.0
    if n == 1:
        return 1.0
    lq = math.log1p(q - 1.0)
    return math.expm1(n * lq) / (q - 1.0)


def q_factorial(n: int, q: float) -> float:
    """[n]_q! = [1]_q [2]_q ... [n]_q with [0]_q! = 1."""
    _check_q(q)
    _check_index(n)
    out = 1.0
    for k in range(2, n + 1):
        out *= q_number(k, q)
        if math.isinf(out):
            raise OverflowError(f"[{n}]_q! exceeds the floating range at factor k = {k}")
    return out


def pochhammer_infinite(a: float, base: float, cutoff: float = 1e-17,
                        max_terms: int = 10_000_000) -> tuple[float, float]:
    """Infinite product (a; base)_inf with a multiplicative tail bound.

    Factors are accumulated until |a base^k| < cutoff.  The neglected
    factors change the product by at most a factor exp(r) with
    r = sum of the remaining |a base^k|, so the returned absolute bound is
    |value| * expm1(|a base^K| / (1 - |base|)).
    """
    if abs(base) >= 1.0:
        raise DomainError(f"infinite product requires |base| < 1, got base = {base}")
    value = 1.0
    f = a
    for _ in range(max_terms):
        if abs(f) < cutoff:
            break
        value *= 1.0 - f
        f *= base
    else:
        raise ConvergenceError("infinite product did not reach its cutoff")
    remainder = abs(f) / (1.0 - abs(base))
    return value, abs(value) * math.expm1(remainder)


def q_pochhammer(a: float, base: float, n: int | float | None = None) -> float:
    """(a; base)_n = prod_{k=0}^{n-1} (1 - a base^k).

    ``n = None`` (or math.inf) requests the infinite product, which needs
    |base| < 1; the finite case needs n >= 0.
    """
    if n is None or n == math.inf:
        value, _ = pochhammer_infinite(a, base)
        return value
    if n != int(n) or n < 0:
        raise DomainError(f"finite Pochhammer order must be a nonnegative integer, got {n}")
    out = 1.0
    f = a
    for _ in range(int(n)):
        out *= 1.0 - f
        f *= base
    return out


def structure_function(p: DeformParams, n: int) -> float:
    """phi(n) = s (1 - q^{-n})/(q - 1) = l^2 q^{lambda - n} [n]_q.

    Nonnegative and strictly increasing in n, with phi(0) = 0.  Uses the
    expm1 form so the q -> 1 cross-check limit phi(n) -> n holds to rounding.
    """
    _check_index(n)
    if n == 0:
        return 0.0
    return p.scale * (-math.expm1(-n * p.log_q)) / (p.q - 1.0)


def q_derivative(f: Callable[[float], float], p: DeformParams, x: float) -> float:
    """Lattice derivative s (f(x) - f(x/q)) / ((q - 1) x).

    Undefined at x = 0; callers needing the value there should use the
    series coefficient instead.
    """
    if x == 0.0:
        raise DomainError("the lattice derivative is undefined at x = 0")
    return p.scale * (f(x) - f(x / p.q)) / ((p.q - 1.0) * x)


def q_integral(f: Callable[[float], float], p: DeformParams, a: float, *,
               rel_increment: float = 1e-14, tail_rel: float = 1e-12,
               max_terms: int = 1_000_000) -> float:
    """Lattice integral (q-1)/s * a * sum_{k>=0} q^{-k} f(a q^{-k}), q > 1.

    Truncated once the running increment falls below ``rel_increment`` of
    the partial sum and the geometric tail bound falls below ``tail_rel``
    of it; see :func:`q_integral_with_bound`.
    """
    value, _, _ = q_integral_with_bound(
        f, p, a, rel_increment=rel_increment, tail_rel=tail_rel, max_terms=max_terms)
    return value


def q_integral_with_bound(f: Callable[[float], float], p: DeformParams, a: float, *,
                          rel_increment: float = 1e-14, tail_rel: float = 1e-12,
                          max_terms: int = 1_000_000) -> tuple[float, float, int]:
    """Lattice integral together with its tail bound and point count.

    The geometric certificate bounds the unexplored part of the lattice by
    sup|f| over a trailing window of evaluations times the remaining
    geometric weight; the integrands used in this package are continuous at
    0+, where the lattice accumulates, so the window sup is a faithful
    stand-in for the remaining supremum.
    """
    q = p.q
    if q < 1.0:
        raise DomainError("q-integration runs over the lattice a q^{-k} and requires q > 1")
    if not (a > 0.0) or not math.isfinite(a):
        raise DomainError(f"integration endpoint must be positive and finite, got {a}")
    prefactor = (q - 1.0) / p.scale * a
    acc = CompensatedSum()
    weight = 1.0
    window: deque[float] = deque(maxlen=8)
    for k in range(max_terms):
        fx = f(a * weight)
        window.append(abs(fx))
        term = weight * fx
        acc.add(term)
        weight /= q
        partial = prefactor * acc.value
        # remaining lattice weight: sum_{j>k} q^{-j} = q^{-(k+1)} q/(q-1)
        tail = abs(prefactor) * weight * max(window) * q / (q - 1.0)
        if (k >= 3 and abs(prefactor * term) <= rel_increment * abs(partial)
                and tail <= tail_rel * abs(partial)):
            return partial, tail, k + 1
    raise ConvergenceError(
        f"lattice sum did not meet tolerance within {max_terms} points (q = {q}, a = {a})")
