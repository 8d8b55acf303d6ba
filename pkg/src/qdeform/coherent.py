"""Deformed coherent states |z> and their resolution of unity.

The states live on the disk |z|^2 < R with R = s/(q-1) for q > 1 and
R = infinity for q < 1.  Their radial profile is governed by the
normalization series

    N(x) = sum_n q^{n(n+1)/2} x^n / (s^n [n]_q!),

which is a fixed point of the lattice derivative.  For q > 1 it satisfies
the functional equation N(x) (1 - (q-1)x/s) = N(x/q) and equals the
reciprocal of the infinite product ((q-1)x/s; 1/q)_inf.  The weight that
resolves the identity is pinned by the power moments

    integral x^n dW(x) = s^n q^{-n(n+1)/2} [n]_q!   (n = 0, 1, 2, ...),

a Hausdorff problem on [0, R] for q > 1 (solved here exactly on the
q-lattice) and a Stieltjes problem on [0, inf) for q < 1 (verified by
adaptive quadrature with a certified remainder).  The q < 1 density uses
the q-exponential convention fixed by requiring the zeroth moment to be 1.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .algebra import FockTruncation
from .qcore import (CompensatedSum, ConvergenceError, DeformParams, DomainError,
                    SeriesEval, pochhammer_infinite, q_factorial,
                    q_integral_with_bound, q_number, structure_function)

__all__ = [
    "DOMAIN_MARGIN",
    "DomainDisk",
    "CoherentState",
    "MomentReport",
    "QuadratureSpec",
    "domain_radius",
    "normalization",
    "normalization_complex",
    "moment_target",
    "pochhammer_product",
    "amplitudes",
    "overlap",
    "eigen_residual",
    "unity_weight",
    "verify_moments",
]

#: states must keep |z|^2 / R <= 1 - DOMAIN_MARGIN when R is finite
DOMAIN_MARGIN = 1e-6


@dataclass(frozen=True)
class DomainDisk:
    """Convergence disk of the normalization series (radius may be inf)."""

    radius: float


def domain_radius(p: DeformParams) -> DomainDisk:
    """R = s/(q-1) for q > 1, infinite for 0 < q < 1."""
    if p.q < 1.0:
        return DomainDisk(math.inf)
    return DomainDisk(p.scale / (p.q - 1.0))


def _check_disk(p: DeformParams, x: float, margin: float = DOMAIN_MARGIN) -> float:
    """Validate 0 <= x inside the disk (with margin); returns the radius."""
    if x < 0.0 or not math.isfinite(x):
        raise DomainError(f"series argument must be finite and nonnegative, got {x}")
    radius = domain_radius(p).radius
    if math.isfinite(radius) and x > radius * (1.0 - margin):
        raise DomainError(
            f"argument {x} outside the convergence disk: radius {radius}, "
            f"required margin {margin}")
    return radius


def _term_ratios(p: DeformParams, x: float):
    """Yield r_n = t_{n+1}/t_n = q^{n+1} x / (s [n+1]_q) for n = 0, 1, 2, ...

    Written through the decaying power min(q, 1/q)^{n+1} so that no
    intermediate overflows even when tens of thousands of terms are needed:
    r_n = x(q-1)/(s(1 - q^{-n-1})) for q > 1 and
    r_n = x(1-q) q^{n+1}/(s(1 - q^{n+1})) for q < 1.  The sequence decreases
    in n in both regimes (limits x/R and 0 respectively).
    """
    q = p.q
    if q > 1.0:
        coef = x * (q - 1.0) / p.scale
        pw = 1.0
        while True:
            pw /= q
            yield coef / (1.0 - pw)
    else:
        coef = x * (1.0 - q) / p.scale
        pw = 1.0
        while True:
            pw *= q
            yield coef * pw / (1.0 - pw)


def _series_sums(p: DeformParams, x: float, rel_tol: float, max_terms: int,
                 want_derivs: bool) -> tuple[float, float, float, float, int]:
    """Accumulate N(x) (and optionally N', N'') at real x > 0.

    The derivative series carry extra term-ratio factors (n+1)/n and
    (n+1)/(n-1) that also decrease in n, so rho = r_n (n+1)/(n-1) bounds
    every later ratio of all three series and yields geometric tail bounds.
    """
    val = CompensatedSum(1.0)
    d1 = CompensatedSum()
    d2 = CompensatedSum()
    ratios = _term_ratios(p, x)
    term = 1.0
    n = 0
    r = next(ratios)
    while n < max_terms:
        term *= r
        n += 1
        val.add(term)
        if want_derivs:
            d1.add(n * term / x)
            if n >= 2:
                d2.add(n * (n - 1) * term / (x * x))
        r = next(ratios)
        rho = r * (n + 1) / max(n - 1, 1)
        if rho < 1.0:
            geo = rho / (1.0 - rho)
            tail_v = term * geo
            ok = tail_v <= rel_tol * val.value
            if ok and want_derivs:
                ok = (n * term / x) * geo <= rel_tol * d1.value
                if ok and n >= 2:
                    ok = (n * (n - 1) * term / (x * x)) * geo <= rel_tol * d2.value
            if ok:
                return val.value, d1.value, d2.value, tail_v, n + 1
    raise ConvergenceError(
        f"normalization series did not converge within {max_terms} terms at x = {x}")


def normalization(p: DeformParams, x: float, *, rel_tol: float = 1e-15,
                  max_terms: int = 500_000) -> SeriesEval:
    """Evaluate N(x) with termwise first/second derivatives and a tail bound.

    At x = 0 the exact leading coefficients are returned: value 1,
    N'(0) = q/s and N''(0) = 2 q^3 / (s^2 [2]_q!).
    """
    _check_disk(p, x)
    q = p.q
    s = p.scale
    if x == 0.0:
        return SeriesEval(1.0, q / s, 2.0 * q ** 3 / (s * s * (1.0 + q)), 0.0, 1)
    value, d1, d2, tail, used = _series_sums(p, x, rel_tol, max_terms, want_derivs=True)
    return SeriesEval(value, d1, d2, tail, used)


def _norm_value(p: DeformParams, x: float, rel_tol: float = 1e-15,
                max_terms: int = 500_000) -> float:
    """Value-only fast path for N(x)."""
    _check_disk(p, x)
    if x == 0.0:
        return 1.0
    return _series_sums(p, x, rel_tol, max_terms, want_derivs=False)[0]


def normalization_complex(p: DeformParams, w: complex, *, rel_tol: float = 1e-15,
                          max_terms: int = 500_000) -> complex:
    """The same power series at a complex argument inside the disk.

    Needed by the overlap kernel; the termwise moduli follow the real
    recurrence at |w|, so the stopping rule and tail control carry over.
    """
    mag_w = abs(w)
    _check_disk(p, mag_w)
    if mag_w == 0.0:
        return 1.0 + 0.0j
    phase = w / mag_w
    re = CompensatedSum(1.0)
    im = CompensatedSum()
    ratios = _term_ratios(p, mag_w)
    mag = 1.0
    n = 0
    term = 1.0 + 0.0j
    r = next(ratios)
    while n < max_terms:
        term *= phase * r
        mag *= r
        n += 1
        re.add(term.real)
        im.add(term.imag)
        r = next(ratios)
        if r < 1.0 and mag * r / (1.0 - r) <= rel_tol * abs(complex(re.value, im.value)):
            return complex(re.value, im.value)
    raise ConvergenceError(
        f"normalization series did not converge within {max_terms} terms at |w| = {mag_w}")


def moment_target(p: DeformParams, n: int) -> float:
    """Reference power moment s^n q^{-n(n+1)/2} [n]_q!."""
    return p.scale ** n * p.q ** (-n * (n + 1) / 2.0) * q_factorial(n, p.q)


def pochhammer_product(p: DeformParams, x: float) -> tuple[float, float]:
    """Product form ((q-1) x / s; 1/q)_inf with its tail bound, for q > 1.

    Its reciprocal equals N(x) inside the disk, giving an independent
    evaluation route for the series.
    """
    if p.q < 1.0:
        raise DomainError("the product form of the normalization requires q > 1")
    _check_disk(p, x)
    return pochhammer_infinite((p.q - 1.0) * x / p.scale, 1.0 / p.q)


@dataclass(frozen=True)
class CoherentState:
    """Truncated coherent state: amplitudes c_n for n < dim.

    c_n = N(|z|^2)^{-1/2} q^{n(n+1)/4} z^n / sqrt(s^n [n]_q!), so
    sum |c_n|^2 = 1 - tail_residual with tail_residual <= tail_bound.
    """

    z: complex
    params: DeformParams
    dim: int
    amplitudes: np.ndarray
    norm_value: float
    tail_bound: float

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def amplitudes(p: DeformParams, z: complex, t: FockTruncation) -> CoherentState:
    """Amplitude vector of |z> on the first ``t.dim`` number states.

    Warns if the retained probability falls short of 1 by more than 1e-10.
    """
    z = complex(z)
    x = abs(z) ** 2
    _check_disk(p, x)
    norm = normalization(p, x)
    d = t.dim
    inv_sqrt = 1.0 / math.sqrt(norm.value)
    c = np.zeros(d, dtype=complex)
    c[0] = inv_sqrt
    if x == 0.0:
        return CoherentState(z=z, params=p, dim=d, amplitudes=c,
                             norm_value=1.0, tail_bound=0.0)
    # c_{n+1}/c_n = z q^{(n+1)/2} / sqrt(s [n+1]_q) = (z/|z|) sqrt(r_n)
    phase = z / abs(z)
    running = complex(inv_sqrt)
    ratios = _term_ratios(p, x)
    partial = CompensatedSum(1.0)  # series terms of N at x, n < dim
    term = 1.0
    for n in range(1, d):
        r = next(ratios)
        running *= phase * math.sqrt(r)
        c[n] = running
        term *= r
        partial.add(term)
    residual = max(0.0, (norm.value - partial.value) / norm.value)
    # roundoff slack: the residual and the probability sum follow different
    # floating paths of d terms each
    tail_bound = residual + norm.tail_bound / norm.value + 4e-16 * d
    if residual > 1e-10:
        warnings.warn(
            f"coherent-state truncation at dim = {d} leaves probability "
            f"residual {residual:.3e}", RuntimeWarning, stacklevel=2)
    return CoherentState(z=z, params=p, dim=d, amplitudes=c,
                         norm_value=norm.value, tail_bound=tail_bound)


def overlap(p: DeformParams, z1: complex, z2: complex) -> complex:
    """<z1|z2> = N(conj(z1) z2) / sqrt(N(|z1|^2) N(|z2|^2)).

    Equal to 1 at z1 = z2 and never zero inside the disk, |overlap| <= 1.
    """
    z1 = complex(z1)
    z2 = complex(z2)
    w = z1.conjugate() * z2
    n1 = _norm_value(p, abs(z1) ** 2)
    n2 = _norm_value(p, abs(z2) ** 2)
    return normalization_complex(p, w) / math.sqrt(n1 * n2)


def eigen_residual(p: DeformParams, z: complex, t: FockTruncation) -> float:
    """Euclidean norm of (a - z) |z>_D on the truncated space.

    Rows n < D-1 vanish identically (x_{n+1} c_{n+1} = z c_n) and contribute
    only rounding noise; the last row carries the truncation defect
    |z c_{D-1}|, which decays as D grows, so the residual is a certificate
    that |z>_D approximates an eigenvector of a.
    """
    state = amplitudes(p, z, t)
    c = state.amplitudes
    acc = CompensatedSum()
    for n in range(t.dim - 1):
        x_n1 = math.sqrt(structure_function(p, n + 1))
        r = x_n1 * c[n + 1] - state.z * c[n]
        acc.add(abs(r) ** 2)
    acc.add(abs(state.z * c[t.dim - 1]) ** 2)
    return math.sqrt(acc.value)


def unity_weight(p: DeformParams, x: float) -> float:
    """Radial density of the measure that resolves the identity, at x = |z|^2.

    For 0 < q < 1: (1-q)/(s ln(1/q)) N(x)/N(x/q), a density against
    d^2z / pi on the whole plane.  For q > 1: 1/(2 pi (1 - (q-1)x/s)), a
    density against d_q x dtheta on the lattice of the disk.
    """
    radius = _check_disk(p, x)
    if not (x > 0.0):
        raise DomainError(f"unity weight is defined on (0, {radius}), got x = {x}")
    q = p.q
    s = p.scale
    if q < 1.0:
        const = (1.0 - q) / (s * math.log(1.0 / q))
        return const * _norm_value(p, x) / _norm_value(p, x / q)
    return 1.0 / (2.0 * math.pi * (1.0 - (q - 1.0) * x / s))


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the q < 1 moment quadrature.

    ``x_max = None`` selects the cutoff automatically by growing it until
    the analytic remainder bound drops below ``remainder_rel`` times the
    target moment.
    """

    x_max: float | None = None
    epsrel: float = 1e-11
    remainder_rel: float = 1e-10
    panel_base: float = 10.0


@dataclass(frozen=True)
class MomentReport:
    """Computed vs reference moments of the unity-resolving measure."""

    orders: list[int]
    computed: list[float]
    target: list[float]
    rel_error: list[float]
    regime: str  # "stieltjes_qlt1" or "hausdorff_qgt1"


def _ln_q_factorial(n: int, q: float) -> float:
    acc = 0.0
    for k in range(2, n + 1):
        acc += math.log(q_number(k, q))
    return acc


def _qlt1_remainder_bound(p: DeformParams, n: int, x_cut: float) -> float:
    """Bound const * int_{x_cut}^inf x^n / N(x/q) dx for q < 1.

    Every series term is a lower bound for N, so for any m >= n+2
    x^n / N(x/q) <= s^m [m]_q! q^{-m(m-1)/2} x^{n-m}; minimized over m.
    """
    q = p.q
    s = p.scale
    const = (1.0 - q) / (s * math.log(1.0 / q))
    ln_x = math.log(x_cut)
    ln_s = math.log(s)
    lq = math.log(q)
    best = math.inf
    ln_fact = _ln_q_factorial(n + 1, q)
    for m in range(n + 2, n + 121):
        ln_fact += math.log(q_number(m, q))
        ln_b = (m * ln_s + ln_fact - 0.5 * m * (m - 1) * lq
                + (n - m + 1) * ln_x - math.log(m - n - 1))
        best = min(best, ln_b)
    return const * math.exp(best) if best < 700.0 else math.inf


def _qlt1_moment(p: DeformParams, n: int, spec: QuadratureSpec) -> float:
    """Stieltjes-side moment by panelled adaptive quadrature on [0, x_max]."""
    q = p.q
    s = p.scale
    const = (1.0 - q) / (s * math.log(1.0 / q))
    target = moment_target(p, n)

    if spec.x_max is not None:
        x_cut = spec.x_max
    else:
        x_cut = 10.0 * max(1.0, s, s / (1.0 - q))
        for _ in range(200):
            if _qlt1_remainder_bound(p, n, x_cut) <= spec.remainder_rel * target:
                break
            x_cut *= 2.0
        else:
            raise ConvergenceError(
                f"no certified quadrature cutoff found for moment n = {n}")

    def integrand(x: float) -> float:
        return x ** n / _norm_value(p, x / q)

    edges = [0.0, min(1.0, s)]
    while edges[-1] < x_cut:
        edges.append(min(edges[-1] * spec.panel_base, x_cut))
    total = CompensatedSum()
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = quad(integrand, lo, hi, epsabs=spec.remainder_rel * target / 10.0,
                        epsrel=spec.epsrel, limit=200)
        total.add(piece)
    return const * total.value


def verify_moments(p: DeformParams, n_max: int,
                   quad_spec: QuadratureSpec | None = None) -> MomentReport:
    """Measure the moments of the unity-resolving weight against the targets.

    q > 1: exact lattice integration of x^n / N(x/q) over (0, R).
    q < 1: adaptive quadrature of const * x^n / N(x/q) on [0, x_max] with a
    certified remainder (see :class:`QuadratureSpec`).  Reports per-order
    relative errors; enforcement of thresholds lives in the callers.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}")
    spec = quad_spec or QuadratureSpec()
    orders = list(range(n_max + 1))
    targets = [moment_target(p, n) for n in orders]
    computed: list[float] = []
    if p.q > 1.0:
        radius = domain_radius(p).radius
        for n in orders:
            value, _, _ = q_integral_with_bound(
                lambda x, n=n: x ** n / _norm_value(p, x / p.q), p, radius)
            computed.append(value)
        regime = "hausdorff_qgt1"
    else:
        for n in orders:
            computed.append(_qlt1_moment(p, n, spec))
        regime = "stieltjes_qlt1"
    rel = [abs(c - t) / t for c, t in zip(computed, targets)]
    return MomentReport(orders=orders, computed=computed, target=targets,
                        rel_error=rel, regime=regime)
