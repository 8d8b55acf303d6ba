"""Metric induced on the label disk by the coherent-state map.

The line element is conformal, dsigma^2 = W(x) dzbar dz with
W(x) = (x N'(x)/N(x))' = d<N>/dx, i.e. in polar coordinates z = r e^{i th}
dsigma^2 = W(r^2)(dr^2 + r^2 dth^2).  For small x,
W(x) = q/s [1 - 2q(1-q) x/(s(1+q)) + o(x^2)].

The construction is native to the q < 1 regime where the labels cover the
plane; for q > 1 the same series is analytic inside the finite disk and W
is evaluated there too, labelled as an extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coherent import _check_disk, domain_radius, normalization
from .qcore import DeformParams, DomainError

__all__ = ["MetricPoint", "SlopeCheck", "metric_w", "metric_smallx_check"]


@dataclass(frozen=True)
class MetricPoint:
    """Conformal factor and polar line-element coefficients at x = |z|^2.

    ``ds2_coeff_theta = x * ds2_coeff_r`` by construction (conformality).
    """

    x: float
    w: float
    ds2_coeff_r: float
    ds2_coeff_theta: float
    regime: str  # "q_lt_1" (native) or "q_gt_1_extension"


@dataclass(frozen=True)
class SlopeCheck:
    measured_slope: float
    predicted_slope: float
    rel_error: float


def metric_w(p: DeformParams, x: float) -> MetricPoint:
    """W(x) = d<N>/dx assembled from the series value and derivatives.

    W = (N' N + x N'' N - x N'^2)/N^2; at x = 0 the exact coefficients of
    the series make this the analytic limit q/s without any 0/0 quotient.
    """
    _check_disk(p, x)
    e = normalization(p, x)
    v = e.value
    w = (e.d1 * v + x * e.d2 * v - x * e.d1 * e.d1) / (v * v)
    regime = "q_lt_1" if p.q < 1.0 else "q_gt_1_extension"
    return MetricPoint(x=x, w=w, ds2_coeff_r=w, ds2_coeff_theta=x * w, regime=regime)


def metric_smallx_check(p: DeformParams, x: float) -> SlopeCheck:
    """Compare the measured slope (W(x) - W(0))/x with -2q^2(1-q)/(s^2(1+q)).

    Requires x <= 1e-3 min(1, R) so the quadratic remainder stays small.
    """
    radius = domain_radius(p).radius
    if not (0.0 < x <= 1e-3 * min(1.0, radius)):
        raise DomainError(
            f"small-x probe must satisfy 0 < x <= 1e-3 min(1, R), got x = {x}")
    w0 = metric_w(p, 0.0).w
    wx = metric_w(p, x).w
    measured = (wx - w0) / x
    q = p.q
    s = p.scale
    predicted = -2.0 * q * q * (1.0 - q) / (s * s * (1.0 + q))
    return SlopeCheck(measured_slope=measured, predicted_slope=predicted,
                      rel_error=abs(measured - predicted) / abs(predicted))
