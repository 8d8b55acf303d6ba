"""Coherent states: normalization series, amplitudes, overlap kernel,
unity weight and the moment problem for both q regimes."""

import cmath
import math
import random

import numpy as np
import pytest

import oracles
from qdeform import (ConvergenceError, DeformParams, DomainError, FockTruncation,
                     QuadratureSpec, amplitudes, domain_radius, eigen_residual,
                     moment_target, normalization, normalization_complex, overlap,
                     photon_pdf, pochhammer_product, unity_weight, verify_moments)

P_HALF = DeformParams(0.5, 1.0, 0.0)
P_TWO = DeformParams(2.0, 1.0, 0.0)

# frozen from the mpmath oracle (tests/oracles.py, 60 digits, 200 terms)
N_HALF_03 = 1.1576623292236064705
N1_HALF_03 = 0.55162870140768638359
N2_HALF_03 = 0.1775969723878741261
N_TWO_03 = 1.9603314132315270612
NC_HALF_W = complex(1.0021496269294849004, -0.032552559932066398445)


class TestDomainRadius:
    def test_infinite_below_one(self):
        assert domain_radius(DeformParams(0.5, 1.0, 0.0)).radius == math.inf

    def test_finite_above_one(self):
        assert domain_radius(DeformParams(2.0, 1.0, 0.0)).radius == 1.0
        assert domain_radius(DeformParams(2.0, 2.0, 1.0)).radius == 8.0


class TestNormalization:
    def test_at_zero_exact_coefficients(self):
        for q, l, lam in oracles.PARAM_TRIPLES:
            p = DeformParams(q, l, lam)
            e = normalization(p, 0.0)
            assert e.value == 1.0
            assert e.d1 == p.q / p.scale
            assert e.d2 == 2.0 * p.q ** 3 / (p.scale ** 2 * (1.0 + p.q))
            assert e.tail_bound == 0.0
            assert e.terms_used >= 1

    def test_frozen_value(self):
        e = normalization(P_HALF, 0.3)
        assert e.value == pytest.approx(N_HALF_03, rel=1e-14)
        assert e.d1 == pytest.approx(N1_HALF_03, rel=1e-14)
        assert e.d2 == pytest.approx(N2_HALF_03, rel=1e-14)
        assert normalization(P_TWO, 0.3).value == pytest.approx(N_TWO_03, rel=1e-14)

    def test_against_oracle_on_grid(self):
        for p, xs in ((P_HALF, (0.05, 0.8, 3.0, 12.0)), (P_TWO, (0.05, 0.4, 0.9))):
            for x in xs:
                v, d1, d2 = oracles.norm_eval(p.q, p.l, p.lmbda, x)
                e = normalization(p, x)
                assert e.value == pytest.approx(float(v), rel=1e-13)
                assert e.d1 == pytest.approx(float(d1), rel=1e-13)
                assert e.d2 == pytest.approx(float(d2), rel=1e-13)

    def test_tail_bound_honest(self):
        for x in (0.1, 0.6, 0.95):
            e = normalization(P_TWO, x)
            exact = float(oracles.norm_eval(2.0, 1.0, 0.0, x)[0])
            assert abs(e.value - exact) <= e.tail_bound + 1e-13 * exact

    def test_domain_margin(self):
        with pytest.raises(DomainError):
            normalization(P_TWO, 1.0)
        with pytest.raises(DomainError):
            normalization(P_TWO, 1.0 - 1e-9)
        with pytest.raises(DomainError):
            normalization(P_TWO, -0.1)
        # q < 1: entire, any finite argument is fine
        assert normalization(P_HALF, 250.0).value > 0.0

    def test_functional_equation(self):
        # N(x)(1 - (q-1)x/s) = N(x/q) for q > 1
        for p in (P_TWO, DeformParams(5.0, 2.0, 1.0)):
            radius = domain_radius(p).radius
            for x in np.geomspace(1e-6 * radius, 0.999 * radius, 25):
                lhs = normalization(p, x).value * (1.0 - (p.q - 1.0) * x / p.scale)
                rhs = normalization(p, x / p.q).value
                assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_product_form(self):
        for p in (P_TWO, DeformParams(1.1, 1.0, 0.0)):
            radius = domain_radius(p).radius
            for x in np.geomspace(1e-5 * radius, 0.999 * radius, 20):
                e = normalization(p, x)
                prod, ptail = pochhammer_product(p, x)
                combined = e.tail_bound / e.value + ptail / prod + 1e-12
                assert abs(e.value - 1.0 / prod) * prod <= combined
        with pytest.raises(DomainError):
            pochhammer_product(P_HALF, 0.5)


class TestNormalizationComplex:
    def test_frozen_value(self):
        w = complex(0.2, -0.1) * complex(0.15, -0.25)
        assert normalization_complex(P_HALF, w) == pytest.approx(NC_HALF_W, rel=1e-13)

    def test_real_axis_matches_real_path(self):
        for x in (0.1, 0.5):
            assert normalization_complex(P_TWO, x + 0j).real == pytest.approx(
                normalization(P_TWO, x).value, rel=1e-13)

    def test_conjugate_symmetry(self):
        w = complex(0.3, 0.2)
        a = normalization_complex(P_HALF, w)
        b = normalization_complex(P_HALF, w.conjugate())
        assert a == b.conjugate()


class TestAmplitudes:
    def test_vacuum_label(self):
        state = amplitudes(P_TWO, 0j, FockTruncation(8))
        assert state.amplitudes[0] == 1.0 + 0j
        assert np.all(state.amplitudes[1:] == 0.0)
        assert state.norm_value == 1.0
        assert state.tail_bound == 0.0

    def test_probabilities_match_pdf(self):
        z = complex(0.35, 0.2)
        x = abs(z) ** 2
        state = amplitudes(P_HALF, z, FockTruncation(24))
        for n in range(24):
            assert abs(state.amplitudes[n]) ** 2 == pytest.approx(
                photon_pdf(P_HALF, x, n), rel=1e-12, abs=1e-300)

    def test_probability_sums_increase_to_one(self):
        z = 0.6
        totals = []
        for d in (4, 8, 16, 32):
            state = amplitudes(P_TWO, z, FockTruncation(d))
            totals.append(float(np.sum(np.abs(state.amplitudes) ** 2)))
        assert totals == sorted(totals)
        assert totals[-1] == pytest.approx(1.0, abs=1e-10)

    def test_tail_bound_covers_residual(self):
        for d in (6, 12, 24):
            state = amplitudes(P_TWO, 0.7, FockTruncation(d))
            residual = 1.0 - float(np.sum(np.abs(state.amplitudes) ** 2))
            assert residual <= state.tail_bound

    def test_truncation_warning(self):
        with pytest.warns(RuntimeWarning):
            amplitudes(P_TWO, 0.9, FockTruncation(4))

    def test_domain_rejection(self):
        with pytest.raises(DomainError):
            amplitudes(P_TWO, complex(1.1, 0.3), FockTruncation(8))


class TestOverlap:
    def test_self_overlap_is_one(self):
        for p, z in ((P_HALF, complex(0.4, -0.3)), (P_TWO, complex(0.5, 0.2))):
            assert overlap(p, z, z) == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_overlap(self):
        z = 0.6
        expected = normalization(P_TWO, z * z).value ** -0.5
        assert overlap(P_TWO, 0j, z) == pytest.approx(expected, rel=1e-13)

    def test_cauchy_schwarz_against_amplitude_oracle(self):
        rng = random.Random(20240817)
        t = FockTruncation(128)
        for _ in range(12):
            z1 = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
            z2 = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
            ov = overlap(P_TWO, z1, z2)
            assert abs(ov) <= 1.0 + 1e-12
            if abs(z1 - z2) > 1e-3:
                assert abs(ov) < 1.0
            inner = np.vdot(amplitudes(P_TWO, z1, t).amplitudes,
                            amplitudes(P_TWO, z2, t).amplitudes)
            assert ov == pytest.approx(complex(inner), rel=1e-10)

    def test_label_continuity(self):
        z = complex(0.3, 0.1)
        prev = math.inf
        for delta in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5):
            dist2 = 2.0 * (1.0 - overlap(P_HALF, z, z + delta).real)
            assert dist2 < prev
            prev = dist2
        assert prev <= 1e-9


class TestEigenResidual:
    def test_vacuum_exact_zero(self):
        assert eigen_residual(P_HALF, 0j, FockTruncation(16)) == 0.0

    def test_tiny_for_fast_decay(self):
        assert eigen_residual(P_HALF, 0.4, FockTruncation(64)) <= 1e-10

    def test_monotone_in_truncation(self):
        vals = [eigen_residual(P_HALF, 0.4, FockTruncation(d)) for d in (16, 32, 64)]
        assert vals[0] >= vals[1] >= vals[2]

    def test_truncation_dominated_decay(self):
        vals = [eigen_residual(P_TWO, 0.6, FockTruncation(d)) for d in (8, 16, 32)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[0] > 1e-6  # genuinely truncation-limited at dim 8


class TestUnityWeight:
    def test_qlt1_zero_limit(self):
        p = P_HALF
        expected = (1.0 - p.q) / (p.scale * math.log(1.0 / p.q))
        assert unity_weight(p, 1e-12) == pytest.approx(expected, rel=1e-10)

    def test_qgt1_zero_limit(self):
        assert unity_weight(P_TWO, 1e-12) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-10)

    def test_qgt1_matches_series_ratio(self):
        # N(x)/N(x/q) = 1/(1 - (q-1)x/s) on a grid
        p = P_TWO
        for x in np.geomspace(1e-4, 0.99, 15):
            ratio = normalization(p, x).value / normalization(p, x / p.q).value
            assert ratio == pytest.approx(1.0 / (1.0 - (p.q - 1.0) * x / p.scale),
                                          rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            unity_weight(P_TWO, 0.0)
        with pytest.raises(DomainError):
            unity_weight(P_TWO, 1.5)


class TestMoments:
    def test_targets(self):
        # s^n q^{-n(n+1)/2} [n]_q!
        assert moment_target(P_TWO, 0) == 1.0
        assert moment_target(P_TWO, 1) == pytest.approx(0.5, rel=1e-15)
        assert moment_target(P_HALF, 3) == pytest.approx(168.0, rel=1e-13)
        for q, l, lam in oracles.PARAM_TRIPLES:
            p = DeformParams(q, l, lam)
            for n in (0, 2, 5):
                assert moment_target(p, n) == pytest.approx(
                    float(oracles.moment_target(q, l, lam, n)), rel=1e-12)

    def test_lattice_moments_qgt1(self):
        report = verify_moments(P_TWO, 4)
        assert report.regime == "hausdorff_qgt1"
        assert report.orders == [0, 1, 2, 3, 4]
        assert report.computed[0] == pytest.approx(1.0, rel=1e-12)
        assert report.computed[1] == pytest.approx(0.5, rel=1e-10)
        assert max(report.rel_error) <= 1e-10

    def test_quadrature_moments_qlt1(self):
        report = verify_moments(P_HALF, 3)
        assert report.regime == "stieltjes_qlt1"
        assert report.rel_error[3] <= 1e-6
        assert report.rel_error[0] <= 1e-8  # zeroth moment pins the convention

    def test_report_consistency(self):
        report = verify_moments(P_TWO, 3)
        for c, t, r in zip(report.computed, report.target, report.rel_error):
            assert r == abs(c - t) / t

    def test_explicit_cutoff(self):
        report = verify_moments(P_HALF, 2, QuadratureSpec(x_max=400.0))
        assert max(report.rel_error) <= 1e-6

    def test_rejects_negative_order(self):
        with pytest.raises(DomainError):
            verify_moments(P_TWO, -1)
