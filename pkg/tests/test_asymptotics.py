import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lrtrace.asymptotics import (
    LAMBDA_PI_6,
    PARTIAL_KINDS,
    asymptotic_prediction,
    c_n_constant,
    c_n_modulus,
    class_constant_log,
    cot_integral,
    d_n_limit,
    dq_partial_limit,
    dq_partial_limits,
    euler_partial_product,
    laplace_sum_reference,
    predicted_trace,
    sigma_ratio,
    volume_figure_eight,
    volume_rate,
)
from lrtrace.errors import DomainError, MagnitudeOverflowError, SingularityError
from lrtrace.presets import PETAL_U, hyperbolic_lift, principal_V
from lrtrace.skein_trace import dq_rearranged, trace_lr
from lrtrace.special_functions import lobachevsky

PI = math.pi

# 30-digit mpmath values: 6 Cl2(pi/3)/2 and the two closed-form d limits at A = 2i
VOLUME = 2.02988321281930725004240510855
D_LIMIT_2I = {1: 1.2168067297519898, 3: 0.6591095030555245}


class TestConstants:
    def test_volume(self):
        assert abs(volume_figure_eight() - 2.02988) < 1e-5
        assert abs(volume_figure_eight() - VOLUME) < 1e-14

    def test_two_lobachevsky_forms(self):
        assert abs(volume_figure_eight() - 4 * lobachevsky(PI / 6)) < 1e-13

    def test_rate(self):
        assert abs(volume_rate() - LAMBDA_PI_6 / PI) < 1e-15


class TestCn:
    U = 1 + 2j

    def test_odd_k_independent_of_class(self):
        V = principal_V(self.U)
        vals = [c_n_constant(self.U, V, 5, r) for r in (1, 3, 5, 7)]
        assert max(abs(v - vals[0]) for v in vals) < 1e-15

    def test_even_k_modulus_by_class(self):
        V = principal_V(self.U)
        mods = {r: abs(c_n_constant(self.U, V, 4, r)) for r in (1, 3, 5, 7)}
        assert abs(mods[1] - mods[5]) < 1e-14
        assert abs(mods[3] - mods[7]) < 1e-14
        assert abs(mods[1] - mods[3]) > 0.1

    @pytest.mark.parametrize("k", [4, 5, 0, -3])
    def test_modulus_formula(self, k):
        V = principal_V(self.U)
        for r in (1, 3, 5, 7):
            assert abs(abs(c_n_constant(self.U, V, k, r)) - c_n_modulus(self.U, V, k, r % 4)) < 1e-14

    @given(st.floats(-3, 3), st.floats(-8, 8), st.integers(-6, 6), st.sampled_from([1, 3, 5, 7]))
    def test_modulus_formula_property(self, x, y, k, r):
        U = complex(x, y)
        if abs(1 + cmath.exp(U)) < 1e-3:
            return
        V = principal_V(U) + 2j * PI * (k % 3)
        c = abs(c_n_constant(U, V, k, r))
        assert abs(c - c_n_modulus(U, V, k, r % 4)) <= 1e-12 * max(1.0, c)

    def test_V_must_match(self):
        with pytest.raises(DomainError):
            c_n_constant(self.U, 0.0, 5, 1)

    def test_even_residue_rejected(self):
        with pytest.raises(DomainError):
            c_n_constant(self.U, principal_V(self.U), 5, 2)

    @pytest.mark.parametrize("k_hat", [5, 4])
    def test_sigma_ratio_approaches_one(self, k_hat):
        V = principal_V(PETAL_U)
        devs = [abs(sigma_ratio(PETAL_U, V, k_hat, n) - 1) for n in (57, 249, 1001, 4001)]
        assert all(b < a for a, b in zip(devs, devs[1:]))
        assert devs[-1] < 0.01


class TestDn:
    @pytest.mark.parametrize("r", [1, 3])
    def test_real_A_gives_one(self, r):
        assert d_n_limit(0.7, r) == 1.0

    @pytest.mark.parametrize("r", [1, 3])
    def test_frozen_limits(self, r):
        assert abs(d_n_limit(2j, r) - D_LIMIT_2I[r]) < 1e-15

    @pytest.mark.parametrize("r", [1, 3])
    def test_sequence_converges(self, r):
        errs = [abs(math.exp(dq_rearranged(2j, n)) - D_LIMIT_2I[r]) for n in (101 + r - 1, 401 + r - 1, 1601 + r - 1, 6401 + r - 1)]
        assert all(b < a / 3 for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-4

    def test_classes_differ(self):
        assert abs(d_n_limit(1 + 2j, 1) - d_n_limit(1 + 2j, 3)) > 0.1

    def test_bad_inputs(self):
        with pytest.raises(DomainError):
            d_n_limit(1j, 2)
        with pytest.raises(SingularityError):
            d_n_limit(1j * PI, 1)


class TestPrediction:
    def test_growth_exponent(self):
        lift = hyperbolic_lift()
        a, b = trace_lr(lift, 2401), trace_lr(lift, 2801)
        slope = (b.log_modulus - a.log_modulus) / 400
        assert abs(slope - volume_rate()) < 1e-5

    @pytest.mark.parametrize("n", [2801, 2803])
    def test_class_constant_matches_prefactor(self, n):
        lift = hyperbolic_lift()
        pred = asymptotic_prediction(lift)
        assert abs(class_constant_log(trace_lr(lift, n)) - pred.log_prefactor(n)) < 1e-3

    def test_class_constants_regression(self):
        lift = hyperbolic_lift()
        pred = asymptotic_prediction(lift)
        assert abs(math.exp(pred.log_prefactor(1)) - 0.29885849072268433) < 1e-13
        assert abs(math.exp(pred.log_prefactor(3)) - 1.11535507165041) < 1e-13
        # finite-level estimates exp(log|Trace| - n vol/(4 pi))
        assert abs(math.exp(class_constant_log(trace_lr(lift, 2801))) - 0.29902447) < 1e-7
        assert abs(math.exp(class_constant_log(trace_lr(lift, 2803))) - 1.11597407) < 1e-7

    def test_predicted_modulus_overflow(self):
        with pytest.raises(MagnitudeOverflowError):
            predicted_trace(hyperbolic_lift(), 8001)
        assert predicted_trace(hyperbolic_lift(), 101) > 0


def parabola(t):
    return -(t - 1.0) ** 2


def ones(t, n):
    return np.ones_like(t)


class TestLaplace:
    def test_ratio_tends_to_one(self):
        devs = [abs(laplace_sum_reference(parabola, ones, (0, 2.5), n).ratio - 1) for n in (20, 50, 200)]
        assert devs[-1] < 1e-10
        assert devs[0] > devs[-1]

    def test_weight_function(self):
        def g(t, n):
            return np.cos(t) * (1 + 1 / n)

        s1 = laplace_sum_reference(parabola, g, (0, 2.5), 400, g_limit=math.cos)
        s2 = laplace_sum_reference(parabola, g, (0, 2.5), 1600, g_limit=math.cos)
        # the correction is of order 1/n
        assert abs(abs(s1.ratio - 1) / abs(s2.ratio - 1) - 4) < 0.05
        assert abs(s1.x0 - 1) < 1e-8

    def test_alternating_is_suppressed(self):
        s = laplace_sum_reference(parabola, ones, (0, 2.5), 200, alternating=True)
        assert s.suppression < 1e-5

    def test_boundary_maximum_rejected(self):
        with pytest.raises(DomainError):
            laplace_sum_reference(lambda t: -t, ones, (0, 1), 50)


class TestPartialLimits:
    @pytest.mark.parametrize("which", PARTIAL_KINDS)
    def test_sequences_approach_limits(self, which):
        errs = []
        for m in (100, 400, 1600):
            value, limit = dq_partial_limits(1 + 2j, which, m)
            errs.append(abs(value - limit))
        assert errs[2] < errs[1] < errs[0]
        assert errs[2] < 5e-4

    @pytest.mark.parametrize("which", PARTIAL_KINDS)
    def test_real_A_gives_zero(self, which):
        assert abs(dq_partial_limit(0.8, which)) < 1e-15

    def test_limits_assemble_d(self):
        A = 1 + 2j
        one = dq_partial_limit(A, "first_sum_1mod4") + dq_partial_limit(A, "second_sum_1mod4")
        three = sum(dq_partial_limit(A, k) for k in ("first_sum_3mod4", "second_sum_3mod4", "isolated_3mod4"))
        assert abs(math.exp(one) - d_n_limit(A, 1)) < 1e-14
        assert abs(math.exp(three) - d_n_limit(A, 3)) < 1e-14

    def test_unknown_group(self):
        with pytest.raises(DomainError):
            dq_partial_limits(1j, "third_sum", 10)

    def test_cot_integral(self):
        assert abs(cot_integral() - math.log(2) / (8 * PI)) < 1e-15

    def test_euler_product(self):
        A = 1 + 2j
        target = cmath.cosh((A - 1j * PI) / 4)
        e1 = abs(euler_partial_product(A, 1000) - target)
        e2 = abs(euler_partial_product(A, 2000) - target)
        assert e1 < 1e-4
        assert abs(e1 / e2 - 2) < 0.01
