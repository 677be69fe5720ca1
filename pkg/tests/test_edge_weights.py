import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lrtrace.edge_weights import (
    LogLift,
    PeriodicWeightSystem,
    WeightTriple,
    default_theta,
    evolve_L,
    evolve_R,
    lift_from_logs,
    lift_logarithms,
    lift_word,
    lift_word_from_logs,
    solve_periodic,
    sweep,
)
from lrtrace.errors import DegenerateInputError, ThetaMismatchError
from lrtrace.presets import (
    HYPERBOLIC_B0,
    LLR_EXAMPLE_LOGS,
    LR_EXAMPLE_LOGS,
    hyperbolic_lift,
    hyperbolic_system,
    llr_example_lift,
    lr_example_lift,
)

TWO_PI_I = 2j * math.pi
W3 = cmath.exp(2j * math.pi / 3)


def annulus_point(rng):
    r = rng.uniform(0.5, 2.0)
    phi = rng.uniform(-math.pi, math.pi)
    return r * cmath.exp(1j * phi)


class TestMoves:
    def test_L_on_simple_triple(self):
        t = evolve_L(WeightTriple(1, 1, 1))
        assert t.as_tuple() == (1, 4, 0.25)

    def test_R_after_L(self):
        t = evolve_R(WeightTriple(1, 4, 0.25))
        assert t.distance(WeightTriple(4, 6.25, 1 / 25)) < 1e-15

    def test_sweep_length_and_order(self):
        path = sweep(WeightTriple(1, 1, 1), "lr")
        assert len(path) == 3
        assert path[2].distance(WeightTriple(4, 6.25, 0.04)) < 1e-15

    def test_product_invariant(self):
        # a b c is preserved by both moves
        t = WeightTriple(0.3 + 0.7j, -1.2 + 0.4j, 2.0 - 0.1j)
        p = t.a * t.b * t.c
        for u in sweep(t, "LRRLL"):
            assert abs(u.a * u.b * u.c - p) < 1e-12 * abs(p)

    @pytest.mark.parametrize("bad", [0, -1])
    def test_poles(self, bad):
        with pytest.raises(DegenerateInputError):
            evolve_L(WeightTriple(1, bad, 1))
        with pytest.raises(DegenerateInputError):
            evolve_R(WeightTriple(1, 1, bad))

    @pytest.mark.parametrize("word", ["", "LX", "l r"])
    def test_bad_word(self, word):
        with pytest.raises(ValueError):
            sweep(WeightTriple(1, 1, 1), word)


class TestPeriodicSystem:
    def test_hyperbolic_values(self):
        t0 = hyperbolic_system("+").triples[0]
        assert abs(t0.a - W3.conjugate()) < 1e-14
        assert abs(t0.b - W3) < 1e-14
        assert abs(t0.c - 1) < 1e-14

    def test_hyperbolic_minus_root(self):
        t0 = hyperbolic_system("-").triples[0]
        for w in t0.as_tuple():
            assert abs(w - W3) < 1e-14

    def test_signs_give_distinct_systems(self):
        plus = hyperbolic_system("+").triples[0]
        minus = hyperbolic_system("-").triples[0]
        assert plus.distance(minus) > 0.1

    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_random_annulus(self, sign):
        rng = np.random.default_rng(7 if sign == "+" else 8)
        worst = 0.0
        for _ in range(200):
            b0 = annulus_point(rng)
            try:
                system = solve_periodic(b0, sign)
            except DegenerateInputError:
                continue
            t0, t1, t2 = system.triples
            assert t0.b == b0
            worst = max(worst, evolve_R(evolve_L(t0)).distance(t0))
        assert worst < 1e-10

    @given(st.floats(0.5, 2.0), st.floats(-math.pi, math.pi), st.sampled_from(["+", "-"]))
    def test_fixed_point_property(self, r, phi, sign):
        b0 = r * cmath.exp(1j * phi)
        if abs(1 + b0) < 1e-3:
            return
        system = solve_periodic(b0, sign)
        assert system.residual() < 1e-10

    @pytest.mark.parametrize("b0", [0, -1])
    def test_excluded_b0(self, b0):
        with pytest.raises(DegenerateInputError):
            solve_periodic(b0)

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            solve_periodic(1.0, "0")

    def test_dict_round_trip(self):
        system = solve_periodic(0.7 + 0.4j, "-")
        back = PeriodicWeightSystem.from_dict(json.loads(json.dumps(system.to_dict())))
        assert back == system


class TestLift:
    def test_hyperbolic_lift(self):
        lift = hyperbolic_lift()
        assert lift.windings == (0, 0, 0)
        assert lift.theta_v == 0
        for k in (0, 1):
            assert abs(lift.A[k] + 2j * math.pi / 3) < 1e-14
        assert abs(lift.U(0) - 8j * math.pi / 3) < 1e-14

    def assert_recursions(self, lift):
        # the linear recursions hold exactly for any lift
        for k, letter in enumerate(lift.word):
            a, b, c, v = lift.A[k], lift.B[k], lift.C[k], lift.V[k + 1]
            if letter == "L":
                expect = (-b, 2 * v + a, -2 * v + 2 * b + c)
            else:
                expect = (-c, 2 * v + b, -2 * v + 2 * c + a)
            got = (lift.A[k + 1], lift.B[k + 1], lift.C[k + 1])
            for x, y in zip(got, expect):
                assert abs(x - y) < 1e-12

    def assert_invariants(self, lift):
        self.assert_recursions(lift)
        assert sum(lift.windings) == 0
        assert abs(lift.A[0] + lift.B[0] + lift.C[0] - lift.theta_v) < 1e-12
        assert abs(lift.A[0] - lift.A[-1] - TWO_PI_I * lift.l_hat) < 1e-9
        assert abs(lift.B[0] - lift.B[-1] - TWO_PI_I * lift.m_hat) < 1e-9
        assert abs(lift.C[0] - lift.C[-1] - TWO_PI_I * lift.n_hat) < 1e-9
        assert lift.exp_residual() < 1e-10

    @pytest.mark.parametrize("branches", [(0, 0, 0), (1, -1, 0), (2, 0, 1), (-1, 3, -2)])
    def test_branch_choices_keep_invariants(self, branches):
        self.assert_invariants(hyperbolic_lift("+", branches))

    def test_branch_shift_moves_logs_by_2pi_i(self):
        base = hyperbolic_lift()
        shifted = hyperbolic_lift("+", (1, -1, 0))
        assert abs(shifted.A[0] - base.A[0] - TWO_PI_I) < 1e-14
        assert abs(shifted.B[0] - base.B[0] + TWO_PI_I) < 1e-14
        assert abs(shifted.C[0] - base.C[0]) < 1e-14
        assert shifted.windings != base.windings

    def test_random_systems(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            system = solve_periodic(annulus_point(rng), rng.choice(["+", "-"]))
            t0 = system.triples[0]
            branches = tuple(int(k) for k in rng.integers(-2, 3, size=3))
            self.assert_invariants(lift_logarithms(system, default_theta(t0), branches))

    def test_theta_mismatch(self):
        with pytest.raises(ThetaMismatchError):
            lift_logarithms(hyperbolic_system(), 0.5j)

    def test_theta_may_differ_by_2pi_i(self):
        lift = lift_logarithms(hyperbolic_system(), TWO_PI_I)
        self.assert_invariants(lift)

    def test_lr_example_snaps_to_given_logs(self):
        lift, mismatch = lift_from_logs(*LR_EXAMPLE_LOGS)
        # the published logs carry six significant digits
        assert mismatch < 1e-4
        assert lift.windings == (5, -5, 0)
        assert abs(lift.U(1) - (-2.58581 + 6.053886j)) < 1e-5
        self.assert_invariants(lift)

    def test_llr_example(self):
        lift = llr_example_lift()
        assert lift.word == "LLR"
        assert lift.windings == (3, 0, -3)
        for x, y in zip((lift.A[0], lift.B[0], lift.C[0]), LLR_EXAMPLE_LOGS):
            assert abs(x - y) < 1e-4
        self.assert_invariants(lift)

    def test_non_periodic_triple_rejected(self):
        with pytest.raises(Exception):
            lift_word(WeightTriple(1, 1, 1), "LR", 0j)

    def test_v_branch_override(self):
        base = hyperbolic_lift()
        t0 = base.triples[0]
        lift = lift_word(t0, "LR", 0j, v_branches=(1, 1))
        self.assert_invariants(lift)
        assert abs(lift.V[1] - base.V[1] - TWO_PI_I) < 1e-14

    def test_dict_round_trip(self):
        lift = lr_example_lift()
        back = LogLift.from_dict(json.loads(json.dumps(lift.to_dict())))
        assert back == lift
        assert back.triples == lift.triples

    def test_from_logs_rejects_far_input(self):
        with pytest.raises(Exception):
            lift_from_logs(0.3, 0.1 + 1j, 2.0)

    def test_word_lift_matches_lr_lift(self):
        lift = lr_example_lift()
        again = lift_word_from_logs(lift.A[0], lift.B[0], lift.C[0], "LR")
        assert again.windings == lift.windings
        for x, y in zip(again.A, lift.A):
            assert abs(x - y) < 1e-9
