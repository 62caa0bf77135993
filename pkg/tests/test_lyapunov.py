import math

import numpy as np
import pytest

from neurocycles import (
    FitInconclusiveError,
    LyapunovSource,
    NotAFocusError,
    Params,
    bautin_curve,
    classify_equilibrium,
    equilibria,
    focal_oracle,
    l2bar,
    l2bar_roots,
    lyapunov_closed,
    lyapunov_generic,
    symmetry_conjugate,
    taylor_coeffs,
)
from neurocycles import kernel
from neurocycles.lienard import LienardCoeffs, hopf_manifold

from test_lienard import random_hopf_points


def _coeffs(p_vals, q_vals, theta=1.0, d=-1.0) -> LienardCoeffs:
    p = list(p_vals) + [0.0] * (7 - len(p_vals))
    q = list(q_vals) + [0.0] * (6 - len(q_vals))
    return LienardCoeffs(p=tuple(p), q=tuple(q), theta=theta, d=d)


def _l1_scale(theta: float, d: float) -> float:
    return max(1.0, 2.0 * theta, abs(6.0 - 8.0 * d) * theta**2,
               2.0 * theta**3, theta**4)


class TestGenericFormulas:
    def test_linear_center_candidate(self):
        lv = lyapunov_generic(_coeffs([-1.0], []))
        assert (lv.l1, lv.l2, lv.l3) == (0.0, 0.0, 0.0)
        assert lv.source is LyapunovSource.GENERIC

    def test_direct_substitution(self):
        lv = lyapunov_generic(_coeffs([-1.0, 1.0], [1.0]))
        assert lv.l1 == 1.0

    def test_rejects_nonnegative_p1(self):
        with pytest.raises(NotAFocusError):
            lyapunov_generic(_coeffs([0.5], []))


class TestClosedForms:
    def test_reciprocity(self):
        """theta -> 1/theta at fixed d rescales each quantity by theta^-deg."""
        rng = np.random.default_rng(11)
        for _ in range(300):
            theta = float(np.exp(rng.uniform(-6, 6)))
            d = float(rng.uniform(-30.0, 5.0))
            there = lyapunov_closed(theta, d)
            back = lyapunov_closed(1.0 / theta, d)
            for name, deg in (("l1", 4), ("l2", 6), ("l3", 10)):
                lhs = getattr(back, name) * theta**deg
                rhs = getattr(there, name)
                scale = max(abs(lhs), abs(rhs), 1.0)
                assert abs(lhs - rhs) < 1e-9 * scale

    def test_l1_vanishes_on_bautin_curve(self):
        for v in np.geomspace(1e-3, 1e3, 1000):
            if abs(v - 1.0) < 1e-6:
                continue
            bp = bautin_curve(float(v))
            lv = lyapunov_closed(v, bp.a - bp.b)
            assert abs(lv.l1) < 1e-9 * _l1_scale(v, bp.a - bp.b)

    def test_l2_on_curve_equals_l2bar(self):
        # the restriction collapses with proportionality constant exactly 1
        for v in np.geomspace(1e-2, 1e2, 200):
            if abs(v - 1.0) < 1e-6:
                continue
            bp = bautin_curve(float(v))
            lv = lyapunov_closed(v, bp.a - bp.b)
            lb = l2bar(float(v))
            assert lv.l2 == pytest.approx(lb, rel=1e-9, abs=1e-6)

    def test_l3_negative_at_codim3_points(self):
        theta1, theta2 = l2bar_roots()
        for v in (theta1, theta2):
            bp = bautin_curve(v)
            lv = lyapunov_closed(v, bp.a - bp.b)
            assert lv.l3 < 0.0

    def test_rejects_nonpositive_theta(self):
        with pytest.raises(ValueError):
            lyapunov_closed(0.0, -1.0)


class TestL2Bar:
    def test_hand_arithmetic_at_one(self):
        assert l2bar(1.0) == pytest.approx(-160.0, abs=1e-12)

    def test_limit_toward_zero(self):
        assert l2bar(1e-12) == pytest.approx(2.0, rel=1e-10)

    def test_roots_are_roots(self):
        theta1, theta2 = l2bar_roots()
        for v in (theta1, theta2):
            quartic = 1.0 - 14.0 * v + 6.0 * v**2 - 14.0 * v**3 + v**4
            assert abs(quartic) < 1e-9 * v**4

    def test_root_values_and_identities(self):
        theta1, theta2 = l2bar_roots()
        assert theta1 == pytest.approx(13.6349, abs=1e-4)
        assert theta2 == pytest.approx(0.0733414, abs=1e-4)
        assert theta1 * theta2 == pytest.approx(1.0, abs=1e-12)
        assert theta1 + theta2 == pytest.approx(7.0 + 3.0 * math.sqrt(5.0), abs=1e-12)

    def test_sign_pattern(self):
        theta1, theta2 = l2bar_roots()
        assert l2bar(0.5 * theta2) > 0.0
        assert l2bar(1.0) < 0.0
        assert l2bar(2.0 * theta1) > 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            l2bar(-2.0)


class TestBautinCurve:
    def test_codim3_points_match_reported_values(self):
        theta1, theta2 = l2bar_roots()
        bp1 = bautin_curve(theta1)
        assert bp1.a == pytest.approx(7.8541, abs=1e-3)
        assert bp1.b == pytest.approx(26.9164, abs=1e-3)
        assert bp1.c == pytest.approx(18.4129, abs=1e-3)
        bp2 = bautin_curve(theta2)
        assert bp2.c == pytest.approx(0.64937, abs=1e-4)
        assert bp2.a == pytest.approx(bp1.a, abs=1e-9)
        assert bp2.b == pytest.approx(bp1.b, abs=1e-9)

    def test_hyperplane_sides(self):
        theta1, theta2 = l2bar_roots()
        bp1, bp2 = bautin_curve(theta1), bautin_curve(theta2)
        assert bp1.a - bp1.b + 2.0 * bp1.c > 0.0
        assert bp2.a - bp2.b + 2.0 * bp2.c < 0.0

    def test_reciprocal_points_are_symmetry_conjugate(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            v = float(np.exp(rng.uniform(-5, 5)))
            if abs(v - 1.0) < 1e-3:
                continue
            bp = bautin_curve(v)
            bq = bautin_curve(1.0 / v)
            conj, _ = symmetry_conjugate(bp.params)
            assert bq.a == pytest.approx(conj.a, rel=1e-12)
            assert bq.b == pytest.approx(conj.b, rel=1e-12)
            assert bq.c == pytest.approx(conj.c, rel=1e-9, abs=1e-12)

    def test_curve_point_is_weak_focus(self):
        bp = bautin_curve(4.0)
        eqs = equilibria(bp.params)
        assert len(eqs) == 1
        assert abs(eqs[0].u0 - bp.u0) < 1e-9
        assert abs(eqs[0].trace) < 1e-12
        assert eqs[0].det > 0.0

    def test_rejects_degenerate_and_invalid(self):
        with pytest.raises(ValueError):
            bautin_curve(1.0)
        with pytest.raises(ValueError):
            bautin_curve(-3.0)


class TestCrossSourceAgreement:
    def test_l1_signs_match_at_random_hopf_points(self):
        checked = 0
        for hp in random_hopf_points(seed=13, n=1000, u0_box=2.0, b_span=30.0):
            p = hp.params
            eq = classify_equilibrium(p, hp.u0)
            gen = lyapunov_generic(taylor_coeffs(p, eq))
            clo = lyapunov_closed(hp.theta, p.a - p.b)
            if abs(clo.l1) > 1e-8 * _l1_scale(hp.theta, p.a - p.b):
                assert (gen.l1 > 0) == (clo.l1 > 0), hp
                checked += 1
        assert checked > 900

    def test_both_routes_vanish_on_bautin_curve(self):
        for v in np.geomspace(0.05, 20.0, 60):
            if abs(v - 1.0) < 0.05:
                continue
            bp = bautin_curve(float(v))
            eq = classify_equilibrium(bp.params, bp.u0)
            gen = lyapunov_generic(taylor_coeffs(bp.params, eq))
            clo = lyapunov_closed(v, bp.a - bp.b)
            assert abs(clo.l1) < 1e-9 * _l1_scale(v, bp.a - bp.b)
            # generic l1 has its own positive scale; compare to its l2 size
            assert abs(gen.l1) < 1e-7 * max(1.0, abs(gen.l2))

    def test_l2_sign_on_curve_matches_l2bar(self):
        for v in np.geomspace(0.02, 50.0, 80):
            if abs(v - 1.0) < 0.05:
                continue
            bp = bautin_curve(float(v))
            eq = classify_equilibrium(bp.params, bp.u0)
            gen = lyapunov_generic(taylor_coeffs(bp.params, eq))
            lb = l2bar(float(v))
            if abs(lb) > 1e-6 * (1.0 + v) ** 6:
                assert (gen.l2 > 0) == (lb > 0), v


class TestFocalOracle:
    def test_k1_signs_match_closed_form(self):
        done = 0
        for hp in random_hopf_points(seed=14, n=40):
            p = hp.params
            eq = classify_equilibrium(p, hp.u0)
            clo = lyapunov_closed(hp.theta, p.a - p.b)
            if abs(clo.l1) < 1e-3 * _l1_scale(hp.theta, p.a - p.b):
                continue
            res = focal_oracle(p, eq, 1)
            assert res.sign == (1 if clo.l1 > 0 else -1)
            assert abs(res.slope - 3.0) <= 0.1
            done += 1
            if done >= 10:
                break
        assert done >= 10

    @pytest.mark.parametrize("vartheta", [20.0, 30.0, 5.0])
    def test_k2_sign_matches_l2bar(self, vartheta):
        bp = bautin_curve(vartheta)
        eq = equilibria(bp.params)[0]
        res = focal_oracle(bp.params, eq, 2)
        assert res.sign == (1 if l2bar(vartheta) > 0 else -1)
        assert abs(res.slope - 5.0) <= 0.1

    def test_codim3_displacement_sign_matches_negative_l3(self):
        # At the multiplicity-3 points the first two quantities vanish, so
        # the displacement is seventh-order and too contaminated for a
        # clean slope fit in double precision; its SIGN is still decisive:
        # inward at every resolvable radius, as the negative third
        # quantity demands.
        for v in l2bar_roots():
            bp = bautin_curve(v)
            eq = equilibria(bp.params)[0]
            seen = 0
            for j in range(5):
                x0 = 0.032 * 2.0**j
                r_next, _t, status, _res = kernel.ray_return(
                    kernel.FIELD_LIENARD, bp.a, bp.b, bp.c, eq.u0,
                    0.0, 0.0, 1.0, 0.0, x0, 1e-12, 1e-14, 200.0)
                assert status == kernel.STATUS_OK
                disp = r_next - x0
                if abs(disp) > 20.0 * (1e-14 + 1e-12 * x0):
                    assert disp < 0.0
                    seen += 1
            assert seen >= 4

    def test_k3_inconclusive_at_codim3_with_default_ladder(self):
        theta1, _ = l2bar_roots()
        bp = bautin_curve(theta1)
        eq = equilibria(bp.params)[0]
        with pytest.raises(FitInconclusiveError):
            focal_oracle(bp.params, eq, 3)

    def test_linear_center_is_inconclusive(self):
        p = Params(2.0, 3.0, 0.5)
        eq = equilibria(p)[0]
        with pytest.raises(FitInconclusiveError):
            focal_oracle(p, eq, 1, field=kernel.FIELD_LINEAR_CENTER,
                         field_p4=-2.0)

    def test_rejects_strong_focus(self):
        p = Params(16.0, 130.0, 110.0)  # trace far from zero
        eq = equilibria(p)[0]
        with pytest.raises(NotAFocusError):
            focal_oracle(p, eq, 1)

    def test_rejects_bad_order(self):
        bp = bautin_curve(4.0)
        eq = equilibria(bp.params)[0]
        with pytest.raises(ValueError):
            focal_oracle(bp.params, eq, 4)
