import math

import numpy as np
import pytest

from neurocycles import (
    Params,
    classify_equilibrium,
    equilibria,
    hopf_manifold,
    sigmoid,
    taylor_coeffs,
    to_lienard,
)
from neurocycles.lienard import MAX_P_ORDER, eval_poly, sigmoid_derivative_polys
from neurocycles.lyapunov import bautin_curve, l2bar_roots

# ---------------------------------------------------------------------------
# Independent oracle: Richardson-extrapolated central finite differences.
# Kept deliberately separate from the polynomial-recurrence implementation.

def _stencil_weights(k: int, m: int):
    nodes = np.arange(-m, m + 1, dtype=float)
    vander = np.vander(nodes, len(nodes), increasing=True).T
    rhs = np.zeros(len(nodes))
    rhs[k] = math.factorial(k)
    return nodes, np.linalg.solve(vander, rhs)


def fd_derivative(f, k: int, h0: float = 0.01, levels: int = 5) -> float:
    """k-th derivative of f at 0 by central differences on an h0 cascade."""
    nodes, w = _stencil_weights(k, (k + 1) // 2 + 1)
    hs, ests = [], []
    for j in range(levels):
        h = h0 * 2.0**j
        ests.append(sum(wi * f(ni * h) for wi, ni in zip(w, nodes)) / h**k)
        hs.append(h * h)
    tab = list(ests)
    for lev in range(1, levels):
        tab = [(tab[i] * hs[i + lev] - tab[i + 1] * hs[i]) / (hs[i + lev] - hs[i])
               for i in range(len(tab) - 1)]
    return tab[0]


def random_hopf_points(seed: int, n: int, u0_box: float = 1.0,
                       b_span: float = 20.0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        u0 = float(rng.uniform(-u0_box, u0_box))
        theta = math.exp(4.0 * u0)
        a = (1.0 + theta) ** 2 / (2.0 * theta)
        b = a / 2.0 + float(rng.uniform(0.01, b_span))
        yield hopf_manifold(u0, b)


class TestSigmoidDerivativePolys:
    def test_first_two(self):
        polys = sigmoid_derivative_polys(2)
        assert polys[0] == [0, 4, -4]
        assert polys[1] == [0, 16, -48, 32]

    def test_vanish_at_endpoints(self):
        for poly in sigmoid_derivative_polys(8):
            assert eval_poly(poly, 0.0) == 0.0
            assert eval_poly(poly, 1.0) == 0.0

    def test_order_bounds(self):
        with pytest.raises(ValueError):
            sigmoid_derivative_polys(0)
        with pytest.raises(ValueError):
            sigmoid_derivative_polys(9)

    def test_matches_sigmoid_derivatives_numerically(self):
        polys = sigmoid_derivative_polys(4)
        for u in (-0.7, 0.0, 0.4):
            for k in (1, 2, 3, 4):
                fd = fd_derivative(lambda x: sigmoid(u + x), k)
                assert fd == pytest.approx(eval_poly(polys[k - 1], sigmoid(u)),
                                           rel=1e-6, abs=1e-6)


class TestToLienard:
    def test_p_vanishes_at_equilibrium(self, witness_params, witness_eq):
        p_func, _ = to_lienard(witness_params, witness_eq)
        assert abs(p_func(0.0)) < 1e-12

    def test_q_vanishes_at_hopf_point(self):
        hp = hopf_manifold(0.25, 4.0)
        eq = classify_equilibrium(hp.params, hp.u0)
        p_func, q_func = to_lienard(hp.params, eq)
        assert abs(p_func(0.0)) < 1e-12
        assert abs(q_func(0.0)) < 1e-12

    def test_closure_matches_direct_formula(self):
        p = Params(2.0, 1.0, -0.5)
        eq = classify_equilibrium(p, 0.0)
        p_func, _ = to_lienard(p, eq)
        x = 0.1
        direct = -0.5 + 1.0 / (1.0 + math.exp(-4.0 * x)) - x
        assert p_func(x) == pytest.approx(direct, abs=1e-15)


class TestTaylorCoeffs:
    def test_against_finite_differences(self):
        """Exact coefficients vs the FD oracle at 100 random Hopf points.

        Relative error is measured against the larger of the coefficient
        and a small fraction of its a-priori bound |d|*sum|P_k|/k!, since
        p7 crosses zero inside the sampling box.  Orders 1..6 (all that
        the focal formulas consume) must agree to 1e-6; the guard order 7
        is the noise edge of double-precision differencing and gets 1e-5.
        """
        polys = sigmoid_derivative_polys(8)
        sup = [sum(abs(cc) for cc in poly) for poly in polys]
        for hp in random_hopf_points(seed=6, n=100):
            p = hp.params
            eq = classify_equilibrium(p, hp.u0)
            lc = taylor_coeffs(p, eq)
            p_func, q_func = to_lienard(p, eq)
            d = p.a - p.b
            for k in range(1, MAX_P_ORDER + 1):
                fd = fd_derivative(p_func, k) / math.factorial(k)
                scale = max(abs(lc.p[k - 1]),
                            1e-3 * abs(d) * sup[k - 1] / math.factorial(k))
                tol = 1e-6 if k <= 6 else 1e-5
                assert abs(fd - lc.p[k - 1]) <= tol * scale, (k, hp)
                if k <= 6:
                    fdq = fd_derivative(q_func, k) / math.factorial(k)
                    scq = max(abs(lc.q[k - 1]),
                              1e-3 * p.a * sup[k] / math.factorial(k))
                    assert abs(fdq - lc.q[k - 1]) <= 1e-6 * scq, (k, hp)

    def test_p1_on_hopf_manifold(self):
        for hp in random_hopf_points(seed=7, n=50):
            eq = classify_equilibrium(hp.params, hp.u0)
            lc = taylor_coeffs(hp.params, eq)
            expected = 4.0 * (hp.a - hp.b) * hp.theta / (1.0 + hp.theta) ** 2 - 1.0
            assert lc.p1 == pytest.approx(expected, rel=1e-12, abs=1e-12)
            assert lc.p1 < 0.0  # sampled with b > a/2

    def test_p1_identity_on_bautin_curve(self):
        # substituting the curve's d into p1 collapses it to -(v-1)^2/(2v)
        for v in np.geomspace(0.02, 50.0, 100):
            if abs(v - 1.0) < 1e-9:
                continue
            bp = bautin_curve(float(v))
            eq = classify_equilibrium(bp.params, bp.u0)
            lc = taylor_coeffs(bp.params, eq)
            assert lc.p1 == pytest.approx(-(v - 1.0) ** 2 / (2.0 * v),
                                          rel=1e-9, abs=1e-12)

    def test_p1_limit_at_curve_degeneracy(self):
        # the excluded vartheta = 1 endpoint has p1 -> 0
        bp = bautin_curve(1.0 + 1e-6)
        eq = classify_equilibrium(bp.params, bp.u0)
        assert abs(taylor_coeffs(bp.params, eq).p1) < 1e-9

    def test_p1_reciprocal_symmetry(self):
        # 4*theta/(1+theta)^2 is invariant under theta -> 1/theta
        rng = np.random.default_rng(8)
        for _ in range(200):
            u0 = float(rng.uniform(-1.5, 1.5))
            d = float(rng.uniform(-20.0, 2.0))
            weight = lambda th: 4.0 * d * th / (1.0 + th) ** 2 - 1.0
            theta = math.exp(4.0 * u0)
            assert weight(theta) == pytest.approx(weight(1.0 / theta), rel=1e-12)


class TestHopfManifold:
    def test_minimum_gain_at_origin(self):
        assert hopf_manifold(0.0, 3.0).a == pytest.approx(2.0, abs=1e-15)
        assert hopf_manifold(0.4, 3.0).a > 2.0
        assert hopf_manifold(-0.4, 3.0).a > 2.0

    def test_codim3_parameter_point(self):
        theta1, _ = l2bar_roots()
        bp = bautin_curve(theta1)
        hp = hopf_manifold(u0=0.25 * math.log(theta1), b=bp.b)
        assert hp.a == pytest.approx(7.8541, abs=1e-3)
        assert hp.c == pytest.approx(18.4129, abs=1e-3)

    def test_trace_zero_by_construction(self):
        for hp in random_hopf_points(seed=9, n=100):
            eq = classify_equilibrium(hp.params, hp.u0)
            assert abs(eq.trace) < 1e-12

    def test_residuals_of_p_and_q_at_zero(self):
        for hp in random_hopf_points(seed=10, n=100):
            eq = classify_equilibrium(hp.params, hp.u0)
            p_func, q_func = to_lienard(hp.params, eq)
            assert abs(p_func(0.0)) < 1e-12
            assert abs(q_func(0.0)) < 1e-12

    def test_rejects_nonpositive_b(self):
        with pytest.raises(ValueError):
            hopf_manifold(0.0, 0.0)

    def test_focus_flag_matches_b_threshold(self):
        hp = hopf_manifold(0.1, 10.0)
        assert hp.is_focus
        hp2 = hopf_manifold(0.1, hp.a / 2.0 - 0.05)
        assert not hp2.is_focus
