import pytest

from neurocycles import (
    CATALOGUE,
    DegenerateParametersError,
    Params,
    PortraitCode,
    classify_portrait,
    is_catalogued,
    symmetry_conjugate,
)
from neurocycles.lienard import hopf_manifold


class TestPortraitCode:
    def test_parse_render_round_trip(self):
        for text in ("s", "uSUS", "s1U1u2S", "s1s2U2US", "u1u2S"):
            assert str(PortraitCode.parse(text)) == text

    def test_parse_rejects_garbage(self):
        for bad in ("", "x1", "s3", "s1 U1", "Su*"):
            with pytest.raises(ValueError):
                PortraitCode.parse(bad)

    def test_canonical_grouping(self):
        scrambled = PortraitCode.parse("u2s1S2U1")
        assert str(scrambled.canonical()) == "s1U1u2S2"

    def test_subscript_swap(self):
        assert str(PortraitCode.parse("u1s2U2S").swap_subscripts()) == "s1U1u2S"
        assert str(PortraitCode.parse("s1s2US").swap_subscripts()) == "s1s2US"
        assert str(PortraitCode.parse("uSUS").swap_subscripts()) == "uSUS"


class TestCatalogue:
    def test_has_22_codes(self):
        assert len(CATALOGUE) == 22
        assert len(set(CATALOGUE)) == 22

    def test_known_members(self):
        assert is_catalogued("uSUS")
        assert is_catalogued("s1s2")
        assert is_catalogued("s")
        assert is_catalogued("s1U1s2U2S")

    def test_non_members(self):
        assert not is_catalogued("uUU")
        assert not is_catalogued("u")
        assert not is_catalogued("uU")
        assert not is_catalogued("u1S1u2S2S")

    def test_closed_under_subscript_swap(self):
        for code in CATALOGUE:
            swapped = PortraitCode.parse(code).swap_subscripts()
            assert is_catalogued(swapped), code

    def test_accepts_non_canonical_order(self):
        # the mirrored variant of portrait 9, with the right state listed first
        assert is_catalogued("u2s1U1S")


class TestClassification:
    def test_witness_is_uSUS(self, witness_params):
        assert str(classify_portrait(witness_params)) == "uSUS"

    def test_deep_stable_region_is_s(self):
        assert str(classify_portrait(Params(16.0, 130.0, 112.5))) == "s"

    def test_three_state_codes(self):
        assert str(classify_portrait(Params(16.0, 3.0, -4.0))) == "s1s2"
        assert str(classify_portrait(Params(16.0, 14.9, -0.55))) == "u1u2S"

    def test_subscript_swap_equivariance(self):
        for p in (Params(16.0, 3.0, -4.0), Params(16.0, 14.0, -1.133),
                  Params(16.0, 14.9, -0.55)):
            code = classify_portrait(p)
            conj, _ = symmetry_conjugate(p)
            code_conj = classify_portrait(conj)
            assert str(code.swap_subscripts()) == str(code_conj)

    def test_mixed_stability_pair(self):
        code = classify_portrait(Params(16.0, 14.0, -1.133))
        assert str(code) == "s1u2"
        code2 = classify_portrait(Params(16.0, 14.0, -0.867))
        assert str(code2) == "u1s2"

    def test_refuses_near_hopf(self):
        hp = hopf_manifold(0.2, 6.0)
        with pytest.raises(DegenerateParametersError):
            classify_portrait(hp.params)

    def test_refuses_at_fold(self):
        # a - b = 4: fold where 4*phi(1-phi) = 1/4, u0 < 0 branch
        import math
        a, b = 6.0, 2.0
        root = math.sqrt(1.0 - 1.0 / (a - b))
        phi = (1.0 - root) / 2.0
        u0 = 0.25 * math.log(phi / (1.0 - phi))
        c = u0 - (a - b) * phi
        with pytest.raises(DegenerateParametersError):
            classify_portrait(Params(a, b, c))

    def test_all_transect_codes_catalogued(self):
        for c in (112.0, 111.2, 111.167, 111.165, 111.1, 110.5):
            try:
                code = classify_portrait(Params(16.0, 130.0, c))
            except DegenerateParametersError:
                continue
            assert is_catalogued(code), (c, str(code))

    def test_stable_under_tolerance_halving(self):
        # 20 non-degenerate points drawn from every region exercised above
        points = [Params(16.0, 130.0, c) for c in
                  (112.3, 112.0, 111.8, 111.5, 111.167, 111.166, 111.165,
                   111.155, 111.12, 111.0, 110.7, 110.3)]
        points += [Params(16.0, 3.0, -4.0), Params(16.0, 6.0, -5.0),
                   Params(16.0, 14.0, -1.133), Params(16.0, 14.0, -0.867),
                   Params(16.0, 14.9, -0.55), Params(16.0, 14.6, -0.7),
                   Params(2.0, 4.0, 1.2), Params(16.0, 130.0, 112.5)]
        assert len(points) == 20
        for p in points:
            base = str(classify_portrait(p, rtol=1e-10, atol=1e-12))
            tight = str(classify_portrait(p, rtol=5e-11, atol=5e-13))
            assert base == tight, p
