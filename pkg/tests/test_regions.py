import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hiercap.capacity import QuadratureConfig, full_capacity, invert_capacity, stream_capacity
from hiercap.constellations import (
    full_stream,
    lp_stream,
    make_hier_16qam,
    make_qpsk,
    power_split_from_alpha,
)
from hiercap.predictor import ErrorTarget, ReferencePoint, build_efficiency_curve
from hiercap.regions import (
    RatePair,
    Region,
    default_rho_grid,
    efficiency_curve_family,
    merge_regions,
    pareto_frontier,
    qpsk_time_sharing_endpoints,
    qpsk_time_sharing_endpoints_real,
    region_csv,
    superposition_region_ideal,
    superposition_region_real,
    time_sharing_region,
)

TARGET = ErrorTarget("ber", 1e-5)


def ts_line(endpoints, r1):
    """r2 of the two-QPSK time-sharing segment at population-1 rate r1."""
    both, only2 = endpoints
    lam = r1 / both.r1  # fraction of time serving everyone
    return lam * both.r2 + (1 - lam) * only2.r2


@pytest.fixture(scope="module")
def ideal_2_10(q32):
    return superposition_region_ideal(2.0, 10.0, q=q32)


@pytest.fixture(scope="module")
def qpsk_refs(q32):
    # ideal-code fixture: thresholds sit where capacity equals the code rate
    qpsk = full_stream(make_qpsk(), "qpsk")
    return [
        ReferencePoint(qpsk, r, invert_capacity(qpsk, r, q32) + 0.02, TARGET)
        for r in (0.2, 0.35, 0.5, 0.65, 0.8)
    ]


@pytest.fixture(scope="module")
def family(qpsk_refs, q32):
    return efficiency_curve_family(qpsk_refs, [1.0, 2.0, 4.0], q32)


class TestRatePair:
    def test_defaults(self):
        p = RatePair(1.0, 2.0)
        assert p.scheme == ""
        assert p.rho_hp is None and p.param is None

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            RatePair(-0.1, 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            RatePair(math.nan, 1.0)
        with pytest.raises(ValueError, match="finite"):
            RatePair(1.0, math.inf)


def test_region_needs_pairs():
    with pytest.raises(ValueError, match="at least one"):
        Region("x", ())


def test_default_rho_grid():
    g = default_rho_grid()
    assert g.size == 49
    assert g[0] == 0.51 and g[-1] == 0.99
    assert np.allclose(np.diff(g), 0.01)
    assert 0.9 in g
    assert np.all((g > 0.5) & (g < 1.0))


class TestSuperpositionIdeal:
    def test_grid_and_order(self, ideal_2_10):
        assert ideal_2_10.scheme == "superposition"
        assert len(ideal_2_10.pairs) == 49
        rhos = [p.rho_hp for p in ideal_2_10.pairs]
        assert rhos == sorted(rhos)
        assert rhos == pytest.approx(list(default_rho_grid()))

    def test_r1_monotone_in_rho(self, ideal_2_10):
        # more HP energy never hurts the HP stream
        r1 = [p.r1 for p in ideal_2_10.pairs]
        assert all(b - a >= -1e-3 for a, b in zip(r1, r1[1:]))

    def test_r2_is_r1_plus_lp_capacity(self, ideal_2_10, q32):
        assert all(p.r2 >= p.r1 for p in ideal_2_10.pairs)
        spot = next(p for p in ideal_2_10.pairs if p.rho_hp == 0.9)
        lp = stream_capacity(lp_stream(make_hier_16qam(spot.param)), 10.0, q32)
        assert spot.r2 - spot.r1 == pytest.approx(lp, abs=1e-12)

    def test_rho_09_gives_alpha_2(self, ideal_2_10):
        spot = next(p for p in ideal_2_10.pairs if p.rho_hp == 0.9)
        assert spot.param == pytest.approx(2.0, abs=1e-12)

    def test_unsorted_grid_accepted(self, q32):
        reg = superposition_region_ideal(2.0, 10.0, rho_grid=[0.9, 0.6], q=q32)
        assert [p.rho_hp for p in reg.pairs] == [0.6, 0.9]

    def test_rejects_reversed_snr(self):
        with pytest.raises(ValueError, match="population 2"):
            superposition_region_ideal(6.0, 2.0)

    def test_equal_snr_bounded_by_joint_capacity(self, q32):
        # independent per-stream decoding cannot beat the joint constellation
        reg = superposition_region_ideal(5.0, 5.0, rho_grid=[0.6, 0.75, 0.9], q=q32)
        for p in reg.pairs:
            joint = full_capacity(make_hier_16qam(p.param), 5.0, q32)
            assert p.r2 <= joint + 1e-3

    def test_dominates_qpsk_time_sharing(self, ideal_2_10, q32):
        endpoints = qpsk_time_sharing_endpoints(2.0, 10.0, q32)
        for p in ideal_2_10.pairs:
            assert p.r1 <= endpoints[0].r1
            assert p.r2 >= ts_line(endpoints, p.r1) - 1e-3

    @given(
        rho=st.floats(min_value=0.51, max_value=0.99),
        lo_db=st.floats(min_value=-5.0, max_value=10.0),
        gap_db=st.floats(min_value=0.0, max_value=10.0),
    )
    def test_pairs_within_stream_limits(self, q16, rho, lo_db, gap_db):
        reg = superposition_region_ideal(lo_db, lo_db + gap_db, rho_grid=[rho], q=q16)
        (p,) = reg.pairs
        assert 0.0 <= p.r1 <= 2.0
        assert p.r1 <= p.r2 <= p.r1 + 2.0


class TestTimeSharing:
    def test_needs_two_endpoints(self):
        with pytest.raises(ValueError, match="at least two"):
            time_sharing_region([RatePair(1.0, 1.0)])

    @pytest.mark.parametrize("bad", [[-0.1], [1.1], []])
    def test_tau_grid_validated(self, bad):
        ends = [RatePair(2.0, 2.0), RatePair(0.0, 4.0)]
        with pytest.raises(ValueError, match="tau grid"):
            time_sharing_region(ends, tau_grid=bad)

    def test_endpoints_and_midpoint(self):
        ends = [RatePair(2.0, 2.0), RatePair(0.0, 4.0)]
        reg = time_sharing_region(ends, tau_grid=[0.0, 0.5, 1.0])
        assert reg.scheme == "time_sharing"
        got = {(p.r1, p.r2) for p in reg.pairs}
        assert got == {(2.0, 2.0), (1.0, 3.0), (0.0, 4.0)}
        mid = next(p for p in reg.pairs if p.param == 0.5)
        assert (mid.r1, mid.r2) == (1.0, 3.0)

    def test_default_grid_and_sorting(self):
        ends = [RatePair(2.0, 2.0), RatePair(0.0, 4.0)]
        reg = time_sharing_region(ends)
        assert len(reg.pairs) == 101
        r1 = [p.r1 for p in reg.pairs]
        assert r1 == sorted(r1)

    def test_three_endpoints_mix_pairwise(self):
        ends = [RatePair(2.0, 2.0), RatePair(0.0, 4.0), RatePair(1.0, 1.0)]
        reg = time_sharing_region(ends, tau_grid=[0.5])
        assert len(reg.pairs) == 3

    @given(
        a1=st.floats(min_value=0.0, max_value=5.0),
        a2=st.floats(min_value=0.0, max_value=5.0),
        b1=st.floats(min_value=0.0, max_value=5.0),
        b2=st.floats(min_value=0.0, max_value=5.0),
        tau=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_mix_stays_between_endpoints(self, a1, a2, b1, b2, tau):
        reg = time_sharing_region([RatePair(a1, a2), RatePair(b1, b2)], tau_grid=[tau])
        (p,) = reg.pairs
        assert min(a1, b1) - 1e-12 <= p.r1 <= max(a1, b1) + 1e-12
        assert min(a2, b2) - 1e-12 <= p.r2 <= max(a2, b2) + 1e-12

    def test_qpsk_endpoints(self, q32):
        both, only2 = qpsk_time_sharing_endpoints(2.0, 10.0, q32)
        c1 = full_capacity(make_qpsk(), 2.0, q32)
        c2 = full_capacity(make_qpsk(), 10.0, q32)
        assert both.r1 == both.r2 == pytest.approx(c1, abs=1e-12)
        assert only2.r1 == 0.0
        assert only2.r2 == pytest.approx(c2, abs=1e-12)
        with pytest.raises(ValueError, match="population 2"):
            qpsk_time_sharing_endpoints(10.0, 2.0, q32)


class TestParetoFrontier:
    def test_dominated_point_removed(self):
        reg = Region("x", (RatePair(1.0, 1.0), RatePair(2.0, 2.0)))
        front = pareto_frontier(reg)
        assert [(p.r1, p.r2) for p in front.pairs] == [(2.0, 2.0)]

    def test_tie_on_one_axis(self):
        reg = Region("x", (RatePair(1.0, 1.0), RatePair(1.0, 2.0)))
        front = pareto_frontier(reg)
        assert [(p.r1, p.r2) for p in front.pairs] == [(1.0, 2.0)]

    def test_antichain_unchanged(self):
        pts = [(0.0, 3.0), (2.0, 1.0), (1.0, 2.0), (3.0, 0.0)]
        reg = Region("x", tuple(RatePair(a, b) for a, b in pts))
        front = pareto_frontier(reg)
        assert [(p.r1, p.r2) for p in front.pairs] == sorted(pts)

    def test_merged_frontier_keeps_both_schemes(self, ideal_2_10, q32):
        ts = time_sharing_region(qpsk_time_sharing_endpoints(2.0, 10.0, q32))
        merged = merge_regions("joint", ideal_2_10, ts)
        assert merged.scheme == "joint"
        assert len(merged.pairs) == len(ideal_2_10.pairs) + len(ts.pairs)
        front = pareto_frontier(merged)
        # superposition bulges past the segment, but the pure serve-everyone
        # corner still has the largest r1 of all, so both schemes survive
        assert {p.scheme for p in front.pairs} == {"superposition", "time_sharing"}
        r1 = [p.r1 for p in front.pairs]
        assert r1 == sorted(r1)


class TestRealRegion:
    def test_family_layout(self, family):
        assert sorted(family) == [1.0, 2.0, 4.0]
        for hp_curve, lp_curve in family.values():
            assert list(hp_curve.efficiency) == [0.4, 0.7, 1.0, 1.3, 1.6]
            assert list(lp_curve.efficiency) == [0.4, 0.7, 1.0, 1.3, 1.6]

    def test_alpha_moves_thresholds_apart(self, family):
        # mid-rate threshold: HP decodes earlier and LP later as alpha grows
        hp_mid = {a: family[a][0].esn0_db[2] for a in family}
        lp_mid = {a: family[a][1].esn0_db[2] for a in family}
        assert hp_mid[1.0] > hp_mid[2.0] > hp_mid[4.0]
        assert lp_mid[1.0] < lp_mid[2.0] < lp_mid[4.0]

    def test_default_grid_follows_family(self, family):
        reg = superposition_region_real(family, 2.0, 10.0)
        assert [p.param for p in reg.pairs] == [1.0, 2.0, 4.0]
        want = [power_split_from_alpha(a).rho_hp for a in (1.0, 2.0, 4.0)]
        assert [p.rho_hp for p in reg.pairs] == pytest.approx(want)

    def test_dominates_real_time_sharing(self, family, qpsk_refs, q32):
        qpsk_curve = build_efficiency_curve(full_stream(make_qpsk(), "qpsk"), qpsk_refs, q32)
        endpoints = qpsk_time_sharing_endpoints_real(qpsk_curve, 2.0, 10.0)
        reg = superposition_region_real(family, 2.0, 10.0)
        margins = [p.r2 - ts_line(endpoints, p.r1) for p in reg.pairs if p.r1 <= endpoints[0].r1]
        assert margins and max(margins) > 0.1

    def test_snr1_below_every_threshold(self, family):
        reg = superposition_region_real(family, -25.0, 10.0)
        assert all(p.r1 == 0.0 for p in reg.pairs)
        assert all(p.r2 > 0.0 for p in reg.pairs)

    def test_missing_alpha_is_explicit(self, family):
        rho = power_split_from_alpha(3.0).rho_hp
        with pytest.raises(KeyError, match="available alpha values"):
            superposition_region_real(family, 2.0, 10.0, rho_grid=[rho])

    def test_empty_family_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            superposition_region_real({}, 2.0, 10.0)

    def test_rejects_reversed_snr(self, family):
        with pytest.raises(ValueError, match="population 2"):
            superposition_region_real(family, 10.0, 2.0)

    def test_real_endpoints_saturate(self, qpsk_refs, q32):
        qpsk_curve = build_efficiency_curve(full_stream(make_qpsk(), "qpsk"), qpsk_refs, q32)
        both, only2 = qpsk_time_sharing_endpoints_real(qpsk_curve, 2.0, 10.0)
        assert both.r1 == both.r2
        assert only2.r1 == 0.0
        # 10 dB clears the rate-0.8 threshold, so the endpoint hits the top
        assert only2.r2 == pytest.approx(1.6, abs=1e-12)


def test_region_csv_layout():
    reg = Region(
        "joint",
        (
            RatePair(0.5, 1.25, "superposition", 0.9, 2.0),
            RatePair(1.0, 1.0, "time_sharing", param=0.5),
        ),
    )
    lines = region_csv(reg).splitlines()
    assert lines[0] == "scheme,rho_hp,alpha_or_tau,r1,r2"
    assert lines[1] == "superposition,0.9,2.0,0.5,1.25"
    assert lines[2] == "time_sharing,,0.5,1.0,1.0"
    assert region_csv(reg).endswith("\n")
