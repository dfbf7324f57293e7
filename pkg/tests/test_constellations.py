import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hiercap.constellations import (
    Constellation,
    PowerSplit,
    StreamSpec,
    alpha_from_power_split,
    bit_subsets,
    constellation_csv,
    full_stream,
    hp_stream,
    lp_stream,
    make_hier_16qam,
    make_hier_8psk,
    make_qpsk,
    make_uniform_16qam,
    make_uniform_8psk,
    power_split_from_alpha,
)

alphas = st.floats(min_value=0.05, max_value=12.0, allow_nan=False)
thetas = st.floats(min_value=0.5, max_value=44.5, allow_nan=False)


def pairwise_distances(pts: np.ndarray) -> np.ndarray:
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    return d[np.triu_indices(len(pts), k=1)]


def hamming(a: int, b: int) -> int:
    return bin(a ^ b).count("1")


class TestGeometry:
    def test_qpsk_points(self):
        c = make_qpsk()
        s = 1 / math.sqrt(2)
        assert c.m == 2 and c.size == 4
        assert c.es == pytest.approx(1.0, abs=1e-12)
        got = {(round(float(x), 12), round(float(y), 12)) for x, y in c.points}
        want = {(round(a, 12), round(b, 12)) for a in (s, -s) for b in (s, -s)}
        assert got == want
        assert pairwise_distances(c.points).min() == pytest.approx(math.sqrt(2), abs=1e-12)

    @given(alphas)
    def test_16qam_unit_energy(self, alpha):
        c = make_hier_16qam(alpha)
        assert c.size == 16
        assert c.es == pytest.approx(1.0, abs=1e-9)

    @given(thetas)
    def test_8psk_unit_circle(self, theta):
        c = make_hier_8psk(theta)
        radii = np.linalg.norm(c.points, axis=1)
        assert np.allclose(radii, 1.0, atol=1e-12)
        assert c.es == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 4.0])
    def test_16qam_distance_ratio(self, alpha):
        # ratio of the quadrant gap (2 d_h) to the in-quadrant spacing
        # (2 d_l) recovers the amplitude ratio
        c = make_hier_16qam(alpha)
        quad = np.sign(c.points)
        same_quadrant = np.all(quad[:, None, :] == quad[None, :, :], axis=2)
        d = np.linalg.norm(c.points[:, None, :] - c.points[None, :, :], axis=2)
        iu = np.triu_indices(16, k=1)
        d, same = d[iu], same_quadrant[iu]
        intra = d[same].min()
        inter = d[~same].min()
        assert inter / intra == pytest.approx(alpha, rel=1e-12)
        if alpha >= 1.0:
            assert d.min() == pytest.approx(intra, rel=1e-12)

    def test_uniform_16qam_is_alpha_one(self):
        u = make_uniform_16qam()
        a1 = make_hier_16qam(1.0)
        assert np.array_equal(u.points, a1.points)
        assert np.array_equal(u.labels, a1.labels)
        d = pairwise_distances(u.points)
        assert d.min() == pytest.approx(2.0 / math.sqrt(10.0), rel=1e-12)

    def test_8psk_distances(self):
        # offset pairs inside a quadrant sit 2*theta apart on the circle,
        # nearest cross-quadrant pairs 90 - 2*theta apart
        c = make_hier_8psk(10.0)
        d = pairwise_distances(c.points)
        assert d.min() == pytest.approx(2 * math.sin(math.radians(10.0)), abs=1e-12)
        quad = np.sign(c.points)
        same = np.all(quad[:, None, :] == quad[None, :, :], axis=2)
        iu = np.triu_indices(8, k=1)
        inter = np.linalg.norm(c.points[:, None, :] - c.points[None, :, :], axis=2)[iu][~same[iu]]
        assert inter.min() == pytest.approx(2 * math.sin(math.radians(45.0 - 10.0)), abs=1e-12)

    def test_uniform_8psk_evenly_spaced(self):
        c = make_uniform_8psk()
        ang = np.sort(np.degrees(np.arctan2(c.points[:, 1], c.points[:, 0])))
        assert np.allclose(np.diff(ang), 45.0, atol=1e-9)


class TestLabeling:
    @pytest.mark.parametrize(
        "c", [make_qpsk(), make_hier_16qam(2.0), make_uniform_16qam()], ids=lambda c: c.name
    )
    def test_nearest_neighbors_differ_in_one_bit(self, c):
        d = np.linalg.norm(c.points[:, None, :] - c.points[None, :, :], axis=2)
        np.fill_diagonal(d, np.inf)
        for i in range(c.size):
            row = d[i]
            near = np.nonzero(row <= row.min() * (1 + 1e-9))[0]
            for j in near:
                assert hamming(int(c.labels[i]), int(c.labels[j])) == 1

    def test_8psk_gray_around_circle(self):
        c = make_hier_8psk(22.5)
        order = np.argsort(np.arctan2(c.points[:, 1], c.points[:, 0]))
        labs = c.labels[order]
        for a, b in zip(labs, np.roll(labs, -1)):
            assert hamming(int(a), int(b)) == 1

    def test_quadrant_bits_follow_signs(self):
        for c in (make_qpsk(), make_hier_16qam(3.0), make_hier_8psk(15.0)):
            b1, b2 = c.label_bit(1), c.label_bit(2)
            assert np.array_equal(np.sign(c.points[:, 0]), (-1.0) ** b1)
            assert np.array_equal(np.sign(c.points[:, 1]), (-1.0) ** b2)

    def test_label_bit_range(self):
        c = make_qpsk()
        with pytest.raises(ValueError):
            c.label_bit(0)
        with pytest.raises(ValueError):
            c.label_bit(3)


class TestStreams:
    def test_stream_positions(self):
        c = make_hier_16qam(2.0)
        assert hp_stream(c).positions == (1, 2)
        assert lp_stream(c).positions == (3, 4)
        assert full_stream(c).positions == (1, 2, 3, 4)
        assert hp_stream(c).k == 2 and lp_stream(c).k == 2
        assert lp_stream(make_hier_8psk(10.0)).positions == (3,)

    def test_lp_needs_spare_bits(self):
        with pytest.raises(ValueError, match="no bits left"):
            lp_stream(make_qpsk())

    def test_subsets_partition(self):
        for spec in (hp_stream(make_hier_16qam(2.0)), lp_stream(make_hier_8psk(10.0))):
            cells = bit_subsets(spec)
            assert len(cells) == 2**spec.k
            sizes = {len(cell) for cell in cells}
            assert sizes == {spec.constellation.size // 2**spec.k}
            stacked = np.concatenate(cells)
            assert stacked.shape == spec.constellation.points.shape

    def test_hp_cells_are_quadrants(self):
        spec = hp_stream(make_hier_16qam(2.0))
        for cell in bit_subsets(spec):
            signs = np.sign(cell)
            assert np.all(signs == signs[0])

    def test_bad_positions_rejected(self):
        c = make_qpsk()
        with pytest.raises(ValueError):
            StreamSpec(c, (1, 1))
        with pytest.raises(ValueError):
            StreamSpec(c, (0,))
        with pytest.raises(ValueError):
            StreamSpec(c, ())

    def test_default_descriptors(self):
        c = make_hier_16qam(2.0)
        assert hp_stream(c).descriptor == "16qam:alpha=2:hp"
        assert full_stream(make_qpsk()).descriptor == "qpsk"


class TestPowerSplit:
    @given(st.floats(min_value=0.5005, max_value=0.9995))
    def test_round_trip(self, rho):
        alpha = alpha_from_power_split(PowerSplit(rho))
        back = power_split_from_alpha(alpha)
        assert back.rho_hp == pytest.approx(rho, abs=1e-12)

    def test_rho_lp_complement(self):
        s = PowerSplit(0.75)
        assert s.rho_lp == pytest.approx(0.25)

    def test_split_matches_stream_energies(self):
        # energy of the quadrant centroids vs the residual offsets
        alpha = 2.0
        c = make_hier_16qam(alpha)
        quad = hp_stream(c).subset_index()
        centroids = np.stack([c.points[quad == i].mean(axis=0) for i in range(4)])
        e_hp = float(np.mean(np.sum(centroids**2, axis=1)))
        e_lp = 1.0 - e_hp
        split = power_split_from_alpha(alpha)
        assert e_hp / e_lp == pytest.approx((1 + alpha) ** 2, rel=1e-9)
        assert e_hp == pytest.approx(split.rho_hp, rel=1e-9)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            PowerSplit(0.5)
        with pytest.raises(ValueError):
            PowerSplit(1.0)
        with pytest.raises(ValueError):
            power_split_from_alpha(0.0)


class TestValidation:
    def test_bad_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            make_hier_16qam(0.0)
        with pytest.raises(ValueError, match="alpha"):
            make_hier_16qam(-1.0)

    @pytest.mark.parametrize("theta", [0.0, 45.0, -3.0, 90.0])
    def test_bad_theta(self, theta):
        with pytest.raises(ValueError, match="theta"):
            make_hier_8psk(theta)

    def test_labels_must_be_permutation(self):
        pts = make_qpsk().points
        with pytest.raises(ValueError, match="permutation"):
            Constellation("broken", pts, np.array([0, 1, 2, 2]), 2)

    def test_points_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            Constellation("broken", np.zeros((3, 2)), np.arange(4), 2)

    def test_normalized_copy(self):
        c = make_qpsk()
        scaled = Constellation("big", c.points * 3.0, c.labels, 2)
        assert scaled.es == pytest.approx(9.0)
        assert scaled.normalized().es == pytest.approx(1.0, abs=1e-12)

    def test_points_read_only(self):
        c = make_qpsk()
        with pytest.raises(ValueError):
            c.points[0, 0] = 5.0


def test_constellation_csv_round_trips():
    c = make_hier_16qam(2.0)
    text = constellation_csv(c)
    lines = text.strip().splitlines()
    assert lines[0] == "i,q,label"
    assert len(lines) == 17
    rows = [line.split(",") for line in lines[1:]]
    pts = np.array([[float(r[0]), float(r[1])] for r in rows])
    labs = np.array([int(r[2]) for r in rows])
    assert np.array_equal(pts, c.points)
    assert np.array_equal(labs, c.labels)
