"""Unit tests for the dense linear-algebra kernels."""

import numpy as np
import pytest

from z2flow.errors import (
    DimensionError,
    SingularError,
    SymmetryError,
    TransportError,
    WindowCollisionError,
)
from z2flow.linalg import (
    OrthonormalFrame,
    Projection,
    frame_of_range,
    pfaffian,
    pfaffian_sign,
    sign_det,
    spectral_window_projection,
    transport_frame,
)

from conftest import pf_matchings


def skew(rng, dim):
    m = rng.standard_normal((dim, dim))
    return m - m.T


class TestPfaffian:
    def test_canonical_block(self):
        assert pfaffian([[0, 1], [-1, 0]]) == pytest.approx(1.0)

    def test_two_by_two_entry(self):
        t = -3.0
        assert pfaffian([[0, t], [-t, 0]]) == pytest.approx(-3.0)

    def test_doubled_perturbed_block(self):
        # 4x4 doubled-and-perturbed family at t = s = 1; value frozen from
        # the matching-sum oracle, cross-checked against Pf^2 = det = 4
        m = np.array([
            [0, 0, 1, -1],
            [0, 0, 1, 1],
            [-1, -1, 0, 0],
            [1, -1, 0, 0],
        ], dtype=float)
        assert pf_matchings(m) == pytest.approx(-2.0)
        assert pfaffian(m) == pytest.approx(-2.0)
        assert pfaffian(m) ** 2 == pytest.approx(np.linalg.det(m))

    def test_empty_matrix(self):
        assert pfaffian(np.zeros((0, 0))) == 1.0

    def test_odd_dimension_rejected(self):
        with pytest.raises(DimensionError):
            pfaffian(np.zeros((3, 3)))

    def test_non_skew_rejected(self):
        with pytest.raises(SymmetryError):
            pfaffian(np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_square_equals_det(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            dim = 2 * int(rng.integers(1, 6))
            m = skew(rng, dim)
            pf = pfaffian(m)
            det = np.linalg.det(m)
            assert pf ** 2 == pytest.approx(det, rel=1e-8, abs=1e-12)

    def test_congruence_identity(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            dim = 2 * int(rng.integers(1, 6))
            m = skew(rng, dim)
            a = rng.standard_normal((dim, dim))
            lhs = pfaffian(a.T @ m @ a)
            rhs = np.linalg.det(a) * pfaffian(m)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)

    def test_matches_matching_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            dim = 2 * int(rng.integers(1, 5))
            m = skew(rng, dim)
            assert pfaffian(m) == pytest.approx(pf_matchings(m), rel=1e-10)

    def test_sign_variant_agrees(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            dim = 2 * int(rng.integers(1, 7))
            m = skew(rng, dim)
            assert pfaffian_sign(m) == int(np.sign(pfaffian(m)))


class TestSignDet:
    def test_identity(self):
        for n in (1, 3, 7):
            assert sign_det(np.eye(n)) == 1

    def test_rank_one_reflection(self):
        for n in (1, 2, 5):
            d = np.ones(n)
            d[0] = -1.0
            assert sign_det(np.diag(d)) == -1

    def test_transposition(self):
        assert sign_det([[0.0, 1.0], [1.0, 0.0]]) == -1

    def test_singular_rejected(self):
        with pytest.raises(SingularError):
            sign_det(np.zeros((2, 2)))

    def test_tracks_numpy_det(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            m = rng.standard_normal((n, n))
            if np.linalg.svd(m, compute_uv=False)[-1] < 1e-6:
                continue
            assert sign_det(m) == int(np.sign(np.linalg.det(m)))

    def test_extreme_scale(self):
        # the determinant value itself would overflow / underflow
        n = 40
        big = np.diag(np.full(n, 1e20))
        big[0, 0] = -1e20
        assert sign_det(big) == -1
        small = np.diag(np.full(n, 1e-18))
        assert sign_det(small) == 1


class TestSpectralWindow:
    def test_full_window(self):
        t = np.array([[0.0, 0.7], [-0.7, 0.0]])
        p = spectral_window_projection(t, 1.0)
        assert p.rank == 2
        np.testing.assert_allclose(p.matrix, np.eye(2), atol=1e-12)

    def test_empty_window(self):
        t = np.array([[0.0, 0.7], [-0.7, 0.0]])
        p = spectral_window_projection(t, 0.2)
        assert p.rank == 0
        np.testing.assert_allclose(p.matrix, np.zeros((2, 2)), atol=1e-12)

    def test_block_selection(self):
        t = np.zeros((4, 4))
        t[0, 1], t[1, 0] = 1.0, -1.0
        t[2, 3], t[3, 2] = 0.1, -0.1
        p = spectral_window_projection(t, 0.5)
        assert p.rank == 2
        expected = np.diag([0.0, 0.0, 1.0, 1.0])
        np.testing.assert_allclose(p.matrix, expected, atol=1e-12)

    def test_collision_rejected(self):
        t = np.array([[0.0, 0.5], [-0.5, 0.0]])
        with pytest.raises(WindowCollisionError):
            spectral_window_projection(t, 0.5)

    def test_invariants_random(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            dim = 2 * int(rng.integers(1, 5))
            m = rng.standard_normal((dim, dim))
            t = m - m.T
            sv = np.linalg.svd(t, compute_uv=False)
            a = (sv.min() + sv.max()) / 2.0 if sv.min() < sv.max() else sv.max() * 2
            if np.min(np.abs(sv - a)) < 1e-6:
                continue
            p = spectral_window_projection(t, a)
            q = p.matrix
            assert np.max(np.abs(q @ q - q)) < 1e-10
            assert np.max(np.abs(q - q.T)) < 1e-12
            # commutes with the operator it was cut from
            assert np.max(np.abs(q @ t - t @ q)) < 1e-9 * max(sv.max(), 1)

    def test_chiral_projection_commutes_with_grading(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            b = rng.standard_normal((n, n))
            t = np.zeros((2 * n, 2 * n))
            t[:n, n:] = b
            t[n:, :n] = -b.T
            sv = np.linalg.svd(t, compute_uv=False)
            a = float(sv.max()) * 2.0 if n == 1 else float(np.median(sv)) * 1.01
            if np.min(np.abs(sv - a)) < 1e-8:
                continue
            j = np.diag([1.0] * n + [-1.0] * n)
            q = spectral_window_projection(t, a).matrix
            assert np.max(np.abs(j @ q @ j - q)) < 1e-9


class TestFrames:
    def test_identity_gives_canonical_basis(self):
        f = frame_of_range(Projection(np.eye(2), 2))
        np.testing.assert_allclose(f.vectors, np.eye(2), atol=1e-12)

    def test_zero_projection_gives_empty_frame(self):
        f = frame_of_range(Projection(np.zeros((3, 3)), 0))
        assert len(f) == 0

    def test_rank_one_deterministic(self):
        v = np.array([3.0, 4.0]) / 5.0
        p = Projection(np.outer(v, v), 1)
        f1 = frame_of_range(p)
        f2 = frame_of_range(p)
        np.testing.assert_array_equal(f1.vectors, f2.vectors)
        assert abs(abs(float(f1.vectors[:, 0] @ v)) - 1.0) < 1e-12

    def test_spans_range(self):
        rng = np.random.default_rng(18)
        for _ in range(30):
            dim = int(rng.integers(2, 7))
            r = int(rng.integers(1, dim + 1))
            basis = np.linalg.qr(rng.standard_normal((dim, dim)))[0][:, :r]
            p = Projection(basis @ basis.T, r)
            f = frame_of_range(p)
            assert len(f) == r
            np.testing.assert_allclose(
                f.vectors @ f.vectors.T, p.matrix, atol=1e-9)


class TestTransport:
    def test_identity_transport(self):
        f = OrthonormalFrame(3, np.eye(3)[:, :2])
        q = f.projection()
        out = transport_frame(f, q)
        np.testing.assert_allclose(out.vectors, f.vectors, atol=1e-12)

    def test_single_vector(self):
        theta = 0.1
        v = np.array([np.cos(theta), np.sin(theta)])
        f = OrthonormalFrame(2, np.eye(2)[:, :1])
        out = transport_frame(f, Projection(np.outer(v, v), 1))
        np.testing.assert_allclose(out.vectors[:, 0], v, atol=1e-12)

    def test_rotation_about_axis(self):
        theta = 0.2
        rot = np.array([
            [1.0, 0.0, 0.0],
            [0.0, np.cos(theta), -np.sin(theta)],
            [0.0, np.sin(theta), np.cos(theta)],
        ])
        f = OrthonormalFrame(3, np.eye(3)[:, :2])
        q = Projection(rot @ f.projection().matrix @ rot.T, 2)
        out = transport_frame(f, q)
        np.testing.assert_allclose(out.vectors, rot @ f.vectors, atol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(19)
        for _ in range(30):
            dim = int(rng.integers(2, 7))
            r = int(rng.integers(1, dim))
            basis = np.linalg.qr(rng.standard_normal((dim, dim)))[0][:, :r]
            f = OrthonormalFrame(dim, basis)
            other = np.linalg.qr(
                basis + 0.2 * rng.standard_normal((dim, r)))[0]
            q_other = Projection(other @ other.T, r)
            there = transport_frame(f, q_other)
            back = transport_frame(there, f.projection())
            np.testing.assert_allclose(back.vectors, f.vectors, atol=1e-9)

    def test_rank_mismatch_rejected(self):
        f = OrthonormalFrame(3, np.eye(3)[:, :2])
        with pytest.raises(DimensionError):
            transport_frame(f, Projection(np.zeros((3, 3)), 0))

    def test_orthogonal_target_rejected(self):
        f = OrthonormalFrame(2, np.eye(2)[:, :1])
        q = Projection(np.diag([0.0, 1.0]), 1)
        with pytest.raises(TransportError):
            transport_frame(f, q)
