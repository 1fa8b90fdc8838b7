import numpy as np
import pytest

from scene_nav.rotations import (
    random_rotation,
    relative_to_global,
    rot_to_6d,
    sixd_to_rot,
)


def rz(deg):
    a = np.deg2rad(deg)
    return np.array(
        [[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]]
    )


class TestSixD:
    def test_identity_encoding(self):
        assert np.allclose(rot_to_6d(np.eye(3)), [1, 0, 0, 0, 1, 0])

    def test_scaling_invariance(self):
        assert np.allclose(sixd_to_rot([2, 0, 0, 0, 3, 0]), np.eye(3))

    def test_round_trip_random(self, rng):
        for _ in range(100):
            R = random_rotation(rng)
            back = sixd_to_rot(rot_to_6d(R))
            assert np.linalg.norm(back - R) < 1e-12

    def test_decoded_is_orthonormal_det_one(self, rng):
        sixd = rng.normal(size=6)
        R = sixd_to_rot(sixd)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-9)
        assert np.isclose(np.linalg.det(R), 1.0, atol=1e-9)

    def test_encode_decode_idempotent(self, rng):
        sixd = rng.normal(size=6)
        once = rot_to_6d(sixd_to_rot(sixd))
        twice = rot_to_6d(sixd_to_rot(once))
        assert np.allclose(once, twice, atol=1e-12)

    def test_near_zero_first_column_errors(self):
        with pytest.raises(ValueError):
            sixd_to_rot([1e-9, 0, 0, 0, 1, 0])

    def test_batched(self, rng):
        Rs = np.stack([random_rotation(rng) for _ in range(16)])
        back = sixd_to_rot(rot_to_6d(Rs))
        assert np.allclose(back, Rs, atol=1e-12)


class TestKinematicChain:
    def test_identity_chain(self):
        locals_ = np.stack([np.eye(3)] * 4)
        out = relative_to_global([-1, 0, 1, 2], locals_)
        assert np.allclose(out, locals_)

    def test_z_rotation_composition(self):
        locals_ = np.stack([rz(90), rz(90)])
        out = relative_to_global([-1, 0], locals_)
        assert np.allclose(out[1], rz(180), atol=1e-12)

    def test_matches_recursive_oracle(self, rng):
        n = 16
        parents = [-1] + [int(rng.integers(0, i)) for i in range(1, n)]
        locals_ = np.stack([random_rotation(rng) for _ in range(n)])

        def recurse(i):
            if parents[i] < 0:
                return locals_[i]
            return recurse(parents[i]) @ locals_[i]

        out = relative_to_global(parents, locals_)
        for i in range(n):
            assert np.allclose(out[i], recurse(i), atol=1e-12)

    def test_cycle_rejected(self):
        locals_ = np.stack([np.eye(3)] * 3)
        with pytest.raises(ValueError):
            relative_to_global([-1, 2, 1], locals_)
