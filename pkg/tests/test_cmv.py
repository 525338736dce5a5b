from __future__ import annotations

import math

import numpy as np
import pytest

from ewalk.cmv import (
    PairSequence,
    VerblunskyPair,
    base_identification,
    boxed_entry_defect,
    build_LM,
    cmv_to_walk,
    correspondence_defect,
    gecmv_matrix,
    gecmv_stencil,
    stencil_defect,
    theta_matrix,
    walk_to_cmv,
)
from ewalk.core import SIGMA_1, CoinSequence, RationalField, Ring, SU2Coin, WalkSpec, build_matrix
from ewalk.exceptions import IncompatibleRing, NotNormalized, NotRepresentable

from conftest import random_unitary

S2 = 1.0 / math.sqrt(2.0)


def random_pairs(rng, period):
    return PairSequence.periodic([VerblunskyPair.random(rng) for _ in range(period)])


class TestTheta:
    def test_swap(self):
        np.testing.assert_array_equal(theta_matrix((0, 1)), SIGMA_1)

    def test_diag(self):
        np.testing.assert_array_equal(theta_matrix((1, 0)), np.diag([1, -1]))

    def test_hadamard_like(self):
        th = theta_matrix((S2, S2))
        assert np.linalg.det(th) == pytest.approx(-1, abs=1e-15)
        assert np.abs(th.conj().T @ th - np.eye(2)).max() <= 1e-15

    def test_random_unitary_det(self, rng):
        for _ in range(1000):
            th = VerblunskyPair.random(rng).theta
            assert np.abs(th.conj().T @ th - np.eye(2)).max() <= 1e-12
            assert abs(np.linalg.det(th) + 1) <= 1e-12

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            VerblunskyPair(0.5, 0.5)


class TestLM:
    def test_swap_pairs_give_shift(self):
        L, M = build_LM(PairSequence.constant((0, 1)), 8)
        E = (L @ M).matrix
        # two-site shift: delta_j -> delta_{j+2} for odd j, delta_{j-2} for even j
        for j in range(8):
            target = (j + 2) % 8 if j % 2 else (j - 2) % 8
            col = np.zeros(8)
            col[target] = 1
            np.testing.assert_array_equal(E[:, j], col)

    def test_diagonal_pairs(self):
        E = gecmv_matrix(PairSequence.constant((1, 0)), 6).matrix
        np.testing.assert_array_equal(E, np.diag(np.diag(E)))

    def test_odd_ring(self):
        with pytest.raises(IncompatibleRing):
            build_LM(PairSequence.constant((0, 1)), 7)

    def test_incompatible_period(self, rng):
        with pytest.raises(IncompatibleRing):
            build_LM(random_pairs(rng, 4), 6)

    def test_unitary(self, rng):
        L, M = build_LM(random_pairs(rng, 16), 32)
        assert L.unitarity_defect() <= 1e-12
        assert M.unitarity_defect() <= 1e-12
        assert (L @ M).unitarity_defect() <= 1e-12

    @pytest.mark.parametrize("sites", [2, 4, 8, 64])
    def test_stencil(self, rng, sites):
        for pairs in (PairSequence.constant(VerblunskyPair.random(rng)), random_pairs(rng, sites)):
            assert stencil_defect(pairs, sites) <= 1e-14

    def test_stencil_conjugation_matters_for_complex_rho(self, rng):
        real = PairSequence.periodic([(np.exp(0.3j * k) * 0.6, 0.8) for k in range(8)])
        assert stencil_defect(real, 8, conjugate_lower=False) <= 1e-14
        assert stencil_defect(random_pairs(rng, 8), 8, conjugate_lower=False) > 1e-3

    def test_boxed_entry(self, rng):
        pairs = random_pairs(rng, 10)
        E = gecmv_matrix(pairs, 10).matrix
        a0, am1 = pairs(0).alpha, pairs(-1).alpha
        assert abs(E[0, 0] - (-np.conj(a0) * am1)) <= 1e-15
        assert boxed_entry_defect(pairs, 10) <= 1e-15

    def test_five_diagonal(self, rng):
        E = gecmv_stencil(random_pairs(rng, 16), 16)
        assert E.bandwidth() <= 2


class TestBaseIdentification:
    def test_map(self):
        idx = base_identification(6)
        # sites 0..5 -> (0,-), (1,+), (1,-), (2,+), (2,-), (0,+)
        np.testing.assert_array_equal(idx, [1, 2, 3, 4, 5, 0])

    def test_bijection(self):
        idx = base_identification(64)
        assert sorted(idx) == list(range(64))


class TestCorrespondence:
    def test_swap_pairs_is_shift(self):
        spec = cmv_to_walk(PairSequence.constant((0, 1)))
        a = build_matrix(spec, Ring(4)).matrix
        b = build_matrix(WalkSpec.shift_coin(np.eye(2)), Ring(4)).matrix
        np.testing.assert_array_equal(a, b)

    def test_even_pairs_vanish_gives_shift_coin(self, rng):
        pair = VerblunskyPair.random(rng)
        pairs = PairSequence.periodic([(0, 1), pair])
        spec = cmv_to_walk(pairs)
        coin = SIGMA_1 @ pair.theta
        a = build_matrix(spec, Ring(6)).matrix
        b = build_matrix(WalkSpec.shift_coin(coin), Ring(6)).matrix
        assert np.abs(a - b).max() <= 1e-15

    def test_constant(self, rng):
        assert correspondence_defect(PairSequence.constant(VerblunskyPair.random(rng)), 12) <= 1e-13

    def test_periodic_and_explicit(self, rng):
        for _ in range(10):
            assert correspondence_defect(random_pairs(rng, 64), 64) <= 1e-13
        table = {j: VerblunskyPair.random(rng) for j in range(-3, 20)}
        pairs = PairSequence.explicit(table, VerblunskyPair.random(rng))
        assert correspondence_defect(pairs, 16) <= 1e-13


class TestWalkToCMV:
    def test_identity(self):
        data = walk_to_cmv(np.eye(2))
        assert data.w(0).alpha == 0
        assert data.w(0).rho == 1

    def test_hadamard(self):
        p = walk_to_cmv(SU2Coin.hadamard()).w(0)
        assert p.alpha == pytest.approx(-S2)
        assert p.rho == pytest.approx(S2)
        np.testing.assert_allclose(SIGMA_1 @ p.theta, SU2Coin.hadamard().matrix, atol=1e-15)

    def test_roundtrip(self, rng):
        for _ in range(20):
            coin = SU2Coin.from_polar(rng.uniform(), rng.uniform(-3, 3), rng.uniform(-3, 3))
            data = walk_to_cmv(coin)
            for pairs, spec in ((data.u, WalkSpec.shift_coin(coin)), (data.w, WalkSpec.split_step(coin))):
                a = build_matrix(cmv_to_walk(pairs), Ring(6)).matrix
                b = build_matrix(spec, Ring(6)).matrix
                assert np.abs(a - b).max() <= 1e-13

    def test_position_dependent_spec(self, rng):
        c1 = CoinSequence.periodic([SU2Coin.from_polar(rng.uniform(), rng.uniform()) for _ in range(2)])
        c2 = CoinSequence.periodic([SU2Coin.from_polar(rng.uniform(), rng.uniform()) for _ in range(3)])
        spec = WalkSpec.split_step(c1, c2)
        pairs = walk_to_cmv(spec)
        a = build_matrix(cmv_to_walk(pairs), Ring(6)).matrix
        b = build_matrix(spec, Ring(6)).matrix
        assert np.abs(a - b).max() <= 1e-13

    def test_not_representable_coin(self):
        with pytest.raises(NotRepresentable):
            walk_to_cmv(np.diag([1, 1j]))

    def test_field_rejected(self):
        with pytest.raises(NotRepresentable):
            walk_to_cmv(WalkSpec.split_step(SU2Coin.hadamard(), field=RationalField(1, 3)))

    def test_random_unitary_representable_iff_su2(self, rng):
        u = random_unitary(rng)
        det = np.linalg.det(u)
        su2 = u / np.sqrt(det)
        walk_to_cmv(su2)
        with pytest.raises(NotRepresentable):
            walk_to_cmv(u * np.exp(0.4j) / np.sqrt(det))
