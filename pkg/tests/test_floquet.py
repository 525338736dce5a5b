from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ewalk.core import RationalField, Ring, SU2Coin, WalkSpec, build_matrix
from ewalk.exceptions import NotTranslationInvariant
from ewalk.floquet import (
    BandSet,
    DispersionProfile,
    closed_form_momentum,
    dispersion_closed_form,
    group_velocity_closed_form,
    max_velocity,
    maximize_periodic,
    regrouped_symbol,
    revival_defect,
    revival_relation,
    spectrum_bands,
    symbol_of_spec,
    sweep_threads,
    velocity_exponent,
)

from conftest import coprime_fields

S2 = 1.0 / math.sqrt(2.0)
THETA = np.linspace(0.0, 2.0 * np.pi, 257)[:-1]


def test_identity_coin_symbol():
    sym = symbol_of_spec(WalkSpec.shift_coin(np.eye(2)))
    mats = sym(THETA)
    np.testing.assert_allclose(mats[:, 0, 0], np.exp(-1j * THETA), atol=1e-15)
    np.testing.assert_allclose(mats[:, 1, 1], np.exp(1j * THETA), atol=1e-15)
    ph = np.sort(sym.eigenphases(0.7))
    np.testing.assert_allclose(ph, [-0.7, 0.7], atol=1e-14)


def test_hadamard_symbol_at_zero():
    sym = symbol_of_spec(WalkSpec.shift_coin(SU2Coin.hadamard()))
    np.testing.assert_allclose(sym(0.0), SU2Coin.hadamard().matrix, atol=1e-15)
    np.testing.assert_allclose(np.sort(sym.eigenphases(0.0)), [-np.pi / 4, np.pi / 4], atol=1e-14)


def test_identity_split_step_symbol_is_shift():
    a = symbol_of_spec(WalkSpec.split_step(np.eye(2)))(THETA)
    b = symbol_of_spec(WalkSpec.shift_coin(np.eye(2)))(THETA)
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_field_rejected():
    with pytest.raises(NotTranslationInvariant):
        symbol_of_spec(WalkSpec.shift_coin(np.eye(2), RationalField(1, 3)))


def test_zero_field_regroup_is_one_step():
    coin = SU2Coin.from_polar(0.6, 0.3, 1.2)
    a = regrouped_symbol("U", coin, RationalField(0, 1))(THETA)
    b = symbol_of_spec(WalkSpec.shift_coin(coin))(THETA)
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_regrouped_symbol_rejects_partial_power():
    with pytest.raises(NotTranslationInvariant):
        regrouped_symbol("U", SU2Coin.hadamard(), RationalField(1, 3), power=2)


def test_hadamard_even_branch():
    sym = regrouped_symbol("U", SU2Coin.hadamard(), RationalField(1, 2))
    cos_w = np.cos(sym.eigenphases(THETA))
    expected = -0.5 * np.cos(2 * closed_form_momentum(THETA)) + (-1) * (0.5 - 1)
    np.testing.assert_allclose(cos_w[:, 0], expected, atol=1e-12)
    np.testing.assert_allclose(cos_w[:, 1], expected, atol=1e-12)


def test_symbol_unitary_and_projections(rng):
    for _ in range(20):
        coin = SU2Coin.from_polar(rng.uniform(), rng.uniform(-3, 3), rng.uniform(-3, 3))
        n, m = 3, 7
        for kind in "UW":
            sym = regrouped_symbol(kind, coin, RationalField(n, m))
            th = rng.uniform(0, 2 * np.pi, 50)
            mats = sym(th)
            eye = np.eye(2)
            assert np.abs(mats.conj().swapaxes(-1, -2) @ mats - eye).max() <= 1e-12
            proj = sym.projections(th)
            assert np.abs(proj.sum(axis=-3) - eye).max() <= 1e-12
            lam = sym.eigenvalues(th)
            recon = np.einsum("ts,tsij->tij", lam, proj)
            assert np.abs(recon - mats).max() <= 1e-12


@pytest.mark.parametrize("n,m", list(coprime_fields(8)))
def test_closed_form_matches_product(n, m):
    coin = SU2Coin.from_polar(0.8, 0.45, -0.2)
    sym = regrouped_symbol("U", coin, RationalField(n, m))
    num = np.abs(sym.eigenphases(THETA))
    prof = DispersionProfile.from_coin(coin, m)
    w, _ = dispersion_closed_form(prof, closed_form_momentum(THETA))
    # compare as cosines so the principal branch does not matter
    np.testing.assert_allclose(np.cos(num[:, 0]), np.cos(w), atol=1e-10)


def test_su2_symmetry():
    sym = regrouped_symbol("W", SU2Coin.from_polar(0.5, 1.0, 2.0), RationalField(2, 5))
    ph = sym.eigenphases(THETA)
    lam = np.exp(1j * ph)
    np.testing.assert_allclose(lam[:, 0] * lam[:, 1], 1.0, atol=1e-12)


class TestClosedForm:
    def test_m1_hadamard(self):
        w, wm = dispersion_closed_form(DispersionProfile(1, S2), 0.0)
        assert w == pytest.approx(np.pi / 4)
        assert wm == pytest.approx(-np.pi / 4)

    def test_flat_bands_at_zero_modulus(self):
        w, _ = dispersion_closed_form(DispersionProfile(3, 0.0), THETA)
        np.testing.assert_allclose(w, np.pi / 2)
        np.testing.assert_allclose(group_velocity_closed_form(DispersionProfile(3, 0.0), THETA), 0.0)

    def test_even_branch_full_modulus(self):
        w, _ = dispersion_closed_form(DispersionProfile(2, 1.0), 0.0)
        assert w == pytest.approx(np.pi)

    @pytest.mark.parametrize("m", [1, 3, 5, 7])
    def test_odd_maximum_at_y_zero(self, m):
        prof = DispersionProfile(m, 0.83, 0.4)
        theta = np.pi / (2 * m) - 0.4
        assert group_velocity_closed_form(prof, theta) == pytest.approx(m * 0.83**m, abs=1e-14)

    def test_edge_value(self):
        # sin(m(theta + arg a)) = 0 at a non-degenerate band edge
        prof = DispersionProfile(3, 0.6, 0.0)
        assert group_velocity_closed_form(prof, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_degenerate_limit_is_regular(self):
        prof = DispersionProfile(3, 1.0, 0.0)
        v = group_velocity_closed_form(prof, np.array([0.0, 1e-9, 0.3]))
        assert np.all(np.isfinite(v))
        np.testing.assert_allclose(v, 3.0)

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
    def test_finite_difference(self, m):
        prof = DispersionProfile(m, 0.7, 0.25)
        h = 1e-5
        th = np.linspace(0.05, 2 * np.pi - 0.05, 400)
        w = lambda t: dispersion_closed_form(prof, t)[0]
        fd = (w(th + h) - w(th - h)) / (2 * h)
        raw = prof.raw_group_velocity(th)
        keep = np.abs(np.sin(w(th))) > 1e-2
        np.testing.assert_allclose(np.abs(fd[keep]), group_velocity_closed_form(prof, th)[keep], atol=1e-6)
        np.testing.assert_allclose(np.abs(raw[keep]), group_velocity_closed_form(prof, th)[keep], atol=1e-9)


class TestMaximize:
    def test_smooth_peak(self):
        x, f = maximize_periodic(lambda t: np.cos(3 * (t - 0.123456789)))
        assert f == pytest.approx(1.0, abs=1e-14)
        r = (x - 0.123456789) % (2 * np.pi / 3)
        assert min(r, 2 * np.pi / 3 - r) <= 1e-6

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv("EWALK_THREADS", "3")
        assert sweep_threads() == 3
        monkeypatch.setenv("EWALK_THREADS", "0")
        with pytest.raises(ValueError):
            sweep_threads()

    def test_threaded_sweep_is_deterministic(self, monkeypatch):
        coin = SU2Coin.from_polar(0.7, 0.1)
        monkeypatch.setenv("EWALK_THREADS", "1")
        a = max_velocity("W", coin, RationalField(2, 5)).numeric
        monkeypatch.setenv("EWALK_THREADS", "4")
        b = max_velocity("W", coin, RationalField(2, 5)).numeric
        assert a == b


class TestVelocity:
    def test_hadamard_w_third(self):
        rep = max_velocity("W", SU2Coin.hadamard(), RationalField(1, 3))
        assert rep.closed_form == pytest.approx(2**-1.5, abs=1e-15)
        assert abs(rep.numeric - rep.closed_form) <= 1e-9
        assert rep.legacy_bound == pytest.approx((4 * S2) ** 3)

    @pytest.mark.parametrize("kind", ["U", "W"])
    def test_reflecting_coin(self, kind):
        rep = max_velocity(kind, SU2Coin.from_polar(0.0), RationalField(2, 5))
        assert rep.closed_form == 0.0
        assert rep.numeric == pytest.approx(0.0, abs=1e-12)

    def test_free_shift(self):
        rep = max_velocity("U", SU2Coin.identity(), RationalField(0, 1))
        assert rep.numeric == pytest.approx(1.0, abs=1e-12)

    def test_exponents(self):
        assert velocity_exponent("U", RationalField(1, 4)) == 2
        assert velocity_exponent("U", RationalField(1, 5)) == 5
        assert velocity_exponent("W", RationalField(1, 4)) == 4

    def test_monotone_suppression(self):
        for a in (0.1, 0.5, 0.9):
            vals = [a**m for m in range(1, 13)]
            assert all(x > y for x, y in zip(vals, vals[1:]))
            assert all(a**m <= (4 * a) ** m for m in range(1, 13))


class TestRevival:
    def test_w_half_field(self):
        rep = revival_defect("W", SU2Coin.hadamard(), RationalField(1, 2))
        assert rep.numeric == pytest.approx(1.0, abs=1e-8)
        assert rep.phase == 1

    def test_u_unit_field(self):
        coin = SU2Coin.from_polar(0.4, 0.9)
        rep = revival_defect("U", coin, RationalField(0, 1))
        assert rep.power == 2
        assert rep.numeric == pytest.approx(0.8, abs=1e-8)

    def test_exact_revival_for_reflecting_coin(self):
        rep = revival_defect("W", SU2Coin.from_polar(0.0), RationalField(3, 7))
        assert rep.numeric == pytest.approx(0.0, abs=1e-12)

    def test_w_sign_is_independent_of_n(self):
        for n, m in [(1, 3), (2, 3), (1, 4), (3, 4), (2, 5)]:
            assert revival_relation("W", RationalField(n, m))[1] == -((-1) ** m)

    def test_sign_choice_matters(self):
        coin = SU2Coin.from_polar(0.6, 0.2)
        good = revival_defect("W", coin, RationalField(2, 5))
        flipped = revival_defect("W", coin, RationalField(2, 5), lam=-revival_relation("W", RationalField(2, 5))[1])
        assert abs(good.numeric - good.closed_form) <= 1e-8
        assert flipped.numeric > 1.5

    def test_symbol_revival_matches_ring_power(self):
        coin = SU2Coin.from_polar(0.55, 0.3, 0.8)
        f = RationalField(2, 3)
        power, lam, e = revival_relation("W", f)
        mat = build_matrix(WalkSpec.split_step(coin, field=f), Ring(6 * 4)).matrix
        op = np.linalg.matrix_power(mat, power) + lam * np.eye(len(mat))
        assert np.linalg.norm(op, 2) <= 2 * coin.abs_a**e + 1e-10


class TestBands:
    def test_free_shift_full_circle(self):
        assert spectrum_bands("U", SU2Coin.identity(), RationalField(0, 1)).is_full_circle

    def test_flat_bands_are_points(self):
        bands = spectrum_bands("W", SU2Coin.from_polar(0.0), RationalField(1, 3))
        assert bands.total_length == pytest.approx(0.0, abs=1e-12)
        assert len(bands.arcs) <= 2 * 3 * 2

    def test_merge_and_wrap(self):
        b = BandSet.from_raw([(6.0, 6.5), (0.1, 0.3), (0.25, 0.4)])
        assert b.arcs[0][0] == 0.0
        assert len(b.arcs) == 2
        assert b.contains(np.exp(0.35j))
        assert not b.contains(np.exp(1.0j))

    def test_rejects_coarse_sampling(self):
        with pytest.raises(ValueError):
            spectrum_bands("W", SU2Coin.hadamard(), RationalField(1, 2), theta_samples=10)

    @pytest.mark.parametrize("kind", ["U", "W"])
    def test_ring_eigenvalues_inside(self, kind):
        coin = SU2Coin.hadamard()
        f = RationalField(1, 2)
        bands = spectrum_bands(kind, coin, f)
        spec = WalkSpec.shift_coin(coin, f) if kind == "U" else WalkSpec.split_step(coin, field=f)
        for j in range(32):
            ev = build_matrix(spec, Ring(8, 2 * np.pi * j / 32)).eigvals()
            assert bands.distance(np.angle(ev)).max() <= 1e-10

    def test_twisted_ring_samples_symbol(self):
        # Ring of N cells with twist phi has the eigenvalues of the one-step symbol
        # at the momenta (phi + 2 pi j) / N.
        coin = SU2Coin.from_polar(0.6, 0.4, 1.0)
        spec = WalkSpec.split_step(coin)
        sym = symbol_of_spec(spec)
        phi = 0.37
        ev = build_matrix(spec, Ring(5, phi)).eigvals()
        thetas = (phi + 2 * np.pi * np.arange(5)) / 5
        expected = sym.eigenvalues(thetas).reshape(-1)
        gap = np.abs(ev[:, None] - expected[None, :])
        assert gap.min(axis=1).max() <= 1e-12
        assert gap.min(axis=0).max() <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-3.0, 3.0), st.sampled_from(list(coprime_fields(5))))
def test_velocity_property(abs_a, arg_a, nm):
    coin = SU2Coin.from_polar(abs_a, arg_a)
    rep = max_velocity("W", coin, RationalField(*nm), n_grid=1024)
    assert abs(rep.numeric - rep.closed_form) <= 1e-9
