import numpy as np
import pytest

from tdflexsim.channel import ChannelSet
from tdflexsim.deployment import BaseStation, Tier, User
from tdflexsim.training import (
    DownlinkPilot, despread, estimate, estimate_pcrd, estimate_pcru, make_pilot_book, training_block,
)


def _setup(seed=0, M=16, S=2):
    rng = np.random.default_rng(seed)
    gains = {}

    def gain(kind, a, b):
        return gains.setdefault((kind, a, b), float(rng.uniform(1e-9, 1.0)))

    ch = ChannelSet({0: M, 1: S, 2: S}, gain, seed)
    macro = BaseStation(0, Tier.MACRO, np.zeros(2), M, 20.0)
    sbs = [BaseStation(b, Tier.SMALL, np.zeros(2), S, float(rng.uniform(0.1, 1.0))) for b in (1, 2)]
    return ch, macro, sbs, rng


@pytest.mark.parametrize("k", [1, 4, 7])
def test_pilot_book_orthogonal_unit_modulus(k):
    book = make_pilot_book(k)
    s = book.sequences
    assert np.allclose(np.abs(s), 1.0)
    assert np.allclose(s @ s.conj().T, k * np.eye(k))


def test_pilot_book_rejects_zero():
    with pytest.raises(ValueError):
        make_pilot_book(0)


def test_clean_estimate_is_scaled_channel():
    ch, macro, _, _ = _setup()
    u = User(5, np.zeros(2), 0, 2, 0.2)
    est = estimate(macro, u, ch)
    expected = np.sqrt(ch.alpha(1, 0, 5) * 0.2) * ch.bu(0, 5)
    np.testing.assert_allclose(est.vector, expected, rtol=1e-14)
    assert not est.contaminated


def test_pcru_direct_rhs():
    ch, macro, _, _ = _setup(1)
    target = User(0, np.zeros(2), 0, 3, 0.2)
    others = [User(i, np.zeros(2), i % 2 + 1, 3, 0.1 * i) for i in (1, 2, 3)]
    est = estimate_pcru(macro, target, others, ch)
    rhs = sum(np.sqrt(ch.alpha(1, 0, u.id) * u.ul_power) * ch.bu(0, u.id) for u in [target, *others])
    np.testing.assert_allclose(est.vector, rhs, rtol=1e-12)
    assert [c.link for c in est.provenance] == ["B2U"] * 3


def test_pcrd_direct_rhs_uses_conjugated_beam():
    ch, macro, sbs, rng = _setup(2)
    target = User(0, np.zeros(2), 0, 1, 0.2)
    beams = [(lambda w: w / np.linalg.norm(w))(rng.standard_normal(2) + 1j * rng.standard_normal(2)) for _ in sbs]
    pilots = [DownlinkPilot(b, 1, w) for b, w in zip(sbs, beams)]
    est = estimate_pcrd(macro, target, pilots, ch)
    rhs = np.sqrt(ch.alpha(1, 0, 0) * 0.2) * ch.bu(0, 0)
    for b, w in zip(sbs, beams):
        rhs = rhs + np.sqrt(ch.alpha(2, 0, b.id) * b.tx_power) * (ch.bb(0, b.id) @ w.conj())
    np.testing.assert_allclose(est.vector, rhs, rtol=1e-12)
    assert {c.link for c in est.provenance} == {"B2B"}


def test_non_matching_pilots_contribute_exactly_zero():
    ch, macro, sbs, _ = _setup(3)
    target = User(0, np.zeros(2), 0, 0, 0.2)
    clean = estimate(macro, target, ch).vector
    others = [User(1, np.zeros(2), 1, 1, 0.3)]
    pilots = [DownlinkPilot(sbs[0], 2, np.array([1.0, 0.0], complex))]
    est = estimate(macro, target, ch, users=others, pilots=pilots)
    assert np.array_equal(est.vector, clean)
    assert est.provenance == ()


def test_analytic_path_matches_explicit_despreading():
    ch, macro, sbs, _ = _setup(4)
    K = 4
    book = make_pilot_book(K)
    target = User(0, np.zeros(2), 0, 2, 0.2)
    users = [User(1, np.zeros(2), 1, 2, 0.5), User(2, np.zeros(2), 2, 1, 0.5)]
    w = np.array([0.6, 0.8j])
    pilots = [DownlinkPilot(sbs[1], 2, w), DownlinkPilot(sbs[0], 3, w)]
    terms = [(np.sqrt(ch.alpha(1, 0, u.id) * u.ul_power) * ch.bu(0, u.id), u.pilot_index) for u in [target, *users]]
    terms += [(np.sqrt(ch.alpha(2, 0, p.bs.id) * p.bs.tx_power) * (ch.bb(0, p.bs.id) @ w.conj()), p.pilot_index)
              for p in pilots]
    y = training_block(terms, book)
    np.testing.assert_allclose(despread(y, book, 2), estimate(macro, target, ch, users, pilots).vector, atol=1e-12)


def test_estimate_is_linear_in_amplitudes():
    ch, macro, _, _ = _setup(5)
    target = User(0, np.zeros(2), 0, 0, 1.0)
    other = User(1, np.zeros(2), 1, 0, 1.0)
    quad = User(1, np.zeros(2), 1, 0, 4.0)
    base = estimate(macro, target, ch).vector
    d1 = estimate(macro, target, ch, [other]).vector - base
    d2 = estimate(macro, target, ch, [quad]).vector - base
    np.testing.assert_allclose(d2, 2 * d1, rtol=1e-12)


def test_training_noise_needs_rng_and_has_right_power():
    ch, macro, _, _ = _setup(6, M=4000)
    target = User(0, np.zeros(2), 0, 0, 1.0)
    with pytest.raises(ValueError):
        estimate(macro, target, ch, noise_power=1.0)
    noisy = estimate(macro, target, ch, noise_power=2.0, rng=np.random.default_rng(0)).vector
    diff = noisy - estimate(macro, target, ch).vector
    assert np.mean(np.abs(diff) ** 2) == pytest.approx(2.0, rel=0.08)
