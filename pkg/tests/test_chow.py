from math import comb

import pytest

from src.chow import (
    BundleShape,
    ChowRing,
    HirzClass,
    anticanonical_Y,
    canonical_class,
    canonical_dual_degree_one_agreement,
    dual_chern,
    h_sequence,
    hirz_adjunction_genus,
    hirz_anticanonical,
    hirz_canonical,
    hirz_intersect,
    hirz_is_ample,
    identity_sequence,
    intersection_class,
    intersection_number,
    mult_seq_apply,
    mult_seq_from_char_series,
    total_chern_quotient,
)
from src.errors import CheckFailedError, PreconditionError
from src.exact_core import Field, TruncSeries, series_inverse

RATIONALS = Field(None)


# === BundleShape ===
def test_shape_defaults():
    shape = BundleShape(d=3, k=2)
    assert (shape.dprime, shape.r) == (5, 3)
    assert BundleShape(d=2, dprime=5).k == 3


@pytest.mark.parametrize('kwargs', [
    {'d': 2, 'k': 0},
    {'d': 1, 'k': 2},
    {'d': 3, 'k': 3, 'dprime': 4},
])
def test_shape_preconditions(kwargs):
    with pytest.raises(PreconditionError):
        BundleShape(**kwargs)


# === Chern 類與交截數 ===
def test_total_chern_quotient():
    assert total_chern_quotient(BundleShape(d=4, k=3)) == [3, 6, 10]
    assert total_chern_quotient(BundleShape(d=2, k=2)) == [2]


def test_dual_chern_signs():
    assert dual_chern([3, 6, 10]) == [-3, 6, -10]
    assert dual_chern([]) == []


def test_intersection_numbers_small_case():
    shape = BundleShape(d=2, k=2)
    gamma = total_chern_quotient(shape)
    assert [intersection_number(shape, gamma, s) for s in range(2)] == [1, -2]
    assert [intersection_number(shape, dual_chern(gamma), s) for s in range(2)] == [1, 2]


def test_intersection_number_single_s():
    shape = BundleShape(d=4, k=3)
    assert intersection_number(shape, total_chern_quotient(shape), 3) == -1


def test_intersection_class_lives_in_top_degree():
    shape = BundleShape(d=3, k=2)
    gamma = total_chern_quotient(shape)
    for s in range(3):
        payload = intersection_class(shape, gamma, s).to_json()
        assert payload['chern'] == gamma
        top = payload['coeffs'][shape.d - 1][shape.r - 1]
        assert top == intersection_number(shape, gamma, s)
        assert sum(abs(c) for row in payload['coeffs'] for c in row) == abs(top)


@pytest.mark.parametrize('d', [2, 3, 5])
@pytest.mark.parametrize('k', [1, 4, 7])
def test_intersection_sweep_sample(d, k):
    shape = BundleShape(d=d, k=k)
    gamma = total_chern_quotient(shape)
    for s in range(d):
        assert intersection_number(shape, gamma, s) == (-1) ** s * comb(k, s)
        assert intersection_number(shape, dual_chern(gamma), s) == comb(k, s)


def test_intersection_number_rejects_bad_s():
    shape = BundleShape(d=3, k=2)
    with pytest.raises(PreconditionError):
        intersection_number(shape, total_chern_quotient(shape), 3)


def test_projective_space_ring():
    ring = ChowRing.projective_space(3)
    assert (ring.h() ** 2).degree() == 1
    assert (ring.h() ** 3) == ring.zero()


# === 乘法序列 ===
def test_identity_sequence_polynomials():
    seq = identity_sequence(3)
    c1, c2, c3 = seq.variables.gens
    assert seq.polynomial(1) == c1
    assert seq.polynomial(2) == c2
    assert seq.polynomial(3) == c3


def test_h_sequence_low_degrees():
    seq = h_sequence(3)
    c1, c2, _ = seq.variables.gens
    assert seq.polynomial(1) == -c1
    assert seq.polynomial(2) == c1 ** 2 - c2


def test_h_sequence_third_polynomial():
    seq = h_sequence(3)
    c1, c2, c3 = seq.variables.gens
    assert seq.polynomial(3) == -c3 + 2 * c1 * c2 - c1 ** 3


@pytest.mark.parametrize('k', [1, 2, 5])
def test_h_sequence_inverts_binomial_powers(k):
    one_minus_t = TruncSeries.make(RATIONALS, [1, -1], 6)
    assert mult_seq_apply(h_sequence(6), one_minus_t ** -k) == one_minus_t ** k


def test_h_sequence_inverts_series(fp, rng):
    seq = h_sequence(6)
    for _ in range(10):
        f = TruncSeries.make(fp, [1] + [fp.random(rng) for _ in range(6)], 6)
        assert mult_seq_apply(seq, f) == series_inverse(f)


def test_multiplicativity(fp, rng):
    seq = mult_seq_from_char_series(TruncSeries.make(RATIONALS, [1, 1, 1], 5), 5)
    for _ in range(10):
        f = TruncSeries.make(fp, [1] + [fp.random(rng) for _ in range(5)], 5)
        g = TruncSeries.make(fp, [1] + [fp.random(rng) for _ in range(5)], 5)
        assert mult_seq_apply(seq, f * g) == mult_seq_apply(seq, f) * mult_seq_apply(seq, g)


def test_h_sequence_matches_intersections():
    seq = h_sequence(4)
    shape = BundleShape(d=4, k=3)
    gamma = total_chern_quotient(shape)
    values = [RATIONALS(g) for g in gamma] + [RATIONALS.zero]
    for s in range(1, 4):
        assert seq.evaluate(s, values, RATIONALS) == intersection_number(shape, gamma, s)


def test_mult_seq_preconditions(fp):
    with pytest.raises(PreconditionError):
        mult_seq_from_char_series(TruncSeries.make(RATIONALS, [2, 1], 3), 3)
    with pytest.raises(PreconditionError):
        mult_seq_from_char_series(TruncSeries.make(fp, [1, 1], 3), 3)
    with pytest.raises(PreconditionError):
        mult_seq_from_char_series(TruncSeries.make(RATIONALS, [1, 1], 3), 0)


# === 典範類 ===
def test_anticanonical_record():
    shape = BundleShape(d=3, k=2)
    assert canonical_class(shape) == (-3, -5)
    record = anticanonical_Y(shape)
    assert (record.zeta_coeff, record.h_coeff) == (3, 5)
    assert record.ok
    assert record.to_dict()['check_value'] == 3


def test_canonical_dual_agreement_is_degree_one():
    report = canonical_dual_degree_one_agreement(3)
    assert report['sign_rule'][:3] == [1, -3, 6]
    assert report['closed_form'][:3] == [1, -3, 3]
    assert report['agree_through_degree'] == 1


# === Hirzebruch 曲面 ===
@pytest.mark.parametrize('e', [0, 1, 2])
def test_hirzebruch_lattice(e):
    c0, fiber = HirzClass(e, 1, 0), HirzClass(e, 0, 1)
    assert hirz_intersect(e, c0, c0) == -e
    assert hirz_intersect(e, c0, fiber) == 1
    assert hirz_intersect(e, fiber, fiber) == 0
    assert hirz_canonical(e) == HirzClass(e, -2, -(2 + e))
    assert hirz_adjunction_genus(e, hirz_anticanonical(e)) == 1


def test_anticanonical_ampleness():
    assert hirz_is_ample(hirz_anticanonical(0))
    assert hirz_is_ample(hirz_anticanonical(1))
    assert not hirz_is_ample(hirz_anticanonical(2))


def test_hirzebruch_mixed_surfaces():
    with pytest.raises(PreconditionError):
        HirzClass(0, 1, 0) + HirzClass(1, 0, 1)


def test_adjunction_genus_worked_examples():
    # Σ_0 上的 C_0 是有理曲線
    assert hirz_adjunction_genus(0, HirzClass(0, 1, 0)) == 0
    # Σ_2 上 (2C_0 + 4f)·C_0 = 0
    assert hirz_intersect(2, HirzClass(2, 2, 4), HirzClass(2, 1, 0)) == 0


@pytest.mark.parametrize('e', [0, 1, 2, 3])
def test_adjunction_pairing_is_even(e):
    for a in range(-2, 4):
        for b in range(-2, 5):
            y = HirzClass(e, a, b)
            assert hirz_intersect(e, y, y + hirz_canonical(e)) % 2 == 0


def test_adjunction_genus_rejects_odd_pairing(monkeypatch):
    monkeypatch.setattr('src.chow.hirz_intersect', lambda e, first, second: 3)
    with pytest.raises(CheckFailedError):
        hirz_adjunction_genus(1, HirzClass(1, 1, 0))
