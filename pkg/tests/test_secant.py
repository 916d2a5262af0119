import pytest

from src.elliptic import INFINITY, Divisor, random_point, sigma
from src.errors import NotOnSliceError, PreconditionError
from src.secant import (
    SecantConfig,
    combine,
    embed_point,
    membership_rank,
    phi_at,
    probe,
    sample_secant_off_curve,
    sample_slice_point,
    sample_subsecant_point,
    singularity_verdict,
    slice_point_through,
    slice_tuple,
)


@pytest.fixture
def cfg(curve):
    return SecantConfig.standard(curve, n=8, d=3)


# === 設定 ===
def test_config_shape(cfg):
    assert (cfg.dprime, cfg.codim) == (5, 3)
    assert cfg.z == INFINITY
    assert (cfg.tensor.d, cfg.tensor.k, cfg.tensor.dprime) == (3, 5, 8)


@pytest.mark.parametrize('n, d', [(8, 1), (6, 3), (5, 3)])
def test_config_rejects_bad_shape(curve, n, d):
    with pytest.raises(PreconditionError):
        SecantConfig.standard(curve, n=n, d=d)


def test_config_rejects_wrong_divisor_degree(curve):
    with pytest.raises(PreconditionError):
        SecantConfig.standard(curve, n=8, d=3, divisor_n=Divisor.point(INFINITY, 2))


def test_nonstandard_z(curve):
    cfg = SecantConfig.standard(curve, n=8, d=3, divisor_n=Divisor.parse(curve, '2,3:1;O:2'))
    assert cfg.z == curve.point(2, 3)


# === 嵌入與 Φ ===
def test_embed_infinity(cfg):
    assert list(embed_point(cfg, INFINITY)) == [0, 0, 0, 0, 0, 0, 0, 1]
    assert membership_rank(cfg, embed_point(cfg, INFINITY)) == 1


def test_curve_points_have_rank_one(cfg, rng):
    for _ in range(5):
        assert membership_rank(cfg, embed_point(cfg, random_point(cfg.curve, rng))) == 1


def test_phi_rejects_zero_vector(cfg):
    with pytest.raises(PreconditionError):
        phi_at(cfg, [0] * 8)


def test_combine_is_linear(cfg, rng):
    points = [random_point(cfg.curve, rng) for _ in range(2)]
    twice = combine(cfg, points, [2, 2])
    once = combine(cfg, points, [1, 1])
    assert list(twice) == [2 * v for v in once]


# === 取樣 ===
def test_slice_tuple_sums_to_z(cfg, rng):
    for _ in range(5):
        points = slice_tuple(cfg, rng)
        assert len(set(points)) == cfg.d
        assert sigma(cfg.curve, Divisor.from_points(points)) == cfg.z


def test_slice_points_have_low_rank(cfg, rng):
    for _ in range(5):
        assert membership_rank(cfg, sample_slice_point(cfg, rng)) <= cfg.d - 1


def test_subsecant_rank(cfg, rng):
    assert membership_rank(cfg, sample_subsecant_point(cfg, 1, rng)) <= 1
    with pytest.raises(PreconditionError):
        sample_subsecant_point(cfg, 0, rng)


def test_slice_point_through_keeps_base(cfg, rng):
    base = random_point(cfg.curve, rng)
    witness = slice_point_through(cfg, base, rng)
    assert witness.support[0] == base
    assert witness.point == embed_point(cfg, base)


# === 判定 ===
def test_generic_slice_points_are_smooth(cfg, rng):
    for _ in range(3):
        verdict = singularity_verdict(cfg, sample_slice_point(cfg, rng))
        assert verdict.verdict == 'smooth'
        assert verdict.jacobian_rank == 3


def test_secant_lines_inside_slice_are_smooth(cfg, rng):
    for _ in range(3):
        verdict = singularity_verdict(cfg, sample_secant_off_curve(cfg, rng))
        assert verdict.membership_rank == 2
        assert verdict.verdict == 'smooth'


def test_curve_points_are_singular(cfg, rng):
    for _ in range(3):
        point = slice_point_through(cfg, random_point(cfg.curve, rng), rng).point
        verdict = singularity_verdict(cfg, point)
        assert verdict.membership_rank == 1
        assert verdict.jacobian_rank < verdict.codim
        assert verdict.to_dict()['verdict'] == 'singular'


def test_points_off_slice_are_rejected(cfg, rng):
    point = cfg.curve.field.random_vector(rng, cfg.n)
    with pytest.raises(NotOnSliceError):
        singularity_verdict(cfg, point)


def test_probe_dispatch(cfg, rng):
    _, verdict = probe(cfg, 'subsecant', rng)
    assert verdict.verdict == 'singular'
    with pytest.raises(PreconditionError):
        probe(cfg, 'tangent', rng)
