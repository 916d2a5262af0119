import pytest

from src.errors import CheckFailedError, NotOneGenericError, ParseError, PreconditionError
from src.exact_core import Field
from src.pencil import (
    LinearPencil,
    PairingTensor,
    block_diagonal,
    change_of_basis,
    embedding_pairing,
    exists_one_generic,
    factored_pencil,
    hirzebruch_invariant,
    identity_pairing,
    is_one_generic_pencil,
    is_one_generic_random,
    minor_form,
    pad_target,
    random_full_rank,
    random_one_generic_pencil,
    splitting_type,
    sylvester_pairing,
    trivial_summand_count,
)

RATIONALS = Field(None)


# === 存在性與張量 ===
def test_exists_one_generic():
    assert exists_one_generic(2, 2, 3)
    assert not exists_one_generic(3, 3, 4)
    with pytest.raises(PreconditionError):
        exists_one_generic(0, 1, 1)


def test_tensor_shape_validation():
    with pytest.raises(PreconditionError):
        PairingTensor.make(RATIONALS, [[[1, 0], [0, 1]], [[1, 0]]])


def test_image_codimension():
    tensor = sylvester_pairing(1, 1)
    assert tensor.image_rank() == 3
    assert tensor.image_codimension() == 0
    assert embedding_pairing(2, 5).image_codimension() == 3


def test_to_pencil_requires_d_two():
    with pytest.raises(PreconditionError):
        sylvester_pairing(2, 1).to_pencil()


def test_pencil_json_roundtrip_shape():
    pencil = identity_pairing(2, 2).to_pencil()
    payload = pencil.to_json()
    assert payload['dprime'] == 4 and payload['k'] == 2
    assert LinearPencil.from_json(payload) == pencil


def test_pencil_json_errors():
    with pytest.raises(ParseError):
        LinearPencil.from_json({'k': 1, 'A': [[1]], 'B': [[0]]})
    with pytest.raises(ParseError):
        LinearPencil.from_json({'dprime': 3, 'k': 1, 'A': [[1], [0]], 'B': [[0], [1]]})


# === 1-generic ===
def test_minor_form_of_sylvester():
    pencil = sylvester_pairing(1, 1).to_pencil()
    forms = [minor_form(pencil, rows) for rows in ((0, 1), (0, 2), (1, 2))]
    assert all(f.degree == 2 for f in forms)
    assert not any(f.is_zero() for f in forms)


def test_exact_one_generic_examples():
    assert is_one_generic_pencil(identity_pairing(2, 2).to_pencil())
    assert is_one_generic_pencil(sylvester_pairing(1, 3).to_pencil())
    # A = B：在 (1, −1) 處整個 pencil 為 0
    square = LinearPencil.make(RATIONALS, [[1, 0], [0, 1], [0, 0]], [[1, 0], [0, 1], [0, 0]], 2)
    assert not is_one_generic_pencil(square)


def test_square_pencil_is_never_one_generic():
    pencil = LinearPencil.make(RATIONALS, [[1, 0], [0, 1]], [[0, 1], [1, 0]], 2)
    assert not is_one_generic_pencil(pencil)


def test_random_one_generic_test_agrees():
    assert is_one_generic_random(sylvester_pairing(2, 2))
    assert is_one_generic_random(identity_pairing(3, 2))
    degenerate = PairingTensor.from_function(RATIONALS, 2, 2, 3, lambda i, w, j: 1 if (i, w, j) == (0, 0, 0) else 0)
    assert not is_one_generic_random(degenerate)


# === 分裂型 ===
def test_worked_examples():
    assert splitting_type(identity_pairing(2, 2).to_pencil()).to_json() == [1, 1]
    assert splitting_type(factored_pencil()).to_json() == [2, 0]
    assert splitting_type(embedding_pairing(2, 5).to_pencil()).to_json() == [1, 0, 0, 0]


@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_sylvester_gives_single_summand(k):
    assert splitting_type(sylvester_pairing(1, k - 1).to_pencil()).to_json() == [k]


def test_splitting_rejects_non_one_generic():
    pencil = LinearPencil.make(RATIONALS, [[1], [0]], [[1], [0]], 1)
    with pytest.raises(NotOneGenericError):
        splitting_type(pencil)


def test_trivial_summands_and_hirzebruch():
    pencil = factored_pencil()
    assert trivial_summand_count(pencil) == 1
    assert hirzebruch_invariant(pencil) == 2
    assert hirzebruch_invariant(identity_pairing(2, 2).to_pencil()) == 0
    with pytest.raises(PreconditionError):
        hirzebruch_invariant(embedding_pairing(2, 5).to_pencil())


def test_precomputed_splitting_is_reused():
    pencil = factored_pencil()
    split = splitting_type(pencil)
    assert trivial_summand_count(pencil, split) == 1
    assert hirzebruch_invariant(pencil, split) == 2
    # 交叉驗證仍以像的秩為準
    wrong = splitting_type(identity_pairing(2, 2).to_pencil())
    with pytest.raises(CheckFailedError):
        trivial_summand_count(pencil, wrong)


def test_block_diagonal_concatenates():
    combined = block_diagonal(identity_pairing(2, 2).to_pencil(), sylvester_pairing(1, 2).to_pencil())
    assert splitting_type(combined).to_json() == [3, 1, 1]


def test_change_of_basis_preserves_type(fp, rng):
    pencil = random_one_generic_pencil(fp, 6, 3, rng)
    before = splitting_type(pencil)
    row_op = random_full_rank(fp, 6, 6, rng)
    col_op = random_full_rank(fp, 3, 3, rng)
    assert splitting_type(change_of_basis(pencil, row_op, col_op)) == before


def test_random_pencil_laws(fp, rng):
    for dprime, k, image_dim in ((5, 2, 4), (6, 3, 4), (7, 4, 6), (4, 1, 2)):
        pencil = random_one_generic_pencil(fp, dprime, k, rng, image_dim=image_dim)
        split = splitting_type(pencil)
        assert split.rank == dprime - k
        assert split.total == k
        assert min(split.degrees) >= 0
        assert split.trivial_count == dprime - image_dim
        assert trivial_summand_count(pencil) == dprime - pencil.column_flattening().rank()


def test_random_pencil_rejects_impossible_shape(fp, rng):
    with pytest.raises(PreconditionError):
        random_one_generic_pencil(fp, 4, 3, rng, image_dim=3)


def test_evaluate_vanishes_at_common_root():
    square = LinearPencil.make(RATIONALS, [[1, 0], [0, 1], [0, 0]], [[1, 0], [0, 1], [0, 0]], 2)
    assert square.evaluate(1, -1).is_zero()
    assert not square.evaluate(1, 0).is_zero()


def test_padding_adds_trivial_summands(fp, rng):
    for dprime, k, extra in ((5, 2, 1), (6, 3, 2), (4, 1, 3)):
        pencil = random_one_generic_pencil(fp, dprime, k, rng)
        split = splitting_type(pencil)
        padded = pad_target(pencil, extra)
        assert splitting_type(padded).to_json() == split.to_json() + [0] * extra
        assert trivial_summand_count(padded) == trivial_summand_count(pencil) + extra
