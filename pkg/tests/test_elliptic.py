import pytest

from src.elliptic import (
    INFINITY,
    Curve,
    Divisor,
    FunctionFieldElement,
    add_points,
    divisor_bound_holds,
    divisor_with_sum,
    is_surjective,
    leading_term,
    leaf_classify,
    lin_equiv,
    miller_function,
    multiplication_tensor,
    neg_point,
    ord_at,
    pairing_tensor,
    predict_hirzebruch,
    random_divisor,
    random_point,
    rr_basis,
    scalar_mul,
    sigma,
    value_at,
    verify_miller,
    whensurj_predict,
)
from src.errors import NotPrincipalError, ParseError, PointNotOnCurveError, PreconditionError
from src.exact_core import ExactMatrix, UniPoly


def _poly(curve, coeffs):
    return FunctionFieldElement.from_poly(curve, UniPoly.make(curve.field, coeffs))


def _same(first, second) -> bool:
    return (first - second).is_zero()


# === 曲線、點與群運算 ===
def test_curve_parse(curve):
    parsed = Curve.parse('0,1@Fp:10007')
    assert parsed.descriptor == '0,1@Fp:10007'
    assert parsed.contains(curve.point(2, 3))
    with pytest.raises(ParseError):
        Curve.parse('0,1')
    with pytest.raises(PreconditionError):
        Curve.make(curve.field, 0, 0)


def test_point_must_lie_on_curve(curve):
    with pytest.raises(PointNotOnCurveError):
        curve.point(1, 1)


def test_group_law(curve):
    p, q = curve.point(2, 3), curve.point(0, 1)
    assert add_points(curve, p, q) == curve.point(-1, 0)
    assert scalar_mul(curve, 2, p) == q
    assert scalar_mul(curve, 6, p) == INFINITY
    assert scalar_mul(curve, -1, p) == curve.point(2, -3)
    assert neg_point(curve, curve.point(-1, 0)) == curve.point(-1, 0)
    assert add_points(curve, p, INFINITY) == p


# === 除子 ===
def test_divisor_parse_and_text(curve):
    divisor = Divisor.parse(curve, '0,1:2;O:-1')
    assert divisor.degree == 1
    assert divisor.multiplicity(curve.point(0, 1)) == 2
    assert divisor.to_text(curve.field) == 'O:-1;0,1:2'
    assert not divisor.is_effective()
    with pytest.raises(ParseError):
        Divisor.parse(curve, '0,1:x')
    with pytest.raises(PointNotOnCurveError):
        Divisor.parse(curve, '1,1:1')


def test_divisor_arithmetic(curve):
    p = Divisor.point(curve.point(0, 1))
    q = Divisor.point(curve.point(0, -1))
    assert (p + q - p) == q
    assert (2 * p).degree == 2
    assert (p - p) == Divisor()


def test_sigma_and_linear_equivalence(curve):
    two_o = Divisor.point(INFINITY, 2)
    assert sigma(curve, Divisor.point(curve.point(2, 3), 2)) == curve.point(0, 1)
    assert lin_equiv(curve, Divisor.parse(curve, '0,1:1;0,-1:1'), two_o)
    assert not lin_equiv(curve, Divisor.parse(curve, '2,3:1;O:1'), two_o)
    assert not lin_equiv(curve, two_o, Divisor.point(INFINITY, 3))


# === 函數體與階數 ===
def test_function_field_arithmetic(curve):
    x = FunctionFieldElement.monomial(curve, 1, 0)
    y = FunctionFieldElement.monomial(curve, 0, 1)
    assert _same(y * y, FunctionFieldElement.from_poly(curve, curve.rhs_poly))
    f = x + y
    assert _same(f * f.inverse(), FunctionFieldElement.constant(curve, 1))
    assert _same((x * y) / y, x)


def test_orders_and_leading_terms(curve):
    x = FunctionFieldElement.monomial(curve, 1, 0)
    y = FunctionFieldElement.monomial(curve, 0, 1)
    two_torsion = curve.point(-1, 0)
    assert ord_at(x, curve.point(0, 1)) == 1
    assert ord_at(x, INFINITY) == -2
    assert ord_at(y, INFINITY) == -3
    assert ord_at(y, two_torsion) == 1
    order, lead = leading_term(_poly(curve, [1, 1]), two_torsion)
    assert order == 2
    # x + 1 = y² / (x² − x + 1)，f′(−1) = 3
    assert lead * 3 == 1


def test_value_at(curve):
    x_plus_one = _poly(curve, [1, 1])
    assert value_at(x_plus_one, curve.point(-1, 0)) == 0
    assert value_at(x_plus_one, curve.point(2, 3)) == 3
    with pytest.raises(PreconditionError):
        value_at(x_plus_one, INFINITY)


# === Miller 函數 ===
def test_miller_vertical_line(curve):
    divisor = Divisor.parse(curve, '0,1:1;0,-1:1;O:-2')
    miller = miller_function(curve, divisor)
    assert _same(miller.expand(), FunctionFieldElement.monomial(curve, 1, 0))
    assert verify_miller(curve, divisor, miller)


def test_miller_two_torsion_double_zero(curve):
    divisor = Divisor.parse(curve, '-1,0:2;O:-2')
    g = miller_function(curve, divisor).expand()
    assert _same(g, _poly(curve, [1, 1]))
    assert ord_at(g, curve.point(-1, 0)) == 2


def test_miller_with_negative_multiplicity(curve):
    # (0,1) + (2,3) = (−1,0)
    divisor = Divisor.parse(curve, '0,1:1;2,3:1;-1,0:-1;O:-1')
    miller = miller_function(curve, divisor)
    assert verify_miller(curve, divisor, miller)


def test_miller_rejects_non_principal(curve):
    with pytest.raises(NotPrincipalError):
        miller_function(curve, Divisor.parse(curve, '0,1:1;O:-1'))
    with pytest.raises(NotPrincipalError):
        miller_function(curve, Divisor.parse(curve, '0,1:1'))


def test_miller_on_random_principal_divisors(curve, rng):
    for degree in (2, 3, 5):
        divisor = divisor_with_sum(curve, degree, INFINITY, rng) - Divisor.point(INFINITY, degree)
        assert verify_miller(curve, divisor, miller_function(curve, divisor))


# === Riemann–Roch ===
def test_rr_basis_of_multiples_of_infinity(curve):
    x = FunctionFieldElement.monomial(curve, 1, 0)
    y = FunctionFieldElement.monomial(curve, 0, 1)
    one = FunctionFieldElement.constant(curve, 1)
    two = rr_basis(curve, Divisor.point(INFINITY, 2)).basis
    assert len(two) == 2 and _same(two[0], one) and _same(two[1], x)
    three = rr_basis(curve, Divisor.point(INFINITY, 3)).basis
    assert [_same(b, e) for b, e in zip(three, (one, x, y))] == [True, True, True]


def test_rr_basis_with_affine_sum(curve):
    p = curve.point(2, 3)
    divisor = Divisor.parse(curve, '2,3:1;O:1')
    basis = rr_basis(curve, divisor).basis
    assert len(basis) == 2
    u = basis[1]
    assert ord_at(u, p) == -1
    assert ord_at(u, INFINITY) == -1
    assert divisor_bound_holds(u, divisor, [p, INFINITY, curve.point(0, 1)])


def test_rr_basis_single_point(curve):
    basis = rr_basis(curve, Divisor.point(curve.point(0, 1))).basis
    assert len(basis) == 1
    assert _same(basis[0], FunctionFieldElement.constant(curve, 1))


def test_rr_basis_rejects_nonpositive_degree(curve):
    with pytest.raises(PreconditionError):
        rr_basis(curve, Divisor())


def test_rr_basis_random_divisors(curve, rng):
    for degree, negatives in ((1, 0), (3, 0), (4, 1), (6, 2)):
        divisor = random_divisor(curve, degree, rng, negative_points=negatives)
        basis = rr_basis(curve, divisor).basis
        assert len(basis) == degree
        points = list(divisor.support) + [INFINITY]
        assert all(divisor_bound_holds(b, divisor, points) for b in basis)


def test_rr_basis_is_linearly_independent(curve, rng):
    # L(D) 中非零函數在 supp D 之外至多有 deg D 個零點
    for degree, negatives in ((2, 0), (4, 1), (5, 2)):
        divisor = random_divisor(curve, degree, rng, negative_points=negatives)
        basis = rr_basis(curve, divisor).basis
        rows, seen = [], set(divisor.support)
        for _ in range(200):
            if len(rows) > degree:
                break
            pt = random_point(curve, rng)
            if pt in seen:
                continue
            values = [b.evaluate_regular(pt) for b in basis]
            if any(v is None for v in values):
                continue
            seen.add(pt)
            rows.append(values)
        assert len(rows) == degree + 1
        assert ExactMatrix.from_rows(curve.field, rows, len(basis)).rank() == degree


# === 乘法配對與滿射 ===
def test_multiplication_tensor_places_products(curve):
    tensor = multiplication_tensor(curve, Divisor.point(INFINITY, 2), Divisor.point(INFINITY, 3))
    assert (tensor.d, tensor.k, tensor.dprime) == (2, 3, 5)
    # 目標基底 1, x, y, x², xy
    assert list(tensor.entries[1][2]) == [0, 0, 0, 0, 1]
    assert list(tensor.entries[1][1]) == [0, 0, 0, 1, 0]
    assert list(tensor.entries[0][0]) == [1, 0, 0, 0, 0]


@pytest.mark.parametrize('second, expected', [
    ('O:3', True),
    ('O:2', False),
    ('2,3:1;O:1', True),
    ('O:1', False),
])
def test_surjectivity_cases(curve, second, expected):
    tensor = pairing_tensor(curve, Divisor.point(INFINITY, 2), Divisor.parse(curve, second))
    assert is_surjective(tensor) is expected


def test_whensurj_predict():
    assert not whensurj_predict(2, 2, True)
    assert whensurj_predict(2, 2, False)
    assert not whensurj_predict(3, 1, False)
    assert whensurj_predict(3, 2, True)


def test_pairing_tensor_preconditions(curve):
    with pytest.raises(PreconditionError):
        pairing_tensor(curve, Divisor.point(INFINITY, 1), Divisor.point(INFINITY, 3))
    with pytest.raises(PreconditionError):
        pairing_tensor(curve, Divisor.point(INFINITY, 2), Divisor())


# === 葉的分類 ===
def test_leaf_odd_dprime_is_sigma_one(curve):
    record = leaf_classify(curve, Divisor.point(INFINITY, 2), Divisor.point(INFINITY, 5))
    assert record.surface == 'Sigma_1'
    assert record.match and record.leaf_affine
    assert record.splitting.total == 3


def test_leaf_jumping_class_is_sigma_two(curve):
    record = leaf_classify(curve, Divisor.point(INFINITY, 2), Divisor.point(INFINITY, 4))
    payload = record.to_dict()
    assert payload['surface'] == 'Sigma_2'
    assert payload['splitting_type'] == [2, 0]
    assert payload['trivial_summands'] == 1
    assert not payload['affine']
    assert not payload['y_ample']
    assert payload['match']


def test_leaf_generic_even_is_sigma_zero(curve):
    divisor_prime = Divisor.parse(curve, '2,3:1;O:3')
    assert predict_hirzebruch(curve, Divisor.point(INFINITY, 2), divisor_prime) == 0
    record = leaf_classify(curve, Divisor.point(INFINITY, 2), divisor_prime)
    assert record.surface == 'Sigma_0'
    assert record.splitting.to_json() == [1, 1]
    assert record.y_ample and record.match


def test_leaf_classify_preconditions(curve):
    with pytest.raises(PreconditionError):
        leaf_classify(curve, Divisor.point(INFINITY, 3), Divisor.point(INFINITY, 5))
    with pytest.raises(PreconditionError):
        leaf_classify(curve, Divisor.point(INFINITY, 2), Divisor.point(INFINITY, 2))
