"""
橢圓曲線模組
短 Weierstrass 曲線 y² = x³ + Ax + B（特徵 ≠ 2, 3）上的群運算、除子、線性等價、
Riemann–Roch 空間基底、Miller 函數、乘法配對 β_{N≺N′}、滿射判定，
以及秩 2 葉的 Hirzebruch 曲面分類（與 pencil 分裂型交叉驗證）。

線叢 O(D) 以 (deg D, σ(D)) 代表；標準除子為 (d−1)·O + (σ(D))，σ(D) = O 時為 d·O。

使用範例：
    from src.elliptic import Curve, Divisor, rr_basis

    E = Curve.parse('0,1@Fp:10007')
    D = Divisor.parse(E, 'O:3')
    len(rr_basis(E, D).basis)     # 3
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from config import SAMPLING
from src.chow import hirz_anticanonical, hirz_is_ample
from src.errors import (
    CheckFailedError,
    NotPrincipalError,
    ParseError,
    PointNotOnCurveError,
    PreconditionError,
    SamplingExhaustedError,
)
from src.exact_core import ExactMatrix, Field, ModP, UniPoly
from src.pencil import (
    PairingTensor,
    SplittingType,
    hirzebruch_invariant,
    is_one_generic_pencil,
    splitting_type,
    trivial_summand_count,
)

logger = logging.getLogger(__name__)


# === 曲線與點 ===
@dataclass(frozen=True)
class CurvePoint:
    """無窮遠點 O（x = y = None）或仿射點 (x, y)"""
    x: object = None
    y: object = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_text(self, field: Field) -> str:
        if self.is_infinity:
            return 'O'
        return f'{field.to_json(self.x)},{field.to_json(self.y)}'

    def sort_key(self) -> tuple:
        if self.is_infinity:
            return (0, 0, 0)
        return (1, _scalar_key(self.x), _scalar_key(self.y))


INFINITY = CurvePoint()


def _scalar_key(value):
    return int(value) if isinstance(value, ModP) else value


@dataclass(frozen=True)
class Curve:
    """y² = x³ + a·x + b，判別式 Δ = −16(4a³ + 27b²) ≠ 0"""
    field: Field
    a: object
    b: object

    def __post_init__(self):
        if self.discriminant == self.field.zero:
            raise PreconditionError("曲線奇異：判別式為 0")

    @classmethod
    def make(cls, field: Field, a, b) -> Curve:
        return cls(field, field(a), field(b))

    @classmethod
    def parse(cls, text: str) -> Curve:
        """解析 "A,B@Q" 或 "A,B@Fp:10007" """
        try:
            coeff_text, field_text = text.split('@')
            a_text, b_text = coeff_text.split(',')
        except (AttributeError, ValueError) as e:
            raise ParseError(f"無法解析曲線 '{text}'（格式 'A,B@Q' 或 'A,B@Fp:p'）") from e
        field = Field.parse(field_text)
        return cls.make(field, field(a_text), field(b_text))

    @property
    def discriminant(self):
        return -16 * (4 * self.a ** 3 + 27 * self.b ** 2)

    @property
    def descriptor(self) -> str:
        return f'{self.field.to_json(self.a)},{self.field.to_json(self.b)}@{self.field.descriptor}'

    @property
    def rhs_poly(self) -> UniPoly:
        """f(x) = x³ + a·x + b"""
        return UniPoly.make(self.field, [self.b, self.a, 0, 1])

    def rhs(self, x):
        return x * x * x + self.a * x + self.b

    def contains(self, point: CurvePoint) -> bool:
        if point.is_infinity:
            return True
        return point.y * point.y == self.rhs(point.x)

    def point(self, x, y) -> CurvePoint:
        """建立並檢查仿射點"""
        pt = CurvePoint(self.field(x), self.field(y))
        if not self.contains(pt):
            raise PointNotOnCurveError(f"點 ({x}, {y}) 不在曲線 {self.descriptor} 上")
        return pt


def _require_on_curve(curve: Curve, *points: CurvePoint) -> None:
    for pt in points:
        if not curve.contains(pt):
            raise PointNotOnCurveError(f"點 {pt.to_text(curve.field)} 不在曲線上")


def _slope(curve: Curve, p: CurvePoint, q: CurvePoint):
    """P、Q 連線（P = Q 時為切線）的斜率；垂直線回傳 None"""
    if p.x == q.x:
        if p.y == -q.y:
            return None
        return (3 * p.x * p.x + curve.a) / (2 * p.y)
    return (q.y - p.y) / (q.x - p.x)


def _add(curve: Curve, p: CurvePoint, q: CurvePoint) -> CurvePoint:
    if p.is_infinity:
        return q
    if q.is_infinity:
        return p
    lam = _slope(curve, p, q)
    if lam is None:
        return INFINITY
    x3 = lam * lam - p.x - q.x
    return CurvePoint(x3, lam * (p.x - x3) - p.y)


def neg_point(curve: Curve, p: CurvePoint) -> CurvePoint:
    _require_on_curve(curve, p)
    return p if p.is_infinity else CurvePoint(p.x, -p.y)


def add_points(curve: Curve, p: CurvePoint, q: CurvePoint) -> CurvePoint:
    """弦切法群運算，O 為單位元"""
    _require_on_curve(curve, p, q)
    return _add(curve, p, q)


def scalar_mul(curve: Curve, n: int, p: CurvePoint) -> CurvePoint:
    """n·P（倍加法，n 可為負）"""
    _require_on_curve(curve, p)
    if n < 0:
        n, p = -n, CurvePoint(p.x, -p.y) if not p.is_infinity else p
    result, base = INFINITY, p
    while n:
        if n & 1:
            result = _add(curve, result, base)
        base = _add(curve, base, base)
        n >>= 1
    return result


# === 除子 ===
@dataclass(frozen=True)
class Divisor:
    """
    點的有限整係數形式組合；items 依點排序且不含重數 0
    """
    items: tuple = ()

    @classmethod
    def make(cls, pairs) -> Divisor:
        merged = {}
        for pt, mult in pairs:
            merged[pt] = merged.get(pt, 0) + int(mult)
        return cls(tuple(sorted(((pt, m) for pt, m in merged.items() if m), key=lambda it: it[0].sort_key())))

    @classmethod
    def point(cls, pt: CurvePoint, mult: int = 1) -> Divisor:
        return cls.make([(pt, mult)])

    @classmethod
    def from_points(cls, points) -> Divisor:
        return cls.make((pt, 1) for pt in points)

    @classmethod
    def parse(cls, curve: Curve, text: str) -> Divisor:
        """解析 "x,y:mult;O:mult"（例如 "0,1:2;O:-1"）"""
        pairs = []
        for chunk in (text or '').split(';'):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                point_text, mult_text = chunk.rsplit(':', 1)
                mult = int(mult_text)
            except ValueError as e:
                raise ParseError(f"無法解析除子項 '{chunk}'（格式 'x,y:mult' 或 'O:mult'）") from e
            point_text = point_text.strip()
            if point_text == 'O':
                pairs.append((INFINITY, mult))
                continue
            try:
                x_text, y_text = point_text.split(',')
            except ValueError as e:
                raise ParseError(f"無法解析點 '{point_text}'") from e
            pairs.append((curve.point(curve.field(x_text), curve.field(y_text)), mult))
        return cls.make(pairs)

    def to_text(self, field: Field) -> str:
        return ';'.join(f'{pt.to_text(field)}:{m}' for pt, m in self.items)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.items)

    @property
    def support(self) -> tuple:
        return tuple(pt for pt, _ in self.items)

    def multiplicity(self, pt: CurvePoint) -> int:
        for q, m in self.items:
            if q == pt:
                return m
        return 0

    def is_effective(self) -> bool:
        return all(m > 0 for _, m in self.items)

    def __add__(self, other: Divisor) -> Divisor:
        return Divisor.make(self.items + other.items)

    def __neg__(self) -> Divisor:
        return Divisor(tuple((pt, -m) for pt, m in self.items))

    def __sub__(self, other: Divisor) -> Divisor:
        return self + (-other)

    def __mul__(self, n: int) -> Divisor:
        return Divisor.make((pt, n * m) for pt, m in self.items)

    __rmul__ = __mul__


def sigma(curve: Curve, divisor: Divisor) -> CurvePoint:
    """Σ n_i·P_i（群運算）"""
    total = INFINITY
    for pt, mult in divisor.items:
        total = _add(curve, total, scalar_mul(curve, mult, pt))
    return total


def lin_equiv(curve: Curve, first: Divisor, second: Divisor) -> bool:
    """Abel 判準：次數相同且 σ 相同"""
    return first.degree == second.degree and sigma(curve, first) == sigma(curve, second)


# === 函數體元素 ===
@dataclass(frozen=True)
class FunctionFieldElement:
    """
    (a(x) + b(x)·y) / c(x)，標準形：c 首一且 gcd(a, b, c) = 1
    """
    curve: Curve
    a: UniPoly
    b: UniPoly
    c: UniPoly

    @classmethod
    def make(cls, curve: Curve, a: UniPoly, b: UniPoly, c: UniPoly) -> FunctionFieldElement:
        if c.is_zero():
            raise ZeroDivisionError("函數的分母為 0")
        field = curve.field
        if a.is_zero() and b.is_zero():
            return cls(curve, a, b, UniPoly.constant(field, 1))
        if c.degree > 0:
            common = a.gcd(b).gcd(c)
            if common.degree > 0:
                a, b, c = a // common, b // common, c // common
        lead = c.leading
        if lead != field.one:
            inv = field.one / lead
            a, b, c = a.scale(inv), b.scale(inv), c.scale(inv)
        return cls(curve, a, b, c)

    @classmethod
    def constant(cls, curve: Curve, value) -> FunctionFieldElement:
        field = curve.field
        return cls.make(curve, UniPoly.constant(field, value), UniPoly.zero(field), UniPoly.constant(field, 1))

    @classmethod
    def from_poly(cls, curve: Curve, a: UniPoly, b: UniPoly | None = None) -> FunctionFieldElement:
        field = curve.field
        return cls.make(curve, a, b if b is not None else UniPoly.zero(field), UniPoly.constant(field, 1))

    @classmethod
    def monomial(cls, curve: Curve, i: int, j: int) -> FunctionFieldElement:
        """x^i y^j，j ∈ {0, 1}"""
        field = curve.field
        power = UniPoly.x(field) ** i
        if j == 0:
            return cls.from_poly(curve, power)
        return cls.from_poly(curve, UniPoly.zero(field), power)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __add__(self, other: FunctionFieldElement) -> FunctionFieldElement:
        if self.c == other.c:
            return FunctionFieldElement.make(self.curve, self.a + other.a, self.b + other.b, self.c)
        return FunctionFieldElement.make(
            self.curve,
            self.a * other.c + other.a * self.c,
            self.b * other.c + other.b * self.c,
            self.c * other.c,
        )

    def __neg__(self) -> FunctionFieldElement:
        return FunctionFieldElement(self.curve, -self.a, -self.b, self.c)

    def __sub__(self, other: FunctionFieldElement) -> FunctionFieldElement:
        return self + (-other)

    def __mul__(self, other) -> FunctionFieldElement:
        if not isinstance(other, FunctionFieldElement):
            scalar = self.curve.field(other)
            return FunctionFieldElement.make(self.curve, self.a.scale(scalar), self.b.scale(scalar), self.c)
        f = self.curve.rhs_poly
        return FunctionFieldElement.make(
            self.curve,
            self.a * other.a + self.b * other.b * f,
            self.a * other.b + other.a * self.b,
            self.c * other.c,
        )

    def inverse(self) -> FunctionFieldElement:
        """1/(a + by) = (a − by)/(a² − b²f)"""
        if self.is_zero():
            raise ZeroDivisionError("零函數沒有倒數")
        if self.b.is_zero():
            return FunctionFieldElement.make(self.curve, self.c, UniPoly.zero(self.curve.field), self.a)
        norm = self.a * self.a - self.b * self.b * self.curve.rhs_poly
        return FunctionFieldElement.make(self.curve, self.a * self.c, -(self.b * self.c), norm)

    def __truediv__(self, other: FunctionFieldElement) -> FunctionFieldElement:
        return self * other.inverse()

    def __pow__(self, exponent: int) -> FunctionFieldElement:
        base = self if exponent >= 0 else self.inverse()
        result = FunctionFieldElement.constant(self.curve, 1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def evaluate_regular(self, pt: CurvePoint):
        """分母在 pt 不為 0 時的函數值；否則回傳 None"""
        if pt.is_infinity:
            return None
        denominator = self.c(pt.x)
        if not denominator:
            return None
        return (self.a(pt.x) + self.b(pt.x) * pt.y) / denominator

    def to_json(self) -> dict:
        field = self.curve.field
        return {
            'a': [field.to_json(v) for v in self.a.coeffs],
            'b': [field.to_json(v) for v in self.b.coeffs],
            'c': [field.to_json(v) for v in self.c.coeffs],
        }


# === 局部參數與階數 ===
def _is_two_torsion(pt: CurvePoint) -> bool:
    return not pt.is_infinity and not pt.y


def _poly_leading(curve: Curve, poly: UniPoly, pt: CurvePoint) -> tuple[int, object]:
    """x 的多項式在 pt 的 (階數, 首項係數)"""
    if poly.is_zero():
        raise PreconditionError("零函數沒有首項")
    if pt.is_infinity:
        return -2 * poly.degree, poly.leading
    mult, cofactor = poly.root_multiplicity(pt.x)
    lead = cofactor(pt.x)
    if _is_two_torsion(pt):
        # x − x0 = y² / g(x)，g(x0) = f′(x0)
        inv_derivative = curve.field.one / curve.rhs_poly.derivative()(pt.x)
        return 2 * mult, lead * inv_derivative ** mult
    return mult, lead


def _numerator_leading(curve: Curve, a: UniPoly, b: UniPoly, pt: CurvePoint) -> tuple[int, object]:
    """a(x) + b(x)·y 在 pt 的 (階數, 首項係數)"""
    if b.is_zero():
        return _poly_leading(curve, a, pt)
    if a.is_zero():
        order_b, lead_b = _poly_leading(curve, b, pt)
        if pt.is_infinity:
            return order_b - 3, lead_b
        if _is_two_torsion(pt):
            return order_b + 1, lead_b
        return order_b, lead_b * pt.y
    if pt.is_infinity or _is_two_torsion(pt):
        # a 與 b·y 的階數奇偶不同，較小者決定首項
        order_a, lead_a = _poly_leading(curve, a, pt)
        order_by, lead_by = _numerator_leading(curve, UniPoly.zero(curve.field), b, pt)
        return (order_a, lead_a) if order_a < order_by else (order_by, lead_by)

    mult_a, a_rest = a.root_multiplicity(pt.x)
    mult_b, b_rest = b.root_multiplicity(pt.x)
    shared = min(mult_a, mult_b)
    linear = UniPoly.linear(curve.field, pt.x)
    common = linear ** shared
    a_rest, b_rest = a // common, b // common
    value = a_rest(pt.x) + b_rest(pt.x) * pt.y
    if value:
        return shared, value
    # a + by 在 P 為 0，而共軛 a − by 在 P 不為 0
    conjugate = a_rest(pt.x) - b_rest(pt.x) * pt.y
    norm = a_rest * a_rest - b_rest * b_rest * curve.rhs_poly
    mult_n, norm_rest = norm.root_multiplicity(pt.x)
    return shared + mult_n, norm_rest(pt.x) / conjugate


def leading_term(element: FunctionFieldElement, pt: CurvePoint) -> tuple[int, object]:
    """
    相對於標準局部參數的 (階數, 首項係數)

    局部參數：一般仿射點用 x − x_P，2-torsion 點用 y，O 用 x/y。
    """
    if element.is_zero():
        raise PreconditionError("零函數沒有階數")
    order_num, lead_num = _numerator_leading(element.curve, element.a, element.b, pt)
    order_den, lead_den = _poly_leading(element.curve, element.c, pt)
    return order_num - order_den, lead_num / lead_den


def ord_at(element: FunctionFieldElement, pt: CurvePoint) -> int:
    return leading_term(element, pt)[0]


def value_at(element: FunctionFieldElement, pt: CurvePoint):
    """在 pt 的函數值（處理可去奇點）；pt 為極點時拋出 PreconditionError"""
    if element.is_zero():
        return element.curve.field.zero
    order, lead = leading_term(element, pt)
    if order < 0:
        raise PreconditionError(f"函數在 {pt.to_text(element.curve.field)} 有 {-order} 階極點")
    return lead if order == 0 else element.curve.field.zero


def divisor_bound_holds(element: FunctionFieldElement, divisor: Divisor, points) -> bool:
    """在給定的點上檢查 div(f) + D ≥ 0"""
    return all(ord_at(element, pt) >= -divisor.multiplicity(pt) for pt in points)


# === Miller 函數 ===
def _vertical(curve: Curve, pt: CurvePoint) -> FunctionFieldElement:
    """過 pt 的垂直線 x − x_pt（pt = O 時為 1）"""
    if pt.is_infinity:
        return FunctionFieldElement.constant(curve, 1)
    return FunctionFieldElement.from_poly(curve, UniPoly.linear(curve.field, pt.x))


def _line(curve: Curve, p: CurvePoint, q: CurvePoint) -> tuple[FunctionFieldElement, CurvePoint]:
    """過 P、Q 的直線 ℓ_{P,Q}（P = Q 時為切線）以及 P + Q"""
    lam = _slope(curve, p, q)
    if lam is None:
        return _vertical(curve, p), INFINITY
    field = curve.field
    # y − y_P − λ(x − x_P)
    a = UniPoly.make(field, [lam * p.x - p.y, -lam])
    return FunctionFieldElement.from_poly(curve, a, UniPoly.constant(field, 1)), _add(curve, p, q)


@dataclass(frozen=True)
class MillerFunction:
    """
    以直線分式的乘積表示的主除子函數；factors 為 (函數, 指數)
    """
    curve: Curve
    divisor: Divisor
    factors: tuple
    touched: tuple = dataclass_field(default=())

    def expand(self) -> FunctionFieldElement:
        """展開為標準形（分子、分母各自相乘後只做一次除法）"""
        numerator = FunctionFieldElement.constant(self.curve, 1)
        denominator = FunctionFieldElement.constant(self.curve, 1)
        for element, exponent in self.factors:
            if exponent > 0:
                numerator = numerator * element ** exponent
            else:
                denominator = denominator * element ** (-exponent)
        return numerator / denominator


def miller_function(curve: Curve, divisor: Divisor) -> MillerFunction:
    """
    建構 div(g) = D 的函數 g（D 需為主除子）

    功能說明：
        負重數的點 P 先改寫為 (−P) 並乘上 v_P 的負次方；
        接著兩兩合併 (P) + (Q) = (P+Q) + (O) + div(ℓ_{P,Q} / v_{P+Q})，直到列表為空。

    Raises:
        NotPrincipalError: deg D ≠ 0 或 σ(D) ≠ O
    """
    _require_on_curve(curve, *divisor.support)
    if divisor.degree != 0 or sigma(curve, divisor) != INFINITY:
        raise NotPrincipalError(f"除子 {divisor.to_text(curve.field)} 不是主除子")

    factors = []
    touched = {INFINITY}
    points = []
    for pt, mult in divisor.items:
        if pt.is_infinity:
            continue
        touched.add(pt)
        if mult > 0:
            points.extend([pt] * mult)
        else:
            negated = CurvePoint(pt.x, -pt.y)
            touched.add(negated)
            points.extend([negated] * (-mult))
            factors.append((_vertical(curve, pt), mult))

    while len(points) > 1:
        merged = []
        for i in range(0, len(points) - 1, 2):
            p, q = points[i], points[i + 1]
            line, total = _line(curve, p, q)
            factors.append((line, 1))
            touched.update({p, q, total})
            if not total.is_infinity:
                touched.add(CurvePoint(total.x, -total.y))
                factors.append((_vertical(curve, total), -1))
                merged.append(total)
        if len(points) % 2:
            merged.append(points[-1])
        points = merged
    if points:
        raise CheckFailedError("Miller 化簡後仍剩下一個點，σ(D) 計算不一致")
    ordered = tuple(sorted(touched, key=lambda pt: pt.sort_key()))
    return MillerFunction(curve, divisor, tuple(factors), ordered)


def verify_miller(curve: Curve, divisor: Divisor, miller: MillerFunction) -> bool:
    """
    檢查展開後 g 的零點與極點：在所有可能的支撐點上階數等於 D 的重數，且總和為 0
    """
    g = miller.expand()
    candidates = set(miller.touched) | set(divisor.support) | {INFINITY}
    total = 0
    for pt in candidates:
        order = ord_at(g, pt)
        if order != divisor.multiplicity(pt):
            logger.debug(f"❌ Miller 函數在 {pt.to_text(curve.field)} 的階數 {order} ≠ {divisor.multiplicity(pt)}")
            return False
        total += order
    return total == 0


# === Riemann–Roch 基底 ===
@dataclass(frozen=True)
class RRBasis:
    """L(D) 的基底（長度 = deg D）以及所用的標準除子與轉移函數 g"""
    divisor: Divisor
    basis: tuple
    canonical: Divisor
    transition: FunctionFieldElement


def _monomials(curve: Curve, bound: int) -> list[FunctionFieldElement]:
    """x^i y^j（j ∈ {0,1}，2i + 3j ≤ bound），依極點階數排序"""
    exponents = [(i, j) for j in (0, 1) for i in range(bound // 2 + 1) if 2 * i + 3 * j <= bound]
    exponents.sort(key=lambda ij: 2 * ij[0] + 3 * ij[1])
    return [FunctionFieldElement.monomial(curve, i, j) for i, j in exponents]


def u_function(curve: Curve, pt: CurvePoint) -> FunctionFieldElement:
    """
    u_P = ℓ / (x − x_P)，ℓ 為過 −P 的直線；依斜率 λ = 0, 1, 2 依序嘗試，
    取第一個在 P 有真正單極點者
    """
    field = curve.field
    denominator = UniPoly.linear(field, pt.x)
    for lam in range(3):
        lam_value = field(lam)
        # y + y_P − λ(x − x_P)
        numerator = UniPoly.make(field, [pt.y + lam_value * pt.x, -lam_value])
        candidate = FunctionFieldElement.make(curve, numerator, UniPoly.constant(field, 1), denominator)
        if ord_at(candidate, pt) == -1:
            return candidate
    raise CheckFailedError(f"找不到在 {pt.to_text(field)} 有單極點的 u_P")


def rr_basis(curve: Curve, divisor: Divisor) -> RRBasis:
    """
    L(D) 的基底

    步驟：
        1. P := σ(D)，D_can := d·O（P = O）或 (d−1)·O + (P)
        2. g := miller_function(D − D_can)
        3. L(D_can) 的基底：2i+3j ≤ d（或 ≤ d−1 再加上 u_P）的單項式
        4. 回傳 {b / g}

    Raises:
        PreconditionError: deg D < 1
    """
    d = divisor.degree
    if d < 1:
        raise PreconditionError(f"rr_basis 需要 deg D ≥ 1，收到 {d}")
    total = sigma(curve, divisor)
    if total.is_infinity:
        canonical = Divisor.point(INFINITY, d)
        canonical_basis = _monomials(curve, d)
    elif d == 1:
        # L((P)) 只有常數
        canonical = Divisor.point(total, 1)
        canonical_basis = [FunctionFieldElement.constant(curve, 1)]
    else:
        canonical = Divisor.make([(INFINITY, d - 1), (total, 1)])
        canonical_basis = _monomials(curve, d - 1) + [u_function(curve, total)]

    transition = miller_function(curve, divisor - canonical).expand()
    inverse = transition.inverse()
    basis = tuple(element * inverse for element in canonical_basis)
    if len(basis) != d:
        raise CheckFailedError(f"基底長度 {len(basis)} ≠ deg D = {d}")
    return RRBasis(divisor, basis, canonical, transition)


# === 乘法配對 ===
class _BasisSolver:
    """以共同分母比對係數，把 L(D) 中的函數寫成基底的線性組合"""

    def __init__(self, curve: Curve, basis):
        self.curve = curve
        self.field = curve.field
        self.basis = list(basis)
        common = UniPoly.constant(self.field, 1)
        for element in self.basis:
            common = (common * element.c) // common.gcd(element.c)
        self.common = common.monic()
        scaled = []
        for element in self.basis:
            factor = self.common // element.c
            scaled.append((element.a * factor, element.b * factor))
        self.length = max(max(len(a.coeffs), len(b.coeffs)) for a, b in scaled)
        columns = [self._vector(a, b) for a, b in scaled]
        self.matrix = ExactMatrix.from_columns(self.field, columns, 2 * self.length)

    def _vector(self, a: UniPoly, b: UniPoly) -> list:
        zero = self.field.zero
        return (list(a.coeffs) + [zero] * (self.length - len(a.coeffs))
                + list(b.coeffs) + [zero] * (self.length - len(b.coeffs)))

    def coordinates(self, element: FunctionFieldElement) -> tuple:
        quotient, remainder = self.common.divmod(element.c)
        if not remainder.is_zero():
            raise CheckFailedError("乘積的分母不整除基底的共同分母，基底不一致")
        a, b = element.a * quotient, element.b * quotient
        if len(a.coeffs) > self.length or len(b.coeffs) > self.length:
            raise CheckFailedError("乘積超出基底所張成的空間")
        target = self._vector(a, b)
        solution = self.matrix.solve(target)
        if solution is None or list(self.matrix.apply(solution)) != target:
            raise CheckFailedError("基底線性方程組不一致（殘差非零）")
        return solution


def _sample_regular_points(curve: Curve, elements, count: int, rng) -> list[CurvePoint]:
    """取樣所有函數分母都不為 0 的仿射點"""
    points = []
    for _ in range(SAMPLING['MAX_ATTEMPTS']):
        if len(points) >= count:
            break
        pt = random_point(curve, rng)
        if pt in points or any(not element.c(pt.x) for element in elements):
            continue
        points.append(pt)
    if len(points) < count:
        raise SamplingExhaustedError("無法取樣足夠的正則點")
    return points


def multiplication_tensor(curve: Curve, first: Divisor, second: Divisor, confirm_seed: int | None = 0) -> PairingTensor:
    """
    L(D1) ⊗ L(D2) → L(D1 + D2) 的係數張量

    Args:
        confirm_seed: 以 deg+1 個隨機點做第二重驗證所用的種子；None 表示略過
                      （有理數體上一律略過）
    """
    basis_first = rr_basis(curve, first).basis
    basis_second = rr_basis(curve, second).basis
    target_basis = rr_basis(curve, first + second).basis
    solver = _BasisSolver(curve, target_basis)

    entries = []
    products = {}
    for i, f in enumerate(basis_first):
        row = []
        for w, g in enumerate(basis_second):
            product = f * g
            products[(i, w)] = product
            row.append(solver.coordinates(product))
        entries.append(row)
    tensor = PairingTensor.make(curve.field, entries)

    if confirm_seed is not None and not curve.field.is_rational:
        _confirm_by_evaluation(curve, tensor, basis_first, basis_second, target_basis, confirm_seed)
    return tensor


def _confirm_by_evaluation(curve, tensor, basis_first, basis_second, target_basis, seed) -> None:
    rng = np.random.default_rng(seed)
    elements = list(basis_first) + list(basis_second) + list(target_basis)
    points = _sample_regular_points(curve, elements, tensor.dprime + 1, rng)
    for pt in points:
        target_values = [b.evaluate_regular(pt) for b in target_basis]
        first_values = [f.evaluate_regular(pt) for f in basis_first]
        second_values = [g.evaluate_regular(pt) for g in basis_second]
        for i in range(tensor.d):
            for w in range(tensor.k):
                combined = curve.field.zero
                for j in range(tensor.dprime):
                    combined = combined + tensor.entries[i][w][j] * target_values[j]
                if combined != first_values[i] * second_values[w]:
                    raise CheckFailedError(f"求值驗證失敗於 {pt.to_text(curve.field)}")


def pairing_tensor(curve: Curve, divisor_n: Divisor, divisor_m: Divisor, confirm_seed: int | None = 0) -> PairingTensor:
    """
    β_{N≺N′}: H⁰(N) ⊗ H⁰(M) → H⁰(N′)，N = O(D_N)、M = O(D_M)、N′ = N ⊗ M
    """
    if divisor_n.degree < 2 or divisor_m.degree < 1:
        raise PreconditionError(
            f"pairing_tensor 需要 deg D_N ≥ 2 且 deg D_M ≥ 1，收到 {divisor_n.degree}, {divisor_m.degree}"
        )
    return multiplication_tensor(curve, divisor_n, divisor_m, confirm_seed)


def is_surjective(tensor: PairingTensor) -> bool:
    """展平矩陣的秩 = d′"""
    return tensor.image_rank() == tensor.dprime


def whensurj_predict(d: int, k: int, same_class: bool) -> bool:
    """滿射 ⇔ k ≥ 2，且 d = k = 2 時 N ≇ M"""
    return k >= 2 and not (d == 2 and k == 2 and same_class)


# === 葉的分類 ===
@dataclass(frozen=True)
class LeafRecord:
    e_predicted: int
    e_computed: int
    k: int
    dprime: int
    splitting: SplittingType
    trivial_summands: int
    y_ample: bool

    @property
    def surface(self) -> str:
        return f'Sigma_{self.e_computed}'

    @property
    def leaf_affine(self) -> bool:
        return self.e_computed <= 1

    @property
    def leaf_quasi_affine(self) -> bool:
        return self.leaf_affine

    @property
    def match(self) -> bool:
        return self.e_predicted == self.e_computed

    def to_dict(self) -> dict:
        return {
            'surface': self.surface,
            'affine': self.leaf_affine,
            'quasi_affine': self.leaf_quasi_affine,
            'match': self.match,
            'e_predicted': self.e_predicted,
            'e_computed': self.e_computed,
            'k': self.k,
            'dprime': self.dprime,
            'splitting_type': self.splitting.to_json(),
            'trivial_summands': self.trivial_summands,
            'y_ample': self.y_ample,
        }


def predict_hirzebruch(curve: Curve, divisor: Divisor, divisor_prime: Divisor) -> int:
    """d′ 奇數 → 1；偶數時 D′ ∼ (k/2+1)D → 2，否則 0"""
    dprime = divisor_prime.degree
    k = dprime - 2
    if dprime % 2:
        return 1
    return 2 if lin_equiv(curve, divisor_prime, divisor * (k // 2 + 1)) else 0


def leaf_classify(curve: Curve, divisor: Divisor, divisor_prime: Divisor, confirm_seed: int | None = 0) -> LeafRecord:
    """
    deg D = 2、deg D′ = d′ ≥ 3 的完備葉分類

    e_computed 取自 pairing_tensor(D, D′ − D) 所對應 pencil 的分裂型。
    """
    if divisor.degree != 2:
        raise PreconditionError(f"葉分類需要 deg D = 2，收到 {divisor.degree}")
    if divisor_prime.degree < 3:
        raise PreconditionError(f"葉分類需要 deg D′ ≥ 3，收到 {divisor_prime.degree}")
    dprime = divisor_prime.degree
    k = dprime - 2
    predicted = predict_hirzebruch(curve, divisor, divisor_prime)

    tensor = pairing_tensor(curve, divisor, divisor_prime - divisor, confirm_seed)
    pencil = tensor.to_pencil()
    if not is_one_generic_pencil(pencil):
        raise CheckFailedError("橢圓乘法配對不是 1-generic")
    split = splitting_type(pencil)
    computed = hirzebruch_invariant(pencil, split)
    trivial = trivial_summand_count(pencil, split)
    record = LeafRecord(
        e_predicted=predicted,
        e_computed=computed,
        k=k,
        dprime=dprime,
        splitting=split,
        trivial_summands=trivial,
        y_ample=hirz_is_ample(hirz_anticanonical(computed)),
    )
    if record.match:
        logger.info(f"✅ 葉分類 {record.surface}（d′={dprime}）與預測一致")
    else:
        logger.warning(f"❌ 葉分類不一致：預測 Σ_{predicted}，計算 Σ_{computed}")
    return record


# === 隨機產生器 ===
def random_point(curve: Curve, rng) -> CurvePoint:
    """隨機取 x，若 x³+ax+b 為平方數則取其平方根（隨機正負號）"""
    field = curve.field
    for _ in range(SAMPLING['MAX_ATTEMPTS']):
        x = field.random(rng)
        root = field.sqrt(curve.rhs(x))
        if root is None:
            continue
        if rng.integers(0, 2):
            root = -root
        return CurvePoint(x, root)
    raise SamplingExhaustedError(f"在曲線 {curve.descriptor} 上取樣點失敗")


def random_curve(field: Field, rng) -> Curve:
    for _ in range(SAMPLING['MAX_ATTEMPTS']):
        a, b = field.random(rng), field.random(rng)
        if 4 * a ** 3 + 27 * b ** 2 != field.zero:
            return Curve(field, a, b)
    raise SamplingExhaustedError("無法取樣非奇異曲線")


def random_divisor(curve: Curve, degree: int, rng, negative_points: int = 0) -> Divisor:
    """degree + negative_points 個正點減去 negative_points 個負點"""
    positives = [random_point(curve, rng) for _ in range(degree + negative_points)]
    negatives = [random_point(curve, rng) for _ in range(negative_points)]
    return Divisor.make([(pt, 1) for pt in positives] + [(pt, -1) for pt in negatives])


def divisor_with_sum(curve: Curve, degree: int, target: CurvePoint, rng) -> Divisor:
    """次數為 degree 且 σ = target 的有效除子"""
    rest = random_divisor(curve, degree - 1, rng)
    total = sigma(curve, rest)
    negated = total if total.is_infinity else CurvePoint(total.x, -total.y)
    return rest + Divisor.point(_add(curve, target, negated))
