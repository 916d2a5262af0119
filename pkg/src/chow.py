"""
Chow 環模組
射影空間上射影叢的 Chow 環 Z[h, ζ]/(h^d, Chern 關係)、商叢 Q_β 的 Chern 類、
以留數法計算的交截數、乘法序列 (multiplicative sequence)、
典範與反典範類，以及 Hirzebruch 曲面的交截格。

使用範例：
    from src.chow import BundleShape, total_chern_quotient, intersection_number

    shape = BundleShape(d=2, k=2)
    gamma = total_chern_quotient(shape)          # [2]
    intersection_number(shape, gamma, 1)         # -2
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb

from sympy import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import ring as poly_ring

from src.errors import CheckFailedError, PreconditionError
from src.exact_core import Field, TruncSeries, series_exp, series_inverse, series_log

logger = logging.getLogger(__name__)

RATIONALS = Field(None)


# === 叢的形狀 ===
@dataclass(frozen=True)
class BundleShape:
    """
    d = dim V（底空間為 P^{d-1}）、k = dim W、dprime = dim V′、r = dprime − k

    k 與 dprime 可省略其一：省略 dprime 時取 d + k，省略 k 時取 dprime − d。
    """
    d: int
    k: int | None = None
    dprime: int | None = None

    def __post_init__(self):
        if self.k is None and self.dprime is None:
            raise PreconditionError("BundleShape 需要 k 或 dprime")
        if self.dprime is None:
            object.__setattr__(self, 'dprime', self.d + self.k)
        if self.k is None:
            object.__setattr__(self, 'k', self.dprime - self.d)
        if self.d < 2:
            raise PreconditionError(f"需要 d ≥ 2，收到 d={self.d}")
        if self.k < 1:
            raise PreconditionError(f"需要 k ≥ 1，收到 k={self.k}")
        if self.dprime < self.d + self.k - 1:
            raise PreconditionError(
                f"不存在 1-generic 配對: dprime={self.dprime} < d + k − 1 = {self.d + self.k - 1}"
            )
        if self.r < 1:
            raise PreconditionError(f"需要 r = dprime − k ≥ 1，收到 r={self.r}")

    @property
    def r(self) -> int:
        return self.dprime - self.k

    def to_dict(self) -> dict:
        return {'d': self.d, 'k': self.k, 'dprime': self.dprime, 'r': self.r}


# === Chow 環 ===
@dataclass(frozen=True)
class ChowRing:
    """
    Z[h, ζ]/(h^d, ζ^r + γ_1 h ζ^{r-1} + … + γ_r h^r)

    Chern 資料在儲存時截斷到 d−1 次（P^{d-1} 上更高次的類為 0）。
    """
    d: int
    r: int
    chern: tuple

    @classmethod
    def of(cls, d: int, r: int, chern) -> ChowRing:
        chern = tuple(int(g) for g in list(chern)[:d - 1])
        return cls(d, r, chern)

    @classmethod
    def for_shape(cls, shape: BundleShape, chern) -> ChowRing:
        return cls.of(shape.d, shape.r, chern)

    @classmethod
    def projective_space(cls, d: int) -> ChowRing:
        """單純的 P^{d-1}：r = 1 且 ζ = 0"""
        return cls.of(d, 1, [0])

    def gamma(self, m: int) -> int:
        return self.chern[m - 1] if 1 <= m <= len(self.chern) else 0

    # --- 生成元 ---
    def _grid(self) -> list[list[int]]:
        return [[0] * self.r for _ in range(self.d)]

    def monomial(self, i: int, j: int) -> ChowClass:
        """h^i ζ^j（已化簡）"""
        cls = self.one()
        for _ in range(j):
            cls = cls * self.zeta()
        for _ in range(i):
            cls = cls * self.h()
        return cls

    def zero(self) -> ChowClass:
        return ChowClass(self, tuple(tuple(row) for row in self._grid()))

    def one(self) -> ChowClass:
        grid = self._grid()
        grid[0][0] = 1
        return ChowClass(self, tuple(tuple(row) for row in grid))

    def h(self) -> ChowClass:
        grid = self._grid()
        if self.d > 1:
            grid[1][0] = 1
        return ChowClass(self, tuple(tuple(row) for row in grid))

    def zeta(self) -> ChowClass:
        grid = self._grid()
        if self.r > 1:
            grid[0][1] = 1
        elif self.d > 1:
            # r = 1：關係式為 ζ = −γ_1 h
            grid[1][0] = -self.gamma(1)
        return ChowClass(self, tuple(tuple(row) for row in grid))

    # --- 化簡用的基本運算 ---
    def _times_zeta(self, grid: list[list[int]]) -> list[list[int]]:
        out = self._grid()
        top = self.r - 1
        for i in range(self.d):
            for j in range(self.r):
                c = grid[i][j]
                if not c:
                    continue
                if j < top:
                    out[i][j + 1] += c
                    continue
                # ζ^r = −Σ γ_m h^m ζ^{r−m}
                for m in range(1, self.r + 1):
                    g = self.gamma(m)
                    if g and i + m < self.d:
                        out[i + m][self.r - m] -= g * c
        return out

    def _times_h(self, grid: list[list[int]]) -> list[list[int]]:
        out = self._grid()
        for i in range(self.d - 1):
            out[i + 1] = list(grid[i])
        return out

    def to_dict(self) -> dict:
        return {'d': self.d, 'r': self.r, 'chern': list(self.chern)}


@dataclass(frozen=True)
class ChowClass:
    """ChowRing 中的元素；coeffs[i][j] 為 h^i ζ^j 的係數"""
    ring: ChowRing
    coeffs: tuple

    def _same(self, other: ChowClass):
        if self.ring != other.ring:
            raise PreconditionError("Chow 類屬於不同的環")

    def __add__(self, other: ChowClass) -> ChowClass:
        self._same(other)
        return ChowClass(self.ring, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.coeffs, other.coeffs)
        ))

    def __neg__(self) -> ChowClass:
        return ChowClass(self.ring, tuple(tuple(-a for a in row) for row in self.coeffs))

    def __sub__(self, other: ChowClass) -> ChowClass:
        return self + (-other)

    def __mul__(self, other) -> ChowClass:
        if isinstance(other, int):
            return ChowClass(self.ring, tuple(tuple(other * a for a in row) for row in self.coeffs))
        self._same(other)
        ring = self.ring
        result = ring._grid()
        # zeta_powers[j] = other · ζ^j
        zeta_powers = [[list(row) for row in other.coeffs]]
        for _ in range(1, ring.r):
            zeta_powers.append(ring._times_zeta(zeta_powers[-1]))
        for j in range(ring.r):
            shifted = zeta_powers[j]
            for i in range(ring.d):
                a = self.coeffs[i][j] if i < len(self.coeffs) else 0
                if a:
                    for ii in range(ring.d):
                        for jj in range(ring.r):
                            result[ii][jj] += a * shifted[ii][jj]
                shifted = ring._times_h(shifted)
        return ChowClass(ring, tuple(tuple(row) for row in result))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> ChowClass:
        if exponent < 0:
            raise PreconditionError("Chow 類不支援負次方")
        result = self.ring.one()
        for _ in range(exponent):
            result = result * self
        return result

    def degree(self) -> int:
        """最高格 (h^{d-1} ζ^{r-1}) 的係數"""
        return self.coeffs[self.ring.d - 1][self.ring.r - 1]

    def to_json(self) -> dict:
        return {
            'd': self.ring.d,
            'r': self.ring.r,
            'chern': list(self.ring.chern),
            'coeffs': [list(row) for row in self.coeffs],
        }


# === Chern 類 ===
def total_chern_quotient(shape: BundleShape) -> list[int]:
    """
    c(Q_β) = (1 + ζ + ζ² + …)^k 的係數 γ_i = C(k+i−1, i)，i = 1..d−1

    使用範例：
        total_chern_quotient(BundleShape(d=4, k=3))   # [3, 6, 10]
    """
    return [comb(shape.k + i - 1, i) for i in range(1, shape.d)]


def dual_chern(gamma) -> list[int]:
    """對偶叢的 Chern 類：γ_i ↦ (−1)^i γ_i"""
    return [(-1) ** i * g for i, g in enumerate(gamma, start=1)]


def intersection_number(shape: BundleShape, gamma, s: int) -> int:
    """
    留數法計算 ζ^{r−1+s} h^{d−1−s} 的次數

    功能說明：
        在 Chow 環中把 ζ^{r−1+s} 對 Chern 關係化簡，
        再乘上 h^{d−1−s}，讀出 ζ^{r−1} h^{d−1} 的係數。

    Args:
        shape: 叢的形狀
        gamma: Chern 資料 γ_1, γ_2, …
        s: 0 ≤ s ≤ d−1

    Returns:
        交截數（整數）
    """
    return intersection_class(shape, gamma, s).degree()


def intersection_class(shape: BundleShape, gamma, s: int) -> ChowClass:
    """化簡後的 ζ^{r−1+s} h^{d−1−s}；只有 ζ^{r−1} h^{d−1} 的係數可能非零"""
    if not 0 <= s <= shape.d - 1:
        raise PreconditionError(f"s 必須介於 0 與 d−1 = {shape.d - 1} 之間，收到 {s}")
    ring = ChowRing.for_shape(shape, gamma)
    return ring.zeta() ** (shape.r - 1 + s) * ring.h() ** (shape.d - 1 - s)


# === 乘法序列 ===
@dataclass(frozen=True)
class ChernVariables:
    """
    形式變數 c_1..c_n 的多項式環 QQ[c_1..c_n]（字典序）

    提供 TruncSeries 所需的 zero / one / inv_int / __call__。
    """
    n: int

    @cached_property
    def poly_ring(self):
        return poly_ring([f'c{i}' for i in range(1, self.n + 1)], QQ, lex)[0]

    @property
    def gens(self) -> tuple:
        return self.poly_ring.gens

    @property
    def zero(self):
        return self.poly_ring.zero

    @property
    def one(self):
        return self.poly_ring.one

    def __call__(self, value):
        if isinstance(value, Fraction):
            value = QQ(value.numerator, value.denominator)
        return self.poly_ring(value)

    def inv_int(self, m: int):
        return QQ(1, m)

    def generic_series(self) -> TruncSeries:
        """1 + c_1 t + … + c_n t^n"""
        return TruncSeries(self, (self.one,) + tuple(self.gens))


def _to_fraction(coeff) -> Fraction:
    return Fraction(int(coeff.numerator), int(coeff.denominator))


@dataclass(frozen=True)
class MultSeq:
    """乘法序列：特徵級數 chi 與萬用多項式 K_0..K_n"""
    order: int
    chi: TruncSeries
    variables: ChernVariables
    polys: tuple

    def polynomial(self, m: int):
        return self.polys[m]

    def evaluate(self, m: int, values, field: Field):
        """
        在 c_i = values[i-1] 代入 K_m

        Args:
            m: 次數
            values: field 中的純量序列（長度 = order）
            field: 代入值所在的體
        """
        result = field.zero
        for monom, coeff in self.polys[m].terms():
            term = field(_to_fraction(coeff))
            for exponent, value in zip(monom, values):
                if exponent:
                    term = term * value ** exponent
            result = result + term
        return result

    def as_strings(self) -> list[str]:
        return [str(self.polys[m].as_expr()) for m in range(self.order + 1)]


def mult_seq_from_char_series(chi: TruncSeries, n: int) -> MultSeq:
    """
    由特徵級數建構乘法序列（對數路線）

    功能說明：
        λ_m 為 log χ 的係數，p_m = (−1)^{m−1} m [t^m] log(1 + c_1 t + …) 為以 c_i
        表示的冪和（Newton 恆等式），log K(f) = Σ λ_m p_m t^m，再取指數。

    Args:
        chi: 有理係數、常數項 1 的冪級數（階數 ≥ n）
        n: 截斷階數（≥ 1）

    Returns:
        MultSeq

    使用範例：
        K = mult_seq_from_char_series(TruncSeries.make(RATIONALS, [1, 1], 3), 3)
        K.polynomial(2)   # c2
    """
    if n < 1:
        raise PreconditionError(f"乘法序列階數需 ≥ 1，收到 {n}")
    if not isinstance(chi.ring, Field) or not chi.ring.is_rational:
        raise PreconditionError("特徵級數必須是有理係數")
    if chi.order < n:
        raise PreconditionError(f"特徵級數階數 {chi.order} 小於 {n}")
    if chi.coeffs[0] != 1:
        raise PreconditionError("特徵級數常數項必須為 1")
    chi = chi.truncate(n)
    lam = series_log(chi)

    variables = ChernVariables(n)
    log_generic = series_log(variables.generic_series())
    log_k = [variables.zero]
    for m in range(1, n + 1):
        power_sum = log_generic.coeffs[m] * ((-1) ** (m - 1) * m)
        log_k.append(power_sum * variables(lam.coeffs[m]))
    k_series = series_exp(TruncSeries(variables, tuple(log_k)))
    logger.debug(f"🔍 乘法序列建構完成 (n={n})")
    return MultSeq(n, chi, variables, k_series.coeffs)


def mult_seq_apply(seq: MultSeq, f: TruncSeries) -> TruncSeries:
    """Σ K_m(f_1..f_m) t^m；截斷到 min(seq.order, f.order)"""
    field = f.ring
    if f.coeffs[0] != field.one:
        raise PreconditionError("套用乘法序列需要常數項 = 1")
    order = min(seq.order, f.order)
    values = list(f.coeffs[1:seq.order + 1])
    values += [field.zero] * (seq.order - len(values))
    out = [field.one]
    for m in range(1, order + 1):
        out.append(seq.evaluate(m, values, field))
    return TruncSeries(field, tuple(out))


def identity_sequence(n: int) -> MultSeq:
    """χ = 1 + t：K_m = c_m"""
    return mult_seq_from_char_series(TruncSeries.make(RATIONALS, [1, 1], n), n)


def h_sequence(n: int) -> MultSeq:
    """χ = (1 + t)^{-1}：作為自同態即為求逆"""
    chi = series_inverse(TruncSeries.make(RATIONALS, [1, 1], n))
    return mult_seq_from_char_series(chi, n)


# === 典範類 ===
def canonical_class(shape: BundleShape) -> tuple[int, int]:
    """P_β 的典範類 −dζ − d′h，回傳 (ζ 係數, h 係數)"""
    return -shape.d, -shape.dprime


@dataclass(frozen=True)
class AnticanonicalRecord:
    zeta_coeff: int
    h_coeff: int
    check_value: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.check_value == self.expected

    def to_dict(self) -> dict:
        return {
            'class': [self.zeta_coeff, self.h_coeff],
            'check_value': self.check_value,
            'expected': self.expected,
            'ok': self.ok,
        }


def anticanonical_Y(shape: BundleShape) -> AnticanonicalRecord:
    """
    反典範類 Y = dζ + d′h，並以 Q_β 的 Chern 資料在 Chow 環中驗證
    Y·ζ^{r−2}h^{d−1} = d（平衡形狀 d′ = d + k 時即 Y·ζ^{d−2}h^{d−1}）
    """
    if shape.r < 2:
        raise PreconditionError("反典範檢查需要 r ≥ 2")
    zeta_coeff, h_coeff = (-c for c in canonical_class(shape))
    ring = ChowRing.for_shape(shape, total_chern_quotient(shape))
    y_class = ring.zeta() * zeta_coeff + ring.h() * h_coeff
    check = (y_class * ring.zeta() ** (shape.r - 2) * ring.h() ** (shape.d - 1)).degree()
    return AnticanonicalRecord(zeta_coeff, h_coeff, check, shape.d)


def canonical_dual_degree_one_agreement(k: int, order: int = 4) -> dict:
    """
    比較 (1+h)^{-k}（逐項對偶化）與 (1−h)^k 的係數

    Returns:
        {'sign_rule': [...], 'closed_form': [...], 'agree_through_degree': m}
    """
    sign_rule = TruncSeries.make(RATIONALS, [1, 1], order) ** (-k)
    closed_form = TruncSeries.make(RATIONALS, [1, -1], order) ** k
    agree = -1
    for m in range(order + 1):
        if sign_rule.coeffs[m] != closed_form.coeffs[m]:
            break
        agree = m
    return {
        'sign_rule': [int(c) for c in sign_rule.coeffs],
        'closed_form': [int(c) for c in closed_form.coeffs],
        'agree_through_degree': agree,
    }


# === Hirzebruch 曲面 ===
@dataclass(frozen=True)
class HirzClass:
    """Σ_e 上的類 a·C₀ + b·f"""
    e: int
    a: int
    b: int

    def __add__(self, other: HirzClass) -> HirzClass:
        if self.e != other.e:
            raise PreconditionError(f"類屬於不同的 Hirzebruch 曲面: Σ_{self.e} 與 Σ_{other.e}")
        return HirzClass(self.e, self.a + other.a, self.b + other.b)

    def to_dict(self) -> dict:
        return {'e': self.e, 'C0': self.a, 'f': self.b}


def hirz_intersect(e: int, c1: HirzClass, c2: HirzClass) -> int:
    """C₀² = −e, C₀·f = 1, f² = 0 的雙線性延拓"""
    if c1.e != e or c2.e != e:
        raise PreconditionError(f"類的 e 與 Σ_{e} 不符")
    return -e * c1.a * c2.a + c1.a * c2.b + c1.b * c2.a


def hirz_canonical(e: int) -> HirzClass:
    return HirzClass(e, -2, -(2 + e))


def hirz_anticanonical(e: int) -> HirzClass:
    return HirzClass(e, 2, e + 2)


def hirz_is_ample(cls: HirzClass) -> bool:
    """aC₀ + bf 在 Σ_e 上豐富 ⇔ a > 0 且 b > a·e"""
    return cls.a > 0 and cls.b > cls.a * cls.e


def hirz_adjunction_genus(e: int, y: HirzClass) -> int:
    """
    伴隨公式 2g − 2 = Y·(Y + K)

    Raises:
        CheckFailedError: Y·(Y + K) 為奇數
    """
    value = hirz_intersect(e, y, y + hirz_canonical(e))
    if value % 2:
        raise CheckFailedError(f"伴隨公式得到奇數 Y·(Y+K) = {value}")
    return 1 + value // 2
