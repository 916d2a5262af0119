"""
精確運算核心模組
提供有理數體 Q 與質數體 F_p 上的精確純量、稠密矩陣線性代數、
單變數多項式、二元齊次形式 (binary form) 以及截斷冪級數。

所有值在建構後即不可變，所有運算皆為純函數，可在多個執行緒間自由共用。

使用範例：
    from src.exact_core import Field, ExactMatrix, mat_rank

    F = Field.parse('Q')
    M = ExactMatrix.from_rows(F, [[1, 2], [2, 4]])
    print(mat_rank(M))   # 1
"""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

from config import SAMPLING
from src.errors import ParseError, PreconditionError

logger = logging.getLogger(__name__)


# === 質數體元素 ===
def _residue(other, prime: int):
    """取出可與 ModP 運算的整數代表；無法運算時回傳 None"""
    if isinstance(other, ModP):
        if other.prime != prime:
            raise PreconditionError(f"不同質數體的元素不能混合運算: F_{prime} 與 F_{other.prime}")
        return other.value
    if isinstance(other, numbers.Integral):
        return int(other)
    return None


class ModP:
    """F_p 中的元素，值存於 [0, p)"""
    __slots__ = ('value', 'prime')

    def __init__(self, value: int, prime: int):
        self.value = int(value) % prime
        self.prime = prime

    def __add__(self, other):
        v = _residue(other, self.prime)
        if v is None:
            return NotImplemented
        return ModP(self.value + v, self.prime)

    __radd__ = __add__

    def __sub__(self, other):
        v = _residue(other, self.prime)
        if v is None:
            return NotImplemented
        return ModP(self.value - v, self.prime)

    def __rsub__(self, other):
        v = _residue(other, self.prime)
        if v is None:
            return NotImplemented
        return ModP(v - self.value, self.prime)

    def __mul__(self, other):
        v = _residue(other, self.prime)
        if v is None:
            return NotImplemented
        return ModP(self.value * v, self.prime)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = _residue(other, self.prime)
        if v is None:
            return NotImplemented
        if v % self.prime == 0:
            raise ZeroDivisionError(f"F_{self.prime} 中除以 0")
        return ModP(self.value * pow(v, -1, self.prime), self.prime)

    def __rtruediv__(self, other):
        v = _residue(other, self.prime)
        if v is None:
            return NotImplemented
        return ModP(v, self.prime) / self

    def __neg__(self):
        return ModP(-self.value, self.prime)

    def __pow__(self, exponent: int):
        if exponent < 0 and self.value == 0:
            raise ZeroDivisionError(f"F_{self.prime} 中 0 沒有反元素")
        return ModP(pow(self.value, exponent, self.prime), self.prime)

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.prime == other.prime and self.value == other.value
        if isinstance(other, numbers.Integral):
            return self.value == int(other) % self.prime
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.prime})"


# === 體描述 ===
@dataclass(frozen=True)
class Field:
    """
    精確體：prime 為 None 表示 Q，否則為 F_p（p > 3）

    使用範例：
        F = Field.parse('Fp:10007')
        a = F(3) / F(7)
        F.to_json(a)   # 整數代表
    """
    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None and (self.prime <= 3 or not _is_probable_prime(self.prime)):
            raise PreconditionError(f"質數體需要質數 p > 3，收到 {self.prime}")

    # --- 解析與格式化 ---
    @classmethod
    def parse(cls, text: str) -> Field:
        text = (text or '').strip()
        if text == 'Q':
            return cls(None)
        if text.startswith('Fp:'):
            try:
                return cls(int(text[3:]))
            except ValueError as e:
                raise ParseError(f"無法解析體描述 '{text}': {e}") from e
        raise ParseError(f"未知的體描述 '{text}'（應為 'Q' 或 'Fp:<p>'）")

    @property
    def descriptor(self) -> str:
        return 'Q' if self.prime is None else f'Fp:{self.prime}'

    @property
    def is_rational(self) -> bool:
        return self.prime is None

    # --- 純量建構 ---
    def __call__(self, value):
        if self.prime is None:
            if isinstance(value, ModP):
                raise PreconditionError("F_p 元素不能轉成有理數")
            if isinstance(value, str):
                try:
                    return Fraction(value.strip())
                except (ValueError, ZeroDivisionError) as e:
                    raise ParseError(f"無法解析有理數 '{value}'") from e
            if isinstance(value, numbers.Integral):
                return Fraction(int(value))
            if isinstance(value, Fraction):
                return value
            raise PreconditionError(f"無法轉換為有理數: {value!r}")

        if isinstance(value, ModP):
            if value.prime != self.prime:
                raise PreconditionError(f"元素屬於 F_{value.prime}，不屬於 F_{self.prime}")
            return value
        if isinstance(value, numbers.Integral):
            return ModP(int(value), self.prime)
        if isinstance(value, str):
            try:
                value = Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise ParseError(f"無法解析 F_{self.prime} 元素 '{value}'") from e
        if isinstance(value, Fraction):
            if value.denominator % self.prime == 0:
                raise PreconditionError(f"分母 {value.denominator} 在 F_{self.prime} 中為 0")
            return ModP(value.numerator, self.prime) / value.denominator
        raise PreconditionError(f"無法轉換為 F_{self.prime} 元素: {value!r}")

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def inv_int(self, m: int):
        """整數 m 的倒數（冪級數積分時使用）"""
        if self.prime is not None and m % self.prime == 0:
            raise PreconditionError(f"{m} 在 F_{self.prime} 中不可逆")
        return self(Fraction(1, m))

    def to_json(self, value):
        """純量轉為 JSON：F_p 與整數有理數輸出 int，其餘輸出 'a/b' 字串"""
        if self.prime is not None:
            return int(value)
        value = Fraction(value)
        if value.denominator == 1:
            return value.numerator
        return f'{value.numerator}/{value.denominator}'

    def random(self, rng, nonzero: bool = False):
        """
        以 numpy Generator 取樣隨機元素

        Args:
            rng: numpy.random.Generator
            nonzero: 是否排除 0
        """
        if self.prime is not None:
            low = 1 if nonzero else 0
            return ModP(int(rng.integers(low, self.prime)), self.prime)
        bound = SAMPLING['SMALL_INT_RANGE']
        while True:
            value = int(rng.integers(-bound, bound + 1))
            if value or not nonzero:
                return Fraction(value)

    def random_vector(self, rng, length: int, nonzero: bool = True) -> list:
        """長度為 length 的隨機向量；nonzero=True 時保證不為零向量"""
        while True:
            vec = [self.random(rng) for _ in range(length)]
            if not nonzero or any(vec):
                return vec

    def sqrt(self, value):
        """回傳某個平方根；不是平方數時回傳 None"""
        value = self(value)
        if self.prime is None:
            if value < 0:
                return None
            num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
            if num * num == value.numerator and den * den == value.denominator:
                return Fraction(num, den)
            return None
        root = _tonelli_shanks(value.value, self.prime)
        return None if root is None else ModP(root, self.prime)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _tonelli_shanks(a: int, p: int) -> int | None:
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


# === 消去法核心（內部以原生整數 / Fraction 運算） ===
def _raw_rows(field: Field, rows) -> list[list]:
    if field.prime is None:
        return [[Fraction(v) for v in row] for row in rows]
    return [[int(v) for v in row] for row in rows]


def _rref(field: Field, raw: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Gauss-Jordan 約化列梯形；回傳 (約化後的列, 主元欄位)"""
    a = [list(row) for row in raw]
    p = field.prime
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(a)) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        if p is None:
            inv = 1 / a[r][col]
            a[r] = [v * inv for v in a[r]]
        else:
            inv = pow(a[r][col], -1, p)
            a[r] = [v * inv % p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col]:
                factor = a[i][col]
                if p is None:
                    a[i] = [vi - factor * vr for vi, vr in zip(a[i], a[r])]
                else:
                    a[i] = [(vi - factor * vr) % p for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a, pivots


def _integer_rows(raw: list[list]) -> tuple[list[list[int]], int]:
    """將有理數列乘上分母的最小公倍數，回傳 (整數列, 各列倍數的乘積)"""
    scaled, scale_product = [], 1
    for row in raw:
        lcm = 1
        for v in row:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        scaled.append([int(v * lcm) for v in row])
        scale_product *= lcm
    return scaled, scale_product


def _bareiss(a: list[list[int]], ncols: int) -> tuple[int, int, int]:
    """
    無分數 (Bareiss) 消去法，原地修改 a

    Returns:
        (秩, 最後一個主元, 列交換的符號)
    """
    m = len(a)
    rank, prev, sign = 0, 1, 1
    for col in range(ncols):
        pivot = next((i for i in range(rank, m) if a[i][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[rank], a[pivot] = a[pivot], a[rank]
            sign = -sign
        for i in range(rank + 1, m):
            for j in range(col + 1, ncols):
                a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) // prev
            a[i][col] = 0
        prev = a[rank][col]
        rank += 1
        if rank == m:
            break
    return rank, prev, sign


# === 矩陣 ===
@dataclass(frozen=True)
class ExactMatrix:
    """
    稠密精確矩陣（列優先儲存）

    使用範例：
        M = ExactMatrix.from_rows(F, [[1, 1]])
        K = M.kernel()     # 欄向量為核空間基底
    """
    field: Field
    rows: tuple
    ncols: int

    @classmethod
    def from_rows(cls, field: Field, rows, ncols: int | None = None) -> ExactMatrix:
        rows = tuple(tuple(field(v) for v in row) for row in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(row) != ncols for row in rows):
            raise PreconditionError("矩陣各列長度不一致")
        return cls(field, rows, ncols)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> ExactMatrix:
        return cls(field, tuple((field.zero,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> ExactMatrix:
        return cls.from_rows(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, field: Field, columns, nrows: int) -> ExactMatrix:
        columns = [list(c) for c in columns]
        return cls.from_rows(field, [[c[i] for c in columns] for i in range(nrows)], len(columns))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(self.field, tuple(self.columns()), self.nrows)

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.ncols != other.nrows:
            raise PreconditionError(f"矩陣維度不相容: {self.shape} @ {other.shape}")
        zero = self.field.zero
        cols = other.columns()
        rows = []
        for row in self.rows:
            out = []
            for col in cols:
                acc = zero
                for a, b in zip(row, col):
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
            rows.append(tuple(out))
        return ExactMatrix(self.field, tuple(rows), other.ncols)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape != other.shape:
            raise PreconditionError("矩陣維度不相容")
        return ExactMatrix(self.field, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)
        ), self.ncols)

    def scale(self, c) -> ExactMatrix:
        c = self.field(c)
        return ExactMatrix(self.field, tuple(tuple(c * v for v in row) for row in self.rows), self.ncols)

    def apply(self, vector) -> tuple:
        """矩陣乘以向量"""
        zero = self.field.zero
        out = []
        for row in self.rows:
            acc = zero
            for a, b in zip(row, vector):
                acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def hstack(self, other: ExactMatrix) -> ExactMatrix:
        if self.nrows != other.nrows:
            raise PreconditionError("水平合併需要相同列數")
        return ExactMatrix(self.field, tuple(r1 + r2 for r1, r2 in zip(self.rows, other.rows)),
                           self.ncols + other.ncols)

    def vstack(self, other: ExactMatrix) -> ExactMatrix:
        if self.ncols != other.ncols:
            raise PreconditionError("垂直合併需要相同欄數")
        return ExactMatrix(self.field, self.rows + other.rows, self.ncols)

    def submatrix(self, row_indices, col_indices) -> ExactMatrix:
        col_indices = list(col_indices)
        return ExactMatrix(self.field, tuple(
            tuple(self.rows[i][j] for j in col_indices) for i in row_indices
        ), len(col_indices))

    def is_zero(self) -> bool:
        return not any(v for row in self.rows for v in row)

    # --- 線性代數 ---
    def rank(self) -> int:
        if not self.rows or self.ncols == 0:
            return 0
        raw = _raw_rows(self.field, self.rows)
        if self.field.prime is None:
            ints, _ = _integer_rows(raw)
            return _bareiss(ints, self.ncols)[0]
        return len(_rref(self.field, raw, self.ncols)[1])

    def kernel(self) -> ExactMatrix:
        """核空間基底，以欄向量排列（ncols × nullity）"""
        n = self.ncols
        if not self.rows:
            return ExactMatrix.identity(self.field, n)
        reduced, pivots = _rref(self.field, _raw_rows(self.field, self.rows), n)
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for f in free:
            vec = [0] * n
            vec[f] = 1
            for r, pc in enumerate(pivots):
                vec[pc] = -reduced[r][f]
            basis.append(vec)
        if not basis:
            return ExactMatrix(self.field, tuple(() for _ in range(n)), 0)
        return ExactMatrix.from_columns(self.field, basis, n)

    def solve(self, rhs) -> tuple | None:
        """解 M·x = rhs；無解回傳 None，多解時自由變數取 0"""
        if len(rhs) != self.nrows:
            raise PreconditionError("右手邊長度與列數不符")
        n = self.ncols
        augmented = [list(row) + [self.field(b)] for row, b in zip(self.rows, rhs)]
        reduced, pivots = _rref(self.field, _raw_rows(self.field, augmented), n + 1)
        if n in pivots:
            return None
        solution = [0] * n
        for r, pc in enumerate(pivots):
            solution[pc] = reduced[r][n]
        return tuple(self.field(v) for v in solution)

    def det(self):
        if self.nrows != self.ncols:
            raise PreconditionError("行列式需要方陣")
        n = self.nrows
        if n == 0:
            return self.field.one
        raw = _raw_rows(self.field, self.rows)
        if self.field.prime is None:
            ints, scale_product = _integer_rows(raw)
            rank, last, sign = _bareiss(ints, n)
            if rank < n:
                return Fraction(0)
            return Fraction(sign * last, scale_product)
        p = self.field.prime
        a = raw
        result = 1
        for col in range(n):
            pivot = next((i for i in range(col, n) if a[i][col]), None)
            if pivot is None:
                return self.field.zero
            if pivot != col:
                a[col], a[pivot] = a[pivot], a[col]
                result = -result
            result = result * a[col][col] % p
            inv = pow(a[col][col], -1, p)
            for i in range(col + 1, n):
                if a[i][col]:
                    factor = a[i][col] * inv % p
                    a[i] = [(vi - factor * vc) % p for vi, vc in zip(a[i], a[col])]
        return ModP(result, p)

    def to_json(self) -> list:
        return [[self.field.to_json(v) for v in row] for row in self.rows]


def mat_rank(matrix: ExactMatrix) -> int:
    """列空間維度"""
    return matrix.rank()


def mat_kernel(matrix: ExactMatrix) -> ExactMatrix:
    """核空間基底（欄向量）；M·K = 0 且欄數 = cols − rank"""
    return matrix.kernel()


# === 單變數多項式 ===
@dataclass(frozen=True)
class UniPoly:
    """
    單變數多項式，係數由低次到高次，末尾不含 0

    使用範例：
        x = UniPoly.x(F)
        f = x * x - UniPoly.constant(F, 1)
        f.gcd(x - UniPoly.constant(F, 1))   # x - 1
    """
    field: Field
    coeffs: tuple

    @classmethod
    def make(cls, field: Field, coeffs) -> UniPoly:
        values = [field(c) for c in coeffs]
        while values and not values[-1]:
            values.pop()
        return cls(field, tuple(values))

    @classmethod
    def zero(cls, field: Field) -> UniPoly:
        return cls(field, ())

    @classmethod
    def constant(cls, field: Field, c) -> UniPoly:
        return cls.make(field, [c])

    @classmethod
    def x(cls, field: Field) -> UniPoly:
        return cls.make(field, [0, 1])

    @classmethod
    def linear(cls, field: Field, root) -> UniPoly:
        """x - root"""
        return cls.make(field, [-field(root), 1])

    @classmethod
    def interpolate(cls, field: Field, xs, ys) -> UniPoly:
        """Lagrange 插值：通過 (xs[i], ys[i]) 的唯一次數 < len(xs) 多項式"""
        xs = [field(v) for v in xs]
        result = cls.zero(field)
        for i, (xi, yi) in enumerate(zip(xs, ys)):
            if not yi:
                continue
            basis = cls.constant(field, yi)
            denom = field.one
            for j, xj in enumerate(xs):
                if j != i:
                    basis = basis * cls.linear(field, xj)
                    denom = denom * (xi - xj)
            result = result + basis.scale(field.one / denom)
        return result

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        if not self.coeffs:
            return self.field.zero
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: UniPoly) -> UniPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        zero = self.field.zero
        a = self.coeffs + (zero,) * (n - len(self.coeffs))
        b = other.coeffs + (zero,) * (n - len(other.coeffs))
        return UniPoly.make(self.field, [u + v for u, v in zip(a, b)])

    def __neg__(self) -> UniPoly:
        return UniPoly(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other) -> UniPoly:
        if not isinstance(other, UniPoly):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return UniPoly.make(self.field, out)

    def scale(self, c) -> UniPoly:
        c = self.field(c)
        return UniPoly.make(self.field, [c * v for v in self.coeffs])

    def __pow__(self, n: int) -> UniPoly:
        result = UniPoly.constant(self.field, 1)
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        if other.is_zero():
            raise ZeroDivisionError("多項式除以 0")
        remainder = list(self.coeffs)
        q = [self.field.zero] * max(0, len(remainder) - len(other.coeffs) + 1)
        inv_lead = self.field.one / other.leading
        dg = other.degree
        while len(remainder) - 1 >= dg and remainder:
            shift = len(remainder) - 1 - dg
            factor = remainder[-1] * inv_lead
            q[shift] = factor
            for j, c in enumerate(other.coeffs):
                remainder[shift + j] = remainder[shift + j] - factor * c
            remainder.pop()
            while remainder and not remainder[-1]:
                remainder.pop()
        return UniPoly.make(self.field, q), UniPoly.make(self.field, remainder)

    def __floordiv__(self, other: UniPoly) -> UniPoly:
        return self.divmod(other)[0]

    def __mod__(self, other: UniPoly) -> UniPoly:
        return self.divmod(other)[1]

    def exact_div(self, other: UniPoly) -> UniPoly:
        q, r = self.divmod(other)
        if not r.is_zero():
            raise PreconditionError("多項式不能整除")
        return q

    def monic(self) -> UniPoly:
        if self.is_zero():
            return self
        return self.scale(self.field.one / self.leading)

    def gcd(self, other: UniPoly) -> UniPoly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, value):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def root_multiplicity(self, root) -> tuple[int, UniPoly]:
        """回傳 (x - root) 的重數 m 以及 self / (x - root)^m"""
        if self.is_zero():
            raise PreconditionError("零多項式沒有定義根的重數")
        linear = UniPoly.linear(self.field, root)
        count, current = 0, self
        while not current(self.field(root)):
            current = current.exact_div(linear)
            count += 1
        return count, current

    def derivative(self) -> UniPoly:
        return UniPoly.make(self.field, [c * i for i, c in enumerate(self.coeffs)][1:])


# === 二元齊次形式 ===
@dataclass(frozen=True)
class BinaryForm:
    """
    s, t 的齊次形式：coeffs[j] 為 s^j t^(degree-j) 的係數

    使用範例：
        f = BinaryForm.make(F, 2, [0, 0, 1])   # s²
        g = BinaryForm.make(F, 2, [0, 1, 0])   # s·t
        binary_form_gcd(f, g)                  # s
    """
    field: Field
    degree: int
    coeffs: tuple

    @classmethod
    def make(cls, field: Field, degree: int, coeffs) -> BinaryForm:
        coeffs = [field(c) for c in coeffs]
        if len(coeffs) != degree + 1:
            raise PreconditionError(f"{degree} 次形式需要 {degree + 1} 個係數")
        return cls(field, degree, tuple(coeffs))

    @classmethod
    def from_s_chart(cls, poly: UniPoly, degree: int) -> BinaryForm:
        """把 f(s, 1) 齊次化為 degree 次形式"""
        if poly.degree > degree:
            raise PreconditionError("齊次化次數小於多項式次數")
        zero = poly.field.zero
        coeffs = list(poly.coeffs) + [zero] * (degree + 1 - len(poly.coeffs))
        return cls(poly.field, degree, tuple(coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def s_chart(self) -> UniPoly:
        """t = 1 的去齊次化"""
        return UniPoly.make(self.field, self.coeffs)

    def t_chart(self) -> UniPoly:
        """s = 1 的去齊次化（t 的多項式）"""
        return UniPoly.make(self.field, reversed(self.coeffs))

    def t_valuation(self) -> int:
        """整除此形式的 t 的最高次方"""
        if self.is_zero():
            raise PreconditionError("零形式沒有 t 賦值")
        return self.degree - self.s_chart().degree

    def __call__(self, s, t):
        acc = self.field.zero
        for j, c in enumerate(self.coeffs):
            if c:
                acc = acc + c * s ** j * t ** (self.degree - j)
        return acc

    def __mul__(self, other: BinaryForm) -> BinaryForm:
        product = self.s_chart() * other.s_chart()
        return BinaryForm.from_s_chart(product, self.degree + other.degree)

    def normalized(self) -> BinaryForm:
        """對 s 首一化；純 t 次方時對 t 首一化"""
        lead = self.s_chart().leading
        return BinaryForm(self.field, self.degree, tuple(c / lead for c in self.coeffs))

    def exact_div(self, other: BinaryForm) -> BinaryForm:
        """齊次整除；不能整除時拋出 PreconditionError"""
        if other.is_zero():
            raise ZeroDivisionError("除以零形式")
        if self.is_zero():
            return BinaryForm.from_s_chart(UniPoly.zero(self.field), self.degree - other.degree)
        v_self, v_other = self.t_valuation(), other.t_valuation()
        if v_other > v_self or other.degree > self.degree:
            raise PreconditionError("形式不能整除")
        quotient = self.s_chart().exact_div(other.s_chart())
        return BinaryForm.from_s_chart(quotient, self.degree - other.degree)

    def divides(self, other: BinaryForm) -> bool:
        try:
            other.exact_div(self)
        except PreconditionError:
            return False
        return True


def binary_form_gcd(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """
    二元形式的最大公因式

    功能說明：
        兩個形式都寫成 t^v · H(s, t)，其中 H 不被 t 整除；
        在 s 圖 (t = 1) 中求 H 的 gcd，再乘回共同的 t 次方。

    Returns:
        對 s 首一化的 gcd（若只剩 t 的次方則對 t 首一化）
    """
    if f.field != g.field:
        raise PreconditionError("形式屬於不同的體")
    if f.is_zero() and g.is_zero():
        raise PreconditionError("兩個形式都是 0，gcd 無定義")
    if f.is_zero():
        return g.normalized()
    if g.is_zero():
        return f.normalized()
    shared_t = min(f.t_valuation(), g.t_valuation())
    chart_gcd = f.s_chart().gcd(g.s_chart())
    return BinaryForm.from_s_chart(chart_gcd, chart_gcd.degree + shared_t).normalized()


# === 截斷冪級數 ===
@dataclass(frozen=True)
class TruncSeries:
    """
    截斷於 t^order 的冪級數

    ring 提供 zero / one / inv_int(m) / __call__(int)；可以是 Field，
    也可以是 chow 模組中的符號多項式環。
    """
    ring: object
    coeffs: tuple

    @classmethod
    def make(cls, ring, coeffs, order: int) -> TruncSeries:
        values = [ring(c) for c in list(coeffs)[:order + 1]]
        values += [ring.zero] * (order + 1 - len(values))
        return cls(ring, tuple(values))

    @classmethod
    def one(cls, ring, order: int) -> TruncSeries:
        return cls.make(ring, [1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, m: int):
        return self.coeffs[m]

    def _check(self, other: TruncSeries) -> int:
        if self.ring != other.ring:
            raise PreconditionError("冪級數屬於不同的係數環")
        return min(self.order, other.order)

    def __add__(self, other: TruncSeries) -> TruncSeries:
        n = self._check(other)
        return TruncSeries(self.ring, tuple(self.coeffs[m] + other.coeffs[m] for m in range(n + 1)))

    def __sub__(self, other: TruncSeries) -> TruncSeries:
        n = self._check(other)
        return TruncSeries(self.ring, tuple(self.coeffs[m] - other.coeffs[m] for m in range(n + 1)))

    def __mul__(self, other: TruncSeries) -> TruncSeries:
        n = self._check(other)
        out = []
        for m in range(n + 1):
            acc = self.ring.zero
            for i in range(m + 1):
                acc = acc + self.coeffs[i] * other.coeffs[m - i]
            out.append(acc)
        return TruncSeries(self.ring, tuple(out))

    def __pow__(self, exponent: int) -> TruncSeries:
        base = self if exponent >= 0 else series_inverse(self)
        result = TruncSeries.one(self.ring, self.order)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def truncate(self, order: int) -> TruncSeries:
        return TruncSeries(self.ring, self.coeffs[:order + 1])


def series_inverse(f: TruncSeries) -> TruncSeries:
    """常數項為 1 的冪級數之乘法反元素"""
    ring = f.ring
    if f.coeffs[0] != ring.one:
        raise PreconditionError("求逆需要常數項 = 1")
    g = [ring.one]
    for m in range(1, f.order + 1):
        acc = ring.zero
        for j in range(1, m + 1):
            acc = acc + f.coeffs[j] * g[m - j]
        g.append(-acc)
    return TruncSeries(ring, tuple(g))


def series_log(f: TruncSeries) -> TruncSeries:
    """log f = ∫ f'/f，需要常數項 = 1"""
    ring = f.ring
    if f.coeffs[0] != ring.one:
        raise PreconditionError("對數需要常數項 = 1")
    n = f.order
    if n == 0:
        return TruncSeries(ring, (ring.zero,))
    derivative = TruncSeries(ring, tuple(f.coeffs[m + 1] * (m + 1) for m in range(n)))
    quotient = derivative * series_inverse(f.truncate(n - 1))
    out = [ring.zero] + [quotient.coeffs[m - 1] * ring.inv_int(m) for m in range(1, n + 1)]
    return TruncSeries(ring, tuple(out))


def series_exp(g: TruncSeries) -> TruncSeries:
    """exp g，需要常數項 = 0；遞迴 m·e_m = Σ j·g_j·e_(m-j)"""
    ring = g.ring
    if g.coeffs[0] != ring.zero:
        raise PreconditionError("指數需要常數項 = 0")
    e = [ring.one]
    for m in range(1, g.order + 1):
        acc = ring.zero
        for j in range(1, m + 1):
            acc = acc + g.coeffs[j] * e[m - j] * j
        e.append(acc * ring.inv_int(m))
    return TruncSeries(ring, tuple(e))
