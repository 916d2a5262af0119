"""
Pencil 模組
把配對 β: V⊗W → V′ 表示為線性形式矩陣；對 dim V = 2 的 pencil 提供
精確的 1-generic 判定、P¹ 上 Q_β 的分裂型 (splitting type)、平凡直和項計數，
以及各個範例配對的產生器。

分裂型以轉置 pencil 的分次合衝 (syzygy) 維度計算：
κ(e) = dim{ e 次形式向量 v : Nv = 0 }，#{d_i ≤ e} = κ(e) − κ(e−1)。

使用範例：
    from src.pencil import identity_pairing, splitting_type

    P = identity_pairing(2, 2).to_pencil()
    splitting_type(P).degrees      # (1, 1)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from config import SAMPLING
from src.errors import CheckFailedError, NotOneGenericError, ParseError, PreconditionError, SamplingExhaustedError
from src.exact_core import BinaryForm, ExactMatrix, Field, UniPoly, binary_form_gcd

logger = logging.getLogger(__name__)

RATIONALS = Field(None)


# === 配對張量 ===
@dataclass(frozen=True)
class PairingTensor:
    """
    β(v_i, w_w) = Σ_j T[i][w][j] v′_j，維度 (d, k, dprime)
    """
    field: Field
    d: int
    k: int
    dprime: int
    entries: tuple

    @classmethod
    def make(cls, field: Field, entries) -> PairingTensor:
        entries = tuple(tuple(tuple(field(v) for v in fiber) for fiber in row) for row in entries)
        d = len(entries)
        k = len(entries[0]) if d else 0
        dprime = len(entries[0][0]) if k else 0
        if any(len(row) != k or any(len(fiber) != dprime for fiber in row) for row in entries):
            raise PreconditionError("配對張量的形狀不一致")
        return cls(field, d, k, dprime, entries)

    @classmethod
    def from_function(cls, field: Field, d: int, k: int, dprime: int, rule) -> PairingTensor:
        """rule(i, w, j) 回傳係數"""
        return cls.make(field, [[[rule(i, w, j) for j in range(dprime)] for w in range(k)] for i in range(d)])

    def flatten(self) -> ExactMatrix:
        """(d·k) × d′ 展平矩陣，列以 (i, w) 索引"""
        rows = [self.entries[i][w] for i in range(self.d) for w in range(self.k)]
        return ExactMatrix(self.field, tuple(rows), self.dprime)

    def image_rank(self) -> int:
        return self.flatten().rank()

    def image_codimension(self) -> int:
        return self.dprime - self.image_rank()

    def contract_w(self, w) -> ExactMatrix:
        """β(−, w) 的 d′ × d 矩陣"""
        zero = self.field.zero
        columns = []
        for i in range(self.d):
            col = [zero] * self.dprime
            for ww, coeff in enumerate(w):
                if coeff:
                    col = [c + coeff * t for c, t in zip(col, self.entries[i][ww])]
            columns.append(col)
        return ExactMatrix.from_columns(self.field, columns, self.dprime)

    def contract_v(self, v) -> ExactMatrix:
        """β(v, −) 的 d′ × k 矩陣"""
        zero = self.field.zero
        columns = []
        for w in range(self.k):
            col = [zero] * self.dprime
            for i, coeff in enumerate(v):
                if coeff:
                    col = [c + coeff * t for c, t in zip(col, self.entries[i][w])]
            columns.append(col)
        return ExactMatrix.from_columns(self.field, columns, self.dprime)

    def to_pencil(self) -> LinearPencil:
        """d = 2 的特化：A = β(v_0, −), B = β(v_1, −)"""
        if self.d != 2:
            raise PreconditionError(f"只有 d = 2 的配對才是 pencil，收到 d={self.d}")
        basis = [self.field.zero, self.field.zero]
        a_vec, b_vec = list(basis), list(basis)
        a_vec[0] = self.field.one
        b_vec[1] = self.field.one
        return LinearPencil(self.contract_v(a_vec), self.contract_v(b_vec))

    def to_json(self) -> dict:
        return {
            'd': self.d, 'k': self.k, 'dprime': self.dprime,
            'field': self.field.descriptor,
            'entries': [[[self.field.to_json(v) for v in fiber] for fiber in row] for row in self.entries],
        }


# === Pencil ===
@dataclass(frozen=True)
class LinearPencil:
    """d′ × k 矩陣對 (A, B)，代表 sA + tB"""
    A: ExactMatrix
    B: ExactMatrix

    def __post_init__(self):
        if self.A.shape != self.B.shape:
            raise PreconditionError(f"A 與 B 形狀不同: {self.A.shape} vs {self.B.shape}")
        if self.A.field != self.B.field:
            raise PreconditionError("A 與 B 屬於不同的體")

    @classmethod
    def make(cls, field: Field, a_rows, b_rows, k: int | None = None) -> LinearPencil:
        return cls(ExactMatrix.from_rows(field, a_rows, k), ExactMatrix.from_rows(field, b_rows, k))

    @property
    def field(self) -> Field:
        return self.A.field

    @property
    def dprime(self) -> int:
        return self.A.nrows

    @property
    def k(self) -> int:
        return self.A.ncols

    def evaluate(self, s, t) -> ExactMatrix:
        return self.A.scale(s) + self.B.scale(t)

    def column_flattening(self) -> ExactMatrix:
        """[A | B]，其欄空間即 Im β"""
        return self.A.hstack(self.B)

    def to_tensor(self) -> PairingTensor:
        return PairingTensor.from_function(
            self.field, 2, self.k, self.dprime,
            lambda i, w, j: (self.A if i == 0 else self.B)[j, w],
        )

    def to_json(self) -> dict:
        return {
            'dprime': self.dprime,
            'k': self.k,
            'A': self.A.to_json(),
            'B': self.B.to_json(),
            'field': self.field.descriptor,
        }

    @classmethod
    def from_json(cls, payload: dict) -> LinearPencil:
        """
        解析 {"dprime":…, "k":…, "A":[[…]], "B":[[…]], "field":"Q"|"Fp:10007"}
        """
        try:
            field = Field.parse(payload.get('field', 'Q'))
            dprime, k = int(payload['dprime']), int(payload['k'])
            pencil = cls.make(field, payload['A'], payload['B'], k)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"無法解析 pencil JSON: {e}") from e
        if pencil.dprime != dprime:
            raise ParseError(f"pencil 宣告 dprime={dprime}，但矩陣有 {pencil.dprime} 列")
        return pencil


@dataclass(frozen=True)
class SplittingType:
    """Q_β ≅ ⊕ O(d_i)，degrees 由大到小排列"""
    degrees: tuple

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    @property
    def trivial_count(self) -> int:
        return sum(1 for d in self.degrees if d == 0)

    def to_json(self) -> list:
        return list(self.degrees)


# === 存在性與產生器 ===
def exists_one_generic(d: int, k: int, dprime: int) -> bool:
    """1-generic 配對存在 ⇔ d + k ≤ d′ + 1"""
    if min(d, k, dprime) < 1:
        raise PreconditionError(f"維度必須為正: d={d}, k={k}, dprime={dprime}")
    return d + k <= dprime + 1


def sylvester_pairing(a: int, b: int, field: Field = RATIONALS) -> PairingTensor:
    """S^a ⊗ S^b → S^{a+b} 的乘法，單項式基底 x^{a−i} y^i"""
    if a < 0 or b < 0:
        raise PreconditionError("sylvester_pairing 需要 a, b ≥ 0")
    return PairingTensor.from_function(
        field, a + 1, b + 1, a + b + 1, lambda i, w, j: 1 if i + w == j else 0,
    )


def identity_pairing(d: int, k: int, field: Field = RATIONALS) -> PairingTensor:
    """V⊗W → V⊗W 的恆等配對（d′ = d·k）"""
    return PairingTensor.from_function(field, d, k, d * k, lambda i, w, j: 1 if j == i * k + w else 0)


def embedding_pairing(d: int, dprime: int, field: Field = RATIONALS) -> PairingTensor:
    """dim W = 1：V ≤ V′ 的嵌入"""
    if dprime < d:
        raise PreconditionError("嵌入需要 dprime ≥ d")
    return PairingTensor.from_function(field, d, 1, dprime, lambda i, w, j: 1 if i == j else 0)


def pad_target(pencil: LinearPencil, extra: int) -> LinearPencil:
    """在 V′ 增加 extra 個未使用的座標"""
    zeros = ExactMatrix.zeros(pencil.field, extra, pencil.k)
    return LinearPencil(pencil.A.vstack(zeros), pencil.B.vstack(zeros))


def factored_pencil(field: Field = RATIONALS) -> LinearPencil:
    """經由 3 維子空間分解的 1-generic 配對 C²⊗C² → C³ ⊂ C⁴"""
    return pad_target(sylvester_pairing(1, 1, field).to_pencil(), 1)


def block_diagonal(first: LinearPencil, second: LinearPencil) -> LinearPencil:
    """同一個 V 上兩個 pencil 的直和"""
    field = first.field

    def _block(m1: ExactMatrix, m2: ExactMatrix) -> ExactMatrix:
        top = m1.hstack(ExactMatrix.zeros(field, m1.nrows, m2.ncols))
        bottom = ExactMatrix.zeros(field, m2.nrows, m1.ncols).hstack(m2)
        return top.vstack(bottom)

    return LinearPencil(_block(first.A, second.A), _block(first.B, second.B))


def change_of_basis(pencil: LinearPencil, row_op: ExactMatrix, col_op: ExactMatrix) -> LinearPencil:
    """(R·A·C, R·B·C)：V′ 與 W 的基底變換"""
    return LinearPencil(row_op @ pencil.A @ col_op, row_op @ pencil.B @ col_op)


def random_matrix(field: Field, nrows: int, ncols: int, rng) -> ExactMatrix:
    return ExactMatrix.from_rows(field, [[field.random(rng) for _ in range(ncols)] for _ in range(nrows)], ncols)


def random_full_rank(field: Field, nrows: int, ncols: int, rng) -> ExactMatrix:
    """秩 = min(nrows, ncols) 的隨機矩陣"""
    for _ in range(SAMPLING['MAX_ATTEMPTS']):
        candidate = random_matrix(field, nrows, ncols, rng)
        if candidate.rank() == min(nrows, ncols):
            return candidate
    raise SamplingExhaustedError("無法取樣滿秩矩陣")


def random_one_generic_pencil(field: Field, dprime: int, k: int, rng, image_dim: int | None = None) -> LinearPencil:
    """
    拒絕取樣隨機 1-generic pencil

    Args:
        field: 體
        dprime, k: 形狀（需要 k ≤ dprime − 1）
        rng: numpy Generator
        image_dim: 若指定，先在 image_dim 維空間取樣，再以隨機單射嵌入 F^{dprime}
                   （產生 dprime − image_dim 個平凡直和項）
    """
    target = dprime if image_dim is None else image_dim
    if not exists_one_generic(2, k, target):
        raise PreconditionError(f"不存在 1-generic pencil: k={k}, 像的維度={target}")
    for attempt in range(SAMPLING['MAX_ATTEMPTS']):
        candidate = LinearPencil(random_matrix(field, target, k, rng), random_matrix(field, target, k, rng))
        if is_one_generic_pencil(candidate):
            break
        logger.debug(f"⚠️ 第 {attempt + 1} 次取樣不是 1-generic，重新取樣")
    else:
        raise SamplingExhaustedError("無法取樣 1-generic pencil")
    if image_dim is None or image_dim == dprime:
        return candidate
    embedding = random_full_rank(field, dprime, image_dim, rng)
    return LinearPencil(embedding @ candidate.A, embedding @ candidate.B)


# === 1-generic 判定 ===
def minor_form(pencil: LinearPencil, rows) -> BinaryForm:
    """
    k×k 子式 det(sA_S + tB_S) 作為 k 次二元形式

    以 τ = 0..k 的 det(A_S + τB_S) 插值出 s = 1 圖上的多項式。
    """
    field, k = pencil.field, pencil.k
    a_sub = pencil.A.submatrix(rows, range(k))
    b_sub = pencil.B.submatrix(rows, range(k))
    taus = list(range(k + 1))
    values = [(a_sub + b_sub.scale(tau)).det() for tau in taus]
    t_chart = UniPoly.interpolate(field, taus, values)
    padded = list(t_chart.coeffs) + [field.zero] * (k + 1 - len(t_chart.coeffs))
    return BinaryForm(field, k, tuple(reversed(padded)))


def is_one_generic_pencil(pencil: LinearPencil) -> bool:
    """
    sA + tB 在 P¹ 的每一點都有欄秩 k ⇔ 所有 k×k 子式的 gcd 為非零常數
    """
    if pencil.dprime < pencil.k:
        raise PreconditionError(f"需要 dprime ≥ k，收到 dprime={pencil.dprime}, k={pencil.k}")
    if pencil.k == 0:
        return True
    running = None
    for rows in combinations(range(pencil.dprime), pencil.k):
        form = minor_form(pencil, rows)
        if form.is_zero():
            continue
        running = form.normalized() if running is None else binary_form_gcd(running, form)
        if running.degree == 0:
            return True
    # 沒有非零子式（一般秩 < k）或有共同根
    return False


def is_one_generic_random(tensor: PairingTensor, trials: int | None = None, seed: int = 0) -> bool:
    """
    機率性 1-generic 測試（單側：False 一定正確）

    先測試標準基底向量，再測試 trials 個隨機非零向量。
    """
    trials = SAMPLING['GENERICITY_TRIALS'] if trials is None else trials
    rng = np.random.default_rng(seed)
    field = tensor.field

    def _basis(n: int) -> list[list]:
        return [[field.one if i == j else field.zero for i in range(n)] for j in range(n)]

    w_samples = _basis(tensor.k) + [field.random_vector(rng, tensor.k) for _ in range(trials)]
    for w in w_samples:
        if tensor.contract_w(w).rank() < tensor.d:
            return False
    v_samples = _basis(tensor.d) + [field.random_vector(rng, tensor.d) for _ in range(trials)]
    for v in v_samples:
        if tensor.contract_v(v).rank() < tensor.k:
            return False
    return True


# === 分裂型 ===
def _syzygy_matrix(pencil: LinearPencil, e: int) -> ExactMatrix:
    """
    N = sAᵀ + tBᵀ 作用在 e 次形式向量 v = Σ_a s^a t^{e−a} v_a 上的係數矩陣

    列：s^b t^{e+1−b} 的係數（b = 0..e+1，每塊 k 列）；欄：v_a（每塊 d′ 欄）
    """
    k, dprime, field = pencil.k, pencil.dprime, pencil.field
    a_t, b_t = pencil.A.transpose(), pencil.B.transpose()
    zero = field.zero
    rows = []
    for b in range(e + 2):
        for r in range(k):
            row = [zero] * (dprime * (e + 1))
            if 0 <= b - 1 <= e:
                offset = (b - 1) * dprime
                row[offset:offset + dprime] = a_t.rows[r]
            if b <= e:
                offset = b * dprime
                row[offset:offset + dprime] = b_t.rows[r]
            rows.append(tuple(row))
    return ExactMatrix(field, tuple(rows), dprime * (e + 1))


def splitting_type(pencil: LinearPencil) -> SplittingType:
    """
    Q_β ≅ ⊕ O(d_i) 的分裂型

    Raises:
        NotOneGenericError: pencil 不是 1-generic
        CheckFailedError: 計算出的型不滿足 r = d′ − k、Σ d_i = k
    """
    if not is_one_generic_pencil(pencil):
        raise NotOneGenericError("pencil 不是 1-generic，餘核不是局部自由的")
    k, dprime = pencil.k, pencil.dprime
    r = dprime - k
    degrees = []
    previous_kappa, previous_count = 0, 0
    for e in range(k + 1):
        unknowns = dprime * (e + 1)
        kappa = unknowns - _syzygy_matrix(pencil, e).rank()
        count = kappa - previous_kappa  # #{d_i ≤ e}
        degrees.extend([e] * (count - previous_count))
        previous_kappa, previous_count = kappa, count
        if count >= r:
            break
    result = SplittingType(tuple(sorted(degrees, reverse=True)))
    if result.rank != r or result.total != k or any(d < 0 for d in result.degrees):
        raise CheckFailedError(f"分裂型 {result.degrees} 不滿足 r={r}, Σ={k}")
    return result


def trivial_summand_count(pencil: LinearPencil, split: SplittingType | None = None) -> int:
    """
    分裂型中 0 的個數，並與 d′ − rank[A | B]（Im β 的餘維）交叉驗證

    Args:
        split: 已算好的分裂型；省略時重新計算
    """
    count = (split or splitting_type(pencil)).trivial_count
    codim = pencil.dprime - pencil.column_flattening().rank()
    if count != codim:
        raise CheckFailedError(f"平凡直和項 {count} 與像的餘維 {codim} 不符")
    return count


def hirzebruch_invariant(pencil: LinearPencil, split: SplittingType | None = None) -> int:
    """秩 2 時的 e = d_1 − d_2"""
    degrees = (split or splitting_type(pencil)).degrees
    if len(degrees) != 2:
        raise PreconditionError(f"Hirzebruch 不變量需要 r = 2，收到分裂型 {list(degrees)}")
    return degrees[0] - degrees[1]
