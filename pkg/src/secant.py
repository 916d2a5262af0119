"""
割線切片模組
以乘法張量 H⁰(N) ⊗ H⁰(N′) → H⁰(L) 描述割線切片 Sec_{d,z}：
在 P H⁰(L)^* 的點上求 Φ 矩陣、取樣切片與子割線上的點，
並以所有 d×d 子式的 Jacobian 秩判定光滑性。

使用範例：
    import numpy as np
    from src.elliptic import Curve
    from src.secant import SecantConfig, sample_slice_point, singularity_verdict

    E = Curve.parse('0,1@Fp:10007')
    cfg = SecantConfig.standard(E, n=8, d=3)
    rng = np.random.default_rng(7)
    singularity_verdict(cfg, sample_slice_point(cfg, rng)).verdict   # 'smooth'
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from config import SAMPLING
from src.elliptic import (
    INFINITY,
    Curve,
    CurvePoint,
    Divisor,
    leading_term,
    multiplication_tensor,
    random_point,
    rr_basis,
    sigma,
)
from src.errors import CheckFailedError, NotOnSliceError, PreconditionError, SamplingExhaustedError
from src.exact_core import ExactMatrix
from src.pencil import PairingTensor

logger = logging.getLogger(__name__)

PROBE_KINDS = ('generic-slice', 'sec2-off-curve', 'curve-point', 'subsecant')


# === 設定 ===
@dataclass(frozen=True)
class SecantConfig:
    """
    割線切片的資料：E、n、d、D_N（次數 d）、D_N′（次數 n−d）以及乘法張量
    """
    curve: Curve
    n: int
    d: int
    divisor_n: Divisor
    divisor_nprime: Divisor

    def __post_init__(self):
        if self.d < 2:
            raise PreconditionError(f"割線切片需要 d ≥ 2，收到 d={self.d}")
        if 2 * self.d >= self.n:
            raise PreconditionError(f"割線切片需要 2d < n，收到 n={self.n}, d={self.d}")
        if self.divisor_n.degree != self.d:
            raise PreconditionError(f"deg D_N 必須為 d={self.d}，收到 {self.divisor_n.degree}")
        if self.divisor_nprime.degree != self.n - self.d:
            raise PreconditionError(f"deg D_N′ 必須為 n−d={self.n - self.d}，收到 {self.divisor_nprime.degree}")

    @classmethod
    def standard(cls, curve: Curve, n: int, d: int, divisor_n: Divisor | None = None) -> SecantConfig:
        """D_N 預設為 d·O，D_N′ 固定為 (n−d)·O"""
        if divisor_n is None:
            divisor_n = Divisor.point(INFINITY, d)
        return cls(curve, n, d, divisor_n, Divisor.point(INFINITY, n - d))

    @property
    def dprime(self) -> int:
        return self.n - self.d

    @property
    def codim(self) -> int:
        """dim Sec_{d,z} = 2d − 2，故餘維 = n − 1 − (2d − 2)"""
        return self.n - 2 * self.d + 1

    @cached_property
    def z(self) -> CurvePoint:
        return sigma(self.curve, self.divisor_n)

    @cached_property
    def target_basis(self) -> tuple:
        return rr_basis(self.curve, self.divisor_n + self.divisor_nprime).basis

    @cached_property
    def tensor(self) -> PairingTensor:
        return multiplication_tensor(self.curve, self.divisor_n, self.divisor_nprime)


# === 嵌入與 Φ ===
def embed_point(cfg: SecantConfig, pt: CurvePoint) -> tuple:
    """
    ev_pt 在 P H⁰(L)^* 中的齊次座標：
    H⁰(L) 基底在共同最小階數上的首項係數（其餘為 0）
    """
    terms = [leading_term(element, pt) for element in cfg.target_basis]
    lowest = min(order for order, _ in terms)
    zero = cfg.curve.field.zero
    return tuple(lead if order == lowest else zero for order, lead in terms)


def _require_nonzero(point) -> None:
    if not any(point):
        raise PreconditionError("環境空間中的點不能是零向量")


def phi_at(cfg: SecantConfig, point) -> ExactMatrix:
    """Φ(p)[i][j] = Σ_m T[i][j][m]·p_m，d × d′"""
    _require_nonzero(point)
    field = cfg.curve.field
    coords = [field(v) for v in point]
    rows = []
    for i in range(cfg.d):
        row = []
        for j in range(cfg.dprime):
            acc = field.zero
            for t, p in zip(cfg.tensor.entries[i][j], coords):
                if t and p:
                    acc = acc + t * p
            row.append(acc)
        rows.append(row)
    return ExactMatrix.from_rows(field, rows, cfg.dprime)


def membership_rank(cfg: SecantConfig, point) -> int:
    return phi_at(cfg, point).rank()


def combine(cfg: SecantConfig, points, weights) -> tuple:
    """Σ λ_i·embed_point(z_i)"""
    field = cfg.curve.field
    total = [field.zero] * cfg.n
    for pt, weight in zip(points, weights):
        if weight:
            total = [acc + weight * coord for acc, coord in zip(total, embed_point(cfg, pt))]
    return tuple(total)


# === 取樣 ===
def _distinct_points(cfg: SecantConfig, count: int, rng, exclude=()) -> list[CurvePoint]:
    points = []
    for _ in range(SAMPLING['MAX_ATTEMPTS']):
        if len(points) >= count:
            return points
        pt = random_point(cfg.curve, rng)
        if pt not in points and pt not in exclude:
            points.append(pt)
    raise SamplingExhaustedError(f"無法取樣 {count} 個相異曲線點")


def slice_tuple(cfg: SecantConfig, rng, fixed=()) -> list[CurvePoint]:
    """
    d 個相異點，和為 z；fixed 中的點保留在最前面，最後一點由群運算決定，碰撞時重抽
    """
    fixed = list(fixed)
    for attempt in range(SAMPLING['MAX_ATTEMPTS']):
        free = _distinct_points(cfg, cfg.d - 1 - len(fixed), rng, exclude=fixed)
        chosen = fixed + free
        partial = sigma(cfg.curve, Divisor.from_points(chosen))
        last = _subtract(cfg.curve, cfg.z, partial)
        if last not in chosen:
            return chosen + [last]
        logger.debug(f"⚠️ 切片點碰撞，重新取樣（第 {attempt + 1} 次）")
    raise SamplingExhaustedError("切片點取樣碰撞次數超過上限")


def _subtract(curve: Curve, p: CurvePoint, q: CurvePoint) -> CurvePoint:
    difference = Divisor.make([(p, 1), (q, -1)]) if p != q else Divisor()
    return sigma(curve, difference)


def _random_weights(cfg: SecantConfig, count: int, rng) -> list:
    return [cfg.curve.field.random(rng, nonzero=True) for _ in range(count)]


def sample_slice_point(cfg: SecantConfig, rng) -> tuple:
    """Sec_{d,z} 上的點：和為 z 的 d 個點之張成中的隨機組合"""
    points = slice_tuple(cfg, rng)
    return combine(cfg, points, _random_weights(cfg, cfg.d, rng))


def sample_subsecant_point(cfg: SecantConfig, r: int, rng) -> tuple:
    """Sec_r 上的點（1 ≤ r ≤ d−2 時亦落在切片內）"""
    if r < 1:
        raise PreconditionError(f"子割線需要 r ≥ 1，收到 r={r}")
    points = _distinct_points(cfg, r, rng)
    return combine(cfg, points, _random_weights(cfg, r, rng))


@dataclass(frozen=True)
class SliceWitness:
    point: tuple
    support: tuple


def slice_point_through(cfg: SecantConfig, base: CurvePoint, rng) -> SliceWitness:
    """
    經過曲線點 base 的切片點：補上 d−1 個點使和為 z，權重全部放在 base 上
    """
    points = slice_tuple(cfg, rng, fixed=[base])
    field = cfg.curve.field
    weights = [field.one] + [field.zero] * (len(points) - 1)
    return SliceWitness(combine(cfg, points, weights), tuple(points))


def sample_secant_off_curve(cfg: SecantConfig, rng) -> tuple:
    """切片內 Sec_{d−1} 上的點：和為 z 的 d 點中取前 d−1 點的隨機組合"""
    points = slice_tuple(cfg, rng)[:-1]
    return combine(cfg, points, _random_weights(cfg, len(points), rng))


# === Jacobian 與判定 ===
def _cofactors(matrix: ExactMatrix) -> list[list]:
    size = matrix.nrows
    field = matrix.field
    if size == 1:
        return [[field.one]]
    cofactors = []
    for i in range(size):
        row = []
        for j in range(size):
            rows = [r for r in range(size) if r != i]
            cols = [c for c in range(size) if c != j]
            minor = matrix.submatrix(rows, cols).det()
            row.append(minor if (i + j) % 2 == 0 else -minor)
        cofactors.append(row)
    return cofactors


def jacobian_rank_at(cfg: SecantConfig, point) -> int:
    """
    所有 d×d 子式在 p 的梯度所組成矩陣的秩

    ∂det(Φ_S)/∂p_m = Σ_{i, j∈S} cof_{ij}·T[i][S_j][m]
    """
    phi = phi_at(cfg, point)
    field = cfg.curve.field
    gradients = []
    for columns in combinations(range(cfg.dprime), cfg.d):
        cofactors = _cofactors(phi.submatrix(list(range(cfg.d)), list(columns)))
        gradient = [field.zero] * cfg.n
        for i in range(cfg.d):
            for jj, j in enumerate(columns):
                weight = cofactors[i][jj]
                if not weight:
                    continue
                fiber = cfg.tensor.entries[i][j]
                gradient = [g + weight * t for g, t in zip(gradient, fiber)]
        gradients.append(gradient)
    return ExactMatrix.from_rows(field, gradients, cfg.n).rank()


@dataclass(frozen=True)
class SecantVerdict:
    n: int
    d: int
    membership_rank: int
    jacobian_rank: int
    codim: int

    @property
    def verdict(self) -> str:
        return 'smooth' if self.jacobian_rank == self.codim else 'singular'

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'd': self.d,
            'membership_rank': self.membership_rank,
            'jacobian_rank': self.jacobian_rank,
            'codim': self.codim,
            'verdict': self.verdict,
        }


def singularity_verdict(cfg: SecantConfig, point) -> SecantVerdict:
    """
    smooth ⇔ Jacobian 秩 = codim；singular ⇔ 秩 < codim

    Raises:
        NotOnSliceError: rank Φ(p) > d − 1
        CheckFailedError: Jacobian 秩 > codim
    """
    rank = membership_rank(cfg, point)
    if rank > cfg.d - 1:
        raise NotOnSliceError(f"rank Φ(p) = {rank} > d − 1 = {cfg.d - 1}，點不在 Sec_{{d,z}} 上")
    jac = jacobian_rank_at(cfg, point)
    if jac > cfg.codim:
        raise CheckFailedError(f"Jacobian 秩 {jac} 超過餘維 {cfg.codim}")
    return SecantVerdict(cfg.n, cfg.d, rank, jac, cfg.codim)


def probe(cfg: SecantConfig, kind: str, rng) -> tuple[tuple, SecantVerdict]:
    """
    依 kind 取樣切片內的點並判定

    Args:
        kind: 'generic-slice' | 'sec2-off-curve' | 'curve-point' | 'subsecant'
    """
    if kind == 'generic-slice':
        point = sample_slice_point(cfg, rng)
    elif kind == 'sec2-off-curve':
        point = sample_secant_off_curve(cfg, rng)
    elif kind == 'curve-point':
        point = slice_point_through(cfg, random_point(cfg.curve, rng), rng).point
    elif kind == 'subsecant':
        point = sample_subsecant_point(cfg, max(1, cfg.d - 2), rng)
    else:
        raise PreconditionError(f"未知的探測種類 '{kind}'（可用：{', '.join(PROBE_KINDS)}）")
    verdict = singularity_verdict(cfg, point)
    logger.debug(f"🔍 {kind}: Φ 秩 {verdict.membership_rank}, Jacobian 秩 {verdict.jacobian_rank} → {verdict.verdict}")
    return point, verdict
