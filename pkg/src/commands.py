"""
服務層模組
命令列與 HTTP API 共用的計算入口；每個 *_report 函數回傳純資料 dict，
safe_call 把例外轉換為 {'success': False, 'error': {...}, 'exit_code': …}。

使用範例：
    from src.commands import chern_report, safe_call

    outcome = safe_call(chern_report, d=2, k=2)
    outcome['result']['intersections']    # [1, -2]
"""

import logging

import numpy as np

from config import DEFAULTS
from src.chow import BundleShape, dual_chern, intersection_class, intersection_number, total_chern_quotient
from src.elliptic import Curve, Divisor, leaf_classify
from src.errors import LeafToolkitError, PreconditionError
from src.pencil import LinearPencil, hirzebruch_invariant, splitting_type, trivial_summand_count
from src.secant import PROBE_KINDS, SecantConfig, probe
from src.verification import run_suites

logger = logging.getLogger(__name__)


def safe_call(func, **kwargs) -> dict:
    """
    執行服務函數並包裝結果

    Returns:
        成功：{'success': True, 'result': dict}
        失敗：{'success': False, 'error': {'type', 'message'}, 'exit_code': 1 | 2}
    """
    try:
        return {'success': True, 'result': func(**kwargs)}
    except LeafToolkitError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return {'success': False, 'error': e.to_dict(), 'exit_code': e.exit_code}


# === chern ===
def chern_report(d: int, k: int, s: int | None = None) -> dict:
    """Q_β 的 Chern 資料與（對偶）交截數；指定 s 時只回傳該項"""
    shape = BundleShape(d=d, k=k)
    gamma = total_chern_quotient(shape)
    dual = dual_chern(gamma)
    report = {'d': shape.d, 'k': shape.k, 'dprime': shape.dprime, 'chern': gamma}
    if s is None:
        report['intersections'] = [intersection_number(shape, gamma, i) for i in range(shape.d)]
        report['dual_intersections'] = [intersection_number(shape, dual, i) for i in range(shape.d)]
    else:
        report['s'] = s
        report['intersection'] = intersection_number(shape, gamma, s)
        report['intersection_class'] = intersection_class(shape, gamma, s).to_json()
        report['dual_intersection'] = intersection_number(shape, dual, s)
    return report


# === splitting ===
def splitting_report(pencil_payload: dict, field_text: str | None = None) -> dict:
    """
    Args:
        pencil_payload: pencil JSON 物件
        field_text: 覆寫 JSON 內的 field（例如命令列的 --field）
    """
    if not isinstance(pencil_payload, dict):
        raise PreconditionError("pencil 必須是 JSON 物件")
    if field_text:
        pencil_payload = {**pencil_payload, 'field': field_text}
    pencil = LinearPencil.from_json(pencil_payload)
    split = splitting_type(pencil)
    report = {
        'field': pencil.field.descriptor,
        'dprime': pencil.dprime,
        'k': pencil.k,
        'splitting_type': split.to_json(),
        'trivial_summands': trivial_summand_count(pencil, split),
        'image_rank': pencil.column_flattening().rank(),
    }
    if split.rank == 2:
        report['hirzebruch_e'] = hirzebruch_invariant(pencil, split)
    return report


# === classify ===
def classify_report(curve_text: str, divisor_text: str, divisor_prime_text: str) -> dict:
    curve = Curve.parse(curve_text)
    divisor = Divisor.parse(curve, divisor_text)
    divisor_prime = Divisor.parse(curve, divisor_prime_text)
    record = leaf_classify(curve, divisor, divisor_prime)
    return {
        'curve': curve.descriptor,
        'D': divisor.to_text(curve.field),
        'Dprime': divisor_prime.to_text(curve.field),
        **record.to_dict(),
    }


# === secant ===
def default_curve_text(field_text: str | None = None) -> str:
    """y² = x³ + 1"""
    return f"0,1@{field_text or DEFAULTS['FIELD']}"


def secant_report(curve_text: str, n: int, d: int, seed: int, divisor_text: str | None = None, probes=None) -> dict:
    """
    依序執行各探測（共用同一個以 seed 初始化的產生器）

    Args:
        divisor_text: D_N 的除子文字（次數 d），省略時為 d·O
        probes: 探測種類序列，省略時執行全部四種
    """
    curve = Curve.parse(curve_text)
    divisor_n = Divisor.parse(curve, divisor_text) if divisor_text else None
    cfg = SecantConfig.standard(curve, n, d, divisor_n)
    kinds = list(probes) if probes else list(PROBE_KINDS)
    rng = np.random.default_rng(seed)
    results = []
    for kind in kinds:
        _, verdict = probe(cfg, kind, rng)
        results.append({'probe': kind, **verdict.to_dict()})
    report = {
        'curve': curve.descriptor,
        'n': n,
        'd': d,
        'codim': cfg.codim,
        'z': cfg.z.to_text(curve.field),
        'probes': results,
    }
    if len(results) == 1:
        report.update({key: value for key, value in results[0].items() if key != 'probe'})
    return report


# === verify ===
def verify_report(suite: str | None, seed: int, max_workers: int | None = None) -> dict:
    return run_suites(suite, seed, max_workers)
