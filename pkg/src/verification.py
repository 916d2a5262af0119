"""
驗證套件模組
每個檢查對應一條驗收條件；以 @check 註冊到 chow / pencil / elliptic / secant 四個套件。
run_suites 以 ThreadPoolExecutor 並行執行，每個檢查的種子由主種子與檢查名稱導出，
因此報告與執行順序無關、可完全重現。

使用範例：
    from src.verification import run_suites

    report = run_suites('chow', seed=20240521)
    report['passed']      # True
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from math import comb

import numpy as np

from config import DEFAULTS, VERIFY_SIZES, derive_seed
from src.chow import (
    BundleShape,
    HirzClass,
    anticanonical_Y,
    canonical_class,
    dual_chern,
    h_sequence,
    hirz_adjunction_genus,
    hirz_anticanonical,
    hirz_canonical,
    hirz_intersect,
    hirz_is_ample,
    intersection_number,
    mult_seq_apply,
    mult_seq_from_char_series,
    total_chern_quotient,
)
from src.elliptic import (
    INFINITY,
    Divisor,
    divisor_bound_holds,
    divisor_with_sum,
    is_surjective,
    leaf_classify,
    lin_equiv,
    miller_function,
    pairing_tensor,
    random_curve,
    random_divisor,
    random_point,
    rr_basis,
    scalar_mul,
    sigma,
    verify_miller,
    whensurj_predict,
)
from src.errors import CheckFailedError, LeafToolkitError, PreconditionError
from src.exact_core import Field, TruncSeries, series_inverse
from src.pencil import (
    RATIONALS,
    block_diagonal,
    embedding_pairing,
    factored_pencil,
    identity_pairing,
    random_one_generic_pencil,
    splitting_type,
    sylvester_pairing,
)
from src.secant import (
    SecantConfig,
    membership_rank,
    probe,
    sample_slice_point,
    sample_subsecant_point,
    singularity_verdict,
)

logger = logging.getLogger(__name__)

SUITES = ('chow', 'pencil', 'elliptic', 'secant')
REGISTRY = {}


def check(suite: str, name: str):
    """註冊檢查函數；函數接收 numpy Generator，回傳細節 dict，失敗時拋出 CheckFailedError"""
    def decorator(func):
        REGISTRY[f'{suite}.{name}'] = (suite, func)
        return func
    return decorator


def expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailedError(message)


def _verify_field() -> Field:
    return Field.parse(VERIFY_SIZES['FIELD'])


def _sweep():
    d_low, d_high = VERIFY_SIZES['SWEEP_D']
    k_low, k_high = VERIFY_SIZES['SWEEP_K']
    for d in range(d_low, d_high + 1):
        for k in range(k_low, k_high + 1):
            yield BundleShape(d=d, k=k)


def _random_unit_series(field: Field, order: int, rng) -> TruncSeries:
    return TruncSeries.make(field, [1] + [field.random(rng) for _ in range(order)], order)


# === chow ===
@check('chow', 'intersection_sweep')
def check_intersection_sweep(rng) -> dict:
    count = 0
    for shape in _sweep():
        gamma = total_chern_quotient(shape)
        dual = dual_chern(gamma)
        for s in range(shape.d):
            expected = comb(shape.k, s)
            value = intersection_number(shape, gamma, s)
            expect(value == (-1) ** s * expected, f"{shape.to_dict()} s={s}: {value} ≠ {(-1) ** s * expected}")
            value = intersection_number(shape, dual, s)
            expect(value == expected, f"對偶 {shape.to_dict()} s={s}: {value} ≠ {expected}")
            count += 2
    return {'numbers_checked': count}


@check('chow', 'multiplicative_sequence')
def check_multiplicative_sequence(rng) -> dict:
    order = VERIFY_SIZES['SERIES_ORDER']
    samples = VERIFY_SIZES['SERIES_SAMPLES']
    field = _verify_field()
    inverse_seq = h_sequence(order)

    for _ in range(samples):
        f = _random_unit_series(field, order, rng)
        expect(mult_seq_apply(inverse_seq, f) == series_inverse(f), "H 序列不等於級數求逆")

    evaluated = 0
    for shape in _sweep():
        gamma = total_chern_quotient(shape)
        values = [RATIONALS(g) for g in gamma] + [RATIONALS.zero] * (order - len(gamma))
        for s in range(1, shape.d):
            h_value = inverse_seq.evaluate(s, values, RATIONALS)
            expect(h_value == intersection_number(shape, gamma, s), f"H_{s} 在 {shape.to_dict()} 不符")
            evaluated += 1

    chi = TruncSeries.make(RATIONALS, [1, 1, 1], order)
    seq = mult_seq_from_char_series(chi, order)
    for _ in range(samples):
        f = _random_unit_series(field, order, rng)
        g = _random_unit_series(field, order, rng)
        expect(mult_seq_apply(seq, f * g) == mult_seq_apply(seq, f) * mult_seq_apply(seq, g), "K(fg) ≠ K(f)K(g)")
    return {'inversion_samples': samples, 'h_evaluations': evaluated, 'multiplicativity_samples': samples}


@check('chow', 'anticanonical')
def check_anticanonical(rng) -> dict:
    count = 0
    for shape in _sweep():
        record = anticanonical_Y(shape)
        zeta_coeff, h_coeff = canonical_class(shape)
        expect((record.zeta_coeff, record.h_coeff) == (-zeta_coeff, -h_coeff), f"Y ≠ −K 於 {shape.to_dict()}")
        expect(record.ok, f"Y·ζ^(d−2)h^(d−1) = {record.check_value} ≠ {shape.d} 於 {shape.to_dict()}")
        count += 1
    return {'shapes_checked': count}


@check('chow', 'hirzebruch_lattice')
def check_hirzebruch_lattice(rng) -> dict:
    table = {}
    for e in (0, 1, 2):
        c0, fiber = HirzClass(e, 1, 0), HirzClass(e, 0, 1)
        expect(hirz_intersect(e, c0, c0) == -e, f"C₀² ≠ −{e}")
        expect(hirz_intersect(e, c0, fiber) == 1, "C₀·f ≠ 1")
        expect(hirz_intersect(e, fiber, fiber) == 0, "f² ≠ 0")
        canonical = hirz_canonical(e)
        expect((canonical.a, canonical.b) == (-2, -(2 + e)), f"K 於 Σ_{e} 不正確")
        y = hirz_anticanonical(e)
        expect(hirz_adjunction_genus(e, y) == 1, f"Y 於 Σ_{e} 的虧格不是 1")
        table[f'Sigma_{e}'] = {'K': canonical.to_dict(), 'Y_ample': hirz_is_ample(y)}
    expect([v['Y_ample'] for v in table.values()] == [True, True, False], "Y 的豐富性與 e ≤ 1 不一致")
    return table


# === pencil ===
@check('pencil', 'random_laws')
def check_random_laws(rng) -> dict:
    field = _verify_field()
    max_dprime = VERIFY_SIZES['PENCIL_MAX_DPRIME']
    trivial_seen = 0
    for _ in range(VERIFY_SIZES['RANDOM_PENCILS']):
        dprime = int(rng.integers(2, max_dprime + 1))
        k = int(rng.integers(1, dprime))
        image_dim = int(rng.integers(k + 1, dprime + 1))
        pencil = random_one_generic_pencil(field, dprime, k, rng, image_dim=image_dim)
        split = splitting_type(pencil)
        expect(split.rank == dprime - k, f"分裂型 {split.degrees} 的長度 ≠ d′ − k")
        expect(split.total == k, f"分裂型 {split.degrees} 的和 ≠ k")
        expect(all(d >= 0 for d in split.degrees), f"分裂型 {split.degrees} 含負數")
        codim = dprime - pencil.column_flattening().rank()
        expect(split.trivial_count == codim, f"平凡直和項 {split.trivial_count} ≠ 餘維 {codim}")
        trivial_seen += split.trivial_count

    pairs = VERIFY_SIZES['RANDOM_PENCILS'] // 10
    for _ in range(pairs):
        parts = []
        for _ in range(2):
            dprime = int(rng.integers(2, max_dprime // 2 + 1))
            parts.append(random_one_generic_pencil(field, dprime, int(rng.integers(1, dprime)), rng))
        combined = splitting_type(block_diagonal(*parts)).degrees
        expected = tuple(sorted(splitting_type(parts[0]).degrees + splitting_type(parts[1]).degrees, reverse=True))
        expect(combined == expected, f"直和的分裂型 {combined} ≠ {expected}")
    return {'pencils': VERIFY_SIZES['RANDOM_PENCILS'], 'block_pairs': pairs, 'trivial_summands_seen': trivial_seen}


@check('pencil', 'worked_examples')
def check_worked_examples(rng) -> dict:
    results = {
        'identity_2x2': splitting_type(identity_pairing(2, 2).to_pencil()).to_json(),
        'factored': splitting_type(factored_pencil()).to_json(),
        'embedding_2_5': splitting_type(embedding_pairing(2, 5).to_pencil()).to_json(),
    }
    expect(results['identity_2x2'] == [1, 1], f"恆等配對得到 {results['identity_2x2']}")
    expect(results['factored'] == [2, 0], f"分解配對得到 {results['factored']}")
    expect(results['embedding_2_5'] == [1, 0, 0, 0], f"嵌入配對得到 {results['embedding_2_5']}")
    for k in range(1, 6):
        degrees = splitting_type(sylvester_pairing(1, k - 1).to_pencil()).to_json()
        expect(degrees == [k], f"Sylvester S¹⊗S^{k - 1} 得到 {degrees}")
    results['sylvester'] = 'k = 1..5'
    return results


# === elliptic ===
def _principal_divisor(curve, rng) -> Divisor:
    points = [random_point(curve, rng) for _ in range(3)]
    total = sigma(curve, Divisor.from_points(points))
    return Divisor.from_points(points) - Divisor.point(total) - Divisor.point(INFINITY, 2)


@check('elliptic', 'riemann_roch')
def check_riemann_roch(rng) -> dict:
    curve = random_curve(_verify_field(), rng)
    max_degree = VERIFY_SIZES['DIVISOR_MAX_DEGREE']
    sample_count = VERIFY_SIZES['BOUND_SAMPLE_POINTS']
    for index in range(VERIFY_SIZES['RANDOM_DIVISORS']):
        degree = 1 + index % max_degree
        divisor = random_divisor(curve, degree, rng, negative_points=int(rng.integers(0, 2)))
        basis = rr_basis(curve, divisor)
        expect(len(basis.basis) == degree, f"基底長度 {len(basis.basis)} ≠ {degree}")
        samples = [random_point(curve, rng) for _ in range(sample_count)]
        checkpoints = set(divisor.support) | set(samples) | {INFINITY}
        for element in basis.basis:
            expect(divisor_bound_holds(element, divisor, checkpoints), "基底元素違反 div(f) + D ≥ 0")
        difference = divisor - basis.canonical
        expect(verify_miller(curve, difference, miller_function(curve, difference)), "轉移函數的除子不正確")
        principal = _principal_divisor(curve, rng)
        expect(verify_miller(curve, principal, miller_function(curve, principal)), "Miller 函數的除子不正確")
    return {'curve': curve.descriptor, 'divisors': VERIFY_SIZES['RANDOM_DIVISORS']}


@check('elliptic', 'surjectivity')
def check_surjectivity(rng) -> dict:
    curve = random_curve(_verify_field(), rng)
    cases = []
    for d in (2, 3, 4):
        for k in (1, 2, 3):
            divisor_n = random_divisor(curve, d, rng)
            divisor_m = random_divisor(curve, k, rng)
            cases.append((divisor_n, divisor_m))
    base = random_divisor(curve, 2, rng)
    cases.append((base, divisor_with_sum(curve, 2, sigma(curve, base), rng)))
    other = random_divisor(curve, 2, rng)
    while lin_equiv(curve, base, other):
        other = random_divisor(curve, 2, rng)
    cases.append((base, other))

    table = []
    for divisor_n, divisor_m in cases:
        d, k = divisor_n.degree, divisor_m.degree
        same = lin_equiv(curve, divisor_n, divisor_m)
        actual = is_surjective(pairing_tensor(curve, divisor_n, divisor_m))
        predicted = whensurj_predict(d, k, same)
        expect(actual == predicted, f"d={d}, k={k}, same_class={same}: 計算 {actual} ≠ 預測 {predicted}")
        table.append({'d': d, 'k': k, 'same_class': same, 'surjective': actual})
    expect(table[-2]['same_class'] and not table[-2]['surjective'], "M ≅ N 的 d = k = 2 例子應不滿射")
    expect(table[-1]['surjective'], "M ≇ N 的 d = k = 2 例子應滿射")
    return {'curve': curve.descriptor, 'cases': table}


@check('elliptic', 'leaf_classification')
def check_leaf_classification(rng) -> dict:
    curve = random_curve(_verify_field(), rng)
    branches = {'odd': 0, 'even_multiple': 0, 'even_generic': 0}
    odd_degrees, even_degrees = (3, 5, 7), (4, 6, 8)
    for index in range(VERIFY_SIZES['LEAF_INSTANCES']):
        divisor = random_divisor(curve, 2, rng)
        branch = index % 3
        if branch == 0:
            dprime = odd_degrees[(index // 3) % len(odd_degrees)]
            divisor_prime = random_divisor(curve, dprime, rng)
            branches['odd'] += 1
        else:
            dprime = even_degrees[(index // 3) % len(even_degrees)]
            k = dprime - 2
            multiple = scalar_mul(curve, k // 2 + 1, sigma(curve, divisor))
            if branch == 1:
                divisor_prime = divisor_with_sum(curve, dprime, multiple, rng)
                branches['even_multiple'] += 1
            else:
                divisor_prime = random_divisor(curve, dprime, rng)
                while sigma(curve, divisor_prime) == multiple:
                    divisor_prime = random_divisor(curve, dprime, rng)
                branches['even_generic'] += 1
        record = leaf_classify(curve, divisor, divisor_prime)
        e, k = record.e_computed, record.k
        expect(record.match, f"d′={dprime}: 預測 Σ_{record.e_predicted}，計算 Σ_{e}")
        expect(e % 2 == k % 2, f"e={e} 與 k={k} 奇偶不同")
        expect(0 <= e <= min(k, 2), f"e={e} 超出 [0, min(k, 2)]")
    return {'curve': curve.descriptor, 'branches': branches}


# === secant ===
def _secant_config(curve, n: int, d: int, rng) -> SecantConfig:
    return SecantConfig.standard(curve, n, d, random_divisor(curve, d, rng))


@check('secant', 'singular_locus')
def check_singular_locus(rng) -> dict:
    curve = random_curve(_verify_field(), rng)
    cfg = _secant_config(curve, 8, 3, rng)
    expect(cfg.codim == 3, f"餘維 {cfg.codim} ≠ 3")
    plan = (
        ('curve-point', VERIFY_SIZES['SECANT_CURVE_POINTS'], 'singular', 1),
        ('generic-slice', VERIFY_SIZES['SECANT_SLICE_POINTS'], 'smooth', 2),
        ('sec2-off-curve', VERIFY_SIZES['SECANT_LINE_POINTS'], 'smooth', 2),
    )
    summary = {}
    for kind, count, expected, max_rank in plan:
        for _ in range(count):
            _, verdict = probe(cfg, kind, rng)
            expect(verdict.verdict == expected, f"{kind}: 判定 {verdict.verdict}（Jacobian 秩 {verdict.jacobian_rank}）")
            expect(verdict.membership_rank <= max_rank, f"{kind}: Φ 秩 {verdict.membership_rank} > {max_rank}")
            if kind == 'curve-point':
                expect(verdict.membership_rank == 1, f"曲線點的 Φ 秩 {verdict.membership_rank} ≠ 1")
                expect(verdict.jacobian_rank < cfg.codim, "曲線點的 Jacobian 秩未低於餘維")
        summary[kind] = {'count': count, 'verdict': expected}
    for _ in range(VERIFY_SIZES['SECANT_CURVE_POINTS']):
        rank = membership_rank(cfg, sample_subsecant_point(cfg, cfg.d - 2, rng))
        expect(rank <= cfg.d - 2, f"Sec_(d−2) 點的 Φ 秩 {rank} > {cfg.d - 2}")
    return {'curve': curve.descriptor, 'n': cfg.n, 'd': cfg.d, 'codim': cfg.codim, 'probes': summary}


@check('secant', 'membership')
def check_membership(rng) -> dict:
    curve = random_curve(_verify_field(), rng)
    draws = VERIFY_SIZES['MEMBERSHIP_DRAWS']
    for n, d in ((7, 3), (8, 3), (9, 4)):
        cfg = _secant_config(curve, n, d, rng)
        for _ in range(draws):
            rank = membership_rank(cfg, sample_slice_point(cfg, rng))
            expect(rank <= d - 1, f"(n={n}, d={d}) 切片點的 Φ 秩 {rank} > {d - 1}")
            r = int(rng.integers(1, d - 1))
            rank = membership_rank(cfg, sample_subsecant_point(cfg, r, rng))
            expect(rank <= r, f"(n={n}, d={d}) Sec_{r} 點的 Φ 秩 {rank} > {r}")
    return {'curve': curve.descriptor, 'draws_per_config': draws}


@check('secant', 'genericity_and_scaling')
def check_genericity_and_scaling(rng) -> dict:
    field = _verify_field()
    curve = random_curve(field, rng)
    cfg = _secant_config(curve, 8, 3, rng)
    draws = VERIFY_SIZES['GENERIC_DRAWS']
    full_rank = 0
    for _ in range(draws):
        point = field.random_vector(rng, cfg.n)
        rank = membership_rank(cfg, point)
        if rank == cfg.d:
            full_rank += 1
        else:
            logger.info(f"ℹ️ 隨機點的 Φ 秩 {rank} < d，重新檢查切片成員資格")
            singularity_verdict(cfg, point)
    expect(full_rank >= 0.99 * draws, f"隨機點滿秩比例 {full_rank}/{draws} 過低")

    point = sample_slice_point(cfg, rng)
    base = singularity_verdict(cfg, point)
    for _ in range(5):
        c = field.random(rng, nonzero=True)
        scaled = singularity_verdict(cfg, tuple(c * v for v in point))
        expect(
            (scaled.membership_rank, scaled.jacobian_rank) == (base.membership_rank, base.jacobian_rank),
            "秩在縮放後改變",
        )
    return {'generic_full_rank': full_rank, 'draws': draws}


# === 執行器 ===
def _run_check(name: str, func, seed: int) -> dict:
    started = time.perf_counter()
    result = {'name': name, 'seed': seed}
    try:
        result['details'] = func(np.random.default_rng(seed))
        result['passed'] = True
        logger.info(f"✅ {name} 通過")
    except LeafToolkitError as e:
        result['passed'] = False
        result['error'] = e.to_dict()
        logger.warning(f"❌ {name} 失敗: {e}")
    except ArithmeticError as e:
        # 例如 F_p 中除以 0：記為失敗，不中斷其他檢查
        result['passed'] = False
        result['error'] = {'type': type(e).__name__, 'message': str(e)}
        logger.error(f"❌ {name} 算術錯誤: {e}")
    logger.debug(f"🔍 {name} 耗時 {time.perf_counter() - started:.2f}s")
    return result


def select_checks(suite: str | None) -> list[str]:
    if suite in (None, 'all'):
        return sorted(REGISTRY)
    if suite not in SUITES:
        raise PreconditionError(f"未知的套件 '{suite}'（可用：{', '.join(SUITES)}, all）")
    return sorted(name for name, (owner, _) in REGISTRY.items() if owner == suite)


def run_suites(suite: str | None, seed: int, max_workers: int | None = None) -> dict:
    """
    並行執行套件中的所有檢查

    Args:
        suite: 'chow' | 'pencil' | 'elliptic' | 'secant' | 'all' | None
        seed: 主種子
        max_workers: 執行緒數，預設取 DEFAULTS['MAX_WORKERS']

    Returns:
        {'suite', 'seed', 'passed', 'checks': [...]}，checks 依名稱排序
    """
    names = select_checks(suite)
    workers = max_workers or DEFAULTS['MAX_WORKERS']
    results = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(_run_check, name, REGISTRY[name][1], derive_seed(seed, name)): name
            for name in names
        }
        for future in as_completed(futures):
            results.append(future.result())
    results.sort(key=lambda item: item['name'])
    passed = all(item['passed'] for item in results)
    logger.info(f"{'✅' if passed else '❌'} 套件 {suite or 'all'}: {sum(r['passed'] for r in results)}/{len(results)} 通過")
    return {'suite': suite or 'all', 'seed': seed, 'passed': passed, 'checks': results}
