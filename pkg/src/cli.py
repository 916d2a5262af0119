"""
命令列介面
子命令：chern / splitting / classify / secant / verify
JSON 模式輸出單一物件（鍵排序、換行結尾、一律包含 seed）；--text 模式輸出 emoji 狀態行。
結束碼：0 = 全部通過，1 = 數學檢查失敗，2 = 用法或解析錯誤。

使用範例：
    python -m src.cli chern --d 2 --k 2
    python -m src.cli classify --curve "0,1@Fp:10007" --D "O:2" --Dprime "O:5"
    python -m src.cli verify --suite chow
"""

import json
import sys

import click

from config import DEFAULTS, setup_logging
from src.commands import (
    chern_report,
    classify_report,
    default_curve_text,
    safe_call,
    secant_report,
    splitting_report,
    verify_report,
)
from src.secant import PROBE_KINDS


def _emit(ctx: click.Context, outcome: dict, text_lines=None) -> None:
    """輸出結果並依 exit_code 結束"""
    seed = ctx.obj['seed']
    if not outcome['success']:
        payload = {'error': outcome['error'], 'seed': seed}
        if ctx.obj['output'] == 'json':
            click.echo(json.dumps(payload, sort_keys=True, ensure_ascii=False))
        else:
            click.echo(f"❌ {outcome['error']['type']}: {outcome['error']['message']}")
        ctx.exit(outcome['exit_code'])
        return
    result = {**outcome['result'], 'seed': seed}
    if ctx.obj['output'] == 'json':
        click.echo(json.dumps(result, sort_keys=True, ensure_ascii=False))
    else:
        for line in (text_lines(result) if text_lines else _default_lines(result)):
            click.echo(line)


def _default_lines(result: dict) -> list[str]:
    return [f'{key}: {json.dumps(value, ensure_ascii=False)}' for key, value in sorted(result.items())]


@click.group()
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=DEFAULTS['SEED'], show_default=True, help='主種子（64 位元無號整數）')
@click.option('--json', 'output', flag_value='json', default='json', help='輸出 JSON（預設）')
@click.option('--text', 'output', flag_value='text', help='輸出文字狀態行')
@click.option('--field', 'field_text', default=None, help="體：'Q' 或 'Fp:p'")
@click.option('--log-level', default=None, help='記錄等級（預設取 LEAF_LOG_LEVEL）')
@click.pass_context
def cli(ctx: click.Context, seed: int, output: str, field_text: str | None, log_level: str | None):
    """橢圓曲線上秩 2 葉與割線切片的驗證工具"""
    setup_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj.update({'seed': seed, 'output': output, 'field': field_text})


@cli.command()
@click.option('--d', 'd', type=int, required=True, help='dim V')
@click.option('--k', 'k', type=int, required=True, help='dim W')
@click.option('--s', 's', type=int, default=None, help='只計算指定的 s')
@click.pass_context
def chern(ctx: click.Context, d: int, k: int, s: int | None):
    """Q_β 的 Chern 類與交截數"""
    _emit(ctx, safe_call(chern_report, d=d, k=k, s=s))


@cli.command()
@click.argument('pencil_file', type=click.File('r'))
@click.pass_context
def splitting(ctx: click.Context, pencil_file):
    """讀取 pencil JSON 檔（'-' 為 stdin）並計算分裂型"""
    try:
        payload = json.load(pencil_file)
    except json.JSONDecodeError as e:
        outcome = {'success': False, 'error': {'type': 'ParseError', 'message': f'無法解析 JSON: {e}'}, 'exit_code': 2}
        _emit(ctx, outcome)
        return
    _emit(ctx, safe_call(splitting_report, pencil_payload=payload, field_text=ctx.obj['field']))


@cli.command()
@click.option('--curve', 'curve_text', required=True, help="曲線 'A,B@Fp:p'")
@click.option('--D', 'divisor_text', required=True, help='次數 2 的除子')
@click.option('--Dprime', 'divisor_prime_text', required=True, help='次數 ≥ 3 的除子')
@click.pass_context
def classify(ctx: click.Context, curve_text: str, divisor_text: str, divisor_prime_text: str):
    """完備葉的 Hirzebruch 曲面分類"""
    def lines(result):
        status = '✅' if result['match'] else '❌'
        return [
            f"{status} {result['surface']}（預測 e={result['e_predicted']}，計算 e={result['e_computed']}）",
            f"ℹ️ affine={result['affine']} splitting_type={result['splitting_type']} y_ample={result['y_ample']}",
        ]

    outcome = safe_call(
        classify_report, curve_text=curve_text, divisor_text=divisor_text, divisor_prime_text=divisor_prime_text,
    )
    _emit(ctx, outcome, lines)
    if outcome['success'] and not outcome['result']['match']:
        ctx.exit(1)


@cli.command()
@click.option('--curve', 'curve_text', default=None, help="曲線（預設 '0,1@<field>'）")
@click.option('--n', 'n', type=int, required=True, help='L 的次數')
@click.option('--d', 'd', type=int, required=True, help='切片參數，2 ≤ d < n/2')
@click.option('--z', 'divisor_text', default=None, help='D_N 的除子文字（次數 d），決定 z = σ(D_N)')
@click.option('--probe', 'probes', multiple=True, type=click.Choice(PROBE_KINDS), help='探測種類（可重複）')
@click.pass_context
def secant(ctx: click.Context, curve_text: str | None, n: int, d: int, divisor_text: str | None, probes):
    """割線切片上的光滑性判定"""
    def lines(result):
        return [
            f"{'✅' if p['verdict'] == 'smooth' else '⚠️'} {p['probe']}: {p['verdict']}"
            f"（Φ 秩 {p['membership_rank']}，Jacobian 秩 {p['jacobian_rank']}，codim {p['codim']}）"
            for p in result['probes']
        ]

    outcome = safe_call(
        secant_report,
        curve_text=curve_text or default_curve_text(ctx.obj['field']),
        n=n, d=d, seed=ctx.obj['seed'], divisor_text=divisor_text, probes=probes,
    )
    _emit(ctx, outcome, lines)


@cli.command()
@click.option('--suite', default='all', show_default=True, type=click.Choice(['all', 'chow', 'pencil', 'elliptic', 'secant']))
@click.option('--workers', type=int, default=None, help='並行執行緒數（預設取 LEAF_MAX_WORKERS）')
@click.pass_context
def verify(ctx: click.Context, suite: str, workers: int | None):
    """執行驗收套件；全部通過時結束碼為 0"""
    def lines(result):
        out = []
        for item in result['checks']:
            if item['passed']:
                out.append(f"✅ {item['name']}")
            else:
                out.append(f"❌ {item['name']}: {item['error']['message']}")
        out.append(f"{'✅' if result['passed'] else '❌'} {sum(c['passed'] for c in result['checks'])}/{len(result['checks'])} 通過")
        return out

    outcome = safe_call(verify_report, suite=suite, seed=ctx.obj['seed'], max_workers=workers)
    _emit(ctx, outcome, lines)
    if outcome['success'] and not outcome['result']['passed']:
        ctx.exit(1)


def main() -> None:
    cli(obj={})


if __name__ == '__main__':
    sys.exit(main())
