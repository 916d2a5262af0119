from flask import Flask, jsonify, request

from config import API, DEFAULTS, setup_logging
from src.commands import (
    chern_report,
    classify_report,
    default_curve_text,
    safe_call,
    secant_report,
    splitting_report,
    verify_report,
)

setup_logging()

# ==============Flask 部分========================
app = Flask(__name__)
app.json.sort_keys = True
app.json.ensure_ascii = False

# 錯誤類型 → HTTP 狀態碼（前置條件 400，數學檢查失敗 422）
STATUS_BY_EXIT_CODE = {1: 422, 2: 400}


def _respond(outcome: dict, seed: int | None = None):
    """把 safe_call 的結果轉成 JSON 回應；payload 與命令列輸出相同"""
    if outcome['success']:
        payload = dict(outcome['result'])
        if seed is not None:
            payload['seed'] = seed
        return jsonify(payload)
    payload = {'error': outcome['error']}
    if seed is not None:
        payload['seed'] = seed
    return jsonify(payload), STATUS_BY_EXIT_CODE.get(outcome['exit_code'], 400)


def _request_seed() -> int:
    value = request.args.get('seed')
    if value is None and request.is_json:
        value = (request.get_json(silent=True) or {}).get('seed')
    return int(value) if value is not None else DEFAULTS['SEED']


def _bad_request(message: str):
    return jsonify({'error': {'type': 'ParseError', 'message': message}}), 400


@app.route('/api/health')
def health():
    return jsonify({'status': 'ok', 'field': DEFAULTS['FIELD']})


@app.route('/api/chern')
def api_chern():
    """
    Q_β 的 Chern 資料

    請求參數（query string）：
        d, k：必填；s：選填
    """
    try:
        d = int(request.args['d'])
        k = int(request.args['k'])
        s = request.args.get('s')
        s = int(s) if s is not None else None
    except (KeyError, ValueError):
        return _bad_request('參數錯誤：d 與 k 為必填整數')
    return _respond(safe_call(chern_report, d=d, k=k, s=s))


@app.route('/api/splitting', methods=['POST'])
def api_splitting():
    """
    請求內容：pencil JSON
        {"dprime": 4, "k": 2, "A": [[...]], "B": [[...]], "field": "Q"}
    """
    data = request.get_json(silent=True)
    if data is None:
        return _bad_request('請求內容必須是 pencil JSON')
    return _respond(safe_call(splitting_report, pencil_payload=data))


@app.route('/api/classify', methods=['POST'])
def api_classify():
    """
    請求內容：
        {"curve": "0,1@Fp:10007", "D": "O:2", "Dprime": "O:5"}
    """
    data = request.get_json(silent=True) or {}
    try:
        curve_text, divisor_text, divisor_prime_text = data['curve'], data['D'], data['Dprime']
    except KeyError:
        return _bad_request('參數錯誤：curve、D、Dprime 為必填')
    return _respond(safe_call(
        classify_report, curve_text=curve_text, divisor_text=divisor_text, divisor_prime_text=divisor_prime_text,
    ))


@app.route('/api/secant', methods=['POST'])
def api_secant():
    """
    請求內容：
        {"n": 8, "d": 3, "curve": "0,1@Fp:10007", "z": "O:3", "probes": ["generic-slice"], "seed": 7}
    """
    data = request.get_json(silent=True) or {}
    try:
        n, d = int(data['n']), int(data['d'])
    except (KeyError, TypeError, ValueError):
        return _bad_request('參數錯誤：n 與 d 為必填整數')
    seed = _request_seed()
    return _respond(safe_call(
        secant_report,
        curve_text=data.get('curve') or default_curve_text(),
        n=n, d=d, seed=seed, divisor_text=data.get('z'), probes=data.get('probes'),
    ), seed)


@app.route('/api/verify/<suite>')
def api_verify(suite):
    """執行驗收套件；有檢查失敗時回傳 422"""
    seed = _request_seed()
    outcome = safe_call(verify_report, suite=suite, seed=seed)
    if outcome['success'] and not outcome['result']['passed']:
        return jsonify(outcome['result']), 422
    return _respond(outcome)


if __name__ == '__main__':
    app.run(host=API['HOST'], port=API['PORT'], debug=API['DEBUG'])
