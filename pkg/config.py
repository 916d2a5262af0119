"""
橢圓葉分類工具 - 集中配置檔案

此檔案集中管理所有預設值（體、種子、取樣上限、驗證規模），方便維護和修改。
所有值皆可由環境變數（或 .env 檔）覆寫；命令列旗標的優先權最高。

使用範例：
    from config import DEFAULTS, SAMPLING

    field_text = DEFAULTS['FIELD']          # 'Fp:10007'
    attempts = SAMPLING['MAX_ATTEMPTS']     # 1000
"""

import hashlib
import logging
import os
import sys

from dotenv import load_dotenv

load_dotenv()

# === 專案根目錄 ===
PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))

# === 執行預設值 ===
DEFAULTS = {
    # 預設質數 10007，滿足 p > 3，點數足夠多以利除子取樣
    'FIELD': os.getenv('LEAF_FIELD', 'Fp:10007'),
    'SEED': int(os.getenv('LEAF_SEED', '20240521')),
    'LOG_LEVEL': os.getenv('LEAF_LOG_LEVEL', 'WARNING'),
    'MAX_WORKERS': int(os.getenv('LEAF_MAX_WORKERS', '4')),
    'OUTPUT': 'json',
}

# === 隨機取樣設定 ===
SAMPLING = {
    # 拒絕取樣的最大嘗試次數
    'MAX_ATTEMPTS': int(os.getenv('LEAF_MAX_ATTEMPTS', '1000')),
    # 1-generic 機率測試的隨機向量數
    'GENERICITY_TRIALS': int(os.getenv('LEAF_GENERICITY_TRIALS', '24')),
    # 有理數體上隨機小整數的範圍 [-R, R]
    'SMALL_INT_RANGE': 9,
}

# === 驗證套件規模（對應驗收條件） ===
VERIFY_SIZES = {
    'FIELD': 'Fp:10007',
    'SWEEP_D': (2, 6),
    'SWEEP_K': (1, 8),
    'SERIES_ORDER': 8,
    'SERIES_SAMPLES': 100,
    'RANDOM_PENCILS': 200,
    'PENCIL_MAX_DPRIME': 8,
    'RANDOM_DIVISORS': 50,
    'DIVISOR_MAX_DEGREE': 8,
    'BOUND_SAMPLE_POINTS': 20,
    'LEAF_INSTANCES': 20,
    'SECANT_SLICE_POINTS': 20,
    'SECANT_CURVE_POINTS': 10,
    'SECANT_LINE_POINTS': 10,
    'MEMBERSHIP_DRAWS': 50,
    'GENERIC_DRAWS': 100,
}

# === HTTP API 設定 ===
API = {
    'HOST': os.getenv('LEAF_API_HOST', '127.0.0.1'),
    'PORT': int(os.getenv('LEAF_API_PORT', '5000')),
    'DEBUG': os.getenv('LEAF_API_DEBUG', 'false').lower() == 'true',
}


# === 輔助函數 ===
def setup_logging(level: str = None) -> None:
    """
    設定全域 logging，輸出到 stderr（stdout 保留給 JSON 報告）

    Args:
        level: 記錄等級名稱（例如 'INFO'），預設取 DEFAULTS['LOG_LEVEL']
    """
    level_name = (level or DEFAULTS['LOG_LEVEL']).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format='%(asctime)s %(levelname)s [%(name)s] %(message)s',
        stream=sys.stderr,
        force=True,
    )


def derive_seed(master_seed: int, name: str) -> int:
    """
    由主種子與檢查名稱導出獨立的 64 位元種子

    功能說明：
        每個驗證檢查都擁有自己的種子，因此並行執行時結果仍可完全重現。

    Args:
        master_seed: 主種子
        name: 檢查名稱（例如 'pencil.random_laws'）

    Returns:
        0 ~ 2^64-1 的整數

    使用範例：
        seed = derive_seed(20240521, 'chow.intersection_sweep')
    """
    digest = hashlib.sha256(f'{master_seed}:{name}'.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


if __name__ == '__main__':
    print("=== 橢圓葉分類工具配置測試 ===\n")
    for group_name, group in (('DEFAULTS', DEFAULTS), ('SAMPLING', SAMPLING), ('API', API)):
        print(f"📁 {group_name}:")
        for key, value in group.items():
            print(f"  {key}: {value}")
    print(f"\n 種子導出測試: {derive_seed(DEFAULTS['SEED'], 'chow.intersection_sweep')}")
