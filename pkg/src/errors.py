"""
例外類別模組
所有模組共用的錯誤階層；exit_code 對應命令列的結束碼約定
（0 = 全部通過, 1 = 數學檢查失敗, 2 = 用法或解析錯誤）。
"""


class LeafToolkitError(Exception):
    """所有工具錯誤的基底類別"""
    exit_code = 1

    def to_dict(self) -> dict:
        return {'type': type(self).__name__, 'message': str(self)}


class PreconditionError(LeafToolkitError, ValueError):
    """輸入不滿足前置條件（維度、範圍、常數項、次數等）"""
    exit_code = 2


class ParseError(PreconditionError):
    """文字或 JSON 格式無法解析"""


class NotOneGenericError(PreconditionError):
    """pencil 不是 1-generic"""


class NotPrincipalError(PreconditionError):
    """除子不是主除子（次數不為 0 或和不為 O）"""


class PointNotOnCurveError(PreconditionError):
    """點不在曲線上"""


class NotOnSliceError(PreconditionError):
    """點不在割線切片上（Φ 的秩大於 d-1）"""


class CheckFailedError(LeafToolkitError):
    """內部交叉驗證失敗；代表實作錯誤，必須中止"""


class SamplingExhaustedError(LeafToolkitError):
    """拒絕取樣超過嘗試上限"""
