# polar/errors.py
"""异常体系

ValidationFailure 对应命令行退出码 2，NumericFailure 对应退出码 3。
"""


class PolarCodeError(Exception):
    """极化码工具异常基类"""
    exit_code: int = 1


class ValidationFailure(PolarCodeError):
    """输入或参数校验失败"""
    exit_code = 2


class NumericFailure(PolarCodeError):
    """运行期数值计算失败"""
    exit_code = 3


class ChannelDocumentError(ValidationFailure):
    """信道描述文档无效"""
    pass


class CodeParameterError(ValidationFailure):
    """码参数（n, r, 信息集, 冻结比特）无效"""
    pass


class RateOutOfRangeError(CodeParameterError):
    """码率超出构造前提（例如 R >= I_0^GP(W)）"""
    pass


class LikelihoodError(ValidationFailure):
    """似然对格式错误（负值、全零或长度不符）"""
    pass


class BlocklengthTooLargeError(ValidationFailure):
    """码长超出穷举上限"""
    pass


class DegradationError(NumericFailure):
    """退化合并无法把分量数压到上限以内"""
    pass
