# polar/documents.py
"""信道描述与码描述的 JSON 文档"""
import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from polar.channels import BscMixture, bec_erasure, canonicalize, is_bec, make_bec, make_bsc
from polar.codes import ConstructionKind, GpCode
from polar.decoders import DecodeResult
from polar.errors import ChannelDocumentError, CodeParameterError, ValidationFailure

logger = logging.getLogger(__name__)


class MixtureComponent(BaseModel):
    model_config = ConfigDict(extra='forbid')

    p: float = Field(ge=0.0, le=1.0)
    eps: float = Field(ge=0.0, le=1.0)


class ChannelDocument(BaseModel):
    """
    信道描述：{"bec": e}、{"bsc": e} 或 {"mixture": [{"p": ..., "eps": ...}, ...]} 三选一

    文档中的 eps 取 0 或 0.5 时带精确标记。
    """
    model_config = ConfigDict(extra='forbid')

    bec: Optional[float] = Field(None, ge=0.0, le=1.0)
    bsc: Optional[float] = Field(None, ge=0.0, le=1.0)
    mixture: Optional[List[MixtureComponent]] = None

    @model_validator(mode='after')
    def exactly_one(self) -> 'ChannelDocument':
        given = [k for k in ('bec', 'bsc', 'mixture') if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"bec / bsc / mixture 必须且只能给出一个，实际为 {given or '无'}")
        if self.mixture is not None and not self.mixture:
            raise ValueError("mixture 不能为空")
        return self

    @classmethod
    def parse(cls, source: Union[str, dict, 'ChannelDocument']) -> 'ChannelDocument':
        """接受字典、JSON 文本或 JSON 文件路径"""
        if isinstance(source, cls):
            return source
        try:
            if isinstance(source, dict):
                return cls.model_validate(source)
            return cls.model_validate_json(_read_text(source))
        except ValidationError as e:
            logger.error(f"解析信道文档失败: {str(e)}")
            raise ChannelDocumentError(f"信道文档无效: {e.errors()[0]['msg']}") from e

    def to_mixture(self) -> BscMixture:
        if self.bec is not None:
            return make_bec(self.bec)
        if self.bsc is not None:
            return make_bsc(self.bsc)
        return BscMixture.from_components([(c.p, c.eps) for c in self.mixture])

    @classmethod
    def from_mixture(cls, W: BscMixture) -> 'ChannelDocument':
        c = canonicalize(W)
        if is_bec(c):
            return cls(bec=bec_erasure(c))
        if len(c) == 1:
            return cls(bsc=float(c.eps[0]))
        return cls(mixture=[MixtureComponent(p=float(p), eps=float(e)) for p, e in zip(c.masses, c.eps)])


class CodeDocument(BaseModel):
    """码描述：n、信息集、冻结比特、构造方式与所用信道"""
    model_config = ConfigDict(extra='forbid')

    n: int = Field(ge=0)
    info_set: List[int]
    frozen_bits: List[int] = Field(default_factory=list)
    construction: Optional[ConstructionKind] = None
    channel: Optional[ChannelDocument] = None

    @classmethod
    def parse(cls, source: Union[str, dict]) -> 'CodeDocument':
        try:
            if isinstance(source, dict):
                return cls.model_validate(source)
            return cls.model_validate_json(_read_text(source))
        except ValidationError as e:
            logger.error(f"解析码文档失败: {str(e)}")
            raise CodeParameterError(f"码文档无效: {e.errors()[0]['msg']}") from e

    def to_code(self) -> GpCode:
        return GpCode(self.n, tuple(self.info_set), tuple(self.frozen_bits))

    @classmethod
    def from_code(cls, code: GpCode, construction: Optional[ConstructionKind] = None,
                  channel: Optional[BscMixture] = None) -> 'CodeDocument':
        return cls(
            n=code.n,
            info_set=list(code.info_set),
            frozen_bits=list(code.frozen_bits),
            construction=construction,
            channel=ChannelDocument.from_mixture(channel) if channel is not None else None,
        )


class DecodeResultDocument(BaseModel):
    erasure: bool
    message: Optional[List[int]] = None
    first_erased_index: Optional[int] = None
    trace: Optional[List[List[float]]] = None

    @classmethod
    def from_result(cls, result: DecodeResult, trace: Optional[np.ndarray] = None) -> 'DecodeResultDocument':
        return cls(
            erasure=result.is_erasure,
            message=list(result.message) if result.message is not None else None,
            first_erased_index=result.first_erased_index,
            trace=trace.tolist() if trace is not None else None,
        )


def _read_text(source: str) -> str:
    """内联 JSON 原样返回，否则按文件路径读取"""
    text = str(source).strip()
    if text.startswith('{') or text.startswith('['):
        return text
    path = Path(text)
    if not path.exists():
        raise ValidationFailure(f"输入既不是 JSON 也不是存在的文件: {source}")
    return path.read_text(encoding='utf-8')


def load_json(source: str) -> Any:
    """读取内联 JSON 或 JSON 文件"""
    try:
        return json.loads(_read_text(source))
    except json.JSONDecodeError as e:
        raise ValidationFailure(f"JSON 解析失败: {e.msg}") from e
