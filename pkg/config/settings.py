import logging
import os
import yaml
from pathlib import Path
from enum import Enum
from typing import ClassVar, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class EnvironmentState(str, Enum):
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class ChannelConfig(BaseModel):
    """BSC混合信道运算配置"""
    model_config = ConfigDict(validate_assignment=True)

    merge_tol: float = Field(1e-9, gt=0, lt=1e-3, description="规范化时合并相邻交叉概率的容差")
    l_max: int = Field(256, ge=2, description="合成信道允许的最大分量数，超出后做退化合并")


class AnalysisConfig(BaseModel):
    """解析预测配置"""
    model_config = ConfigDict(validate_assignment=True)

    max_enumeration_n: int = Field(12, ge=0, le=20, description="全枚举符号序列的最大n")
    monte_carlo_sequences: int = Field(10000, ge=10000, description="超出枚举上限时抽样的符号序列数")
    max_analyze_n: int = Field(14, ge=0, le=20, description="analyze子命令逐索引输出的最大n")
    oracle_max_blocklength: int = Field(16, ge=2, le=16, description="穷举译码oracle允许的最大码长")


class SimulationConfig(BaseModel):
    """蒙特卡洛仿真配置"""
    model_config = ConfigDict(validate_assignment=True)

    trials: int = Field(10000, gt=0)
    seed: int = Field(0, ge=0)
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    chunk_trials: int = Field(2000, gt=0, description="每个工作进程任务包含的试验数")
    show_progress: bool = Field(True)


class LoggingConfig(BaseModel):
    """日志系统配置"""
    model_config = ConfigDict(validate_assignment=True)

    level: str = Field('INFO')
    format: str = Field('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    @field_validator('level')
    def validate_log_level(cls, v: str) -> str:
        v_upper = v.upper()
        if v_upper not in logging._nameToLevel:
            raise ValueError(f"无效的日志级别: {v}")
        return v_upper


class Settings(BaseSettings):
    """全局配置主类

    conf.yaml 提供基础值，环境变量 GPCODE_<SECTION>__<FIELD> 优先级更高。
    """
    model_config = SettingsConfigDict(
        validate_assignment=True,
        frozen=False,
        env_prefix='GPCODE_',
        env_nested_delimiter='__',
        extra='ignore',
    )

    # 单例实例
    _instance: ClassVar[Optional['Settings']] = None

    env_state: EnvironmentState = Field(default=EnvironmentState.TESTING)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # 环境变量覆盖 yaml 中的值
        return env_settings, init_settings

    @classmethod
    def _set_instance(cls, instance: 'Settings') -> None:
        cls._instance = instance

    @classmethod
    def reset_instance(cls) -> None:
        """重置单例实例"""
        cls._instance = None


def init_settings(config_file: str = 'conf.yaml') -> tuple[Settings, str]:
    """初始化配置和环境状态"""
    config_path = Path(__file__).parent.parent / config_file

    try:
        if config_path.exists():
            with open(config_path, 'r', encoding='utf-8') as f:
                config_data = yaml.safe_load(f) or {}
        else:
            logging.warning(f"配置文件不存在: {config_path}，使用默认配置")
            config_data = {}

        env_state = str(config_data.get("env_state", "testing")).lower()

        settings = Settings(**config_data)
        Settings._set_instance(settings)

        if settings.env_state == EnvironmentState.DEVELOPMENT:
            logging.getLogger().setLevel(logging.DEBUG)

        logging.debug(f"环境: {settings.env_state}")
        logging.debug(f"信道参数: {settings.channel}")

        return settings, env_state

    except Exception as e:
        logging.error(f"配置初始化失败: {str(e)}")
        raise


def get_settings(force_reload: bool = False) -> Settings:
    """获取配置实例

    Args:
        force_reload: 是否强制重新加载配置

    Returns:
        Settings: 配置实例
    """
    if not force_reload and Settings._instance is not None:
        return Settings._instance

    settings, _ = init_settings()
    return settings
