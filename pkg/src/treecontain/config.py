"""Configuration management module"""

import os
from pathlib import Path
from typing import Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

ClassTarget = Literal["any", "reticulation_visible", "nearly_stable", "theorem2"]


class EngineConfig(BaseModel):
    """Containment engine configuration"""
    strict: bool = Field(default=False)
    trace: Literal["off", "summary", "full"] = Field(default="summary")
    seed: Optional[int] = Field(default=None)
    check_budget: bool = Field(default=True)


class OracleConfig(BaseModel):
    """Brute-force oracle limits"""
    max_reticulations: int = Field(default=16, ge=0)
    max_mul_leaves: int = Field(default=14, ge=1)


class GeneratorConfig(BaseModel):
    """Instance generator configuration"""
    retry_budget: int = Field(default=1000, ge=1)
    strategy: Literal["random", "structured"] = Field(default="random")


class BenchConfig(BaseModel):
    """Benchmark ladder configuration"""
    min_exp: int = Field(default=10, ge=2)
    max_exp: int = Field(default=16, ge=2)
    repeats: int = Field(default=3, ge=1)
    class_target: Literal["reticulation_visible", "theorem2", "tree"] = Field(default="reticulation_visible")
    workers: int = Field(default=1, ge=1)
    seed: int = Field(default=0)


class TreecontainConfig(BaseModel):
    """Overall treecontain configuration"""
    engine: EngineConfig = Field(default_factory=EngineConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)
    log_level: str = Field(default="INFO")


def apply_env_overrides(config: TreecontainConfig) -> TreecontainConfig:
    """Apply TREECONTAIN_* environment variables (and a .env file) on top of config"""
    load_dotenv()
    data = config.model_dump()
    if os.getenv("TREECONTAIN_LOG_LEVEL"):
        data["log_level"] = os.environ["TREECONTAIN_LOG_LEVEL"].upper()
    if os.getenv("TREECONTAIN_STRICT"):
        data["engine"]["strict"] = os.environ["TREECONTAIN_STRICT"].lower() in ("1", "true", "yes")
    if os.getenv("TREECONTAIN_SEED"):
        data["engine"]["seed"] = os.environ["TREECONTAIN_SEED"]
    if os.getenv("TREECONTAIN_ORACLE_MAX_RETICULATIONS"):
        data["oracle"]["max_reticulations"] = os.environ["TREECONTAIN_ORACLE_MAX_RETICULATIONS"]
    return TreecontainConfig(**data)


def load_config(config_path: Path) -> TreecontainConfig:
    """Load configuration file"""
    if not config_path.exists():
        return TreecontainConfig()

    with open(config_path, 'r', encoding='utf-8') as f:
        config_data = yaml.safe_load(f) or {}

    return TreecontainConfig(**config_data)


def save_config(config: TreecontainConfig, config_path: Path) -> None:
    """Save configuration file"""
    config_path.parent.mkdir(parents=True, exist_ok=True)

    with open(config_path, 'w', encoding='utf-8') as f:
        yaml.dump(config.model_dump(mode="json"), f, default_flow_style=False, allow_unicode=True)
