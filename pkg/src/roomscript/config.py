"""Engine configuration: spatial thresholds, tick rate, planner mode, LLM block."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Thresholds:
    near_m: float = 1.0
    touch_m: float = 0.05
    frustum_deg: float = 30.0
    deictic_ms: float = 700.0
    front_gap_m: float = 0.2
    # engine constants beyond the published config keys
    side_gap_m: float = 0.1
    near_gap_m: float = 0.3
    user_reach_m: float = 1.5
    away_step_m: float = 0.5

    @staticmethod
    def from_dict(d: dict) -> "Thresholds":
        known = {k: float(v) for k, v in d.items() if k in Thresholds.__dataclass_fields__}
        return replace(Thresholds(), **known)


@dataclass(frozen=True)
class LlmSettings:
    endpoint: str = "http://localhost:8800/v1"
    model: str = "gpt-4"
    tasker_temperature: float = 0.3
    coder_temperature: float = 0.1
    max_retries: int = 3
    timeout_ms: float = 30000.0
    api_key_env: str = "ROOMSCRIPT_LLM_API_KEY"
    history_turns: int = 8

    def __post_init__(self):
        if not (0.0 <= self.tasker_temperature <= 2.0 and 0.0 <= self.coder_temperature <= 2.0):
            raise ValueError("temperatures must be within [0, 2]")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")

    def api_key(self) -> str:
        return os.environ.get(self.api_key_env, "")

    @staticmethod
    def from_dict(d: dict) -> "LlmSettings":
        mapping = {
            "endpoint": "endpoint",
            "model": "model",
            "tasker_temperature": "tasker_temperature",
            "coder_temperature": "coder_temperature",
            "temperatures": None,
            "max_retries": "max_retries",
            "timeout_ms": "timeout_ms",
            "api_key_env": "api_key_env",
            "history_turns": "history_turns",
        }
        kwargs = {}
        for key, value in d.items():
            if key == "temperatures":
                kwargs["tasker_temperature"] = float(value.get("tasker", 0.3))
                kwargs["coder_temperature"] = float(value.get("coder", 0.1))
            elif mapping.get(key):
                kwargs[mapping[key]] = value
        return LlmSettings(**kwargs)


@dataclass(frozen=True)
class EngineConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    tick_rate: float = 20.0
    planner_mode: str = "deterministic"  # deterministic | llm
    auto_confirm: bool = False
    journal_path: str | None = None
    llm: LlmSettings = field(default_factory=LlmSettings)

    @property
    def tick_dt_ms(self) -> float:
        return 1000.0 / self.tick_rate

    @staticmethod
    def from_dict(d: dict) -> "EngineConfig":
        return EngineConfig(
            thresholds=Thresholds.from_dict(d.get("thresholds", {})),
            tick_rate=float(d.get("tick_rate", 20.0)),
            planner_mode=d.get("planner_mode", "deterministic"),
            auto_confirm=bool(d.get("auto_confirm", False)),
            journal_path=d.get("journal_path"),
            llm=LlmSettings.from_dict(d.get("llm", {})),
        )

    @staticmethod
    def load(path: str) -> "EngineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return EngineConfig.from_dict(json.load(fh))
