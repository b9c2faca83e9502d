"""Pipeline configuration: profiles, JSON config files, client wiring.

The ``paper-sg`` profile holds the thresholds the original tuning study
settled on; a JSON config file can start from a profile and override any
field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .evalharness import EvalConfig
from .fusion import DEFAULT_GRID_X, DEFAULT_GRID_Y
from .labels import EmotionCategory, LabelError, ThresholdConfig
from .llmclient import (
    CachedSpeechClient,
    CachedTextClient,
    HTTPSpeechClient,
    HTTPTextClient,
    ResponseCache,
    SpeechLLMClient,
    StubSpeechClient,
    StubTextClient,
    TextLLMClient,
)
from .qagen import DEFAULT_FILTER_KEYWORDS, QACategory, compile_rules


class ConfigError(ValueError):
    """A config file or profile name is invalid."""


PAPER_SG_ALPHA: Mapping[EmotionCategory, int] = {
    EmotionCategory.ANGRY: 10,
    EmotionCategory.DISGUSTED: 10,
    EmotionCategory.FEARFUL: 4,
    EmotionCategory.HAPPY: 4,
    EmotionCategory.SAD: 2,
    EmotionCategory.SURPRISED: 3,
}

SAMPLE_CATEGORIES = (
    EmotionCategory.ANGRY,
    EmotionCategory.DISGUSTED,
    EmotionCategory.FEARFUL,
    EmotionCategory.HAPPY,
    EmotionCategory.SAD,
    EmotionCategory.SURPRISED,
)


@dataclass(frozen=True)
class ClientConfig:
    backend: str = "stub"  # "stub" or "http"
    endpoint: str = ""
    model: str = ""
    api_key_env: str | None = None
    temperature: float | None = None
    stub_response: str | None = None  # fixed response for the stub backend

    def __post_init__(self) -> None:
        if self.backend not in ("stub", "http"):
            raise ConfigError(f"unknown client backend {self.backend!r}")
        if self.backend == "http" and not (self.endpoint and self.model):
            raise ConfigError("http backend needs endpoint and model")


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob in one place; defaults are the paper-sg profile."""

    x: float = 0.5
    y: float = 0.4
    alpha: Mapping[EmotionCategory, int] = field(default_factory=lambda: dict(PAPER_SG_ALPHA))
    tau_s: float = 30.0
    t_s: float = 2.0
    delta_t_s: float = 1.0
    gender_t_s: float = 2.0
    gender_delta_t_s: float = 0.5
    grid_x: tuple[float, ...] = DEFAULT_GRID_X
    grid_y: tuple[float, ...] = DEFAULT_GRID_Y
    n_per_category: int = 80
    sample_categories: tuple[EmotionCategory, ...] = SAMPLE_CATEGORIES
    max_sample_duration_s: float = 60.0
    seed: int = 0
    workers: int = 1
    retries: int = 2
    backoff_s: float = 1.0
    qa_template_path: str | None = None
    filter_keywords: tuple[str, ...] = DEFAULT_FILTER_KEYWORDS
    category_rules: tuple[tuple[QACategory, str], ...] | None = None
    judge_prompt: str = "prompt1"  # prompt1, prompt2, or a file path
    max_audio_s: float = 30.0
    score_scale_max: float = 100.0
    judge_scale_max: float = 100.0
    generator: ClientConfig = field(default_factory=ClientConfig)
    judge: ClientConfig = field(default_factory=ClientConfig)
    speech: ClientConfig = field(default_factory=ClientConfig)
    cache_dir: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", dict(self.alpha))
        object.__setattr__(self, "grid_x", tuple(self.grid_x))
        object.__setattr__(self, "grid_y", tuple(self.grid_y))
        object.__setattr__(self, "sample_categories", tuple(self.sample_categories))
        object.__setattr__(self, "filter_keywords", tuple(self.filter_keywords))
        if self.category_rules is not None:
            object.__setattr__(
                self, "category_rules", tuple((QACategory(c), p) for c, p in self.category_rules)
            )
        if self.n_per_category < 1:
            raise ConfigError(f"n_per_category = {self.n_per_category} must be >= 1")
        if self.workers < 1:
            raise ConfigError(f"workers = {self.workers} must be >= 1")
        if self.retries < 0:
            raise ConfigError(f"retries = {self.retries} must be >= 0")
        self.thresholds()  # validates x, y, alpha, tau, t, dt

    def thresholds(self) -> ThresholdConfig:
        try:
            return ThresholdConfig.from_xy(
                self.x,
                self.y,
                alpha=self.alpha,
                tau_s=self.tau_s,
                t_s=self.t_s,
                delta_t_s=self.delta_t_s,
            )
        except LabelError as exc:
            raise ConfigError(str(exc)) from None

    def qa_template(self) -> str:
        if self.qa_template_path:
            return _read_text(self.qa_template_path)
        return load_packaged_template("qa_generation.txt")

    def judge_template(self) -> str:
        if self.judge_prompt in ("prompt1", "prompt2"):
            return load_packaged_template(f"judge_{self.judge_prompt}.txt")
        return _read_text(self.judge_prompt)

    def compiled_rules(self):
        try:
            return compile_rules(self.category_rules) if self.category_rules else compile_rules()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def eval_config(self) -> EvalConfig:
        return EvalConfig(
            judge_template=self.judge_template(),
            max_audio_s=self.max_audio_s,
            score_scale_max=self.score_scale_max,
            judge_scale_max=self.judge_scale_max,
            retries=self.retries,
            backoff_s=self.backoff_s,
        )


PROFILES: Mapping[str, PipelineConfig] = {"paper-sg": PipelineConfig()}


def load_packaged_template(name: str) -> str:
    return (resources.files("paraqa") / "templates" / name).read_text(encoding="utf-8")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read template {path}: {exc}") from None


def _parse_client(obj, where: str) -> ClientConfig:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    allowed = {f.name for f in fields(ClientConfig)}
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return ClientConfig(**obj)


def _parse_overrides(raw: dict, where: str) -> dict:
    out = dict(raw)
    if "alpha" in out:
        try:
            out["alpha"] = {
                EmotionCategory.parse(k): int(v) for k, v in dict(out["alpha"]).items()
            }
        except (LabelError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: alpha: {exc}") from None
    if "sample_categories" in out:
        try:
            out["sample_categories"] = tuple(
                EmotionCategory.parse(c) for c in out["sample_categories"]
            )
        except LabelError as exc:
            raise ConfigError(f"{where}: sample_categories: {exc}") from None
    if "category_rules" in out and out["category_rules"] is not None:
        try:
            out["category_rules"] = tuple(
                (QACategory(c), str(p)) for c, p in out["category_rules"]
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: category_rules: {exc}") from None
    for key in ("grid_x", "grid_y", "filter_keywords"):
        if key in out:
            out[key] = tuple(out[key])
    for key in ("generator", "judge", "speech"):
        if key in out:
            out[key] = _parse_client(out[key], f"{where}: {key}")
    return out


def load_config(path: str | Path | None = None, profile: str | None = None) -> PipelineConfig:
    """Resolves a config: profile defaults, then JSON file overrides.

    The file may name its own base via a ``profile`` key; an explicit
    ``profile`` argument wins over that.
    """
    file_overrides: dict = {}
    file_profile = None
    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        file_profile = raw.pop("profile", None)
        file_overrides = raw

    name = profile or file_profile or "paper-sg"
    if name not in PROFILES:
        raise ConfigError(f"unknown profile {name!r}; available: {sorted(PROFILES)}")
    base = PROFILES[name]
    if not file_overrides:
        return base

    allowed = {f.name for f in fields(PipelineConfig)}
    unknown = set(file_overrides) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    overrides = _parse_overrides(file_overrides, str(path))
    try:
        cfg = replace(base, **overrides)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None
    cfg.compiled_rules()  # surfaces bad regexes at load time
    return cfg


def serialize(cfg: PipelineConfig) -> dict:
    """JSON-ready view of a config, for the report command and debugging."""
    return {
        "x": cfg.x,
        "y": cfg.y,
        "alpha": {cat.value: a for cat, a in sorted(cfg.alpha.items(), key=lambda kv: kv[0].value)},
        "tau_s": cfg.tau_s,
        "t_s": cfg.t_s,
        "delta_t_s": cfg.delta_t_s,
        "gender_t_s": cfg.gender_t_s,
        "gender_delta_t_s": cfg.gender_delta_t_s,
        "grid_x": list(cfg.grid_x),
        "grid_y": list(cfg.grid_y),
        "n_per_category": cfg.n_per_category,
        "sample_categories": [c.value for c in cfg.sample_categories],
        "max_sample_duration_s": cfg.max_sample_duration_s,
        "seed": cfg.seed,
        "workers": cfg.workers,
        "retries": cfg.retries,
        "backoff_s": cfg.backoff_s,
        "qa_template_path": cfg.qa_template_path,
        "filter_keywords": list(cfg.filter_keywords),
        "category_rules": (
            [[c.value, p] for c, p in cfg.category_rules] if cfg.category_rules else None
        ),
        "judge_prompt": cfg.judge_prompt,
        "max_audio_s": cfg.max_audio_s,
        "score_scale_max": cfg.score_scale_max,
        "judge_scale_max": cfg.judge_scale_max,
        "generator": _client_json(cfg.generator),
        "judge": _client_json(cfg.judge),
        "speech": _client_json(cfg.speech),
        "cache_dir": cfg.cache_dir,
    }


def _client_json(cfg: ClientConfig) -> dict:
    return {
        "backend": cfg.backend,
        "endpoint": cfg.endpoint,
        "model": cfg.model,
        "api_key_env": cfg.api_key_env,
        "temperature": cfg.temperature,
        "stub_response": cfg.stub_response,
    }


def build_text_client(cfg: ClientConfig, cache_dir: str | None = None) -> TextLLMClient:
    if cfg.backend == "http":
        client: TextLLMClient = HTTPTextClient(
            endpoint=cfg.endpoint,
            model=cfg.model,
            api_key_env=cfg.api_key_env,
            temperature=cfg.temperature,
        )
    else:
        client = StubTextClient(default=cfg.stub_response or "")
    if cache_dir:
        client = CachedTextClient(inner=client, cache=ResponseCache(cache_dir), tag=cfg.model or "text")
    return client


def build_speech_client(cfg: ClientConfig, cache_dir: str | None = None) -> SpeechLLMClient:
    if cfg.backend == "http":
        client: SpeechLLMClient = HTTPSpeechClient(
            endpoint=cfg.endpoint, model=cfg.model, api_key_env=cfg.api_key_env
        )
    else:
        client = StubSpeechClient()
    if cache_dir:
        client = CachedSpeechClient(inner=client, cache=ResponseCache(cache_dir))
    return client
