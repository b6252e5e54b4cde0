"""Pipeline configuration: TOML schema, environment overrides, validation.

One declarative document drives the whole run. Scalar settings can be
overridden through ``TFMNET_<NAME>`` environment variables (for example
``TFMNET_SEED=7``); grids and other structured settings only through the
file itself.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

try:
    import tomllib as tomli
except ModuleNotFoundError:  # python < 3.11
    import tomli

from .errors import ConfigError

ENV_PREFIX = "TFMNET_"

SUBSETS = ("combined", "network", "emotion")
MODEL_KINDS = ("rfr", "gbm")

_TARGET_DEFAULT = (
    "social_maladjustment",
    "specific_internalising",
    "neurodevelopmental_risk",
)


@dataclass(frozen=True)
class PipelineConfig:
    # paths
    corpus_dir: str
    targets_csv: str
    emotion_lexicon: str
    out_dir: str
    valence_lexicon: str = ""  # empty -> read valence rows from emotion_lexicon
    synonym_lexicon: str = ""  # empty -> skip synonym enrichment
    stopwords: str = ""  # empty -> bundled English list
    demographics_csv: str = ""  # empty -> demographics from corpus comments
    # network construction
    k: int = 4
    synonym_scope: str = "present"
    community_method: str = "greedy"
    # emotion profiling
    n_samples: int = 1000
    with_replacement: bool = False
    # features
    correlation_threshold: float = 0.1
    blank_at: float = 0.10
    # modelling
    seed: int = 0
    cv_k: int = 4
    subsets: tuple[str, ...] = SUBSETS
    models: tuple[str, ...] = MODEL_KINDS
    targets: tuple[str, ...] = _TARGET_DEFAULT
    n_perm: int = 10
    delta: float = 0.01
    n_shuffles: int = 1
    gbm_grid: Mapping[str, tuple] = field(default_factory=dict)
    rfr_grid: Mapping[str, tuple] = field(default_factory=dict)

    def path(self, name: str) -> Path:
        return Path(getattr(self, name))


_SCALAR_FIELDS: dict[str, type] = {
    "corpus_dir": str,
    "targets_csv": str,
    "emotion_lexicon": str,
    "valence_lexicon": str,
    "synonym_lexicon": str,
    "stopwords": str,
    "demographics_csv": str,
    "out_dir": str,
    "k": int,
    "synonym_scope": str,
    "community_method": str,
    "n_samples": int,
    "with_replacement": bool,
    "correlation_threshold": float,
    "blank_at": float,
    "seed": int,
    "cv_k": int,
    "n_perm": int,
    "delta": float,
    "n_shuffles": int,
}

_LIST_FIELDS = ("subsets", "models", "targets")


def _coerce(name: str, raw: str, kind: type) -> object:
    try:
        if kind is bool:
            if raw.lower() in ("1", "true", "yes"):
                return True
            if raw.lower() in ("0", "false", "no"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {ENV_PREFIX}{name.upper()}={raw!r} as {kind.__name__}") from exc


def _freeze_grid(grid: Mapping[str, Sequence]) -> dict[str, tuple]:
    out: dict[str, tuple] = {}
    for key, values in grid.items():
        if not isinstance(values, (list, tuple)):
            raise ConfigError(f"grid entry {key!r} must be a list")
        out[key] = tuple(None if v == "none" else v for v in values)
    return out


def load_config(path: str | Path, env: Mapping[str, str] | None = None) -> PipelineConfig:
    """Parse, apply TFMNET_* overrides, and validate."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            doc = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    known = set(_SCALAR_FIELDS) | set(_LIST_FIELDS) | {"gbm_grid", "rfr_grid"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    values: dict[str, object] = {}
    for name, kind in _SCALAR_FIELDS.items():
        if name in doc:
            if not isinstance(doc[name], kind) and not (kind is float and isinstance(doc[name], int)):
                raise ConfigError(f"config key {name!r} must be {kind.__name__}")
            values[name] = kind(doc[name])
    for name in _LIST_FIELDS:
        if name in doc:
            if not isinstance(doc[name], list) or not all(isinstance(v, str) for v in doc[name]):
                raise ConfigError(f"config key {name!r} must be a list of strings")
            values[name] = tuple(doc[name])
    if "gbm_grid" in doc:
        values["gbm_grid"] = _freeze_grid(doc["gbm_grid"])
    if "rfr_grid" in doc:
        values["rfr_grid"] = _freeze_grid(doc["rfr_grid"])

    env = dict(os.environ if env is None else env)
    for name, kind in _SCALAR_FIELDS.items():
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = _coerce(name, env[env_key], kind)

    missing = [n for n in ("corpus_dir", "targets_csv", "emotion_lexicon", "out_dir") if n not in values]
    if missing:
        raise ConfigError(f"required config keys missing: {missing}")

    cfg = PipelineConfig(**values)

    # resolve relative paths against the config file's directory
    base = path.parent
    resolved = {}
    for name in ("corpus_dir", "targets_csv", "emotion_lexicon", "valence_lexicon",
                 "synonym_lexicon", "stopwords", "demographics_csv", "out_dir"):
        value = getattr(cfg, name)
        if value:
            resolved[name] = str((base / value).resolve()) if not os.path.isabs(value) else value
    cfg = replace(cfg, **resolved)
    _validate(cfg)
    return cfg


def _validate(cfg: PipelineConfig) -> None:
    if not Path(cfg.corpus_dir).is_dir():
        raise ConfigError(f"corpus_dir is not a directory: {cfg.corpus_dir}")
    for name in ("targets_csv", "emotion_lexicon"):
        if not Path(getattr(cfg, name)).is_file():
            raise ConfigError(f"{name} not found: {getattr(cfg, name)}")
    for name in ("valence_lexicon", "synonym_lexicon", "stopwords", "demographics_csv"):
        value = getattr(cfg, name)
        if value and not Path(value).is_file():
            raise ConfigError(f"{name} not found: {value}")
    if cfg.k < 1:
        raise ConfigError("k must be >= 1")
    if cfg.synonym_scope not in ("present", "adjacent"):
        raise ConfigError(f"synonym_scope must be present|adjacent, got {cfg.synonym_scope!r}")
    if cfg.community_method not in ("greedy", "louvain"):
        raise ConfigError(f"community_method must be greedy|louvain, got {cfg.community_method!r}")
    if cfg.n_samples < 100:
        raise ConfigError("n_samples must be >= 100")
    if not 0.0 <= cfg.correlation_threshold < 1.0:
        raise ConfigError("correlation_threshold must be in [0, 1)")
    if cfg.cv_k < 2:
        raise ConfigError("cv_k must be >= 2")
    if cfg.n_perm < 0:
        raise ConfigError("n_perm must be >= 0")
    if cfg.delta < 0:
        raise ConfigError("delta must be >= 0")
    if cfg.n_shuffles < 1:
        raise ConfigError("n_shuffles must be >= 1")
    for s in cfg.subsets:
        if s not in SUBSETS:
            raise ConfigError(f"unknown subset {s!r}")
    for m in cfg.models:
        if m not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {m!r}")
    if not cfg.subsets or not cfg.models or not cfg.targets:
        raise ConfigError("subsets, models, and targets must be non-empty")
