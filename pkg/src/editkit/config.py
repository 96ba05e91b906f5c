"""Run configuration: corpora, metric routing, scorer and build settings."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

from .builder import BuildConfig
from .corpus import TASKS
from .errors import ConfigError
from .metrics import MetricConfig
from .semsim import get_scorer
from .tokenize import SUPPORTED_LANGS

# Headline metric per GEC language; simplification and paraphrasing each have
# a single fixed metric family.
GEC_METRICS = ("m2", "errant", "gleu")
CORPUS_FORMATS = ("jsonl", "tsv")


def default_routing() -> Dict[str, str]:
    routing: Dict[str, str] = {}
    for lang in SUPPORTED_LANGS:
        routing[f"simplification/{lang}"] = "sari"
        routing[f"paraphrasing/{lang}"] = "paraphrase"
    for lang in ("ar", "de", "ko"):
        routing[f"gec/{lang}"] = "m2"
    routing["gec/es"] = "errant"
    for lang in ("en", "ja", "zh"):
        routing[f"gec/{lang}"] = "gleu"
    return routing


def _check_routing(routing: Mapping[str, str]):
    for key, metric in routing.items():
        task, _, lang = key.partition("/")
        if task not in TASKS or lang not in SUPPORTED_LANGS:
            raise ConfigError(f"routing key {key!r} is not a task/lang pair")
        if task == "gec":
            allowed = GEC_METRICS
        elif task == "simplification":
            allowed = ("sari",)
        else:
            allowed = ("paraphrase",)
        if metric not in allowed:
            raise ConfigError(
                f"routing {key!r}: metric {metric!r} not in {allowed}"
            )


@dataclass(frozen=True)
class CorpusEntry:
    task: str
    lang: str
    path: str
    split: str = "test"
    format: str = "jsonl"
    m2_path: Optional[str] = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.lang not in SUPPORTED_LANGS:
            raise ConfigError(f"unknown lang {self.lang!r}")
        if self.format not in CORPUS_FORMATS:
            raise ConfigError(f"unknown corpus format {self.format!r}")
        if not self.path:
            raise ConfigError("corpus entry needs a path")

    @property
    def dataset_id(self) -> str:
        return f"{self.task}/{self.lang}/{self.split}"


@dataclass(frozen=True)
class RunConfig:
    corpora: Tuple[CorpusEntry, ...] = ()
    routing: Mapping[str, str] = field(default_factory=default_routing)
    seed: int = 13
    out_dir: str = "runs/out"
    scorer: Union[str, Mapping] = "lexical"
    threshold: float = 0.7
    metric: MetricConfig = field(default_factory=MetricConfig)
    build: Optional[BuildConfig] = None

    def __post_init__(self):
        object.__setattr__(self, "corpora", tuple(self.corpora))
        object.__setattr__(self, "routing", dict(self.routing))
        _check_routing(self.routing)
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        get_scorer(self.scorer)  # reject bad specs early; building is lazy
        seen = set()
        for entry in self.corpora:
            if entry.dataset_id in seen:
                raise ConfigError(f"duplicate corpus entry {entry.dataset_id}")
            seen.add(entry.dataset_id)

    def routed_metric(self, task: str, lang: str) -> str:
        key = f"{task}/{lang}"
        try:
            return self.routing[key]
        except KeyError:
            raise ConfigError(f"no metric routing for {key}") from None

    def to_dict(self) -> dict:
        return {
            "corpora": [dataclasses.asdict(e) for e in self.corpora],
            "routing": dict(sorted(self.routing.items())),
            "seed": self.seed,
            "out_dir": self.out_dir,
            "scorer": self.scorer if isinstance(self.scorer, str)
            else dict(self.scorer),
            "threshold": self.threshold,
            "metric": dataclasses.asdict(self.metric),
            "build": self.build.to_dict() if self.build else None,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        known = {
            "corpora", "routing", "seed", "out_dir", "scorer", "threshold",
            "metric", "build",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        routing = default_routing()
        routing.update(d.get("routing", {}))
        try:
            corpora = tuple(
                CorpusEntry(**entry) for entry in d.get("corpora", ())
            )
            metric = MetricConfig(**d.get("metric", {}))
            build = (
                BuildConfig.from_dict(d["build"])
                if d.get("build") is not None
                else None
            )
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        return cls(
            corpora=corpora,
            routing=routing,
            seed=d.get("seed", 13),
            out_dir=d.get("out_dir", "runs/out"),
            scorer=d.get("scorer", "lexical"),
            threshold=d.get("threshold", 0.7),
            metric=metric,
            build=build,
        )


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a JSON run config. Missing keys fall back to defaults.

    An unreadable file raises OSError (an IO failure, not a config problem);
    bad JSON or bad contents raise ConfigError.
    """
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return RunConfig.from_dict(data)


def save_config(cfg: RunConfig, path: Union[str, Path]):
    Path(path).write_text(
        json.dumps(cfg.to_dict(), indent=2, ensure_ascii=False, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
