"""Experiment configuration: YAML files with strict validation.

A configuration file has five sections (``task``, ``regime``, ``train``,
``gate``, ``gains``) plus ``output``. Every section is validated in full
before anything runs; unknown keys are rejected with the offending section
and field named. ``serialize_config(parse_config(path))`` is idempotent.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .bilateral import GainProfile
from .dagger import GateConfig, Regime, RegimeConfig
from .policy import TrainConfig
from .tasks import TASK_IDS, TaskSpec, make_task_spec

CONFIG_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "runs/default"
    formats: tuple[str, ...] = ("csv", "jsonl")

    def __post_init__(self):
        bad = set(self.formats) - {"csv", "jsonl"}
        if bad:
            raise ConfigError(f"output.formats: unknown formats {sorted(bad)}")


@dataclass(frozen=True)
class ExperimentConfig:
    task_id: str
    regime: RegimeConfig
    gains: GainProfile = field(default_factory=GainProfile)
    output: OutputConfig = field(default_factory=OutputConfig)

    def task_spec(self) -> TaskSpec:
        return make_task_spec(self.task_id)


def _section(data: dict, name: str, required: bool = True) -> dict:
    if name not in data:
        if required:
            raise ConfigError(f"missing section {name!r}")
        return {}
    sec = data[name]
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return sec


def _build(cls, section: dict, name: str, **extra):
    known = {f.name for f in fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"{name}: unknown keys {sorted(unknown)}")
    try:
        return cls(**section, **extra)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: {e}") from e


def parse_config_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping")
    known_sections = {"task", "regime", "train", "gate", "gains", "output"}
    unknown = set(data) - known_sections
    if unknown:
        raise ConfigError(f"unknown sections {sorted(unknown)}")

    task = _section(data, "task")
    if set(task) - {"task_id"}:
        raise ConfigError(f"task: unknown keys {sorted(set(task) - {'task_id'})}")
    if "task_id" not in task:
        raise ConfigError("task: missing field 'task_id'")
    task_id = task["task_id"]
    if task_id not in TASK_IDS:
        raise ConfigError(f"task.task_id: unknown task {task_id!r}, "
                          f"expected one of {TASK_IDS}")

    train = _build(TrainConfig, _section(data, "train", required=False),
                   "train")
    gate = _build(GateConfig, _section(data, "gate", required=False), "gate")

    regime_sec = dict(_section(data, "regime"))
    if "regime" not in regime_sec:
        raise ConfigError("regime: missing field 'regime'")
    try:
        regime_sec["regime"] = Regime(regime_sec["regime"])
    except ValueError:
        raise ConfigError(
            f"regime.regime: unknown regime {regime_sec['regime']!r}, "
            f"expected one of {[r.value for r in Regime]}") from None
    regime = _build(RegimeConfig, regime_sec, "regime",
                    train_config=train, gate_config=gate)

    gains = _build(GainProfile, _section(data, "gains", required=False),
                   "gains")

    out_sec = dict(_section(data, "output", required=False))
    if "formats" in out_sec:
        out_sec["formats"] = tuple(out_sec["formats"])
    output = _build(OutputConfig, out_sec, "output")

    return ExperimentConfig(task_id=task_id, regime=regime, gains=gains,
                            output=output)


def parse_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    return parse_config_dict(data if data is not None else {})


def serialize_config(config: ExperimentConfig) -> dict:
    """Canonical dict form; parse(serialize(c)) == c."""
    regime = asdict(config.regime)
    train = regime.pop("train_config")
    gate = regime.pop("gate_config")
    regime["regime"] = config.regime.regime.value
    return {
        "task": {"task_id": config.task_id},
        "regime": regime,
        "train": train,
        "gate": gate,
        "gains": asdict(config.gains),
        "output": {"directory": config.output.directory,
                   "formats": list(config.output.formats)},
    }


def write_config(path: str | Path, config: ExperimentConfig) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(serialize_config(config), f, sort_keys=True)


def config_hash(config: ExperimentConfig) -> str:
    """sha256 over the canonical serialized form (output paths excluded)."""
    payload = serialize_config(config)
    del payload["output"]
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()
