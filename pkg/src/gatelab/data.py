"""Transition records and dataset persistence (line-delimited JSON).

A dataset file holds one transition per line; a sidecar manifest
(``<file>.manifest.json``) records the task spec hash, seeds, and schema
version so runs can be compared safely.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .tasks import TaskSpec

HUMAN = "HUMAN"
POLICY = "POLICY"

DATASET_SCHEMA_VERSION = 1


@dataclass
class Transition:
    episode: int
    step: int
    task_id: str
    obs: np.ndarray
    action: np.ndarray
    source: str
    mode_at_step: str

    def __post_init__(self):
        self.obs = np.asarray(self.obs, dtype=np.float64)
        self.action = np.asarray(self.action, dtype=np.float64)
        if self.source not in (HUMAN, POLICY):
            raise ValueError(f"bad source {self.source!r}")

    def to_json(self) -> str:
        return json.dumps({
            "episode": self.episode,
            "step": self.step,
            "task_id": self.task_id,
            "obs": self.obs.tolist(),
            "action": self.action.tolist(),
            "source": self.source,
            "mode_at_step": self.mode_at_step,
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Transition":
        d = json.loads(line)
        return cls(d["episode"], d["step"], d["task_id"],
                   np.array(d["obs"]), np.array(d["action"]),
                   d["source"], d["mode_at_step"])


def task_spec_hash(spec: TaskSpec) -> str:
    payload = json.dumps({
        "task_id": spec.task_id,
        "subtask_names": list(spec.subtask_names),
        "horizon": spec.horizon,
        "dt": spec.dt,
        "randomization": {k: list(v) for k, v in sorted(spec.randomization.items())},
        "tolerance": spec.tolerance,
        "n_arms": spec.n_arms,
        "mobile": spec.mobile,
        "grasp_radius": spec.grasp_radius,
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def save_dataset(path: str | Path, transitions: list[Transition],
                 spec: TaskSpec, seeds: list[int],
                 extra_manifest: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for t in transitions:
            f.write(t.to_json() + "\n")
    manifest = {
        "schema_version": DATASET_SCHEMA_VERSION,
        "task_id": spec.task_id,
        "task_spec_hash": task_spec_hash(spec),
        "seeds": seeds,
        "n_transitions": len(transitions),
    }
    if extra_manifest:
        manifest.update(extra_manifest)
    with open(str(path) + ".manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def load_dataset(path: str | Path) -> list[Transition]:
    with open(path, encoding="utf-8") as f:
        return [Transition.from_json(line) for line in f if line.strip()]


def load_manifest(path: str | Path) -> dict:
    with open(str(path) + ".manifest.json", encoding="utf-8") as f:
        return json.load(f)
