"""Regime report persistence (CSV + JSONL) and report comparison.

Both formats carry the same header (schema version, config hash, seed, eval
protocol) and per-iteration rows, and both parse back into the same values.
``wall_seconds`` is informational only: byte-identity checks across reruns
must exclude it, everything else is deterministic.
"""

from __future__ import annotations

import csv
import json
import io
from dataclasses import dataclass
from pathlib import Path

from .dagger import RegimeReport

REPORT_SCHEMA_VERSION = 1


class ProtocolMismatchError(ValueError):
    """Reports ran under different evaluation protocols and cannot be compared."""


@dataclass
class ReportHeader:
    schema_version: int
    config_hash: str
    task_id: str
    regime: str
    master_seed: int
    eval_seed: int
    eval_episodes: int
    subtask_names: list[str]


@dataclass
class ParsedReport:
    header: ReportHeader
    rows: list[dict]

    @property
    def final_row(self) -> dict:
        return self.rows[-1]


def _header_dict(report: RegimeReport, config_hash: str, eval_seed: int,
                 eval_episodes: int, subtask_names: list[str]) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config_hash": config_hash,
        "task_id": report.task_id,
        "regime": report.regime.value,
        "master_seed": report.master_seed,
        "eval_seed": eval_seed,
        "eval_episodes": eval_episodes,
        "subtask_names": subtask_names,
    }


def _row_dicts(report: RegimeReport, subtask_names: list[str]) -> list[dict]:
    rows = []
    for r in report.rows:
        row = {
            "iteration": r.iteration,
            "label": r.label,
            "dataset_size": r.dataset_size,
            "human_steps_total": r.human_steps_total,
            "intervention_fraction": r.intervention_fraction,
            "rollout_success_rate": r.rollout_success_rate,
            "mean_episode_length": r.eval.mean_episode_length,
            "wall_seconds": r.wall_seconds,
        }
        for name, rate in zip(subtask_names, r.eval.subtask_rates):
            row[f"success_{name}"] = rate
        rows.append(row)
    return rows


def write_report_jsonl(path: str | Path, report: RegimeReport,
                       config_hash: str, eval_seed: int, eval_episodes: int,
                       subtask_names: list[str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _header_dict(report, config_hash, eval_seed, eval_episodes,
                          subtask_names)
    header["kind"] = "regime_report"
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for row in _row_dicts(report, subtask_names):
            f.write(json.dumps(row, sort_keys=True) + "\n")


def write_report_csv(path: str | Path, report: RegimeReport,
                     config_hash: str, eval_seed: int, eval_episodes: int,
                     subtask_names: list[str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _header_dict(report, config_hash, eval_seed, eval_episodes,
                          subtask_names)
    rows = _row_dicts(report, subtask_names)
    buf = io.StringIO()
    for key, value in header.items():
        if key == "subtask_names":
            value = "|".join(value)
        buf.write(f"# {key}={value}\n")
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


_INT_FIELDS = {"iteration", "dataset_size", "human_steps_total"}


def _coerce_row(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if k == "label":
            out[k] = v
        elif k in _INT_FIELDS:
            out[k] = int(v)
        else:
            out[k] = float(v)
    return out


def read_report(path: str | Path) -> ParsedReport:
    """Parse either format back; rows come out with identical values."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    first = text.splitlines()[0] if text else ""
    if first.startswith("{"):
        lines = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
        header_d = lines[0]
        if header_d.get("kind") != "regime_report":
            raise ValueError(f"{path}: not a regime report")
        rows = [_coerce_row(r) for r in lines[1:]]
    elif first.startswith("#"):
        header_d = {}
        body = []
        for ln in text.splitlines():
            if ln.startswith("# "):
                key, _, value = ln[2:].partition("=")
                header_d[key] = value
            else:
                body.append(ln)
        rows = [_coerce_row(r) for r in csv.DictReader(body)]
        header_d["schema_version"] = int(header_d["schema_version"])
        header_d["master_seed"] = int(header_d["master_seed"])
        header_d["eval_seed"] = int(header_d["eval_seed"])
        header_d["eval_episodes"] = int(header_d["eval_episodes"])
        header_d["subtask_names"] = header_d["subtask_names"].split("|")
    else:
        raise ValueError(f"{path}: unrecognized report format")
    header = ReportHeader(
        schema_version=int(header_d["schema_version"]),
        config_hash=header_d["config_hash"],
        task_id=header_d["task_id"],
        regime=header_d["regime"],
        master_seed=int(header_d["master_seed"]),
        eval_seed=int(header_d["eval_seed"]),
        eval_episodes=int(header_d["eval_episodes"]),
        subtask_names=list(header_d["subtask_names"]),
    )
    _check_report(header, rows)
    return ParsedReport(header, rows)


def _check_report(header: ReportHeader, rows: list[dict]) -> None:
    iters = [r["iteration"] for r in rows]
    if iters != sorted(iters):
        raise ValueError("report rows not ordered by iteration")
    humans = [r["human_steps_total"] for r in rows]
    if any(b < a for a, b in zip(humans, humans[1:])):
        raise ValueError("cumulative human_steps_total decreased")
    for r in rows:
        for name in header.subtask_names:
            rate = r[f"success_{name}"]
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"success rate out of [0, 1]: {rate}")


def compare_reports(reports: list[ParsedReport]) -> str:
    """Side-by-side final metrics with deltas against the first report.

    Refuses reports whose evaluation protocols differ (task, eval seed, or
    eval episode count), naming the mismatched fields.
    """
    if len(reports) < 2:
        raise ValueError("compare needs at least 2 reports")
    base = reports[0].header
    for rep in reports[1:]:
        h = rep.header
        mismatched = [name for name in ("task_id", "eval_seed", "eval_episodes")
                      if getattr(h, name) != getattr(base, name)]
        if mismatched:
            raise ProtocolMismatchError(
                f"reports differ in {mismatched}: "
                + ", ".join(f"{n}={getattr(base, n)!r} vs {getattr(h, n)!r}"
                            for n in mismatched))

    final_name = base.subtask_names[-1]
    lines = [f"task={base.task_id} eval_seed={base.eval_seed} "
             f"eval_episodes={base.eval_episodes}"]
    lines.append(f"{'regime':<18} {'seed':>4} {'success':>8} "
                 f"{'human_steps':>12} {'d_success':>10} {'step_ratio':>10}")
    base_final = reports[0].final_row
    for rep in reports:
        row = rep.final_row
        succ = row[f"success_{final_name}"]
        d_succ = succ - base_final[f"success_{final_name}"]
        ratio = row["human_steps_total"] / max(1, base_final["human_steps_total"])
        lines.append(f"{rep.header.regime:<18} {rep.header.master_seed:>4} "
                     f"{succ:>8.3f} {row['human_steps_total']:>12d} "
                     f"{d_succ:>+10.3f} {ratio:>10.3f}")
    return "\n".join(lines)
