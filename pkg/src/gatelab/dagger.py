"""Human-gated interactive imitation learning loop and the three regimes.

The loop alternates gated rollouts with policy updates. During a rollout the
gate decides per step whether the expert intervenes; intervention steps
execute a blend of the two actions but always store the pure expert action as
the training label. Only intervention (and warmup demo) steps enter the
training dataset.

Regimes:
  OFFLINE_BC       - expert demos only, one from-scratch training run
  CONTINUAL_DAGGER - warmup, then iterations of gated rollout + finetune
  BATCHED_DAGGER   - the continual loop's final dataset, retrained from scratch
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .data import HUMAN, Transition
from .evaluate import EvalResult, evaluate
from .expert import ScriptedExpert, expert_action, make_expert
from .policy import Policy, TrainConfig, finetune, predict, train_bc
from .tasks import TaskSpec
from .world import apply_action, is_done, observe, reset, success

# Disjoint per-purpose seed streams derived from the master seed, so runs
# with different master seeds are fully decorrelated and e.g. changing
# eval_episodes never changes the collected data.
WARMUP_RETRY_STRIDE = 1_000_003
WARMUP_STREAM = 1
EVAL_STREAM = 2
ITERATION_STREAM_BASE = 16


def derive_seed(master_seed: int, stream: int) -> int:
    rng = np.random.Generator(np.random.Philox(key=[master_seed, stream]))
    return int(rng.integers(0, 2 ** 62))


class GateDecision(Enum):
    INTERVENE = "INTERVENE"
    AUTONOMOUS = "AUTONOMOUS"


class Regime(Enum):
    OFFLINE_BC = "OFFLINE_BC"
    CONTINUAL_DAGGER = "CONTINUAL_DAGGER"
    BATCHED_DAGGER = "BATCHED_DAGGER"


@dataclass(frozen=True)
class GateConfig:
    epsilon: float = 0.02
    lam: float = 1.0  # blend weight toward the expert during intervention
    expert: str = "scripted"
    min_hold: int = 5  # intervention persists this many steps before re-check

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must be in [0, 1]")
        if self.min_hold < 1:
            raise ValueError("min_hold must be >= 1")


@dataclass(frozen=True)
class RegimeConfig:
    regime: Regime
    warmup_demos: int = 10
    dagger_iterations: int = 4
    episodes_per_iteration: int = 5
    train_config: TrainConfig = field(default_factory=TrainConfig)
    gate_config: GateConfig = field(default_factory=GateConfig)
    eval_episodes: int = 20
    master_seed: int = 0

    def __post_init__(self):
        if self.warmup_demos < 1:
            raise ValueError("warmup_demos must be >= 1")
        if self.regime is Regime.OFFLINE_BC and self.dagger_iterations != 0:
            raise ValueError("OFFLINE_BC requires dagger_iterations = 0")


@dataclass
class IterationMetrics:
    iteration: int
    label: str
    dataset_size: int
    human_steps_total: int
    intervention_fraction: float
    rollout_success_rate: float
    eval: EvalResult
    wall_seconds: float = 0.0


@dataclass
class RegimeReport:
    regime: Regime
    task_id: str
    master_seed: int
    rows: list[IterationMetrics]
    human_steps_total: int
    final_eval: EvalResult
    dataset: list[Transition] = field(default_factory=list)
    final_policy: Policy | None = None


def scripted_gate(policy_action: np.ndarray, expert_act: np.ndarray,
                  gate: GateConfig) -> GateDecision:
    """Intervene iff the L2 action disagreement exceeds epsilon."""
    policy_action = np.asarray(policy_action, dtype=np.float64)
    expert_act = np.asarray(expert_act, dtype=np.float64)
    if policy_action.shape != expert_act.shape:
        raise ValueError("action dimensions do not match")
    dist = float(np.linalg.norm(policy_action - expert_act))
    return GateDecision.INTERVENE if dist > gate.epsilon else GateDecision.AUTONOMOUS


def blended_action(policy_action: np.ndarray, expert_act: np.ndarray,
                   lam: float) -> np.ndarray:
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    policy_action = np.asarray(policy_action, dtype=np.float64)
    expert_act = np.asarray(expert_act, dtype=np.float64)
    if policy_action.shape != expert_act.shape:
        raise ValueError("action dimensions do not match")
    return (1.0 - lam) * policy_action + lam * expert_act


def _collect_demo(spec: TaskSpec, expert: ScriptedExpert, ep: int, seed: int,
                  max_retries: int):
    """One successful expert demo; failed attempts redraw from a retry stream."""
    discarded = 0
    for retry in range(max_retries + 1):
        ep_seed = seed + ep + retry * WARMUP_RETRY_STRIDE
        world = reset(spec, ep_seed)
        episode: list[Transition] = []
        step = 0
        while not is_done(world, spec):
            act = expert_action(expert, world, spec)
            episode.append(Transition(ep, step, spec.task_id,
                                      observe(world, spec), act,
                                      HUMAN, "TELEOP"))
            world = apply_action(world, spec, act)
            step += 1
            if all(success(world, spec)):
                break
        if all(success(world, spec)):
            return episode, ep_seed, discarded
        discarded += 1
    raise RuntimeError(f"expert failed {max_retries + 1} attempts at demo {ep}")


def collect_warmup(spec: TaskSpec, expert: ScriptedExpert, k: int, seed: int,
                   max_retries: int = 3):
    """K successful expert demonstration episodes.

    Only good demos are kept; returns (transitions, info) where info counts
    the discarded attempts and lists the seeds actually used.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    transitions: list[Transition] = []
    seeds_used: list[int] = []
    discarded = 0
    for ep in range(k):
        episode, ep_seed, bad = _collect_demo(spec, expert, ep, seed,
                                              max_retries)
        transitions.extend(episode)
        seeds_used.append(ep_seed)
        discarded += bad
    return transitions, {"discarded_episodes": discarded, "seeds": seeds_used}


def matched_warmup_demos(spec: TaskSpec, expert: ScriptedExpert,
                         budget_steps: int, seed: int,
                         max_demos: int = 500) -> int:
    """Demo count whose cumulative human-labeled steps best matches a budget.

    Walks the same warmup stream OFFLINE_BC would use and stops at the demo
    count closest to ``budget_steps``, so regimes can be compared at matched
    human-step budgets.
    """
    if budget_steps < 1:
        raise ValueError("budget_steps must be >= 1")
    total = 0
    for ep in range(max_demos):
        episode, _, _ = _collect_demo(spec, expert, ep, seed, max_retries=3)
        if total + len(episode) >= budget_steps:
            overshoot = total + len(episode) - budget_steps
            undershoot = budget_steps - total
            return ep + 1 if (overshoot <= undershoot or ep == 0) else ep
        total += len(episode)
    return max_demos


def run_dagger_iteration(policy: Policy, dataset: list[Transition],
                         spec: TaskSpec, expert: ScriptedExpert,
                         gate: GateConfig, episodes: int,
                         train_config: TrainConfig, seed: int,
                         episode_base: int = 0):
    """One gated data-collection round followed by a finetune on all data.

    Returns (new policy, aggregated dataset, rollout stats dict). Stored
    labels on intervention steps are the expert's action, not the blended
    action that was executed.
    """
    new_data: list[Transition] = []
    total_steps = 0
    intervened = 0
    successes = 0
    for ep in range(episodes):
        world = reset(spec, seed + ep)
        hold = 0
        step = 0
        while not is_done(world, spec):
            obs = observe(world, spec)
            a_pol = predict(policy, obs)
            a_exp = expert_action(expert, world, spec)
            if hold > 0:
                decision = GateDecision.INTERVENE
                hold -= 1
            else:
                decision = scripted_gate(a_pol, a_exp, gate)
                if decision is GateDecision.INTERVENE:
                    hold = gate.min_hold - 1
            if decision is GateDecision.INTERVENE:
                executed = blended_action(a_pol, a_exp, gate.lam)
                new_data.append(Transition(episode_base + ep, step,
                                           spec.task_id, obs, a_exp,
                                           HUMAN, "TAKEOVER"))
                intervened += 1
            else:
                executed = a_pol
            world = apply_action(world, spec, executed)
            step += 1
            if all(success(world, spec)):
                break
        total_steps += step
        successes += all(success(world, spec))
    aggregated = dataset + new_data
    new_policy = finetune(policy, aggregated, train_config)
    stats = {
        "episodes": episodes,
        "total_steps": total_steps,
        "intervened_steps": intervened,
        "intervention_fraction": intervened / max(1, total_steps),
        "rollout_success_rate": successes / max(1, episodes),
        "human_steps_added": len(new_data),
    }
    return new_policy, aggregated, stats


def run_regime(config: RegimeConfig, spec: TaskSpec) -> RegimeReport:
    """Execute one full training regime and report per-iteration metrics."""
    import time

    expert = make_expert(spec)
    eval_seed = derive_seed(config.master_seed, EVAL_STREAM)
    rows: list[IterationMetrics] = []

    def eval_row(iteration, label, policy, dataset, human_steps, stats=None,
                 started=None):
        res = evaluate(policy, spec, config.eval_episodes, eval_seed)
        rows.append(IterationMetrics(
            iteration=iteration,
            label=label,
            dataset_size=len(dataset),
            human_steps_total=human_steps,
            intervention_fraction=stats["intervention_fraction"] if stats else 1.0,
            rollout_success_rate=stats["rollout_success_rate"] if stats else 1.0,
            eval=res,
            wall_seconds=time.perf_counter() - started if started else 0.0,
        ))
        return res

    t0 = time.perf_counter()
    warmup, _ = collect_warmup(spec, expert, config.warmup_demos,
                               derive_seed(config.master_seed, WARMUP_STREAM))
    human_steps = len(warmup)
    dataset = list(warmup)

    if config.regime is Regime.OFFLINE_BC:
        policy = train_bc(dataset, config.train_config)
        final = eval_row(0, "offline_bc", policy, dataset, human_steps,
                         started=t0)
        return RegimeReport(config.regime, spec.task_id, config.master_seed,
                            rows, human_steps, final, dataset, policy)

    policy = train_bc(dataset, config.train_config)
    final = eval_row(0, "warmup", policy, dataset, human_steps, started=t0)
    for i in range(1, config.dagger_iterations + 1):
        t_iter = time.perf_counter()
        iter_seed = derive_seed(config.master_seed, ITERATION_STREAM_BASE + i)
        iter_cfg = replace(config.train_config,
                           seed=config.train_config.seed + i)
        policy, dataset, stats = run_dagger_iteration(
            policy, dataset, spec, expert, config.gate_config,
            config.episodes_per_iteration, iter_cfg, iter_seed,
            episode_base=config.warmup_demos + (i - 1) * config.episodes_per_iteration)
        human_steps += stats["human_steps_added"]
        final = eval_row(i, f"dagger_{i}", policy, dataset, human_steps,
                         stats=stats, started=t_iter)

    if config.regime is Regime.BATCHED_DAGGER:
        # The from-scratch relaunch gets the same total gradient budget the
        # continual loop accumulated (warmup + one finetune per iteration).
        t_final = time.perf_counter()
        retrain_cfg = replace(
            config.train_config,
            grad_steps=config.train_config.grad_steps * (config.dagger_iterations + 1))
        policy = train_bc(dataset, retrain_cfg)
        final = eval_row(config.dagger_iterations + 1, "batched_retrain",
                         policy, dataset, human_steps, started=t_final)

    return RegimeReport(config.regime, spec.task_id, config.master_seed,
                        rows, human_steps, final, dataset, policy)
