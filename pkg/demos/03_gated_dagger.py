"""Human-gated DAgger on reach2d: where do the human labels go?

Runs the three regimes at a small budget over a few seeds and prints the
seed-averaged intervention fraction per iteration. The scripted gate hands
control to the expert only when the policy strays, so later iterations
consume fewer human steps as the policy improves. Single seeds are noisy;
the averaged curve is what declines.
"""

import numpy as np

from gatelab.dagger import Regime, RegimeConfig, run_regime
from gatelab.policy import TrainConfig
from gatelab.tasks import make_task_spec

SEEDS = range(3)


def main():
    spec = make_task_spec("reach2d")
    train = TrainConfig(learning_rate=3e-3, hidden_dim=64, grad_steps=1500)

    success = {regime: [] for regime in Regime}
    steps = {regime: [] for regime in Regime}
    interventions = []
    for seed in SEEDS:
        for regime in Regime:
            config = RegimeConfig(
                regime=regime,
                warmup_demos=5,
                dagger_iterations=0 if regime is Regime.OFFLINE_BC else 3,
                episodes_per_iteration=5,
                train_config=train,
                master_seed=seed,
            )
            report = run_regime(config, spec)
            success[regime].append(report.final_eval.full_success_rate)
            steps[regime].append(report.human_steps_total)
            if regime is Regime.CONTINUAL_DAGGER:
                interventions.append(
                    [r.intervention_fraction for r in report.rows[1:]])

    print(f"{'regime':18s} {'human steps':>12s} {'final success':>14s}"
          f"   (mean over {len(list(SEEDS))} seeds)")
    for regime in Regime:
        print(f"{regime.value:18s} {np.mean(steps[regime]):12.0f}"
              f" {np.mean(success[regime]):14.2f}")

    print()
    print("CONTINUAL_DAGGER intervention fraction by iteration:")
    for i, frac in enumerate(np.mean(interventions, axis=0), start=1):
        bar = "#" * int(40 * frac)
        print(f"  iter {i}: {frac:5.2f} {bar}")
    print()
    print("The gate converts autonomy into savings: steps the policy handles")
    print("alone cost no human labels, so the fraction trends downward as it")
    print("learns. At this small budget single iterations still bounce; see")
    print("tests/test_acceptance.py for the full-budget monotone version.")


if __name__ == "__main__":
    main()
