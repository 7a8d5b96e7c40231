"""Behavior cloning from scripted demonstrations on the reach2d task.

Collects expert demos, trains the from-scratch MLP, and shows how success
on a held-out evaluation seed grows with the number of demonstrations.
"""

from gatelab.dagger import collect_warmup
from gatelab.evaluate import evaluate
from gatelab.expert import make_expert
from gatelab.policy import TrainConfig, train_bc
from gatelab.tasks import make_task_spec

EVAL_SEED = 777_000
EVAL_EPISODES = 20


def main():
    spec = make_task_spec("reach2d")
    expert = make_expert(spec)
    config = TrainConfig(learning_rate=3e-3, hidden_dim=64, grad_steps=1500)

    print(f"task={spec.task_id} obs_dim={spec.obs_dim} act_dim={spec.act_dim}")
    print()
    print("demos   human steps   eval success")
    for k in (2, 5, 10, 20):
        data, info = collect_warmup(spec, expert, k, seed=0)
        policy = train_bc(data, config)
        result = evaluate(policy, spec, EVAL_EPISODES, seed=EVAL_SEED)
        print(f"{k:5d}   {len(data):11d}   {result.full_success_rate:12.2f}")
        if info["discarded_episodes"]:
            print(f"        ({info['discarded_episodes']} failed demos "
                  f"discarded)")
    print()
    print("Every human-labeled step here was spent on full demonstrations.")
    print("demos/03_gated_dagger.py spends the same budget more selectively.")


if __name__ == "__main__":
    main()
