"""gatelab: a desk-scale lab for human-gated interactive imitation learning.

Deterministic 2D arm simulation, bilateral leader-follower teleoperation,
behavior cloning, human-gated DAgger training regimes, an experiment CLI,
and a live teleoperation session service.
"""

__version__ = "0.1.0"

from .arm import ArmModel, JointState, default_arm, forward_kinematics, gravity_torque
from .bilateral import ControlEvent, GainProfile, Mode, mode_transition
from .dagger import GateConfig, Regime, RegimeConfig, RegimeReport, run_regime
from .data import Transition, load_dataset, save_dataset
from .evaluate import EvalResult, evaluate, rollout
from .expert import ScriptedExpert, expert_action, make_expert
from .policy import Policy, TrainConfig, predict, train_bc
from .tasks import TASK_IDS, TaskSpec, make_task_spec
from .world import WorldState, apply_action, observe, reset, step, success

__all__ = [
    "ArmModel", "JointState", "default_arm", "forward_kinematics",
    "gravity_torque", "ControlEvent", "GainProfile", "Mode",
    "mode_transition", "GateConfig", "Regime", "RegimeConfig", "RegimeReport",
    "run_regime", "Transition", "load_dataset", "save_dataset", "EvalResult",
    "evaluate", "rollout", "ScriptedExpert", "expert_action", "make_expert",
    "Policy", "TrainConfig", "predict", "train_bc", "TASK_IDS", "TaskSpec",
    "make_task_spec", "WorldState", "apply_action", "observe", "reset",
    "step", "success",
]
