"""Single-hidden-layer MLP regressor with analytic gradients and Adam.

Inputs and targets are z-normalized with statistics fit on the training set;
the network maps normalized observations to normalized actions through one
tanh hidden layer. Training is fully deterministic given (dataset order,
config seed).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Transition

POLICY_FORMAT_VERSION = 1
_MAGIC = b"GLPOL"
STD_FLOOR = 1e-6


@dataclass
class NormStats:
    obs_mean: np.ndarray
    obs_std: np.ndarray
    act_mean: np.ndarray
    act_std: np.ndarray

    def __post_init__(self):
        for name in ("obs_mean", "obs_std", "act_mean", "act_std"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        self.obs_std = np.maximum(self.obs_std, STD_FLOOR)
        self.act_std = np.maximum(self.act_std, STD_FLOOR)


@dataclass
class Policy:
    weights: np.ndarray
    obs_dim: int
    act_dim: int
    hidden_dim: int
    norm_stats: NormStats

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        expected = (self.obs_dim + 1) * self.hidden_dim \
            + (self.hidden_dim + 1) * self.act_dim
        if self.weights.shape != (expected,):
            raise ValueError(f"expected {expected} parameters, got {self.weights.shape}")

    def copy(self) -> "Policy":
        return Policy(self.weights.copy(), self.obs_dim, self.act_dim,
                      self.hidden_dim, NormStats(
                          self.norm_stats.obs_mean.copy(),
                          self.norm_stats.obs_std.copy(),
                          self.norm_stats.act_mean.copy(),
                          self.norm_stats.act_std.copy()))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    grad_steps: int = 2000
    seed: int = 0
    hidden_dim: int = 64
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.grad_steps < 0:
            raise ValueError("learning_rate, batch_size must be positive; grad_steps >= 0")


def _unpack(policy: Policy):
    o, h, a = policy.obs_dim, policy.hidden_dim, policy.act_dim
    w = policy.weights
    i = 0
    w1 = w[i:i + h * o].reshape(h, o); i += h * o
    b1 = w[i:i + h]; i += h
    w2 = w[i:i + a * h].reshape(a, h); i += a * h
    b2 = w[i:i + a]
    return w1, b1, w2, b2


def _forward_normalized(policy: Policy, x: np.ndarray) -> np.ndarray:
    w1, b1, w2, b2 = _unpack(policy)
    return np.tanh(x @ w1.T + b1) @ w2.T + b2


def predict(policy: Policy, obs: np.ndarray) -> np.ndarray:
    """Denormalized action for one observation vector."""
    obs = np.asarray(obs, dtype=np.float64)
    if obs.shape != (policy.obs_dim,):
        raise ValueError(f"observation must have shape ({policy.obs_dim},)")
    if not np.all(np.isfinite(obs)):
        raise ValueError("observation contains non-finite entries")
    ns = policy.norm_stats
    x = (obs - ns.obs_mean) / ns.obs_std
    y = _forward_normalized(policy, x[None, :])[0]
    return y * ns.act_std + ns.act_mean


def _batch_arrays(policy: Policy, batch: list[Transition]):
    ns = policy.norm_stats
    x = np.stack([t.obs for t in batch])
    t_ = np.stack([t.action for t in batch])
    return (x - ns.obs_mean) / ns.obs_std, (t_ - ns.act_mean) / ns.act_std


def loss_and_grad(policy: Policy, batch: list[Transition]):
    """MSE behavior-cloning loss and its analytic gradient (flat vector)."""
    if not batch:
        raise ValueError("batch must be non-empty")
    x, t = _batch_arrays(policy, batch)
    w1, b1, w2, b2 = _unpack(policy)
    n = x.shape[0]
    hid = np.tanh(x @ w1.T + b1)
    y = hid @ w2.T + b2
    err = y - t
    loss = float(np.sum(err ** 2) / n)
    dy = 2.0 * err / n
    dw2 = dy.T @ hid
    db2 = dy.sum(axis=0)
    dhid = (dy @ w2) * (1.0 - hid ** 2)
    dw1 = dhid.T @ x
    db1 = dhid.sum(axis=0)
    grad = np.concatenate([dw1.ravel(), db1, dw2.ravel(), db2])
    return loss, grad


def fit_norm_stats(dataset: list[Transition]) -> NormStats:
    obs = np.stack([t.obs for t in dataset])
    act = np.stack([t.action for t in dataset])
    return NormStats(obs.mean(axis=0), obs.std(axis=0),
                     act.mean(axis=0), act.std(axis=0))


def _init_weights(obs_dim: int, act_dim: int, hidden_dim: int,
                  rng: np.random.Generator) -> np.ndarray:
    w1 = rng.uniform(-0.1, 0.1, (hidden_dim, obs_dim)) / np.sqrt(obs_dim)
    b1 = np.zeros(hidden_dim)
    w2 = rng.uniform(-0.1, 0.1, (act_dim, hidden_dim)) / np.sqrt(hidden_dim)
    b2 = np.zeros(act_dim)
    return np.concatenate([w1.ravel(), b1, w2.ravel(), b2])


def train_bc(dataset: list[Transition], config: TrainConfig,
             init: Policy | None = None) -> Policy:
    """Behavior cloning with Adam on seeded shuffled mini-batches.

    With ``init`` the weights carry over but normalization statistics are
    refit on the full dataset and the optimizer state starts fresh.
    """
    if not dataset:
        raise ValueError("dataset must be non-empty")
    stats = fit_norm_stats(dataset)
    rng = np.random.Generator(np.random.Philox(key=config.seed))
    if init is None:
        obs_dim = dataset[0].obs.shape[0]
        act_dim = dataset[0].action.shape[0]
        weights = _init_weights(obs_dim, act_dim, config.hidden_dim, rng)
        policy = Policy(weights, obs_dim, act_dim, config.hidden_dim, stats)
    else:
        policy = init.copy()
        policy.norm_stats = stats

    m = np.zeros_like(policy.weights)
    v = np.zeros_like(policy.weights)
    n = len(dataset)
    order = np.arange(n)
    cursor = n  # force shuffle on first batch
    for step in range(1, config.grad_steps + 1):
        idx = []
        while len(idx) < min(config.batch_size, n):
            if cursor >= n:
                rng.shuffle(order)
                cursor = 0
            take = min(config.batch_size - len(idx), n - cursor)
            idx.extend(order[cursor:cursor + take])
            cursor += take
        batch = [dataset[i] for i in idx]
        _, grad = loss_and_grad(policy, batch)
        m = config.adam_beta1 * m + (1 - config.adam_beta1) * grad
        v = config.adam_beta2 * v + (1 - config.adam_beta2) * grad ** 2
        m_hat = m / (1 - config.adam_beta1 ** step)
        v_hat = v / (1 - config.adam_beta2 ** step)
        policy.weights = policy.weights - config.learning_rate * m_hat \
            / (np.sqrt(v_hat) + config.adam_eps)
    return policy


def finetune(policy: Policy, dataset: list[Transition],
             config: TrainConfig) -> Policy:
    """Continue training from ``policy`` on the full aggregated dataset."""
    return train_bc(dataset, config, init=policy)


def dataset_loss(policy: Policy, dataset: list[Transition]) -> float:
    loss, _ = loss_and_grad(policy, dataset)
    return loss


# ---------------------------------------------------------------------------
# Serialization (.pol): magic, format version, JSON header, float64 LE block
# ---------------------------------------------------------------------------

def save_policy(path: str | Path, policy: Policy) -> None:
    header = json.dumps({
        "format_version": POLICY_FORMAT_VERSION,
        "obs_dim": policy.obs_dim,
        "act_dim": policy.act_dim,
        "hidden_dim": policy.hidden_dim,
        "obs_mean": policy.norm_stats.obs_mean.tolist(),
        "obs_std": policy.norm_stats.obs_std.tolist(),
        "act_mean": policy.norm_stats.act_mean.tolist(),
        "act_std": policy.norm_stats.act_std.tolist(),
    }, sort_keys=True).encode("utf-8")
    block = policy.weights.astype("<f8").tobytes()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", POLICY_FORMAT_VERSION, len(header)))
        f.write(header)
        f.write(block)


def load_policy(path: str | Path) -> Policy:
    with open(path, "rb") as f:
        magic = f.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a policy file")
        version, hlen = struct.unpack("<II", f.read(8))
        if version != POLICY_FORMAT_VERSION:
            raise ValueError(f"unsupported policy format version {version}")
        header = json.loads(f.read(hlen).decode("utf-8"))
        weights = np.frombuffer(f.read(), dtype="<f8").astype(np.float64)
    stats = NormStats(np.array(header["obs_mean"]), np.array(header["obs_std"]),
                      np.array(header["act_mean"]), np.array(header["act_std"]))
    return Policy(weights, header["obs_dim"], header["act_dim"],
                  header["hidden_dim"], stats)
