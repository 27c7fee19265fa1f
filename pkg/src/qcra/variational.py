"""Target histograms, quadratic distribution loss, shift-rule gradients, Adam loop."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import simkit
from .circuits import build_three_qubit_loader, build_two_qubit_loader
from .simkit import Circuit

SHIFT = math.pi / 2.0  # parameter-shift offset for RY generators


@dataclass
class TargetHistogram:
    """Discrete normal target on the affine grid over [-z_max, z_max]."""

    n_qubits: int
    mu: float
    sigma: float
    z_max: float
    probs: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        dim = 2**self.n_qubits
        step = 2.0 * self.z_max / (dim - 1)
        return -self.z_max + step * np.arange(dim)


def make_target(n_qubits: int, mu: float, sigma: float, z_max: float) -> TargetHistogram:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if z_max <= 0:
        raise ValueError(f"z_max must be positive, got {z_max}")
    if n_qubits not in (2, 3):
        raise ValueError(f"targets are defined for 2 or 3 qubits, got {n_qubits}")
    dim = 2**n_qubits
    z = -z_max + (2.0 * z_max / (dim - 1)) * np.arange(dim)
    w = np.exp(-((z - mu) ** 2) / (2.0 * sigma**2))
    return TargetHistogram(n_qubits, mu, sigma, z_max, w / w.sum())


def distribution_loss(probs: Sequence[float], target) -> float:
    """Quadratic distance sum_b (p_b - p*_b)^2."""
    t = np.asarray(getattr(target, "probs", target), dtype=float)
    p = np.asarray(probs, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    d = p - t
    return float(d @ d)


CircuitBuilder = Callable[[np.ndarray], Circuit]


def loader_builder(n_qubits: int) -> CircuitBuilder:
    if n_qubits == 2:
        return build_two_qubit_loader
    if n_qubits == 3:
        return build_three_qubit_loader
    raise ValueError(f"no loader ansatz for {n_qubits} qubits")


def _builder_probs(builder: CircuitBuilder, thetas: np.ndarray) -> np.ndarray:
    return simkit.circuit_probabilities(builder(thetas))


def _check_ry_parameterization(builder: CircuitBuilder, thetas: np.ndarray):
    """Every gate whose angle moves with a parameter must be an RY rotation."""
    ref = builder(thetas).gates
    for i in range(len(thetas)):
        shifted = np.array(thetas, dtype=float)
        shifted[i] += 1.0
        for a, b in zip(ref, builder(shifted).gates, strict=True):
            if (a.kind, a.qubits) != (b.kind, b.qubits):
                raise ValueError("ansatz structure must not depend on the parameters")
            if a.angle != b.angle and a.kind != "ry":
                raise ValueError(f"shift rule requires RY-parameterized gates, found {a.kind}")


def parameter_shift_gradient(builder: CircuitBuilder, thetas: Sequence[float], target,
                             validate: bool = True) -> np.ndarray:
    """Exact gradient of the quadratic loss via the two-point shift rule.

    dp_b/dt_i = [p_b(t + pi/2 e_i) - p_b(t - pi/2 e_i)] / 2, chained into
    dL/dt_i = sum_b 2 (p_b - p*_b) dp_b/dt_i.
    """
    thetas = np.asarray(thetas, dtype=float)
    if validate:
        _check_ry_parameterization(builder, thetas)
    t = np.asarray(getattr(target, "probs", target), dtype=float)
    base = _builder_probs(builder, thetas)
    grad = np.zeros(len(thetas))
    for i in range(len(thetas)):
        shift = np.zeros(len(thetas))
        shift[i] = SHIFT
        dp = 0.5 * (_builder_probs(builder, thetas + shift) - _builder_probs(builder, thetas - shift))
        grad[i] = float(np.sum(2.0 * (base - t) * dp))
    return grad


@dataclass
class AdamState:
    step: int
    m: np.ndarray
    v: np.ndarray
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def fresh(cls, n_params: int, lr: float = 0.1, beta1: float = 0.9,
              beta2: float = 0.999, epsilon: float = 1e-8) -> "AdamState":
        return cls(0, np.zeros(n_params), np.zeros(n_params), lr, beta1, beta2, epsilon)


def adam_step(state: AdamState, thetas: Sequence[float], gradient: Sequence[float]) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns the new state and parameters."""
    g = np.asarray(gradient, dtype=float)
    th = np.asarray(thetas, dtype=float)
    if g.shape != th.shape or g.shape != state.m.shape:
        raise ValueError("gradient, parameters and moments must share a shape")
    t = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_thetas = th - state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    new_state = AdamState(t, m, v, state.lr, state.beta1, state.beta2, state.epsilon)
    return new_state, new_thetas


@dataclass
class TrainConfig:
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_iters: int = 2000
    tol: float = 1e-8
    seed: int = 0


@dataclass
class TrainReport:
    final_thetas: np.ndarray
    loss_history: list[float]
    converged: bool
    iterations: int
    seed: int
    initial_thetas: np.ndarray = field(default_factory=lambda: np.array([]))

    def to_dict(self) -> dict:
        return {
            "final_thetas_deg": [math.degrees(t) for t in self.final_thetas],
            "initial_thetas_deg": [math.degrees(t) for t in self.initial_thetas],
            "final_loss": self.loss_history[-1],
            "loss_history": list(self.loss_history),
            "converged": self.converged,
            "iterations": self.iterations,
            "seed": self.seed,
        }


def train_loader(n_qubits: int, target: TargetHistogram, config: TrainConfig | None = None) -> TrainReport:
    """Fit the loader ansatz to a target histogram with shift-rule Adam descent.

    Initialization draws each angle uniformly from [0, 2 pi) with the config
    seed, so reports are reproducible bit for bit.
    """
    config = config or TrainConfig()
    t = np.asarray(target.probs, dtype=float)
    if t.shape != (2**n_qubits,):
        raise ValueError("target length must be 2^n_qubits")
    builder = loader_builder(n_qubits)
    rng = np.random.default_rng(config.seed)
    thetas = rng.uniform(0.0, 2.0 * math.pi, size=n_qubits)
    initial = thetas.copy()
    _check_ry_parameterization(builder, thetas)
    state = AdamState.fresh(n_qubits, config.lr, config.beta1, config.beta2, config.epsilon)
    history = [distribution_loss(_builder_probs(builder, thetas), t)]
    converged = history[-1] < config.tol
    iterations = 0
    while not converged and iterations < config.max_iters:
        grad = parameter_shift_gradient(builder, thetas, t, validate=False)
        state, thetas = adam_step(state, thetas, grad)
        iterations += 1
        history.append(distribution_loss(_builder_probs(builder, thetas), t))
        converged = history[-1] < config.tol
    return TrainReport(thetas, history, converged, iterations, config.seed, initial)
