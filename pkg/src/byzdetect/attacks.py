"""Optimal Byzantine flip strategies under different knowledge assumptions."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    AttackConfig,
    NetworkConfig,
    Priors,
    SensorModel,
    ValidationError,
    d_pe_local,
    local_error,
    marginals,
    pe_system,
)
from .fusion import majority_rule, min_error

CORNERS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
SIGN_TOL = 1e-12
TIE_TOL = 1e-12


class AttackScenario(enum.Enum):
    # attacker ignorant of the rule, FC ignorant of the attack
    FUSION_RULE_UNAWARE = "local"
    # attacker knows the FC runs a majority vote
    MAJORITY_RULE_AWARE = "majority"
    # FC knows the attack and answers with the MAP rule
    STRATEGY_AWARE_FC = "strategy-aware"


class AssumptionWarning(UserWarning):
    """The corner-optimality guarantee for the majority rule does not apply."""


@dataclass(frozen=True)
class StrategySet:
    strategies: tuple[tuple[float, float], ...]
    achieved_objective: float
    unique: bool
    guaranteed: bool = True
    # p10 + p01 on the blinding line, when the optimum is that whole line
    line_sum: float | None = None

    def __post_init__(self):
        if not self.strategies:
            raise ValueError("a strategy set cannot be empty")


def blinding_fraction(p10: float, p01: float) -> float | None:
    """Byzantine fraction that blinds the FC under flips ``(p10, p01)``.

    Returns ``None`` when no fraction in [0, 1] does it.
    """
    total = p10 + p01
    if total < 0:
        raise ValidationError("flip probabilities must be non-negative")
    if total < 1.0:
        return None
    return 1.0 / total


def is_blind(attack: AttackConfig, sensor: SensorModel) -> bool:
    m = marginals(attack, sensor)
    return abs(m.pi11 - m.pi10) < 1e-12


def _edge(fixed_p10: float | None, fixed_p01: float | None) -> tuple[tuple[float, float], ...]:
    steps = [round(0.1 * i, 10) for i in range(11)]
    if fixed_p10 is None and fixed_p01 is None:
        return tuple((x, y) for x in steps for y in steps)
    if fixed_p10 is None:
        return tuple((x, fixed_p01) for x in steps)
    if fixed_p01 is None:
        return tuple((fixed_p10, y) for y in steps)
    return ((fixed_p10, fixed_p01),)


def _best_coordinate(slope: float) -> float | None:
    if abs(slope) <= SIGN_TOL:
        return None
    return 1.0 if slope > 0 else 0.0


def optimal_local_attack(sensor: SensorModel, priors: Priors, alpha: float = 1.0) -> StrategySet:
    """Flips maximizing the local error seen by the FC.

    The local error is affine in each flip probability, so the signs of its
    partial derivatives pick the corner. A vanishing slope makes the attacker
    indifferent along that axis, and the whole edge (0.1 steps) is returned.
    """
    d10, d01 = d_pe_local(AttackConfig(alpha, 0.0, 0.0), sensor, priors)
    strategies = _edge(_best_coordinate(d10), _best_coordinate(d01))
    base = AttackConfig(alpha, 0.0, 0.0)
    value = local_error(base.with_flips(*strategies[0]), sensor, priors)
    return StrategySet(strategies, value, unique=len(strategies) == 1)


def assumption_holds(n: int, sensor: SensorModel, alpha: float) -> bool:
    """Sufficient condition under which majority-rule P_E peaks at a corner."""
    if n < 2:
        raise ValidationError("the corner condition needs n >= 2")
    m = n / (2.0 * n - 2.0)
    return alpha < min(0.5 - sensor.pf, 1.0 - m / sensor.pd)


def _argmax_set(values: dict[tuple[float, float], float]) -> tuple[tuple[tuple[float, float], ...], float]:
    best = max(values.values())
    winners = tuple(s for s, v in values.items() if v >= best - TIE_TOL)
    return winners, best


def optimal_majority_attack(cfg: NetworkConfig) -> StrategySet:
    """Best corner against a majority-vote FC; the flips in ``cfg.attack`` are ignored.

    When the corner condition fails an :class:`AssumptionWarning` is issued and
    the result is marked ``guaranteed=False``.
    """
    guaranteed = cfg.n >= 2 and assumption_holds(cfg.n, cfg.sensor, cfg.attack.alpha)
    if not guaranteed:
        warnings.warn(
            f"corner optimality not guaranteed for n={cfg.n}, alpha={cfg.attack.alpha}",
            AssumptionWarning,
            stacklevel=2,
        )
    rule = majority_rule(cfg.n)
    values = {s: pe_system(cfg.with_attack(*s), rule) for s in CORNERS}
    winners, best = _argmax_set(values)
    return StrategySet(winners, best, unique=len(winners) == 1, guaranteed=guaranteed)


def optimal_strategy_aware_attack(cfg: NetworkConfig) -> StrategySet:
    """Flips maximizing the error of an FC that answers with its best rule.

    Up to half the nodes, flipping everything is optimal. Beyond that, every
    point on the line ``alpha * (p10 + p01) = 1`` blinds the FC; the symmetric
    point and both segment endpoints are returned.
    """
    alpha = cfg.attack.alpha
    if alpha <= 0.5:
        strategies = ((1.0, 1.0),)
        line = 2.0 if alpha == 0.5 else None
    else:
        line = 1.0 / alpha
        half = line / 2.0
        strategies = ((half, half), (line - 1.0, 1.0), (1.0, line - 1.0))
    value = min_error(cfg.with_attack(*strategies[0]))
    return StrategySet(strategies, value, unique=len(strategies) == 1, line_sum=line)


def dispatch(scenario: AttackScenario, cfg: NetworkConfig) -> StrategySet:
    scenario = AttackScenario(scenario)
    if scenario is AttackScenario.FUSION_RULE_UNAWARE:
        return optimal_local_attack(cfg.sensor, cfg.priors, cfg.attack.alpha)
    if scenario is AttackScenario.MAJORITY_RULE_AWARE:
        return optimal_majority_attack(cfg)
    return optimal_strategy_aware_attack(cfg)


def strategy_grid(step: float) -> np.ndarray:
    """Grid points in [0, 1] at ``step`` spacing, endpoints included exactly."""
    count = int(round(1.0 / step))
    return np.round(np.linspace(0.0, 1.0, count + 1), 12)
