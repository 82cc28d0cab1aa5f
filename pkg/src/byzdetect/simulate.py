"""Monte Carlo simulation of the sensor network, used to check the closed forms."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import FusionRule, NetworkConfig, ValidationError, system_error

DEFAULT_TRIALS = 100_000
BLOCK_SIZE = 10_000
Z_LIMIT = 3.0


class Placement(enum.Enum):
    # each node is Byzantine independently with probability alpha
    BERNOULLI_PER_NODE = "bernoulli"
    # exactly round(alpha * n) Byzantines, re-chosen uniformly every trial
    FIXED_COUNT = "fixed"


@dataclass(frozen=True)
class SimConfig:
    network: NetworkConfig
    rule: FusionRule
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    placement: Placement = Placement.BERNOULLI_PER_NODE

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if not (0 <= self.rule.k <= self.network.n + 1):
            raise ValidationError(f"rule threshold k={self.rule.k} outside [0, {self.network.n + 1}]")
        object.__setattr__(self, "placement", Placement(self.placement))


@dataclass(frozen=True)
class SimResult:
    empirical_pe: float
    empirical_qf: float
    empirical_qd: float
    std_error: float
    trials_h0: int
    trials_h1: int


@dataclass(frozen=True)
class ValidationReport:
    analytic: dict[str, float]
    empirical: dict[str, float]
    z: dict[str, float]
    flagged: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flagged


def fixed_byzantine_count(alpha: float, n: int) -> int:
    # round half up; Python's round() would send 2.5 to 2
    return int(math.floor(alpha * n + 0.5))


def _block_counts(cfg: SimConfig, block: int, size: int) -> np.ndarray:
    net = cfg.network
    n = net.n
    attack = net.attack
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed), spawn_key=(block,)))

    h1 = rng.random(size) < net.priors.p1
    p_one = np.where(h1, net.sensor.pd, net.sensor.pf)
    local = rng.random((size, n)) < p_one[:, None]

    if cfg.placement is Placement.BERNOULLI_PER_NODE:
        byz = rng.random((size, n)) < attack.alpha
    else:
        count = fixed_byzantine_count(attack.alpha, n)
        ranks = np.argsort(rng.random((size, n)), axis=1).argsort(axis=1)
        byz = ranks < count

    flip = rng.random((size, n))
    falsified = np.where(local, flip >= attack.p01, flip < attack.p10)
    sent = np.where(byz, falsified, local)

    decide_h1 = cfg.rule.decides_h1(sent.sum(axis=1))
    h0 = ~h1
    return np.array([
        h0.sum(),
        h1.sum(),
        (h0 & decide_h1).sum(),
        (h1 & decide_h1).sum(),
    ], dtype=np.int64)


def _blocks(trials: int) -> list[tuple[int, int]]:
    full, rest = divmod(trials, BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def simulate(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Run ``cfg.trials`` independent detection epochs.

    Trials are split into fixed-size blocks, each with its own random stream
    derived from ``(seed, block index)``; only integer counts are summed, so
    the result does not depend on ``workers``.
    """
    blocks = _blocks(int(cfg.trials))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_counts(cfg, *b), blocks))
    else:
        parts = [_block_counts(cfg, *b) for b in blocks]
    n_h0, n_h1, false_alarms, detections = (int(x) for x in np.sum(parts, axis=0))

    trials = n_h0 + n_h1
    errors = false_alarms + (n_h1 - detections)
    pe = errors / trials
    return SimResult(
        empirical_pe=pe,
        empirical_qf=false_alarms / n_h0 if n_h0 else 0.0,
        empirical_qd=detections / n_h1 if n_h1 else 0.0,
        std_error=math.sqrt(pe * (1.0 - pe) / trials),
        trials_h0=n_h0,
        trials_h1=n_h1,
    )


def _z(empirical: float, analytic: float, count: int) -> float:
    if count == 0:
        return 0.0
    sd = math.sqrt(analytic * (1.0 - analytic) / count)
    if sd == 0.0:
        return 0.0 if empirical == analytic else math.copysign(math.inf, empirical - analytic)
    return (empirical - analytic) / sd


def validate_against_closed_form(cfg: SimConfig, workers: int = 1,
                                 sim: SimResult | None = None) -> ValidationReport:
    """Compare simulated P_E, Q_F, Q_D with the closed forms via z-scores.

    Pass ``sim`` to reuse a result already computed for ``cfg``.
    """
    if cfg.placement is not Placement.BERNOULLI_PER_NODE:
        raise ValidationError("closed forms assume Bernoulli-per-node placement")
    report = system_error(cfg.network, cfg.rule)
    if sim is None:
        sim = simulate(cfg, workers=workers)
    trials = sim.trials_h0 + sim.trials_h1
    analytic = {"pe": report.pe_system, "qf": report.qf, "qd": report.qd}
    empirical = {"pe": sim.empirical_pe, "qf": sim.empirical_qf, "qd": sim.empirical_qd}
    z = {
        "pe": _z(sim.empirical_pe, report.pe_system, trials),
        "qf": _z(sim.empirical_qf, report.qf, sim.trials_h0),
        "qd": _z(sim.empirical_qd, report.qd, sim.trials_h1),
    }
    flagged = [key for key, val in z.items() if abs(val) > Z_LIMIT]
    return ValidationReport(analytic, empirical, z, flagged)
