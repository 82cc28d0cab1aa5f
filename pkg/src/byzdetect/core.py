"""Closed-form error probabilities for K-out-of-N fusion under Byzantine data falsification.

Every node reports a one-bit decision to a fusion center (FC). A node is
Byzantine with probability ``alpha``; a Byzantine flips a local 0 to 1 with
probability ``p10`` and a local 1 to 0 with probability ``p01``. The FC counts
the ones and compares against an integer threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

PROB_TOL = 1e-12


class ValidationError(ValueError):
    """Invalid model parameters."""


class InvariantError(RuntimeError):
    """A computed quantity violated a documented invariant."""


def check_probability(name: str, value: float) -> float:
    """Validate ``value`` as a probability and clamp it into [0, 1].

    Values within ``PROB_TOL`` outside the unit interval are clamped, anything
    further out raises :class:`ValidationError`.
    """
    value = float(value)
    if not math.isfinite(value) or value < -PROB_TOL or value > 1.0 + PROB_TOL:
        raise ValidationError(f"{name} must be a probability in [0, 1], got {value!r}")
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class SensorModel:
    """Per-node operating point, identical across nodes."""

    pd: float
    pf: float

    def __post_init__(self):
        object.__setattr__(self, "pd", check_probability("pd", self.pd))
        object.__setattr__(self, "pf", check_probability("pf", self.pf))
        if not self.pd > self.pf:
            raise ValidationError(f"need pd > pf, got pd={self.pd}, pf={self.pf}")


@dataclass(frozen=True)
class Priors:
    p0: float
    p1: float

    def __post_init__(self):
        p0 = check_probability("p0", self.p0)
        p1 = check_probability("p1", self.p1)
        if abs(p0 + p1 - 1.0) > PROB_TOL:
            raise ValidationError(f"priors must sum to 1, got {p0} + {p1}")
        if not (0.0 < p0 < 1.0):
            raise ValidationError("priors must lie strictly inside (0, 1)")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    @classmethod
    def from_p0(cls, p0: float) -> "Priors":
        return cls(p0, 1.0 - p0)


@dataclass(frozen=True)
class AttackConfig:
    alpha: float
    p10: float
    p01: float

    def __post_init__(self):
        for name in ("alpha", "p10", "p01"):
            object.__setattr__(self, name, check_probability(name, getattr(self, name)))

    @property
    def flip_mass(self) -> float:
        """``alpha * (p10 + p01)``; equals 1 exactly on the blinding line."""
        return self.alpha * (self.p10 + self.p01)

    def with_flips(self, p10: float, p01: float) -> "AttackConfig":
        return AttackConfig(self.alpha, p10, p01)


HONEST = AttackConfig(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class NetworkConfig:
    n: int
    sensor: SensorModel
    priors: Priors
    attack: AttackConfig = HONEST

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    def with_attack(self, p10: float, p01: float, alpha: float | None = None) -> "NetworkConfig":
        a = self.attack.alpha if alpha is None else alpha
        return NetworkConfig(self.n, self.sensor, self.priors, AttackConfig(a, p10, p01))


@dataclass(frozen=True)
class Marginals:
    """Probability that a single report equals 1 under H0 (``pi10``) and H1 (``pi11``)."""

    pi10: float
    pi11: float


class Polarity(enum.Enum):
    NORMAL = "normal"
    INVERTED = "inverted"


@dataclass(frozen=True)
class FusionRule:
    """Threshold rule on the count of ones.

    ``NORMAL`` decides H1 iff ``count >= k``; ``INVERTED`` decides H1 iff
    ``count < k``. ``k`` ranges over ``[0, n + 1]`` so both constant rules are
    representable.
    """

    k: int
    polarity: Polarity = Polarity.NORMAL

    def decides_h1(self, count):
        if self.polarity is Polarity.NORMAL:
            return count >= self.k
        return count < self.k

    def is_constant(self, n: int) -> bool:
        return self.k in (0, n + 1)

    def __str__(self):
        op = ">=" if self.polarity is Polarity.NORMAL else "<"
        return f"H1 iff ones {op} {self.k}"


@dataclass(frozen=True)
class ErrorReport:
    marginals: Marginals
    qf: float
    qd: float
    pe_local: float
    pe_system: float


def marginals(attack: AttackConfig, sensor: SensorModel) -> Marginals:
    a, p10, p01 = attack.alpha, attack.p10, attack.p01

    def mix(p):
        byz = p10 * (1.0 - p) + (1.0 - p01) * p
        return min(1.0, max(0.0, a * byz + (1.0 - a) * p))

    return Marginals(mix(sensor.pf), mix(sensor.pd))


def binomial_logpmf(n: int, p: float) -> np.ndarray:
    """log P(X = i) for i = 0..n, X ~ Binomial(n, p); ``-inf`` where the mass is zero."""
    i = np.arange(n + 1, dtype=float)
    out = np.full(n + 1, -np.inf)
    if p <= 0.0:
        out[0] = 0.0
        return out
    if p >= 1.0:
        out[n] = 0.0
        return out
    logc = gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0)
    return logc + i * math.log(p) + (n - i) * math.log1p(-p)


def binomial_pmf(n: int, p: float) -> np.ndarray:
    return np.exp(binomial_logpmf(n, p))


def _sum_terms(terms: np.ndarray) -> float:
    # fsum is exactly rounded, so small tails are not swamped by ordering
    return min(1.0, max(0.0, math.fsum(terms.tolist())))


def binomial_upper_tail(n: int, p: float, k: int) -> float:
    """P(X >= k) for X ~ Binomial(n, p), with k anywhere in [0, n + 1]."""
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    return _sum_terms(binomial_pmf(n, p)[k:])


def binomial_lower_tail(n: int, p: float, k: int) -> float:
    """P(X < k) for X ~ Binomial(n, p)."""
    if k <= 0:
        return 0.0
    if k > n:
        return 1.0
    return _sum_terms(binomial_pmf(n, p)[:k])


def _check_rule(rule: FusionRule, n: int) -> None:
    if not (0 <= rule.k <= n + 1):
        raise ValidationError(f"rule threshold k={rule.k} outside [0, {n + 1}]")


def global_probs(m: Marginals, n: int, rule: FusionRule) -> tuple[float, float]:
    """Global false-alarm and detection probabilities ``(qf, qd)`` of ``rule``."""
    _check_rule(rule, n)
    if rule.polarity is Polarity.NORMAL:
        tail = binomial_upper_tail
    else:
        tail = binomial_lower_tail
    return tail(n, m.pi10, rule.k), tail(n, m.pi11, rule.k)


def local_error(attack: AttackConfig, sensor: SensorModel, priors: Priors) -> float:
    m = marginals(attack, sensor)
    return priors.p0 * m.pi10 + priors.p1 * (1.0 - m.pi11)


def system_error(cfg: NetworkConfig, rule: FusionRule) -> ErrorReport:
    m = marginals(cfg.attack, cfg.sensor)
    qf, qd = global_probs(m, cfg.n, rule)
    p0, p1 = cfg.priors.p0, cfg.priors.p1
    pe_local = p0 * m.pi10 + p1 * (1.0 - m.pi11)
    pe_system = p0 * qf + p1 * (1.0 - qd)
    return ErrorReport(m, qf, qd, pe_local, pe_system)


def pe_system(cfg: NetworkConfig, rule: FusionRule) -> float:
    return system_error(cfg, rule).pe_system


# -- derivatives -------------------------------------------------------------


def d_pe_local(attack: AttackConfig, sensor: SensorModel, priors: Priors) -> tuple[float, float]:
    """Gradient of the local error with respect to ``(p10, p01)``."""
    a, pd, pf = attack.alpha, sensor.pd, sensor.pf
    p0, p1 = priors.p0, priors.p1
    return (p0 * a * (1.0 - pf) - p1 * a * (1.0 - pd), -p0 * a * pf + p1 * a * pd)


def _check_interior_k(cfg: NetworkConfig, k: int) -> None:
    if not (1 <= k <= cfg.n):
        raise ValidationError(f"derivative needs 1 <= k <= n, got k={k}, n={cfg.n}")


def _boundary_density(n: int, k: int, p: float) -> float:
    """``n * C(n-1, k-1) p^(k-1) (1-p)^(n-k)``, the derivative of P(X >= k) in p."""
    return n * float(binomial_pmf(n - 1, p)[k - 1])


def d_pE_dP10(cfg: NetworkConfig, k: int) -> float:
    """dP_E/dp10 for the normal rule ``count >= k``."""
    _check_interior_k(cfg, k)
    m = marginals(cfg.attack, cfg.sensor)
    a, pd, pf = cfg.attack.alpha, cfg.sensor.pd, cfg.sensor.pf
    dqf = a * (1.0 - pf) * _boundary_density(cfg.n, k, m.pi10)
    dqd = a * (1.0 - pd) * _boundary_density(cfg.n, k, m.pi11)
    return cfg.priors.p0 * dqf - cfg.priors.p1 * dqd


def d_pE_dP01(cfg: NetworkConfig, k: int) -> float:
    """dP_E/dp01 for the normal rule ``count >= k``."""
    _check_interior_k(cfg, k)
    m = marginals(cfg.attack, cfg.sensor)
    a, pd, pf = cfg.attack.alpha, cfg.sensor.pd, cfg.sensor.pf
    return (cfg.priors.p1 * a * pd * _boundary_density(cfg.n, k, m.pi11)
            - cfg.priors.p0 * a * pf * _boundary_density(cfg.n, k, m.pi10))


def g_p10(cfg: NetworkConfig, k: int) -> float:
    """Non-negative factor of dP_E/dp10 = g * (exp(r) - 1)."""
    _check_interior_k(cfg, k)
    m = marginals(cfg.attack, cfg.sensor)
    return (cfg.priors.p1 * cfg.attack.alpha * (1.0 - cfg.sensor.pd)
            * _boundary_density(cfg.n, k, m.pi11))


def g_p01(cfg: NetworkConfig, k: int) -> float:
    """Non-negative factor of dP_E/dp01 = g * (exp(r) - 1)."""
    _check_interior_k(cfg, k)
    m = marginals(cfg.attack, cfg.sensor)
    return (cfg.priors.p0 * cfg.attack.alpha * cfg.sensor.pf
            * _boundary_density(cfg.n, k, m.pi10))


def _interior_marginals(cfg: NetworkConfig) -> Marginals:
    m = marginals(cfg.attack, cfg.sensor)
    if not (0.0 < m.pi10 < 1.0 and 0.0 < m.pi11 < 1.0):
        raise ValidationError(f"degenerate marginals {m}; log-ratios undefined")
    return m


def r_p10(cfg: NetworkConfig, k: int) -> float:
    """Log-ratio whose sign is the sign of dP_E/dp10 (needs pd < 1)."""
    _check_interior_k(cfg, k)
    m = _interior_marginals(cfg)
    pd, pf = cfg.sensor.pd, cfg.sensor.pf
    if pd >= 1.0:
        raise ValidationError("r_p10 is undefined for pd = 1")
    n = cfg.n
    return (math.log(cfg.priors.p0 / cfg.priors.p1 * (1.0 - pf) / (1.0 - pd))
            + (k - 1) * math.log(m.pi10 / m.pi11)
            + (n - k) * math.log((1.0 - m.pi10) / (1.0 - m.pi11)))


def r_p01(cfg: NetworkConfig, k: int) -> float:
    """Log-ratio whose sign is the sign of dP_E/dp01 (needs pf > 0)."""
    _check_interior_k(cfg, k)
    m = _interior_marginals(cfg)
    pd, pf = cfg.sensor.pd, cfg.sensor.pf
    if pf <= 0.0:
        raise ValidationError("r_p01 is undefined for pf = 0")
    n = cfg.n
    return (math.log(cfg.priors.p1 / cfg.priors.p0 * pd / pf)
            + (k - 1) * math.log(m.pi11 / m.pi10)
            + (n - k) * math.log((1.0 - m.pi11) / (1.0 - m.pi10)))
