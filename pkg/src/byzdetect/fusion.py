"""Fusion rules: majority, the MAP count threshold, and an exhaustive rule search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .core import (
    FusionRule,
    Marginals,
    NetworkConfig,
    Polarity,
    ValidationError,
    marginals,
    pe_system,
)

BLIND_TOL = 1e-12


@dataclass(frozen=True)
class RuleSearchResult:
    best_rule: FusionRule
    best_pe: float
    pe_by_k: list[tuple[FusionRule, float]]


@dataclass(frozen=True)
class SandwichBounds:
    """Thresholds between which every K keeps P_E increasing in both flip probabilities."""

    a: float
    b: float


def majority_rule(n: int) -> FusionRule:
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    return FusionRule(-(-(n + 1) // 2), Polarity.NORMAL)


def prior_rule(cfg: NetworkConfig) -> FusionRule:
    """Constant rule that ignores the data and picks the a-priori likelier hypothesis."""
    if cfg.priors.p1 >= cfg.priors.p0:
        return FusionRule(0, Polarity.NORMAL)
    return FusionRule(cfg.n + 1, Polarity.NORMAL)


def is_blinding(cfg: NetworkConfig) -> bool:
    return abs(cfg.attack.flip_mass - 1.0) < BLIND_TOL


def _log_odds(m: Marginals) -> float:
    return math.log(m.pi11 * (1.0 - m.pi10) / (m.pi10 * (1.0 - m.pi11)))


def map_threshold(cfg: NetworkConfig) -> float:
    """Real-valued MAP threshold K* on the count of ones.

    Below the blinding line H1 is decided when the count reaches K*; above it
    H1 is decided when the count is at most K*. Requires marginals strictly
    inside (0, 1) and a configuration off the blinding line.
    """
    if is_blinding(cfg):
        raise ValidationError("no MAP threshold on the blinding line")
    m = marginals(cfg.attack, cfg.sensor)
    if not (0.0 < m.pi10 < 1.0 and 0.0 < m.pi11 < 1.0):
        raise ValidationError(f"degenerate marginals {m}")
    n = cfg.n
    p0, p1 = cfg.priors.p0, cfg.priors.p1
    if cfg.attack.flip_mass < 1.0:
        num = math.log(p0 / p1) + n * math.log((1.0 - m.pi10) / (1.0 - m.pi11))
        return num / _log_odds(m)
    num = math.log(p1 / p0) + n * math.log((1.0 - m.pi11) / (1.0 - m.pi10))
    den = math.log(m.pi10 / m.pi11) + math.log((1.0 - m.pi11) / (1.0 - m.pi10))
    return num / den


def _clamp_k(k: float, n: int) -> int:
    return int(min(n + 1, max(0, k)))


def _map_rule_by_count(cfg: NetworkConfig, m: Marginals, polarity: Polarity) -> FusionRule:
    # direct MAP comparison per count; handles marginals at 0 or 1
    n = cfg.n
    c = np.arange(n + 1, dtype=float)
    log_h1 = math.log(cfg.priors.p1) + xlogy(c, m.pi11) + xlogy(n - c, 1.0 - m.pi11)
    log_h0 = math.log(cfg.priors.p0) + xlogy(c, m.pi10) + xlogy(n - c, 1.0 - m.pi10)
    h1 = log_h1 >= log_h0
    if polarity is Polarity.NORMAL:
        hits = np.flatnonzero(h1)
    else:
        hits = np.flatnonzero(~h1)
    return FusionRule(int(hits[0]) if hits.size else n + 1, polarity)


def optimal_fusion_rule(cfg: NetworkConfig) -> FusionRule:
    """MAP fusion rule for a known attack, in either regime of the flip mass."""
    if is_blinding(cfg):
        return prior_rule(cfg)
    m = marginals(cfg.attack, cfg.sensor)
    below = cfg.attack.flip_mass < 1.0
    polarity = Polarity.NORMAL if below else Polarity.INVERTED
    if m.pi11 == m.pi10:
        return prior_rule(cfg)
    if not (0.0 < m.pi10 < 1.0 and 0.0 < m.pi11 < 1.0):
        return _map_rule_by_count(cfg, m, polarity)
    # ties go to H1 in the normal regime and to H0 in the inverted one
    return FusionRule(_clamp_k(math.ceil(map_threshold(cfg)), cfg.n), polarity)


def all_rules(n: int) -> list[FusionRule]:
    """Every threshold rule, ordered by k then polarity (normal first)."""
    return [FusionRule(k, pol) for k in range(n + 2) for pol in (Polarity.NORMAL, Polarity.INVERTED)]


def brute_force_rule_search(cfg: NetworkConfig) -> RuleSearchResult:
    """Evaluate P_E for every threshold rule and return the table with its argmin."""
    table = [(rule, pe_system(cfg, rule)) for rule in all_rules(cfg.n)]
    best_rule, best_pe = table[0]
    for rule, pe in table[1:]:
        if pe < best_pe:
            best_rule, best_pe = rule, pe
    return RuleSearchResult(best_rule, best_pe, table)


def min_error(cfg: NetworkConfig) -> float:
    """Smallest P_E the FC can reach with any threshold rule."""
    return brute_force_rule_search(cfg).best_pe


def sandwich_bounds(cfg: NetworkConfig) -> SandwichBounds:
    if cfg.attack.flip_mass >= 1.0:
        raise ValidationError("sandwich bounds need alpha * (p10 + p01) < 1")
    m = marginals(cfg.attack, cfg.sensor)
    if not (0.0 < m.pi10 < 1.0 and 0.0 < m.pi11 < 1.0):
        raise ValidationError(f"degenerate marginals {m}")
    pd, pf = cfg.sensor.pd, cfg.sensor.pf
    if pf <= 0.0 or pd >= 1.0:
        raise ValidationError("sandwich bounds need 0 < pf and pd < 1")
    base = (math.log(cfg.priors.p0 / cfg.priors.p1)
            + cfg.n * math.log((1.0 - m.pi10) / (1.0 - m.pi11))
            - math.log(m.pi10 / m.pi11))
    den = _log_odds(m)
    a = (base + math.log((1.0 - pf) / (1.0 - pd))) / den
    b = (base + math.log(pf / pd)) / den
    return SandwichBounds(a, b)
