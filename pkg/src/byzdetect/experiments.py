"""Parameter sweeps producing error surfaces over two model parameters."""

from __future__ import annotations

import csv
import enum
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .core import (
    AttackConfig,
    FusionRule,
    NetworkConfig,
    Priors,
    SensorModel,
    ValidationError,
    local_error,
    pe_system,
)
from .fusion import majority_rule, min_error

SWEEPABLE = ("p10", "p01", "alpha", "pd", "pf", "p0")


class Objective(enum.Enum):
    LOCAL_ERROR = "local"
    SYSTEM_ERROR_AT_RULE = "system"
    MIN_ERROR_OVER_RULES = "min"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float = 0.0
    stop: float = 1.0
    step: float = 0.01

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ValidationError(f"cannot sweep {self.name!r}; choose from {', '.join(SWEEPABLE)}")
        if not self.step > 0:
            raise ValidationError("sweep step must be positive")
        if not (0.0 <= self.start <= self.stop <= 1.0):
            raise ValidationError(f"range [{self.start}, {self.stop}] must lie within [0, 1]")

    def values(self) -> np.ndarray:
        count = int(round((self.stop - self.start) / self.step))
        if count == 0:
            return np.array([self.start])
        return np.round(np.linspace(self.start, self.start + count * self.step, count + 1), 12)


@dataclass(frozen=True)
class SweepSpec:
    base: NetworkConfig
    axis1: Axis
    axis2: Axis
    objective: Objective = Objective.LOCAL_ERROR
    rule: FusionRule | None = None


def with_parameter(cfg: NetworkConfig, name: str, value: float) -> NetworkConfig:
    """Copy of ``cfg`` with one scalar parameter replaced."""
    if name in ("p10", "p01", "alpha"):
        return replace(cfg, attack=replace(cfg.attack, **{name: value}))
    if name in ("pd", "pf"):
        return replace(cfg, sensor=replace(cfg.sensor, **{name: value}))
    if name == "p0":
        return replace(cfg, priors=Priors.from_p0(value))
    raise ValidationError(f"unknown parameter {name!r}")


def evaluate(spec: SweepSpec, cfg: NetworkConfig) -> float:
    if spec.objective is Objective.LOCAL_ERROR:
        return local_error(cfg.attack, cfg.sensor, cfg.priors)
    if spec.objective is Objective.SYSTEM_ERROR_AT_RULE:
        return pe_system(cfg, spec.rule or majority_rule(cfg.n))
    return min_error(cfg)


def cell_config(spec: SweepSpec, x: float, y: float) -> NetworkConfig:
    return with_parameter(with_parameter(spec.base, spec.axis1.name, x), spec.axis2.name, y)


def sweep(spec: SweepSpec, workers: int = 1) -> list[tuple[float, float, float]]:
    """Evaluate the objective on the grid, rows in row-major (axis1-major) order."""
    cells = [(x, y) for x in spec.axis1.values() for y in spec.axis2.values()]

    def run(cell):
        x, y = cell
        return float(x), float(y), evaluate(spec, cell_config(spec, x, y))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]


def argmax_cell(rows: Iterable[tuple[float, float, float]]) -> tuple[float, float, float]:
    """First row (in row-major order) attaining the largest objective value."""
    best = None
    for row in rows:
        if best is None or row[2] > best[2]:
            best = row
    return best


def format_value(x: float) -> str:
    return f"{x:.12g}"


def to_csv(spec: SweepSpec, rows: list[tuple[float, float, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([spec.axis1.name, spec.axis2.name, "objective_value"])
    for x, y, v in rows:
        writer.writerow([format_value(x), format_value(y), format_value(v)])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[tuple[float, float, float]]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [tuple(float(v) for v in row) for row in reader]


def default_network(n: int, pd: float, pf: float, p0: float, alpha: float = 0.0,
                    p10: float = 0.0, p01: float = 0.0) -> NetworkConfig:
    return NetworkConfig(n, SensorModel(pd, pf), Priors.from_p0(p0), AttackConfig(alpha, p10, p01))
