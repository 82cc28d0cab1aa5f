"""Command-line front end.

Subcommands print one JSON object (``analyze``, ``attack``, ``simulate``,
``blind``) or a CSV surface (``sweep``). Exit codes: 0 success, 2 invalid
input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import math
import sys
import warnings
from pathlib import Path

from . import attacks, fusion
from .core import (
    AttackConfig,
    FusionRule,
    InvariantError,
    NetworkConfig,
    Polarity,
    Priors,
    SensorModel,
    ValidationError,
    system_error,
)
from .experiments import Axis, Objective, SweepSpec, sweep, to_csv
from .simulate import DEFAULT_TRIALS, Placement, SimConfig, simulate, validate_against_closed_form

EXIT_OK, EXIT_INVALID, EXIT_INVARIANT = 0, 2, 3

CONFIG_KEYS = {
    "n": int, "pd": float, "pf": float, "p0": float, "p1": float,
    "alpha": float, "p10": float, "p01": float,
    "rule_k": int, "rule_polarity": str,
    "trials": int, "seed": int, "placement": str, "step": float,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(EXIT_INVALID, "usage", message)


def _fail(code: int, kind: str, message: str):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    raise SystemExit(code)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _emit(payload, out: str | None = None):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"
    _write(text, out)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a flat JSON object")
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return {k: CONFIG_KEYS[k](v) for k, v in data.items()}


def _settings(args) -> dict:
    """Config-file values overridden by any flags given on the command line."""
    merged = _load_config(getattr(args, "config", None))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _require(s: dict, *keys):
    missing = [k for k in keys if k not in s]
    if missing:
        raise ValidationError(f"missing parameters: {', '.join('--' + k.replace('_', '-') for k in missing)}")


def _network(s: dict) -> NetworkConfig:
    _require(s, "n", "pd", "pf")
    if "p0" in s:
        priors = Priors(s["p0"], s.get("p1", 1.0 - s["p0"]))
    elif "p1" in s:
        priors = Priors(1.0 - s["p1"], s["p1"])
    else:
        raise ValidationError("missing parameters: --p0")
    attack = AttackConfig(s.get("alpha", 0.0), s.get("p10", 0.0), s.get("p01", 0.0))
    return NetworkConfig(s["n"], SensorModel(s["pd"], s["pf"]), priors, attack)


def _rule(s: dict, cfg: NetworkConfig) -> FusionRule | None:
    if "rule_k" not in s:
        return None
    polarity = Polarity(s.get("rule_polarity", "normal"))
    return FusionRule(s["rule_k"], polarity)


def _inputs(cfg: NetworkConfig) -> dict:
    return {
        "n": cfg.n, "pd": cfg.sensor.pd, "pf": cfg.sensor.pf,
        "p0": cfg.priors.p0, "p1": cfg.priors.p1,
        "alpha": cfg.attack.alpha, "p10": cfg.attack.p10, "p01": cfg.attack.p01,
    }


def _blind_payload(p10: float, p01: float) -> dict:
    power = attacks.blinding_fraction(p10, p01)
    return {"p10": p10, "p01": p01, "feasible": power is not None, "critical_power": power}


def cmd_analyze(args) -> int:
    s = _settings(args)
    cfg = _network(s)
    optimal = fusion.optimal_fusion_rule(cfg)
    rule = _rule(s, cfg) or optimal
    report = system_error(cfg, rule)
    optimal_pe = system_error(cfg, optimal).pe_system
    search = fusion.brute_force_rule_search(cfg)

    expected = cfg.priors.p0 * report.qf + cfg.priors.p1 * (1.0 - report.qd)
    if abs(report.pe_system - expected) > 1e-12:
        raise InvariantError("pe_system disagrees with qf/qd")
    if optimal_pe > search.best_pe + 1e-12:
        raise InvariantError("closed-form rule worse than exhaustive search")

    _emit({
        "inputs": _inputs(cfg),
        "rule": rule,
        "report": report,
        "optimal_rule": optimal,
        "optimal_pe": optimal_pe,
        "min_pe_over_rules": search.best_pe,
        "blind": attacks.is_blind(cfg.attack, cfg.sensor),
        "flip_mass": cfg.attack.flip_mass,
        "blinding": _blind_payload(cfg.attack.p10, cfg.attack.p01),
    }, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    s = _settings(args)
    cfg = _network(s)
    step = s.get("step", 0.01)
    spec = SweepSpec(
        base=cfg,
        axis1=Axis(args.x, *args.x_range, step),
        axis2=Axis(args.y, *args.y_range, step),
        objective=Objective(args.objective),
        rule=_rule(s, cfg),
    )
    rows = sweep(spec, workers=args.workers)
    _write(to_csv(spec, rows), args.out)
    return EXIT_OK


def cmd_attack(args) -> int:
    s = _settings(args)
    cfg = _network(s)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", attacks.AssumptionWarning)
        result = attacks.dispatch(attacks.AttackScenario(args.scenario), cfg)
    _emit({
        "scenario": args.scenario,
        "inputs": _inputs(cfg),
        "result": result,
        "warnings": [str(w.message) for w in caught],
    }, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _settings(args)
    cfg = _network(s)
    rule = _rule(s, cfg) or fusion.optimal_fusion_rule(cfg)
    sim_cfg = SimConfig(
        network=cfg,
        rule=rule,
        trials=s.get("trials", DEFAULT_TRIALS),
        seed=s.get("seed", 0),
        placement=Placement(s.get("placement", "bernoulli")),
    )
    payload = {"inputs": _inputs(cfg), "rule": rule, "trials": sim_cfg.trials,
               "seed": sim_cfg.seed, "placement": sim_cfg.placement}
    payload["result"] = simulate(sim_cfg, workers=args.workers)
    if sim_cfg.placement is Placement.BERNOULLI_PER_NODE:
        report = validate_against_closed_form(sim_cfg, sim=payload["result"])
        payload["validation"] = {**_jsonable(report), "ok": report.ok}
    if args.compare_placements:
        other = Placement.FIXED_COUNT if sim_cfg.placement is Placement.BERNOULLI_PER_NODE \
            else Placement.BERNOULLI_PER_NODE
        alt = simulate(dataclasses.replace(sim_cfg, placement=other), workers=args.workers)
        payload["comparison"] = {
            "placement": other,
            "result": alt,
            "pe_difference": alt.empirical_pe - payload["result"].empirical_pe,
        }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_blind(args) -> int:
    s = _settings(args)
    _require(s, "p10", "p01")
    attack = AttackConfig(0.0, s["p10"], s["p01"])
    _emit(_blind_payload(attack.p10, attack.p01), args.out)
    return EXIT_OK


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP, got {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file of parameters; flags override it")
    common.add_argument("--n", type=int)
    common.add_argument("--pd", type=float)
    common.add_argument("--pf", type=float)
    common.add_argument("--p0", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--p10", type=float)
    common.add_argument("--p01", type=float)
    common.add_argument("--rule-k", dest="rule_k", type=int)
    common.add_argument("--rule-polarity", dest="rule_polarity", choices=[p.value for p in Polarity])
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--placement", choices=[p.value for p in Placement])
    common.add_argument("--step", type=float)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="write output here instead of stdout")

    parser = _Parser(prog="byzdetect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="error report for one configuration")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", parents=[common], help="CSV error surface over two parameters")
    p.add_argument("--x", default="p10")
    p.add_argument("--y", default="p01")
    p.add_argument("--x-range", dest="x_range", type=_range, default=(0.0, 1.0))
    p.add_argument("--y-range", dest="y_range", type=_range, default=(0.0, 1.0))
    p.add_argument("--objective", choices=[o.value for o in Objective], default="local")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("attack", parents=[common], help="optimal Byzantine strategy")
    p.add_argument("--scenario", choices=[s.value for s in attacks.AttackScenario], required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo run and closed-form check")
    p.add_argument("--compare-placements", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("blind", parents=[common], help="Byzantine fraction that blinds the FC")
    p.set_defaults(func=cmd_blind)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        _fail(EXIT_INVALID, "validation", str(exc))
    except InvariantError as exc:
        _fail(EXIT_INVARIANT, "invariant", str(exc))


if __name__ == "__main__":
    sys.exit(main())
