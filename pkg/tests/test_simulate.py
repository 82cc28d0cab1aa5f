import numpy as np
import pytest

from byzdetect.core import FusionRule, Polarity, ValidationError, system_error
from byzdetect.fusion import majority_rule, optimal_fusion_rule
from byzdetect.simulate import (
    Placement,
    SimConfig,
    fixed_byzantine_count,
    simulate,
    validate_against_closed_form,
)

from conftest import network


def test_perfect_sensor_never_errs():
    cfg = SimConfig(network(1, 1.0, 0.0, 0.5), FusionRule(1), trials=5000, seed=3)
    result = simulate(cfg)
    assert result.empirical_pe == 0.0
    assert result.std_error == 0.0
    assert result.trials_h0 + result.trials_h1 == 5000


def test_blind_always_h1_errs_at_prior():
    net = network(8, 0.8, 0.1, 0.35, alpha=0.5, p10=1.0, p01=1.0)
    result = simulate(SimConfig(net, FusionRule(0), trials=50_000, seed=11))
    assert abs(result.empirical_pe - 0.35) < 3 * result.std_error


def test_full_flip_corner_matches_closed_form():
    net = network(10, 0.8, 0.1, 0.4, alpha=0.37, p10=1.0, p01=1.0)
    rule = majority_rule(10)
    result = simulate(SimConfig(net, rule, trials=100_000, seed=2014))
    analytic = system_error(net, rule).pe_system
    assert abs(result.empirical_pe - analytic) < 3 * result.std_error


def test_reproducible_across_workers():
    net = network(12, 0.7, 0.2, 0.45, alpha=0.3, p10=0.6, p01=0.9)
    cfg = SimConfig(net, majority_rule(12), trials=35_000, seed=99)
    serial = simulate(cfg)
    assert simulate(cfg) == serial
    assert simulate(cfg, workers=4) == serial
    assert simulate(SimConfig(net, majority_rule(12), trials=35_000, seed=100)) != serial


def test_fixed_count_places_exact_number():
    # honest nodes with pf = 0 always report 0 under H0, Byzantines with p10 = 1 always report 1
    net = network(10, 0.9, 0.0, 0.999999, alpha=0.34, p10=1.0, p01=0.0)
    assert fixed_byzantine_count(0.34, 10) == 3
    hit = simulate(SimConfig(net, FusionRule(3), trials=2000, seed=1, placement=Placement.FIXED_COUNT))
    miss = simulate(SimConfig(net, FusionRule(4), trials=2000, seed=1, placement=Placement.FIXED_COUNT))
    assert hit.empirical_qf == 1.0
    assert miss.empirical_qf == 0.0


@pytest.mark.parametrize("alpha, n, count", [(0.25, 10, 3), (0.24, 10, 2), (0.5, 5, 3), (0.0, 7, 0), (1.0, 7, 7)])
def test_fixed_count_rounding(alpha, n, count):
    assert fixed_byzantine_count(alpha, n) == count


def test_placements_agree_for_large_networks():
    net = network(200, 0.6, 0.4, 0.5, alpha=0.25, p10=0.8, p01=0.8)
    rule = optimal_fusion_rule(net)
    bern = simulate(SimConfig(net, rule, trials=40_000, seed=5))
    fixed = simulate(SimConfig(net, rule, trials=40_000, seed=5, placement=Placement.FIXED_COUNT))
    assert abs(bern.empirical_pe - fixed.empirical_pe) < 0.01


def test_validation_honest_chair_varshney():
    net = network(9, 0.75, 0.2, 0.6)
    report = validate_against_closed_form(SimConfig(net, optimal_fusion_rule(net), trials=100_000, seed=8))
    assert report.ok, report


def test_validation_inverted_rule():
    net = network(9, 0.8, 0.1, 0.5, alpha=0.9, p10=1.0, p01=0.9)
    rule = optimal_fusion_rule(net)
    assert rule.polarity is Polarity.INVERTED
    report = validate_against_closed_form(SimConfig(net, rule, trials=100_000, seed=9))
    assert report.ok, report


def test_validation_needs_bernoulli_placement():
    net = network(5, 0.8, 0.1, 0.5, alpha=0.2)
    with pytest.raises(ValidationError):
        validate_against_closed_form(SimConfig(net, FusionRule(3), placement=Placement.FIXED_COUNT))


@pytest.mark.parametrize("kwargs", [{"trials": 0}, {"seed": -1}, {"seed": 2**64}])
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        SimConfig(network(5, 0.8, 0.1, 0.5), FusionRule(3), **kwargs)


def test_rule_out_of_range():
    with pytest.raises(ValidationError):
        SimConfig(network(5, 0.8, 0.1, 0.5), FusionRule(7))


def test_std_error_formula():
    net = network(6, 0.7, 0.3, 0.5, alpha=0.1, p10=0.5, p01=0.5)
    r = simulate(SimConfig(net, FusionRule(3), trials=12_345, seed=4))
    total = r.trials_h0 + r.trials_h1
    assert total == 12_345
    assert r.std_error == pytest.approx(np.sqrt(r.empirical_pe * (1 - r.empirical_pe) / total))
