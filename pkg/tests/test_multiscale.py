import math

import pytest

from quasiarc import (DiscreteArc, IterationConfig, MetricSpace,
                      check_cauchy, compose_follow_maps, iterate,
                      measure_local_quasiarc, profile_space,
                      generate_from_string, verify_follows)
from quasiarc.multiscale import finalize_composed_displacement
from quasiarc.straighten import CoarseMap

import brute_oracle as oracle


def _line(n):
    return MetricSpace.euclidean([(float(i),) for i in range(n)])


def test_depth_zero_trace():
    sp = _line(100)
    arc = DiscreteArc(tuple(range(100)))
    cfg = IterationConfig(epsilon=40.0, l_hat=1.0, scale_delta=0.3,
                          max_depth=0)
    trace = iterate(sp, arc, cfg)
    assert trace.depth == 0
    assert trace.arcs == (arc,)
    assert trace.composed_verdict.passed
    assert trace.composed_map.assignment == tuple(range(100))
    assert trace.stop_reason == "max_depth"


def test_line_two_scales_composition():
    sp = _line(600)
    arc = DiscreteArc(tuple(range(600)))
    cfg = IterationConfig(epsilon=599 / 4.0, l_hat=1.0, scale_delta=0.52,
                          max_depth=2)
    trace = iterate(sp, arc, cfg)
    assert trace.depth == 2
    assert trace.scales[1] == pytest.approx(trace.scales[0] * 0.52)
    assert trace.composed_verdict.passed
    # composed bound is the sum of the step bounds
    assert trace.composed_map.epsilon == pytest.approx(sum(trace.scales))
    assert finalize_composed_displacement(sp, trace.composed_map) <= \
        trace.composed_map.epsilon * (1 + 1e-9)
    assert trace.endpoints_constant
    # a geodesic stays a geodesic: lambda is exactly 1 on the band
    lo, hi = trace.scale_band(sp)
    lam = measure_local_quasiarc(sp, trace.arcs[-1], lo, hi)
    assert not lam.vacuous
    assert lam.value == pytest.approx(1.0, abs=1e-9)
    cauchy = check_cauchy(sp, trace)
    assert cauchy.passed and len(cauchy.table) == 3


def test_koch_iterate_nonvacuous():
    inst = generate_from_string("koch:3:8")
    prof = profile_space(inst.space, seed=0)
    cfg = IterationConfig(epsilon=0.25, l_hat=prof.l_hat, scale_delta=0.6)
    trace = iterate(inst.space, inst.arc(), cfg)
    assert trace.depth >= 1
    assert trace.stop_reason == "scale_floor"
    assert not trace.lemma_hypothesis_met  # 0.6 overshoots the cap
    assert trace.composed_verdict.passed
    lo, hi = trace.scale_band(inst.space)
    lam = measure_local_quasiarc(inst.space, trace.arcs[-1], lo, hi)
    assert not lam.vacuous
    assert lam.value <= trace.lambda_theoretical
    assert check_cauchy(inst.space, trace).passed


def test_lambda_measure_matches_oracle(grid8):
    arc = grid8.arcs["serpentine"]
    lam = measure_local_quasiarc(grid8.space, arc, 1.0, 3.0)
    val, vac = oracle.local_quasiarc_ratio(grid8.space, arc.indices, 1.0, 3.0)
    assert not lam.vacuous and not vac
    assert lam.value == pytest.approx(val)


def test_lambda_vacuous_flag():
    sp = _line(5)
    arc = DiscreteArc(tuple(range(5)))
    lam = measure_local_quasiarc(sp, arc, 100.0, 200.0)
    assert lam.vacuous and lam.value == 1.0


def test_lambda_straight_segment():
    sp = _line(50)
    arc = DiscreteArc(tuple(range(50)))
    lam = measure_local_quasiarc(sp, arc, 1.0, 20.0)
    assert lam.value == pytest.approx(1.0)


def test_compose_empty_identity():
    sp = _line(10)
    arc = DiscreteArc(tuple(range(10)))
    ident = compose_follow_maps([], base=arc)
    assert ident.assignment == tuple(range(10))
    assert ident.epsilon == 0.0


def test_compose_two_maps_bounds():
    sp = _line(10)
    a = DiscreteArc(tuple(range(10)))
    b = DiscreteArc(tuple(range(0, 10, 1)))
    m1 = CoarseMap(source=b, target=a, assignment=tuple(range(10)),
                   epsilon=1.5)
    c = DiscreteArc((0, 2, 4, 6, 8, 9))
    m2 = CoarseMap(source=c, target=b, assignment=(0, 2, 4, 6, 8, 9),
                   epsilon=2.5)
    comp = compose_follow_maps([m1, m2])
    assert comp.epsilon == pytest.approx(4.0)
    assert comp.assignment == (0, 2, 4, 6, 8, 9)
    assert comp.assignment[0] == 0 and comp.assignment[-1] == 9
    verdict = verify_follows(sp, c, a, comp, 4.0)
    assert verdict.passed


def test_compose_chain_mismatch():
    a = DiscreteArc((0, 1, 2))
    b = DiscreteArc((3, 4))
    m1 = CoarseMap(source=b, target=a, assignment=(0, 2), epsilon=1.0)
    m2 = CoarseMap(source=a, target=a, assignment=(0, 1, 2), epsilon=1.0)
    with pytest.raises(ValueError, match="mismatch"):
        compose_follow_maps([m1, m2])


def test_cauchy_identical_arcs():
    sp = _line(30)
    arc = DiscreteArc(tuple(range(30)))

    class FakeTrace:
        arcs = (arc, arc, arc)
        delta = 0.5
        big_s_constant = 0.5
        config = IterationConfig(epsilon=10.0, l_hat=1.0)

    report = check_cauchy(sp, FakeTrace())
    assert report.passed
    assert report.max_ratio == 0.0


def test_cauchy_single_arc_vacuous():
    sp = _line(30)
    arc = DiscreteArc(tuple(range(30)))

    class FakeTrace:
        arcs = (arc,)
        delta = 0.5
        big_s_constant = 0.5
        config = IterationConfig(epsilon=10.0, l_hat=1.0)

    report = check_cauchy(sp, FakeTrace())
    assert report.passed and report.vacuous


def test_config_delta_default_cap():
    cfg = IterationConfig(epsilon=1.0, l_hat=1.0)
    assert cfg.resolved_delta() == pytest.approx(0.1)
    cfg2 = IterationConfig(epsilon=1.0, l_hat=1.0, s_estimate=0.2)
    assert cfg2.resolved_delta() == pytest.approx(0.2 / 5.0)
    with pytest.raises(ValueError):
        IterationConfig(epsilon=1.0, l_hat=1.0, scale_delta=1.5).resolved_delta()


def test_scales_exact_geometric():
    sp = _line(600)
    arc = DiscreteArc(tuple(range(600)))
    cfg = IterationConfig(epsilon=120.0, l_hat=1.0, scale_delta=0.55,
                          max_depth=2)
    trace = iterate(sp, arc, cfg)
    for k in range(1, len(trace.scales)):
        assert trace.scales[k] == pytest.approx(trace.scales[k - 1] * 0.55)
