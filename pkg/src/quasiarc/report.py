"""Run reports: plain dicts with a published, versioned JSON schema."""

from __future__ import annotations

import json
import math

REPORT_SCHEMA_VERSION = 1


def _num(x):
    """JSON-safe float: infinities become the string 'inf'."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf"
    return x


def space_section(space):
    return {
        "n": space.n,
        "metric": space.metric,
        "alpha": space.alpha,
        "resolution": _num(space.h),
        "step_radius": _num(space.step_radius),
    }


def profile_section(profile):
    return {
        "l_hat": _num(profile.l_hat),
        "n_hat": profile.n_hat,
        "sample_count": profile.sample_count,
        "exact": profile.exact,
    }


def straighten_section(result):
    diag = dict(result.diagnostics)
    timings = diag.pop("timings_ms", {})
    return {
        "iota": _num(result.iota),
        "short_case": result.short_case,
        "input_points": len(result.follow_map.target),
        "output_points": len(result.arc),
        "constants": {
            "s_achieved": _num(result.s_achieved),
            "S_achieved": _num(result.big_s_achieved),
            "s_theoretical": _num(result.s_theoretical),
            "S_theoretical": _num(result.big_s_theoretical),
        },
        "verdicts": {k: bool(v) for k, v in result.verdicts.items()},
        "star_vacuous": result.star.vacuous,
        "max_displacement": _num(result.follow_map.max_displacement),
        "stages": {k: (_num(v) if isinstance(v, float) else v)
                   for k, v in diag.items()},
        "output_arc": list(result.arc.indices),
        "z_positions": list(result.z_positions),
        "follow_assignment": list(result.follow_map.assignment),
        "timings_ms": {k: _num(v) for k, v in timings.items()},
    }


def iterate_section(space, trace, lam, cauchy):
    lo, hi = trace.scale_band(space)
    return {
        "epsilon": _num(trace.config.epsilon),
        "delta": _num(trace.delta),
        "depth": trace.depth,
        "stop_reason": trace.stop_reason,
        "lemma_hypothesis_met": trace.lemma_hypothesis_met,
        "scales": [_num(s) for s in trace.scales],
        "arc_sizes": [len(a) for a in trace.arcs],
        "endpoints_constant": trace.endpoints_constant,
        "per_step": [
            {
                "iota": _num(st.iota),
                "short_case": st.short_case,
                "s_achieved": _num(st.s_achieved),
                "S_achieved": _num(st.big_s_achieved),
                "verdicts": {k: bool(v) for k, v in st.verdicts.items()},
            }
            for st in trace.steps
        ],
        "composed": {
            "epsilon_bound": _num(trace.composed_map.epsilon),
            "verified_at": _num(trace.composed_verdict.epsilon),
            "passed": trace.composed_verdict.passed,
            "max_displacement": _num(trace.composed_verdict.max_displacement),
        },
        "alpha": _num(trace.alpha),
        "lambda_theoretical": _num(trace.lambda_theoretical),
        "lambda_measured": {
            "value": _num(lam.value),
            "vacuous": lam.vacuous,
            "pair_count": lam.pair_count,
            "band": [_num(lo), _num(hi)],
        },
        "cauchy": {
            "passed": cauchy.passed,
            "max_ratio": _num(cauchy.max_ratio),
            "vacuous": cauchy.vacuous,
            "pairs": len(cauchy.table),
        },
    }


def build_report(command, space, *, profile=None, seed=0, echo=None,
                 straighten=None, iterate=None, timings_ms=None):
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "echo": echo or {},
        "seed": seed,
        "space": space_section(space),
    }
    if profile is not None:
        report["profile"] = profile_section(profile)
    if straighten is not None:
        report["straighten"] = straighten
    if iterate is not None:
        report["iterate"] = iterate
    report["timings_ms"] = {k: _num(v) for k, v in (timings_ms or {}).items()}
    return report


def dump_report(report, path=None):
    text = json.dumps(report, sort_keys=True, indent=1)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def report_verdicts(report):
    """All boolean verdicts buried in a report, flattened."""
    out = {}
    if "straighten" in report:
        for k, v in report["straighten"]["verdicts"].items():
            out[f"straighten.{k}"] = v
    if "iterate" in report:
        sec = report["iterate"]
        for n, step in enumerate(sec["per_step"], start=1):
            for k, v in step["verdicts"].items():
                out[f"step{n}.{k}"] = v
        out["composed.follows"] = sec["composed"]["passed"]
        out["cauchy"] = sec["cauchy"]["passed"]
        out["endpoints_constant"] = sec["endpoints_constant"]
    return out
