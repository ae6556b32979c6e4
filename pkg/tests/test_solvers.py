from fractions import Fraction

import pytest

from padic_gibbs.errors import UnequalCouplings, ZeroCoupling
from padic_gibbs.gibbs_model import ModelParams, field_compatible, recurrence
from padic_gibbs.padic_core import vanishes_to
from padic_gibbs.residue_classifier import periodic_condition, ti_condition
from padic_gibbs.solvers import (
    classify,
    growth_profile,
    periodic_analysis,
    published_a_log_norm,
    table1,
    ti_solutions,
    trend_verdict,
)

from conftest import primes_below


def test_h0_is_always_a_solution():
    for p, J in [(2, 1), (3, -1), (29, 2)]:
        sol = ti_solutions(ModelParams(p, J))[0]
        assert sol.u == 1 and sol.h == 1 and sol.label == "h0"


def test_fixed_points_and_reciprocal_pair():
    params = ModelParams(29, 1)
    sols = ti_solutions(params)
    assert [s.index for s in sols] == [0, 1, 2]
    for s in sols[1:]:
        assert vanishes_to(recurrence(s.u, s.u, params) - s.u, params.guard)
        assert vanishes_to(s.h * s.h - s.u, params.guard)
        assert s.residual >= params.guard
    assert vanishes_to(sols[1].u * sols[2].u - 1, params.guard)


@pytest.mark.parametrize("J", [1, 2, -1, -2])
def test_counts_match_congruences_for_small_primes(J):
    for p in primes_below(60):
        params = ModelParams(p, J)
        assert len(ti_solutions(params)) == ti_condition(p, J).count, p
        sol, _ = periodic_analysis(params)
        assert (0 if sol is None else 2) == periodic_condition(p, J).count, p


def test_periodic_failure_names():
    assert periodic_analysis(ModelParams(11, -1)) == (None, "NoSquareRootOfDiscriminant")
    assert periodic_analysis(ModelParams(7, 1))[1] == "NoSquareRootOfU3"


def test_periodic_fields_are_compatible():
    params = ModelParams(13, 1)
    sol, failure = periodic_analysis(params)
    assert failure is None
    assert vanishes_to(recurrence(sol.u3, sol.u3, params) - sol.u4, params.guard)
    assert vanishes_to(sol.u3 * sol.u4 - 1, params.guard)
    for field in sol.fields:
        assert field_compatible(field, 3, params)
    assert [f.label for f in sol.fields] == ["per1", "per2"]


def test_solver_rejects_bad_couplings():
    with pytest.raises(ZeroCoupling):
        ti_solutions(ModelParams(5, 0))
    with pytest.raises(UnequalCouplings):
        ti_solutions(ModelParams(5, 1, 2))


@pytest.mark.parametrize("norms, verdict", [
    ([1, 3, 7], "UnboundedTrend"),
    ([0, 0, 0], "Bounded"),
    ([1, 2, 3], "Bounded"),
    ([1, 3], "Bounded"),
    ([-5, -3, 1], "UnboundedTrend"),
])
def test_trend_verdict(norms, verdict):
    assert trend_verdict(norms) == verdict


def test_growth_profile_for_unbounded_case():
    params = ModelParams(3, 1)
    prof = growth_profile(params, ti_solutions(params)[0].field)
    assert prof.sigma_star_log_norms == [1, 3, 7]
    assert prof.verdict == "UnboundedTrend"
    assert prof.rows()[0]["depth"] == 1


def test_published_a_norms():
    assert published_a_log_norm(3, 1, 0) == 0
    assert published_a_log_norm(5, 2, 0) == 2
    assert published_a_log_norm(5, -1, 0) == 3
    assert published_a_log_norm(5, -1, 1) == 5


def test_table1_rows():
    rows = [r.to_dict() for r in table1([7, 11, 19, 23], -1)]
    assert [r["computed_value"] for r in rows] == ["+", "-", "+", "-"]
    assert [r["agree"] for r in rows] == [True, True, False, None]
    assert all(r["padic_path"] == r["residue_path"] for r in rows)
    with pytest.raises(ZeroCoupling):
        table1([7], 0)
    with pytest.raises(ValueError):
        table1([7], 1)


def test_classify_three_one():
    report = classify(3, 1)
    assert report.ti_count == 1 and report.periodic_count == 0
    assert report.boundedness[0].theorem == "unbounded"
    d = report.to_dict()
    assert all(d["cross_checks"].values())
    star = [n for n in report.discrepancies if "sigma*" in n["quantity"]]
    assert star[0]["published"] == [0, 2, 6] and star[0]["computed"] == [1, 3, 7]


def test_classify_field_norms_negative_coupling():
    J = -1
    report = classify(5, J, n_max=2)
    norms = [s.to_dict(5)["h_log_norm"] for s in report.ti]
    assert norms == [0, -2 * J, 2 * J]


def test_ti_solution_serialization_is_exact_for_h0():
    d = ti_solutions(ModelParams(5, 1))[0].to_dict(5)
    assert d["u"] == {"prime": 5, "rational": str(Fraction(1))}
