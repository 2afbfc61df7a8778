"""Tests for the effective irrationality criterion layer.

Frozen constants in this module were measured by running the relevant
routine once and pinning the digits; identities (mu/C formulas, budget
route at the archimedean place) are asserted against the report fields
rather than re-frozen.
"""

import math
from fractions import Fraction

import pytest

from hgpade.arith import Place
from hgpade.criterion import (
    HeightData,
    criterion_V,
    finite_place_budget,
    fit_rate,
    heights,
    measure,
    min_beta,
    place_consistency,
    stirling_growth_const,
)
from hgpade.errors import (
    CriterionNotSatisfied,
    HypothesisViolation,
    InconclusiveComparison,
    InvalidInput,
)
from hgpade.polyops import HypergeometricSpec

# a small fitting window keeps the failure-path tests fast; the canonical
# window range(4, 17) is exercised by the full measure() run below
SMALL_WINDOW = range(4, 9)


# ---------------------------------------------------------------------------
# rate fitting
# ---------------------------------------------------------------------------


def test_fit_rate_recovers_exact_affine_sequence():
    ns = list(range(4, 13))
    rate, offset = 3.5, 2.0
    fit = fit_rate(ns, [rate * n + offset for n in ns])
    assert fit.rate == pytest.approx(rate, abs=1e-10)
    assert fit.offset == pytest.approx(offset, abs=1e-10)
    assert fit.max_rel_residual < 1e-10
    assert fit.ok
    # points are stored normalized by n
    assert fit.points == [(n, (rate * n + offset) / n) for n in ns]


def test_fit_rate_flags_distorted_data():
    ns = list(range(4, 13))
    ys = [2.0 * n + 1.0 for n in ns]
    ys[3] *= 1.3  # 30% kick on one sample
    fit = fit_rate(ns, ys)
    assert fit.max_rel_residual > 0.02
    assert not fit.ok


def test_fit_rate_tolerance_passthrough():
    ns = list(range(4, 9))
    fit = fit_rate(ns, [1.0 * n for n in ns], tolerance=0.5)
    assert fit.tolerance == 0.5


def test_fit_rate_input_guards():
    with pytest.raises(InvalidInput):
        fit_rate([4, 5, 6], [1.0, 2.0, 3.0])  # too few samples
    with pytest.raises(InvalidInput):
        fit_rate([4, 5, 5, 6], [1.0, 2.0, 3.0, 4.0])  # duplicate n
    with pytest.raises(InvalidInput):
        fit_rate([4, 5, 6, 7], [1.0, 2.0, 3.0])  # length mismatch


def test_fit_rate_jsonable_round_trip_fields():
    ns = list(range(4, 9))
    fit = fit_rate(ns, [2.0 * n + 3.0 for n in ns])
    data = fit.to_jsonable()
    assert data["rate"] == fit.rate
    assert data["ok"] is True
    assert data["points"] == [[n, z] for n, z in fit.points]


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------


def test_height_of_unit_tuple_is_zero():
    h = heights((Fraction(1),))
    assert h.h_v == {"inf": 0.0}
    assert h.h == 0.0


def test_height_integer_tuple_is_archimedean_only():
    h = heights((Fraction(1), Fraction(2)))
    assert h.h_v == {"inf": pytest.approx(math.log(2))}
    assert h.h == pytest.approx(0.6931471805599453)


def test_height_splits_between_places():
    h = heights((Fraction(1, 2), Fraction(3)))
    assert set(h.h_v) == {"inf", "2"}
    assert h.h_v["inf"] == pytest.approx(math.log(3))
    assert h.h_v["2"] == pytest.approx(math.log(2))
    assert h.h == pytest.approx(1.791759469228055)
    assert h.h == pytest.approx(sum(h.h_v.values()))


def test_height_single_rational_is_log_max_num_den():
    # h(p/q) = log max(|p|, q) for p/q in lowest terms
    assert heights((Fraction(2, 3),)).h == pytest.approx(math.log(3))
    assert heights((Fraction(-7, 4),)).h == pytest.approx(math.log(7))


def test_height_zero_tuple_rejected():
    with pytest.raises(InvalidInput):
        heights((Fraction(0),))


def test_height_data_is_dataclass_with_vector():
    h = heights((Fraction(5, 2),))
    assert isinstance(h, HeightData)
    assert h.vector == (Fraction(5, 2),)


# ---------------------------------------------------------------------------
# closed-form skeleton constants
# ---------------------------------------------------------------------------


def test_finite_place_budget_frozen(spec_r2, spec_r3):
    # measured once from the exact denominator bookkeeping
    assert finite_place_budget(spec_r2) == pytest.approx(
        11.499948696921782, rel=1e-12
    )
    assert finite_place_budget(spec_r3) == pytest.approx(
        19.05758295346874, rel=1e-12
    )
    # more series and more zeta denominators can only cost more
    assert finite_place_budget(spec_r3) > finite_place_budget(spec_r2)


def test_stirling_growth_const_frozen():
    assert stirling_growth_const(2, 1) == pytest.approx(
        5.2053793708887675, rel=1e-12
    )
    assert stirling_growth_const(2, 2) == pytest.approx(
        7.77661295762166, rel=1e-12
    )
    # doubling the number of interpolation points increases the constant
    assert stirling_growth_const(2, 2) > stirling_growth_const(2, 1)


# ---------------------------------------------------------------------------
# the empirical exponent V
# ---------------------------------------------------------------------------


def test_criterion_v_small_window_frozen(spec_r2):
    v = criterion_V(spec_r2, (Fraction(1),), Fraction(10), Place(), n_range=SMALL_WINDOW)
    assert v == pytest.approx(0.9244315080059713, rel=1e-9)


# ---------------------------------------------------------------------------
# the full measurement at the canonical instance
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def canonical_measure(spec_r2):
    # alpha=1, beta=10^6 at the archimedean place: comfortably inside the
    # certified region, so every route in the report is populated
    return measure(spec_r2, (Fraction(1),), Fraction(10**6), Place(), epsilon=0.1)


def test_measure_frozen_empirical_rates(canonical_measure):
    rep = canonical_measure
    assert rep.A_emp == pytest.approx(15.602356527876893, rel=1e-9)
    assert rep.U_emp == pytest.approx(31.47383033432584, rel=1e-9)
    assert rep.V_emp == pytest.approx(11.577754987334568, rel=1e-9)
    assert rep.verdict is True
    assert rep.n_range == (4, 16)
    assert rep.epsilon == 0.1


def test_measure_frozen_closed_forms(canonical_measure):
    rep = canonical_measure
    assert rep.A_cf == pytest.approx(9.972701339566981, rel=1e-9)
    assert rep.V_cf == pytest.approx(-1.5272473573548009, rel=1e-9)


def test_measure_mu_and_c_match_their_formulas(canonical_measure):
    rep = canonical_measure
    denom = rep.V_emp - rep.epsilon
    assert rep.mu_eps == pytest.approx((rep.A_emp + rep.U_emp) / denom, rel=1e-12)
    want_c = math.exp(-(math.log(2) / denom + 1) * (rep.A_emp + rep.U_emp))
    assert rep.C_eps == pytest.approx(want_c, rel=1e-12)
    assert rep.C_eps == pytest.approx(2.0911862055772257e-22, rel=1e-9)


def test_measure_diagnostics_contents(canonical_measure):
    d = canonical_measure.diagnostics
    assert {
        "fit_A",
        "fit_U",
        "fit_height",
        "height_rate",
        "finite_place_budget",
        "V_budget_route",
        "V_cf_stirling",
        "c_fit",
        "c_stirling",
        "finite_profile_N",
        "specialization_consistent",
    } <= set(d)
    assert d["finite_place_budget"] == pytest.approx(11.499948696921782, rel=1e-9)
    assert d["V_budget_route"] == pytest.approx(4.10240783095511, rel=1e-9)
    assert d["V_cf_stirling"] == pytest.approx(-2.889817509846276, rel=1e-9)
    assert d["c_fit"] == pytest.approx(3.842809218397292, rel=1e-9)
    assert d["c_stirling"] == pytest.approx(5.2053793708887675, rel=1e-9)
    assert d["finite_profile_N"] is None  # archimedean run
    assert d["specialization_consistent"] is True


def test_measure_budget_route_identity_at_arch(canonical_measure):
    # at the archimedean place the budget route is A_emp minus the finite
    # place budget, with no local growth correction
    d = canonical_measure.diagnostics
    assert d["V_budget_route"] == pytest.approx(
        canonical_measure.A_emp - d["finite_place_budget"], rel=1e-12
    )


def test_measure_fit_quality(canonical_measure):
    fit_a = canonical_measure.diagnostics["fit_A"]
    assert fit_a["rate"] == pytest.approx(canonical_measure.A_emp, rel=1e-12)
    assert fit_a["offset"] == pytest.approx(13.27166287962947, rel=1e-9)
    assert fit_a["max_rel_residual"] == pytest.approx(
        0.0013569951115179227, rel=1e-6
    )
    assert fit_a["ok"] is True


def test_measure_report_jsonable(canonical_measure):
    data = canonical_measure.to_jsonable()
    assert data["v0"] == "inf"
    assert data["closed_form_status"] == "best_effort"
    assert data["verdict"] is True
    assert data["n_range"] == [4, 16]
    assert data["A_emp"] == canonical_measure.A_emp
    assert data["diagnostics"] == canonical_measure.diagnostics


# ---------------------------------------------------------------------------
# failure paths
# ---------------------------------------------------------------------------


def test_measure_rejects_beta_too_small(spec_r2):
    # at beta=2 the approximations grow faster than they decay: V < 0
    with pytest.raises(CriterionNotSatisfied, match="beta=2"):
        measure(spec_r2, (Fraction(1),), Fraction(2), Place(),
                epsilon=0.01, n_range=SMALL_WINDOW)


def test_measure_rejects_epsilon_eating_the_margin(spec_r2):
    # V ~ 0.92 at beta=10 on the small window, so epsilon=1 kills it
    with pytest.raises(CriterionNotSatisfied):
        measure(spec_r2, (Fraction(1),), Fraction(10), Place(),
                epsilon=1.0, n_range=SMALL_WINDOW)


def test_measure_marginal_instance_is_inconclusive_not_certified(spec_r2):
    # beta=10: empirically positive (V ~ 0.92) but far below the worst-case
    # budget, so the run must refuse to certify rather than pick a winner
    with pytest.raises(InconclusiveComparison, match="budget route"):
        measure(spec_r2, (Fraction(1),), Fraction(10), Place(),
                epsilon=0.01, n_range=SMALL_WINDOW)


def test_measure_p_adic_uncertified_instance(spec_r2):
    # 5-adically small target: alpha=25, beta=3 at v0=5 is not certified
    with pytest.raises(CriterionNotSatisfied):
        measure(spec_r2, (Fraction(25),), Fraction(3), Place(5),
                epsilon=0.01, n_range=SMALL_WINDOW)


def test_measure_checks_spec_hypotheses_first():
    bad = HypergeometricSpec.from_ab((Fraction(2), Fraction(1, 4)), (Fraction(1, 2),))
    with pytest.raises(HypothesisViolation):
        measure(bad, (Fraction(1),), Fraction(10**6), Place(), epsilon=0.1)


# ---------------------------------------------------------------------------
# the beta threshold search
# ---------------------------------------------------------------------------


def test_min_beta_small_window(spec_r2):
    mb = min_beta(spec_r2, (Fraction(1),), Place(), 64, n_range=SMALL_WINDOW)
    assert mb == 5
    # bracketing: V flips sign exactly at the reported threshold
    v_at = criterion_V(spec_r2, (Fraction(1),), Fraction(5), Place(), n_range=SMALL_WINDOW)
    v_below = criterion_V(spec_r2, (Fraction(1),), Fraction(4), Place(), n_range=SMALL_WINDOW)
    assert v_at == pytest.approx(0.02518398663377175, rel=1e-9)
    assert v_below == pytest.approx(-0.29439711685130376, rel=1e-9)
    assert v_at > 0 > v_below


def test_min_beta_canonical_window(spec_r2):
    # default fitting window, the value quoted in the docs
    assert min_beta(spec_r2, (Fraction(1),), Place(), 1024) == 10


def test_min_beta_none_when_bound_too_small(spec_r2):
    # the search floor is int(max |alpha|) + 1 = 2
    assert min_beta(spec_r2, (Fraction(1),), Place(), 1, n_range=SMALL_WINDOW) is None
    # V(2) < 0, so a bound of 2 leaves nothing certified either
    assert min_beta(spec_r2, (Fraction(1),), Place(), 2, n_range=SMALL_WINDOW) is None


def test_min_beta_is_archimedean_only(spec_r2):
    with pytest.raises(InvalidInput, match="archimedean"):
        min_beta(spec_r2, (Fraction(25),), Place(5), 100)


# ---------------------------------------------------------------------------
# finite-place sanity: measured mass stays under the budget
# ---------------------------------------------------------------------------


def test_place_consistency_frozen(spec_r2):
    pc = place_consistency(spec_r2, 200)
    assert pc["N"] == 200
    assert pc["measured"] == pytest.approx(7.901078214951886, rel=1e-9)
    assert pc["budget"] == pytest.approx(11.499948696921782, rel=1e-9)
    assert pc["relative_gap"] == pytest.approx(0.3129466553997075, rel=1e-9)
    # the budget is a worst-case majorant: the finite-N mass sits well below
    # it (not within 5%), and the one-sided bound holds
    assert pc["within_5pct"] is False
    assert pc["upper_bound_ok"] is True
