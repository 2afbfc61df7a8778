"""System construction, invariant checking, and the construction-free oracle."""

from fractions import Fraction

import pytest

from hgpade.errors import InvalidInput
from hgpade.pade import (
    PadeSystem,
    build_P,
    build_P_is,
    build_system,
    default_truncation,
    membership_in_nullspace,
    poly_pow_linear,
    remainder,
    solve_pade_nullspace,
    verify_system,
)
from hgpade.polyops import LaurentTail, expand_F_s, poly_deg, poly_mul, poly_trim, psi_weights

F = Fraction


def test_default_truncation_monotone():
    assert default_truncation(1, 1, 1) == 8
    for n in range(1, 5):
        assert default_truncation(2, 2, n + 1) > default_truncation(2, 2, n)
        assert default_truncation(2, 2, n) > 2 * 2 * n + n  # room beyond the order bound


def test_poly_pow_linear():
    assert poly_pow_linear(F(-2), 3) == poly_trim(
        poly_mul(poly_mul([F(-2), F(1)], [F(-2), F(1)]), [F(-2), F(1)])
    )
    assert poly_pow_linear(F(5), 0) == [F(1)]


# ---------------------------------------------------------------------------
# the toy kernel: c_k = 1, F_0(w) = w/(1-w), so P_0 F_0(1/z) is exactly 1


def test_toy_P0(toy_spec):
    assert build_P(toy_spec, (F(1),), 1, 0) == [F(-1), F(1)]
    assert build_P_is(toy_spec, (F(1),), 1, 0, 1, 0) == [F(1)]


def test_toy_remainder_vanishes(toy_spec):
    system = build_system(toy_spec, (F(1),), 1)
    tail = system.R[(0, 1, 0)]
    assert tail.is_zero_window()  # 1 - 1 = 0, exactly, through the whole window
    assert tail.ord_at_least(2)


def test_toy_input_validation(toy_spec):
    with pytest.raises(InvalidInput):
        build_P(toy_spec, (F(1),), 0, 0)  # n >= 1
    with pytest.raises(InvalidInput):
        build_P(toy_spec, (F(1),), 1, 2)  # ell <= r*m
    with pytest.raises(InvalidInput):
        build_P(toy_spec, (F(0),), 1, 0)  # alpha = 0
    with pytest.raises(InvalidInput):
        build_P(toy_spec, (F(1), F(1)), 1, 0)  # repeated alphas


# ---------------------------------------------------------------------------
# the documented instance r = 2, alphas = (1, 2)


def test_degree_contract(canonical_system):
    sys = canonical_system
    rm = sys.r * sys.m
    for ell in range(rm + 1):
        assert poly_deg(sys.P[ell]) == rm * sys.n + ell
    for key, p in sys.Pis.items():
        assert poly_deg(p) <= rm * sys.n + key[0]


def test_order_contract(canonical_system):
    for key, tail in canonical_system.R.items():
        assert tail.ord_at_least(canonical_system.n + 1), key


def test_remainder_routes_agree(canonical_system):
    sys = canonical_system
    for key in [(0, 1, 0), (2, 2, 1), (4, 1, 1)]:
        a = remainder(sys, *key, route="functional")
        b = remainder(sys, *key, route="product")
        for e in range(1, min(a.truncation, b.truncation)):
            assert a.coeff(e) == b.coeff(e)
    with pytest.raises(InvalidInput):
        remainder(sys, 0, 1, 0, truncation=sys.n + 1)  # too short to certify


def test_cross_check_off_matches(spec_r2, canonical_system):
    loose = build_system(spec_r2, (F(1), F(2)), 1, cross_check=False)
    assert loose.P == canonical_system.P
    assert loose.Pis == canonical_system.Pis
    assert loose.R == canonical_system.R


def test_verify_clean(canonical_system):
    report = verify_system(canonical_system)
    assert report["ok"]
    assert report["failures"] == []
    assert report["r"] == 2 and report["m"] == 2 and report["n"] == 1
    assert all(report["hypothesis_flags"].values())


def _copy(system):
    return PadeSystem.from_jsonable(system.to_jsonable())


def test_verify_names_degree_failure(canonical_system):
    broken = _copy(canonical_system)
    broken.P[1] = broken.P[1][:-1]  # drop the leading coefficient
    report = verify_system(broken)
    assert not report["ok"]
    assert any(f["check"] == "deg_P" and f["index"] == [1] for f in report["failures"])


def test_verify_names_order_failure(canonical_system):
    broken = _copy(canonical_system)
    trunc = broken.truncation
    broken.R[(0, 1, 0)] = LaurentTail(1, [F(1)] + [F(0)] * (trunc - 2), trunc)
    report = verify_system(broken)
    assert not report["ok"]
    checks = {f["check"] for f in report["failures"]}
    assert "ord_R" in checks
    assert "remainder_coeffs" in checks  # the fresh recomputation disagrees too


def test_verify_names_remainder_failure(canonical_system):
    broken = _copy(canonical_system)
    broken.P[0] = list(broken.P[0])
    broken.P[0][0] += 1  # same degree, wrong polynomial
    report = verify_system(broken)
    assert not report["ok"]
    assert any(f["check"] == "remainder_coeffs" for f in report["failures"])


def test_json_round_trip(canonical_system):
    back = PadeSystem.from_jsonable(canonical_system.to_jsonable())
    assert back.spec.eta == canonical_system.spec.eta
    assert back.alphas == canonical_system.alphas
    assert back.n == canonical_system.n
    assert back.truncation == canonical_system.truncation
    assert back.P == canonical_system.P
    assert back.Pis == canonical_system.Pis
    assert back.R == canonical_system.R
    assert verify_system(back)["ok"]


# ---------------------------------------------------------------------------
# construction-free nullspace oracle


def test_nullspace_toy():
    # f = 1/z alone: order >= 2 with deg P0 <= 1 forces P0 = z, P_1 = 1
    f = [LaurentTail(1, [F(1)] + [F(0)] * 4, 6)]
    families = solve_pade_nullspace(f, [1], 1)
    assert families == [[[F(0), F(1)], [F(1)]]]


def test_nullspace_requires_window():
    f = [LaurentTail(1, [F(1)], 2)]
    with pytest.raises(InvalidInput):
        solve_pade_nullspace(f, [1], 1)  # window too short for the constraints
    with pytest.raises(InvalidInput):
        solve_pade_nullspace(f, [1, 2], 1)  # one order target per tail


def test_constructed_column_is_the_kernel(canonical_m1):
    # at M = rmn the solution family is unique up to scale and it is ours
    sys = canonical_m1
    rm, n = sys.r * sys.m, sys.n
    need = n + rm * n + 1
    tails = [
        expand_F_s(sys.spec, alpha, s, need + 1)
        for alpha in sys.alphas
        for s in range(sys.r)
    ]
    families = solve_pade_nullspace(tails, [n] * len(tails), rm * n)
    assert len(families) == 1
    fam = families[0]
    lam = sys.P[0][-1] / fam[0][-1]
    assert [lam * c for c in fam[0]] == sys.P[0]
    idx = 0
    for i in range(1, sys.m + 1):
        for s in range(sys.r):
            idx += 1
            assert [lam * c for c in fam[idx]] == sys.Pis[(0, i, s)]


def test_membership_all_columns(canonical_system):
    for ell in range(canonical_system.r * canonical_system.m + 1):
        assert membership_in_nullspace(canonical_system, ell)


def test_psi_weights_agree_with_remainder(canonical_m1):
    # remainder coefficients are psi_{i,s}(t^k P(t)): spot-check k = n
    sys = canonical_m1
    P = sys.P[0]
    w = psi_weights(sys.spec, sys.alphas[0], 1, sys.n + len(P))
    acc = sum(c * w[sys.n + d] for d, c in enumerate(P))
    assert sys.R[(0, 1, 1)].coeff(sys.n + 1) == acc
