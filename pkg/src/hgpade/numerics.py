"""Certified evaluation of the hypergeometric series and the remainder
identities at rational arguments.

Everything is interval arithmetic in disguise: a BigFloat is an exact rational
partial sum plus an exact rational bound on the discarded tail, so all error
tracking is rigorous (the tail bounds come from a geometric majorant with the
ratio frozen once it drops below (1+|z|)/2).  No binary floats enter any
certified quantity; floats appear only when a caller formats or fits rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivergentSeries, InsufficientPrecision, InvalidInput
from .polyops import (
    HypergeometricSpec,
    f_s_coefficient,
    poly_eval,
    poly_shift_up,
    psi,
)


@dataclass(frozen=True)
class BigFloat:
    """An exact value known to lie within `error` of the true sum."""

    value: Fraction
    error: Fraction
    bits: int

    def __post_init__(self):
        if self.error < 0:
            raise InvalidInput("error bound must be nonnegative")

    def cmp(self, other) -> int:
        """-1, 0, +1 against a rational or another BigFloat; raises when the
        certified intervals overlap without coinciding."""
        if isinstance(other, BigFloat):
            lo = (other.value - other.error, other.value + other.error)
        else:
            other = Fraction(other)
            lo = (other, other)
        if self.value + self.error < lo[0]:
            return -1
        if self.value - self.error > lo[1]:
            return 1
        if self.error == 0 and lo[0] == lo[1] == self.value:
            return 0
        raise InsufficientPrecision(
            "certified intervals overlap; increase bits to compare"
        )

    def agrees_with(self, other: "BigFloat") -> bool:
        """True iff the certified intervals intersect."""
        return abs(self.value - other.value) <= self.error + other.error

    def to_decimal(self, digits: int = 30) -> str:
        scaled = self.value * 10**digits
        whole = int(scaled)  # truncation toward zero is fine for display
        sign = "-" if whole < 0 else ""
        ds = str(abs(whole)).rjust(digits + 1, "0")
        return f"{sign}{ds[:-digits]}.{ds[-digits:]}"

    def error_exponent(self) -> int:
        """Smallest k with error <= 2^-k (0 when the error exceeds 1)."""
        if self.error == 0:
            return self.bits
        k = 0
        e = Fraction(self.error)
        while e <= Fraction(1, 2) and k < 4 * self.bits + 64:
            e *= 2
            k += 1
        return k


def _abs(x: Fraction) -> Fraction:
    return -x if x < 0 else x


def eval_pFq(a, b, z, bits: int) -> BigFloat:
    """Generalized hypergeometric sum_k prod(a)_k/prod(b)_k * z^k/k!, with a
    certified geometric tail bound.  Requires |z| < 1 when len(a) == len(b)+1."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    z = Fraction(z)
    for bj in b:
        if bj.denominator == 1 and bj <= 0:
            raise InvalidInput(f"lower parameter {bj} is a non-positive integer")
    if len(a) == len(b) + 1 and _abs(z) >= 1:
        raise DivergentSeries("need |z| < 1 on the G-function disk")
    if len(a) > len(b) + 1 and z != 0:
        raise DivergentSeries("series diverges for p > q+1")
    if z == 0:
        return BigFloat(Fraction(1), Fraction(0), bits)

    rho = (1 + _abs(z)) / 2 if len(a) == len(b) + 1 else Fraction(1, 2)
    kmin = 1 + max(
        [0] + [int(_abs(x)) + 1 for x in b] + [int(_abs(x)) + 1 for x in a]
    )

    def ratio_bound(k: int) -> Fraction:
        # |term_{k+1}/term_k| = |z| prod|a+k| / ((k+1) prod|b+k|); bounding
        # each factor by k(1 +- |.|/k) leaves k^(p-q-1) from the degree gap
        out = _abs(z) * Fraction(k) ** (len(a) - len(b) - 1)
        for x in a:
            out *= 1 + _abs(x) / k
        for x in b:
            out /= 1 - _abs(x) / k
        return out

    k0 = kmin
    while ratio_bound(k0) > rho:
        k0 *= 2

    target = Fraction(1, 2**bits)
    term = Fraction(1)
    total = Fraction(0)
    k = 0
    while True:
        total += term
        num = Fraction(1)
        for x in a:
            num *= x + k
        den = Fraction(k + 1)
        for x in b:
            den *= x + k
        if den == 0:
            raise InvalidInput("lower-parameter pole while summing")
        term = term * z * num / den
        k += 1
        if k >= k0:
            tail = _abs(term) * rho / (1 - rho)
            if tail <= target * max(Fraction(1), _abs(total)):
                return BigFloat(total, tail, bits)
        if k > 64 * bits + 4 * k0 + 64:
            raise InsufficientPrecision("series did not certify within budget")


def _f_direct(spec: HypergeometricSpec, s: int, w: Fraction, bits: int) -> BigFloat:
    """F_s(w) by direct summation of (k+gamma_1)...(k+gamma_s) c_k w^{k+1}."""
    w = Fraction(w)
    if _abs(w) >= 1:
        raise DivergentSeries("need |w| < 1")
    if w == 0:
        return BigFloat(Fraction(0), Fraction(0), bits)
    rho = (1 + _abs(w)) / 2
    gmax = max([_abs(g) for g in spec.gamma[:s]], default=Fraction(0))
    consts = [_abs(x) for x in spec.eta] + [_abs(1 + z) for z in spec.zeta] + [gmax]
    kmin = 2 + int(max(consts))

    def ratio_bound(k: int) -> Fraction:
        out = _abs(w)
        for x in spec.eta:
            out *= 1 + _abs(x) / k
        for zj in spec.zeta:
            out /= 1 - _abs(1 + zj) / k
        # (k+1+g)/(k+g) <= 1 + 1/(k - |g|), valid and decreasing past kmin
        out *= (1 + 1 / (k - gmax)) ** s
        return out

    k0 = kmin
    while ratio_bound(k0) > rho:
        k0 *= 2

    target = Fraction(1, 2**bits)
    total = Fraction(0)
    k = 0
    wpow = w
    while True:
        term = f_s_coefficient(spec, s, k) * wpow
        total += term
        wpow *= w
        k += 1
        if k >= k0:
            tail = _abs(f_s_coefficient(spec, s, k) * wpow) / (1 - rho)
            if tail <= target * max(Fraction(1), _abs(total)):
                return BigFloat(total, tail, bits)
        if k > 64 * bits + 4 * k0 + 64:
            raise InsufficientPrecision("series did not certify within budget")


def _f_closed(spec: HypergeometricSpec, s: int, w: Fraction, bits: int):
    """Closed form: F_0 = rF_{r-1}(a;b;w) - 1, and for s >= 1
    F_s = [prod a / prod_{j<=r-s} b_j] * w * rF_{r-1}(a+1; b+1 on the first
    r-s entries; w), rescaled when the seed c0 is not the default.

    Returns None when the closed form does not apply: a zero parameter, or a
    spec built from roots with zeta_r != 1 (whose recurrence is not the
    hypergeometric one, so no rescaling of the seed can bridge the two)."""
    a, b = spec.a, spec.b
    if spec.zeta[-1] != 1 or any(x == 0 for x in a) or any(x == 0 for x in b):
        return None
    c0_default = math.prod(a, start=Fraction(1)) / math.prod(b, start=Fraction(1))
    scale = spec.c0 / c0_default
    w = Fraction(w)
    if s == 0:
        inner = eval_pFq(a, b, w, bits + 8)
        return BigFloat(scale * (inner.value - 1), _abs(scale) * inner.error, bits)
    r = spec.r
    if s > r - 1:
        raise InvalidInput(f"s out of range: {s}")
    shifted_b = [bj + 1 for bj in b[: r - s]] + list(b[r - s:])
    front = math.prod(a, start=Fraction(1))
    for bj in b[: r - s]:
        front /= bj
    inner = eval_pFq([x + 1 for x in a], shifted_b, w, bits + 8)
    front = scale * front * w
    return BigFloat(front * inner.value, _abs(front) * inner.error, bits)


def eval_F_family(spec: HypergeometricSpec, w, bits: int):
    """All r values F_0(w)..F_{r-1}(w), each certified, each computed by the
    direct series and (where defined) re-derived from the closed form; the two
    must agree within the certified bounds."""
    w = Fraction(w)
    out = []
    for s in range(spec.r):
        direct = _f_direct(spec, s, w, bits)
        closed = _f_closed(spec, s, w, bits)
        if closed is not None and not direct.agrees_with(closed):
            raise InsufficientPrecision(
                f"series and closed form disagree beyond certified error at s={s}: "
                f"{float(direct.value)} vs {float(closed.value)}"
            )
        out.append(direct)
    return out


def eval_lerch(c: int, x, w, bits: int) -> BigFloat:
    """sum_{k>=0} w^{k+1}/(x+k+1)^c — the classical one-variable ladder the
    order-r family specializes to at equal parameters."""
    x = Fraction(x)
    w = Fraction(w)
    if _abs(w) >= 1:
        raise DivergentSeries("need |w| < 1")
    if w == 0:
        return BigFloat(Fraction(0), Fraction(0), bits)
    target = Fraction(1, 2**bits)
    total = Fraction(0)
    k = 0
    wpow = w
    while True:
        total += wpow / (x + k + 1) ** c
        k += 1
        wpow *= w
        tail = _abs(wpow / (x + k + 1) ** c) / (1 - _abs(w))
        if tail <= target * max(Fraction(1), _abs(total)):
            return BigFloat(total, tail, bits)
        if k > 64 * bits + 64:
            raise InsufficientPrecision("series did not certify within budget")


# ---------------------------------------------------------------------------
# remainder identities at a rational point


def _psi_term_bound(spec: HypergeometricSpec, alpha: Fraction, s: int, j: int) -> Fraction:
    """Upper bound for |psi weight at t^j| = gammaprod(j)|c_j||alpha|^{j+1}."""
    g = Fraction(1)
    for gam in spec.gamma[:s]:
        g *= j + gam
    return _abs(g * spec.c(j)) * _abs(alpha) ** (j + 1)


def remainder_value(system, ell: int, i: int, s: int, beta, bits: int,
                    coeff_cache: dict | None = None) -> BigFloat:
    """R_{ell,i,s}(beta) from the exact stored tail plus a certified bound on
    the part beyond the truncation.

    The discarded part is sum_{k >= K} psi_{i,s}(t^k P_ell)/beta^{k+1}; each
    |psi weight| chain w(k+d) contracts by at least `ratio` per step once k is
    past every parameter magnitude, so the whole thing is dominated by one
    geometric series.  The triangle-inequality bound carries the full
    sum |P_d| slack (the true psi sums cancel heavily), so exact terms are
    appended until the bound drops under the 2^-bits target.

    coeff_cache, when given, stores the beta-independent extension
    coefficients psi(t^k P_ell) under (ell, i, s) for reuse across beta.
    """
    beta = Fraction(beta)
    spec = system.spec
    alpha = Fraction(system.alphas[i - 1])
    if _abs(alpha / beta) >= 1:
        raise DivergentSeries("need |alpha/beta| < 1")
    tail = system.R[(ell, i, s)]
    P = system.P[ell]
    value = sum(
        (tail.coefficients[idx] / beta ** (tail.order + idx)
         for idx in range(len(tail.coefficients))),
        Fraction(0),
    )
    gmax = max([_abs(g) for g in spec.gamma[:s]], default=Fraction(0))
    consts = [_abs(x) for x in spec.eta] + [_abs(1 + z) for z in spec.zeta] + [gmax]
    kfirst = tail.truncation - 1  # first psi index k not covered by the window
    kmin = max(kfirst, int(max(consts)) + 2)
    ratio0 = _abs(alpha) / _abs(beta)
    for x in spec.eta:
        ratio0 *= 1 + _abs(x) / kmin
    for zj in spec.zeta:
        ratio0 /= 1 - _abs(1 + zj) / kmin
    ratio0 *= (1 + 1 / (kmin - gmax)) ** s
    if ratio0 >= 1:
        raise InsufficientPrecision(
            "tail ratio bound not contracting; enlarge the truncation window"
        )
    geom = 1 / (1 - ratio0)
    target = Fraction(1, 2**bits)

    ext = None
    if coeff_cache is not None:
        ext = coeff_cache.setdefault((ell, i, s), [])

    def ext_coeff(k: int) -> Fraction:
        if ext is None:
            return psi(spec, system.alphas, i, s, poly_shift_up(P, k))
        while len(ext) <= k - kfirst:
            ext.append(psi(spec, system.alphas, i, s,
                           poly_shift_up(P, kfirst + len(ext))))
        return ext[k - kfirst]

    def chain_bound(k: int) -> Fraction:
        total = Fraction(0)
        for d, c in enumerate(P):
            if c:
                total += _abs(c) * _psi_term_bound(spec, alpha, s, k + d)
        return total / _abs(beta) ** (k + 1) * geom

    k = kfirst
    while k < kmin:
        value += ext_coeff(k) / beta ** (k + 1)
        k += 1
    bound = chain_bound(k)
    while bound > target * max(_abs(value), target):
        value += ext_coeff(k) / beta ** (k + 1)
        k += 1
        bound = chain_bound(k)
        if k > kfirst + 64 * bits + 64:
            raise InsufficientPrecision(
                "remainder tail did not certify within the step budget"
            )
    return BigFloat(value, bound, bits)


def _log2_abs(x: Fraction) -> int:
    if x == 0:
        return 0
    return x.numerator.bit_length() - x.denominator.bit_length()


def check_remainder_identity(system, beta, bits: int = 128) -> dict:
    """For every (ell, i, s): P_ell(beta) F_s(alpha_i/beta) - P_{ell,i,s}(beta)
    must agree with the remainder's certified value within the certified
    errors; also aggregates each row ell into the linear-form identity.

    The product P_ell(beta) * F_s cancels to the tiny remainder, so F is
    evaluated with enough extra precision to survive the cancellation and
    leave a budget of order 2^-bits on the difference itself."""
    beta = Fraction(beta)
    spec = system.spec
    headroom = max(
        _log2_abs(poly_eval(system.P[ell], beta))
        for ell in range(system.r * system.m + 1)
    )
    eff_bits = bits + max(0, headroom) + 16
    F_at = {}
    for i in range(1, system.m + 1):
        w = Fraction(system.alphas[i - 1]) / beta
        F_at[i] = eval_F_family(spec, w, eff_bits)
    entries = []
    ok_all = True
    # per row ell, the linear form sum_{i,s} P_ell(b) F_s(a_i/b) - sum Pis(b)
    # must land on sum_{i,s} R(b) within the summed certified errors
    rows_acc = {}
    for ell, i, s in system.indices():
        Pb = poly_eval(system.P[ell], beta)
        Pisb = poly_eval(system.Pis[(ell, i, s)], beta)
        Fv = F_at[i][s]
        lhs = BigFloat(Pb * Fv.value - Pisb, _abs(Pb) * Fv.error, bits)
        rhs = remainder_value(system, ell, i, s, beta, bits)
        ok = lhs.agrees_with(rhs)
        ok_all = ok_all and ok
        entries.append({
            "ell": ell, "i": i, "s": s, "ok": ok,
            "gap": float(abs(lhs.value - rhs.value)),
            "budget": float(lhs.error + rhs.error),
        })
        acc = rows_acc.setdefault(ell, [Fraction(0)] * 4)
        acc[0] += lhs.value
        acc[1] += lhs.error
        acc[2] += rhs.value
        acc[3] += rhs.error
    rows = {
        ell: abs(a[0] - a[2]) <= a[1] + a[3] for ell, a in rows_acc.items()
    }
    return {
        "beta": beta,
        "bits": bits,
        "ok": ok_all and all(rows.values()),
        "entries": [
            {k: v for k, v in e.items() if k != "remainder"} for e in entries
        ],
        "linear_form_rows": rows,
    }
