"""The exact operator algebra: polynomials over Q, the Euler operator
theta = t d/dt, diagonal operators (T_c, S_{n,zeta}, H(theta+shift) and
inverses), the evaluation functionals psi_{i,s} / phi_{zeta,s}, truncated
Laurent tails in 1/z with exact order bookkeeping, and the instance data
(parameter vectors, derived roots, seed coefficient, hypothesis flags).

Polynomials are plain coefficient lists (Fraction, low degree first, trailing
zeros stripped); the zero polynomial is [] with degree -inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import format_rational, parse_rational
from .errors import (
    HypothesisViolation,
    InsufficientPrecision,
    InvalidInput,
    SingularEigenvalue,
)

Poly = list  # list[Fraction], low degree first

NEG_INF = float("-inf")

# ---------------------------------------------------------------------------
# polynomial helpers


def poly_trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_deg(p: Poly):
    """Degree; the zero polynomial gets the distinguished value -inf."""
    return len(p) - 1 if p else NEG_INF


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return poly_trim(out)


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, [-c for c in q])


def poly_scale(p: Poly, c: Fraction) -> Poly:
    c = Fraction(c)
    return [] if c == 0 else poly_trim([c * x for x in p])


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_pow(p: Poly, e: int) -> Poly:
    out = [Fraction(1)]
    for _ in range(e):
        out = poly_mul(out, p)
    return out


def poly_eval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_shift_up(p: Poly, k: int) -> Poly:
    """Multiply by t^k."""
    return [Fraction(0)] * k + list(p) if p else []


def poly_from_roots(roots) -> Poly:
    """prod over the roots of (X + root): roots enter with a plus sign."""
    out = [Fraction(1)]
    for rt in roots:
        out = poly_mul(out, [Fraction(rt), Fraction(1)])
    return out


def poly_divexact_linear(p: Poly, alpha: Fraction) -> Poly:
    """Exact division by (t - alpha); raises if the remainder is nonzero."""
    if not p:
        return []
    alpha = Fraction(alpha)
    n = len(p) - 1
    q = [Fraction(0)] * n
    carry = p[n]
    for i in range(n - 1, -1, -1):
        q[i] = carry
        carry = p[i] + alpha * carry
    if carry != 0:
        raise InvalidInput("polynomial not divisible by (t - alpha)")
    return poly_trim(q)


# ---------------------------------------------------------------------------
# Laurent tails in 1/z


@dataclass
class LaurentTail:
    """A truncated series sum_e coeff_e / z^e: identically zero below `order`,
    stored exactly on order <= e < truncation, unknown from the truncation on.

    Normalized so the first stored coefficient is nonzero (leading zeros are
    absorbed into `order`); for a window that is zero throughout, order ==
    truncation and the coefficient list is empty.  ord_infinity below the
    truncation is therefore exact; when the window cannot decide it, we raise
    InsufficientPrecision rather than guess.
    """

    order: int
    coefficients: list  # Fraction, exponents order, order+1, ...
    truncation: int

    def __post_init__(self):
        if len(self.coefficients) != self.truncation - self.order:
            raise InvalidInput("LaurentTail window does not match coefficients")
        while self.coefficients and self.coefficients[0] == 0:
            self.coefficients.pop(0)
            self.order += 1

    def coeff(self, e: int) -> Fraction:
        if e < self.order:
            return Fraction(0)
        if e >= self.truncation:
            raise InsufficientPrecision(
                f"coefficient of 1/z^{e} is at or beyond the truncation {self.truncation}"
            )
        return self.coefficients[e - self.order]

    def ord_infinity(self) -> int:
        """Least exponent of 1/z with nonzero coefficient (exact)."""
        if self.coefficients:
            return self.order
        raise InsufficientPrecision(
            f"tail vanishes up to its truncation {self.truncation}; "
            "the order is not determined by this window"
        )

    def ord_at_least(self, k: int) -> bool:
        """Exact test ord_infinity >= k; needs the window to reach k."""
        if not self.coefficients:
            if k > self.truncation:
                raise InsufficientPrecision("ord query beyond the truncation")
            return True
        return self.order >= k

    def is_zero_window(self) -> bool:
        return not self.coefficients

    def add(self, other: "LaurentTail") -> "LaurentTail":
        start = min(self.order, other.order)
        trunc = min(self.truncation, other.truncation)
        coeffs = [self.coeff(e) + other.coeff(e) for e in range(start, trunc)]
        return LaurentTail(start, coeffs, trunc)

    def scale(self, c: Fraction) -> "LaurentTail":
        c = Fraction(c)
        return LaurentTail(
            self.order, [c * x for x in self.coefficients], self.truncation
        )

    def mul_poly(self, p: Poly) -> "LaurentTail":
        """Multiply by a polynomial in z (z^d lowers the 1/z exponent by d)."""
        if not p:
            return LaurentTail(self.order, [], self.order)
        d = len(p) - 1
        start = self.order - d
        trunc = self.truncation - d
        coeffs = []
        for e in range(start, trunc):
            s = Fraction(0)
            for j, pj in enumerate(p):
                if pj != 0 and e + j >= self.order:  # below order is zero
                    s += pj * self.coeff(e + j)
            coeffs.append(s)
        return LaurentTail(start, coeffs, trunc)

    def sub_poly(self, p: Poly) -> "LaurentTail":
        """Subtract a polynomial in z (it lives on exponents -deg..0)."""
        if not p:
            return self
        start = min(self.order, -(len(p) - 1))
        coeffs = []
        for e in range(start, self.truncation):
            c = self.coeff(e) if e >= self.order else Fraction(0)
            if -len(p) < e <= 0:
                c -= p[-e]
            coeffs.append(c)
        return LaurentTail(start, coeffs, self.truncation)

    def to_jsonable(self) -> dict:
        return {
            "order": self.order,
            "truncation": self.truncation,
            "coefficients": [format_rational(c) for c in self.coefficients],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "LaurentTail":
        return cls(
            data["order"],
            [parse_rational(c) for c in data["coefficients"]],
            data["truncation"],
        )


# ---------------------------------------------------------------------------
# the instance data


@dataclass
class HypergeometricSpec:
    """Parameters of one instance: vectors a (length r) and b (length r-1),
    derived roots eta_i = a_i + 1 and zeta = (b_1, ..., b_{r-1}, 1), the
    gamma-ordering gamma_w = zeta_{r+1-w}, and the seed coefficient c0.

    The coefficient sequence follows c_{k+1} = c_k A(k)/B(k+1) with
    A(X) = prod (X + eta_i), B(X) = prod (X + zeta_j).  The default seed is
    c0 = prod a_i / prod b_j, which makes c_k the Pochhammer-ratio sequence
    of the contiguous hypergeometric family.  `from_roots` admits general
    (eta, zeta) with zeta_r not necessarily 1 (used by the Lerch cross-check).
    """

    a: tuple
    b: tuple
    c0: Fraction
    eta: tuple = ()
    zeta: tuple = ()
    _c_cache: list = field(default_factory=list, repr=False, compare=False)

    # -- constructors

    @classmethod
    def from_ab(cls, a, b, c0=None) -> "HypergeometricSpec":
        a = tuple(Fraction(x) for x in a)
        b = tuple(Fraction(x) for x in b)
        if len(b) != len(a) - 1:
            raise InvalidInput(f"need len(b) = len(a)-1, got {len(a)} and {len(b)}")
        eta = tuple(x + 1 for x in a)
        zeta = b + (Fraction(1),)
        if c0 is None:
            num = math.prod(a, start=Fraction(1))
            den = math.prod(b, start=Fraction(1))
            if num == 0 or den == 0:
                raise InvalidInput("default c0 = prod(a)/prod(b) undefined here; pass c0")
            c0 = num / den
        c0 = Fraction(c0)
        if c0 == 0:
            raise InvalidInput("c0 must be nonzero")
        spec = cls(a=a, b=b, c0=c0, eta=eta, zeta=zeta)
        spec._check_AB()
        return spec

    @classmethod
    def from_roots(cls, eta, zeta, c0) -> "HypergeometricSpec":
        eta = tuple(Fraction(x) for x in eta)
        zeta = tuple(Fraction(x) for x in zeta)
        if len(eta) != len(zeta):
            raise InvalidInput("need len(eta) == len(zeta)")
        a = tuple(x - 1 for x in eta)
        b = zeta[:-1]
        c0 = Fraction(c0)
        if c0 == 0:
            raise InvalidInput("c0 must be nonzero")
        spec = cls(a=a, b=b, c0=c0, eta=eta, zeta=zeta)
        spec._check_AB()
        return spec

    def _check_AB(self):
        # assumption (AB): A(k) B(k) != 0 for every k >= 0, i.e. no root
        # eta_i or zeta_j is a non-positive integer.
        for name, vals in (("eta", self.eta), ("zeta", self.zeta)):
            for x in vals:
                if x.denominator == 1 and x <= 0:
                    raise HypothesisViolation(
                        f"assumption (AB) fails: {name} contains the non-positive integer {x}"
                    )

    # -- basic derived data

    @property
    def r(self) -> int:
        return len(self.eta)

    @property
    def gamma(self) -> tuple:
        """gamma_w = zeta_{r+1-w} for w = 1..r-1 (zeta reversed, last dropped)."""
        return tuple(reversed(self.zeta))[:-1]

    def gamma_ext(self, w: int) -> Fraction:
        """gamma extended r-periodically to every index w >= 0."""
        return self.zeta[(self.r - w) % self.r]

    def A_poly(self) -> Poly:
        return poly_from_roots(self.eta)

    def B_poly(self) -> Poly:
        return poly_from_roots(self.zeta)

    def A_at(self, x: Fraction) -> Fraction:
        return math.prod((Fraction(x) + e for e in self.eta), start=Fraction(1))

    def B_at(self, x: Fraction) -> Fraction:
        return math.prod((Fraction(x) + z for z in self.zeta), start=Fraction(1))

    def c(self, k: int) -> Fraction:
        """c_k by the recurrence, memoized."""
        cache = self._c_cache
        if not cache:
            cache.append(self.c0)
        while len(cache) <= k:
            j = len(cache) - 1
            cache.append(cache[-1] * self.A_at(j) / self.B_at(j + 1))
        return cache[k]

    # -- hypothesis flags (gate certification, not construction)

    def hypothesis_flags(self) -> dict:
        """Named instance hypotheses; each maps to (ok, detail)."""
        flags = {}
        bad = [x for x in self.eta + self.zeta if x.denominator == 1 and x <= 0]
        flags["assumption_AB"] = (not bad, "A(k)B(k) != 0 for k >= 0")
        viol = [x for x in self.a if x.denominator == 1 and x > 0]
        flags["a_not_positive_integer"] = (
            not viol,
            "violated by a = " + ", ".join(map(format_rational, viol)) if viol else "a_k not in Z_{>0}",
        )
        pairs = [
            (ak, bj)
            for ak in self.a
            for bj in self.b
            if (ak + 1 - bj).denominator == 1 and ak + 1 - bj > 0
        ]
        flags["a_plus_one_minus_b_not_positive_integer"] = (
            not pairs,
            f"violated by pairs {pairs}" if pairs else "a_k+1-b_j not in Z_{>0}",
        )
        diffs = [
            (e, z)
            for e in self.eta
            for z in self.zeta
            if (e - z).denominator == 1 and e - z >= 0
        ]
        flags["eta_minus_zeta_not_natural"] = (
            not diffs,
            f"violated by pairs {diffs}" if diffs else "eta_i - zeta_j not in N",
        )
        return flags

    def flags_pass(self) -> bool:
        return all(ok for ok, _ in self.hypothesis_flags().values())

    def violated_hypotheses(self) -> list:
        return [name for name, (ok, _) in self.hypothesis_flags().items() if not ok]

    def to_jsonable(self) -> dict:
        return {
            "a": [format_rational(x) for x in self.a],
            "b": [format_rational(x) for x in self.b],
            "c0": format_rational(self.c0),
            "eta": [format_rational(x) for x in self.eta],
            "zeta": [format_rational(x) for x in self.zeta],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "HypergeometricSpec":
        return cls.from_roots(
            [parse_rational(x) for x in data["eta"]],
            [parse_rational(x) for x in data["zeta"]],
            parse_rational(data["c0"]),
        )


# ---------------------------------------------------------------------------
# diagonal operators


@dataclass
class DiagonalOperator:
    """An endomorphism of Q[t] acting diagonally on monomials:
    t^k -> eigenvalue(k) * t^k."""

    eigenvalue: object  # callable k -> Fraction
    description: str = ""

    def apply(self, p: Poly) -> Poly:
        return poly_trim([c * self.eigenvalue(k) for k, c in enumerate(p)])

    def apply_inverse(self, p: Poly) -> Poly:
        out = []
        for k, c in enumerate(p):
            lam = self.eigenvalue(k)
            if lam == 0:
                if c != 0:
                    raise SingularEigenvalue(
                        f"singular eigenvalue at degree {k} for {self.description or 'operator'}"
                    )
                out.append(Fraction(0))
            else:
                out.append(c / lam)
        return poly_trim(out)


def apply_H_theta(H: Poly, p: Poly, shift: Fraction = Fraction(0)) -> Poly:
    """H(theta_t + shift): multiply the t^k coefficient by H(k + shift)."""
    shift = Fraction(shift)
    return poly_trim([c * poly_eval(H, k + shift) for k, c in enumerate(p)])


def apply_H_theta_inverse(H: Poly, p: Poly, shift: Fraction = Fraction(0)) -> Poly:
    """Coefficientwise division by H(k + shift); exact or loudly singular."""
    shift = Fraction(shift)
    op = DiagonalOperator(lambda k: poly_eval(H, k + shift), f"H(theta+{shift})")
    return op.apply_inverse(p)


def T_c(spec: HypergeometricSpec, p: Poly, direction: str = "forward") -> Poly:
    """T_c: t^k -> t^k / c_k ('forward'); 'inverse' multiplies by c_k."""
    if direction == "forward":
        return poly_trim([c / spec.c(k) for k, c in enumerate(p)])
    if direction == "inverse":
        return poly_trim([c * spec.c(k) for k, c in enumerate(p)])
    raise InvalidInput(f"direction must be 'forward' or 'inverse', got {direction!r}")


def S_n_zeta(n: int, zeta: Fraction) -> DiagonalOperator:
    """S_{n,zeta}: t^k -> ((k+zeta+1)_n / n!) t^k."""
    zeta = Fraction(zeta)
    fact = math.factorial(n)

    def eig(k, _z=zeta, _n=n, _f=fact):
        out = Fraction(1)
        for j in range(_n):
            out *= k + _z + 1 + j
        return out / _f

    return DiagonalOperator(eig, f"S_{n},{zeta}")


# ---------------------------------------------------------------------------
# evaluation functionals


def psi_weights(spec: HypergeometricSpec, i_alpha: Fraction, s: int, upto: int) -> list:
    """Values psi_{i,s}(t^k) = (k+gamma_1)...(k+gamma_s) c_k alpha^{k+1}, k <= upto."""
    gam = spec.gamma[:s]
    out = []
    apow = Fraction(i_alpha)
    for k in range(upto + 1):
        w = Fraction(1)
        for g in gam:
            w *= k + g
        out.append(w * spec.c(k) * apow)
        apow *= i_alpha
    return out


def psi(spec: HypergeometricSpec, alphas, i: int, s: int, p: Poly) -> Fraction:
    """The functional psi_{i,s} applied to p (1 <= i <= m, 0 <= s <= r-1)."""
    if not (1 <= i <= len(alphas)):
        raise InvalidInput(f"i out of range: {i}")
    if not (0 <= s <= spec.r - 1):
        raise InvalidInput(f"s out of range: {s}")
    if not p:
        return Fraction(0)
    w = psi_weights(spec, Fraction(alphas[i - 1]), s, len(p) - 1)
    return sum((c * w[k] for k, c in enumerate(p)), Fraction(0))


def phi_zeta_s(zeta: Fraction, s: int, p: Poly) -> Fraction:
    """phi_{zeta,s}: t^k -> 1/(k+zeta)^s, extended linearly."""
    zeta = Fraction(zeta)
    total = Fraction(0)
    for k, c in enumerate(p):
        if c == 0:
            continue
        if zeta + k == 0:
            raise InvalidInput(f"pole: k + zeta = 0 at k = {k}")
        total += c / (k + zeta) ** s
    return total


def zeta_prefix_functional(spec: HypergeometricSpec, alpha: Fraction, s: int, p: Poly) -> Fraction:
    """t^k -> alpha^k / ((k+zeta_1)...(k+zeta_{s+1})) applied to p.

    This is the normalized evaluation functional obtained from psi_{i,s} by
    stripping T_c and one alpha factor; the non-vanishing chain is built on it.
    """
    alpha = Fraction(alpha)
    total = Fraction(0)
    apow = Fraction(1)
    for k, c in enumerate(p):
        if c != 0:
            den = Fraction(1)
            for zj in spec.zeta[: s + 1]:
                den *= k + zj
            total += c * apow / den
        apow *= alpha
    return total


# ---------------------------------------------------------------------------
# series of the contiguous family


def f_s_coefficient(spec: HypergeometricSpec, s: int, k: int) -> Fraction:
    """Coefficient of z^{k+1} in F_s(z) = sum (k+gamma_1)...(k+gamma_s) c_k z^{k+1}."""
    w = Fraction(1)
    for g in spec.gamma[:s]:
        w *= k + g
    return w * spec.c(k)


def expand_F_s(spec: HypergeometricSpec, alpha: Fraction, s: int, truncation: int) -> LaurentTail:
    """Tail of F_s(alpha/z) in powers of 1/z, exact up to `truncation`."""
    alpha = Fraction(alpha)
    if not (0 <= s <= spec.r - 1):
        raise InvalidInput(f"s out of range: {s}")
    coeffs = []
    apow = alpha
    for k in range(max(0, truncation - 1)):
        coeffs.append(f_s_coefficient(spec, s, k) * apow)
        apow *= alpha
    return LaurentTail(1, coeffs, truncation)
