"""Exact rational and number-theoretic primitives.

Everything in here is exact big-rational arithmetic (`fractions.Fraction`);
floats appear only in logarithmic rates, where asymptotic comparisons are the
point.  The module provides Pochhammer symbols, denominator lcm's, the
denominator-growth constant mu(x), Euler's totient, p-adic valuations and
normalized absolute values, and the three denominator-sequence profiles used
by the growth-rate analysis: D_n for a Pochhammer ratio pair, mu_n(zeta), and
the coefficient-denominator families D_c / D'_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput, RationalParseError

Rational = Fraction

# ---------------------------------------------------------------------------
# parsing / formatting ("num/den" strings, den omitted when 1)


def parse_rational(text: str) -> Fraction:
    """Parse 'num/den' (or a plain integer string) into a Fraction."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            d = int(den)
            if d == 0:
                raise ZeroDivisionError
            return Fraction(int(num), d)
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError):
        raise RationalParseError(f"not a rational 'num/den' string: {text!r}") from None


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# primality / factorization (deterministic below 2^64)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 2^64 (the 12 standard witnesses)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # Brent's variant; n must be odd composite.
    if n % 2 == 0:
        return 2
    x0, c = 2, 1
    while True:
        x = y = x0
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 as {prime: exponent}."""
    if n < 1:
        raise InvalidInput(f"factorize expects n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out


def totient(n: int) -> int:
    """Euler's phi."""
    if n < 1:
        raise InvalidInput(f"totient expects n >= 1, got {n}")
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result


# ---------------------------------------------------------------------------
# Pochhammer / denominators / mu


def pochhammer(a: Fraction, k: int) -> Fraction:
    """Rising factorial a(a+1)...(a+k-1); empty product = 1."""
    a = Fraction(a)
    out = Fraction(1)
    for j in range(k):
        out *= a + j
    return out


def den_of_set(values) -> int:
    """Smallest positive integer clearing all denominators (lcm of dens)."""
    values = list(values)
    if not values:
        raise InvalidInput("den_of_set needs a non-empty set")
    d = 1
    for x in values:
        d = math.lcm(d, Fraction(x).denominator)
    return d


def log_mu(x: Fraction) -> float:
    """log mu(x) = log den(x) + sum over primes q | den(x) of log(q)/(q-1).

    mu(x) is the exact growth constant of den((x)_k / k!, k <= n): the
    den(x)^n part plus q^(n/(q-1)) from the factorials, per prime q | den(x).
    For squarefree den this is prod q^(q/(q-1)); the multiplicity-aware form
    is the one the exact profiles reproduce (den = 4 gives rate 3 log 2, not
    2 log 2 -- measured, see D_n_profile).
    """
    den = Fraction(x).denominator
    if den == 1:
        return 0.0
    return math.log(den) + sum(math.log(q) / (q - 1) for q in factorize(den))


def v_p(x: Fraction, p: int) -> int:
    """Exact p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise InvalidInput("v_p(0) is +infinity")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def log_int(n: int) -> float:
    """log of a positive big integer, safe far beyond float range."""
    if n <= 0:
        raise InvalidInput("log_int needs n > 0")
    if n.bit_length() <= 900:
        return math.log(n)
    # mantissa * 2^shift with a 64-bit mantissa
    shift = n.bit_length() - 64
    return math.log(n >> shift) + shift * math.log(2)


def log_abs_fraction(x: Fraction) -> float:
    """log |x| for a nonzero rational of arbitrary size."""
    x = Fraction(x)
    if x == 0:
        raise InvalidInput("log|0| is -infinity")
    return log_int(abs(x.numerator)) - log_int(x.denominator)


# ---------------------------------------------------------------------------
# places of Q


@dataclass(frozen=True)
class Place:
    """A place of Q: the archimedean one ('inf') or a certified prime p."""

    p: int | None = None  # None = archimedean

    def __post_init__(self):
        if self.p is not None:
            if self.p >= 2**64:
                raise InvalidInput("primality certification limited to p < 2^64")
            if not is_prime(self.p):
                raise InvalidInput(f"{self.p} is not prime")

    @property
    def is_archimedean(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


def parse_place(text: str) -> Place:
    s = text.strip().lower()
    if s in ("inf", "infinity", "arch", "oo"):
        return Place()
    try:
        return Place(int(s))
    except ValueError:
        raise RationalParseError(f"not a place (expected 'inf' or a prime): {text!r}") from None


def abs_at_place(x: Fraction, v: Place) -> Fraction:
    """Normalized |x|_v, exact: |x| at the archimedean place, p^(-v_p(x)) at p."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    if v.is_archimedean:
        return abs(x)
    return Fraction(v.p) ** (-v_p(x, v.p))


def log_abs_at_place(x: Fraction, v: Place) -> float:
    x = Fraction(x)
    if x == 0:
        raise InvalidInput("log|0|_v is -infinity")
    if v.is_archimedean:
        return log_abs_fraction(x)
    return -v_p(x, v.p) * math.log(v.p)


# ---------------------------------------------------------------------------
# denominator profiles


@dataclass
class DenominatorProfile:
    """Exact running denominators D_0 | D_1 | ... | D_N plus the end rate."""

    N: int
    values: list[int]
    log_rate: float

    def __post_init__(self):
        assert len(self.values) == self.N + 1

    def to_jsonable(self) -> dict:
        return {
            "N": self.N,
            "values": [str(d) for d in self.values],
            "log_rate": self.log_rate,
        }


def _profile_from_terms(terms) -> DenominatorProfile:
    values = []
    running = 1
    for t in terms:
        running = math.lcm(running, Fraction(t).denominator)
        values.append(running)
    n = len(values) - 1
    rate = log_int(values[-1]) / n if n > 0 else 0.0
    return DenominatorProfile(n, values, rate)


def D_n_profile(a: Fraction, b: Fraction, N: int) -> DenominatorProfile:
    """den((a)_k/(b)_k : k <= K) for K = 0..N, exact (N+1 values)."""
    a, b = Fraction(a), Fraction(b)
    if b.denominator == 1 and b <= 0:
        raise InvalidInput("b must not be a non-positive integer ((b)_k vanishes)")
    terms = []
    ratio = Fraction(1)
    for k in range(N + 1):
        terms.append(ratio)
        ratio *= (a + k) / (b + k)
    return _profile_from_terms(terms)


# mu_n rounding: the divisibility oracle den((zeta+1)_n/n!) | mu_n decides
# whether e(n,q) rounds n/(q-1) down or up; resolved once, lazily.
_MU_SWEEP_ZETAS = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 5))
_MU_SWEEP_N = 100
_mu_rounding_cache: str | None = None


def _mu_n_with(zeta: Fraction, n: int, rounding: str) -> int:
    out = 1
    for q, v in factorize(Fraction(zeta).denominator).items():
        e = n // (q - 1) if rounding == "floor" else -((-n) // (q - 1))
        out *= q ** (n * v + e)
    return out


def mu_rounding() -> str:
    """'floor' or 'ceil': smallest exponent passing the divisibility sweep."""
    global _mu_rounding_cache
    if _mu_rounding_cache is None:
        for candidate in ("floor", "ceil"):
            ok = True
            for zeta in _MU_SWEEP_ZETAS:
                ratio = Fraction(1)
                for n in range(1, _MU_SWEEP_N + 1):
                    ratio *= (zeta + n) / n  # (zeta+1)_n / n!
                    if _mu_n_with(zeta, n, candidate) % ratio.denominator != 0:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                _mu_rounding_cache = candidate
                break
        else:  # pragma: no cover - the sweep always admits ceil
            _mu_rounding_cache = "ceil"
    return _mu_rounding_cache


def mu_n(zeta: Fraction, n: int) -> int:
    """prod over q | den(zeta) of q^(n v_q(den) + e(n,q)), e fixed by the oracle."""
    return _mu_n_with(Fraction(zeta), n, mu_rounding())


def D_c_profiles(eta, zeta, N: int) -> tuple[DenominatorProfile, DenominatorProfile]:
    """Denominator profiles of prod_j (1+zeta_j)_k / prod_i (eta_i)_k and its reciprocal."""
    eta = [Fraction(e) for e in eta]
    zeta = [Fraction(z) for z in zeta]
    if len(eta) != len(zeta):
        raise InvalidInput("eta and zeta must have the same length")
    for x in list(eta) + [1 + z for z in zeta]:
        if x.denominator == 1 and x <= 0:
            raise InvalidInput("vanishing Pochhammer factor (non-positive integer parameter)")
    forward, backward = [], []
    ratio = Fraction(1)
    for k in range(N + 1):
        forward.append(ratio)
        backward.append(1 / ratio)
        for z, e in zip(zeta, eta):
            ratio *= (1 + z + k) / (e + k)
    return _profile_from_terms(forward), _profile_from_terms(backward)
