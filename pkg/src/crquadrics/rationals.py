"""Exact rational arithmetic: the scalar bedrock of the package.

gmpy2's mpq/mpz are used when importable (they are several times faster than
fractions.Fraction in elimination-heavy work); otherwise the stdlib Fraction
steps in with identical semantics.  Nothing in here ever touches floats.
"""

from __future__ import annotations

from math import gcd, isqrt

try:
    from gmpy2 import mpq as QQ
    from gmpy2 import mpz as ZZ

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as QQ

    ZZ = int
    HAVE_GMPY2 = False

QQ0 = QQ(0)
QQ1 = QQ(1)


def qq(x, y=None):
    """Coerce to an exact rational.  Accepts ints, rationals and 'p/q' strings."""
    if y is not None:
        return QQ(x, y)
    if isinstance(x, float):
        raise TypeError("refusing to build an exact rational from a float")
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/")
            return QQ(int(num), int(den))
        return QQ(int(s))
    return QQ(x)


def qq_str(x) -> str:
    x = qq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def bit_size(x) -> int:
    """Crude size metric used for pivot selection."""
    x = qq(x)
    return int(x.numerator).bit_length() + int(x.denominator).bit_length()


def rand_rational(rng, num=6, den=4):
    """Small random rational, denominator >= 1.  Deterministic given rng state."""
    return QQ(rng.randint(-num, num), rng.randint(1, den))


def rand_rational_nonzero(rng, num=6, den=4):
    while True:
        x = rand_rational(rng, num, den)
        if x:
            return x


# --- deterministic primes -------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond 64-bit inputs used here."""
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
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_descending(start: int):
    """Yield primes <= start in decreasing order (deterministic sequence)."""
    n = start
    if n % 2 == 0:
        n -= 1
    while n > 2:
        if is_prime(n):
            yield n
        n -= 2


# --- CRT + rational reconstruction ---------------------------------------


def crt_combine(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine x = r1 mod m1, x = r2 mod m2 for coprime moduli."""
    g, s, _ = _xgcd(m1, m2)
    if g != 1:
        raise ValueError("moduli must be coprime")
    m = m1 * m2
    x = (r1 + (r2 - r1) * s % m2 * m1) % m
    return x, m


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def rational_reconstruct(a: int, m: int):
    """Find p/q with p = a q (mod m), |p|, q <= sqrt(m/2); None if there is none.

    Standard half-extended Euclid (Wang's algorithm).  The caller is expected
    to confirm the result against independent data; reconstruction alone is
    only a candidate.
    """
    a %= m
    if a == 0:
        return QQ0
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q0 = r0 // r1
        r0, r1 = r1, r0 - q0 * r1
        s0, s1 = s1, s0 - q0 * s1
    p, q = r1, s1
    if q < 0:
        p, q = -p, -q
    if q == 0 or q > bound or gcd(p, q) != 1:
        return None
    if (p - a * q) % m != 0:
        return None
    return QQ(p, q)
