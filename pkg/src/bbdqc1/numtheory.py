"""Exact integer arithmetic for the factoring pipeline.

Orders, orbits, totients, continued fractions and factor extraction.
Everything here is pure and exact; desk scale is N <= 10**6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class NotCoprime(ValueError):
    """Raised when an operation requires gcd(a, N) = 1 and it is not.

    The offending gcd is a free factor; callers in the factoring driver
    treat it as an immediate success.
    """

    def __init__(self, a: int, n: int):
        self.gcd = math.gcd(a, n)
        super().__init__(f"gcd({a}, {n}) = {self.gcd} != 1")


@dataclass(frozen=True)
class Semiprime:
    """A number to factor, optionally with its known prime factors for analysis."""

    N: int
    p: int | None = None
    q: int | None = None

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if (self.p is None) != (self.q is None):
            raise ValueError("p and q must be given together")
        if self.p is not None:
            if self.p * self.q != self.N:
                raise ValueError(f"{self.p} * {self.q} != {self.N}")
            if not (is_prime(self.p) and is_prime(self.q)):
                raise ValueError("p and q must both be prime")


def mod_pow(a: int, e: int, n: int) -> int:
    """a**e mod n, exactly."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    if e < 0:
        raise ValueError("exponent must be >= 0")
    return pow(a, e, n)


def multiplicative_order(a: int, n: int) -> int:
    """Smallest r > 0 with a**r = 1 mod n.

    Requires 1 < a < n and gcd(a, n) = 1.
    """
    if not 1 < a < n:
        raise ValueError(f"need 1 < a < N, got a={a}, N={n}")
    if math.gcd(a, n) != 1:
        raise NotCoprime(a, n)
    r = 1
    x = a % n
    while x != 1:
        x = x * a % n
        r += 1
    return r


def orbit_length(x: int, a: int, n: int) -> int:
    """Cycle length of x under repeated multiplication by a mod n.

    Divides multiplicative_order(a, n); equals it whenever gcd(x, n) = 1.
    """
    if not 0 <= x < n:
        raise ValueError(f"need 0 <= x < N, got x={x}")
    if math.gcd(a, n) != 1:
        raise NotCoprime(a, n)
    t = 1
    y = x * a % n
    while y != x:
        y = y * a % n
        t += 1
    return t


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine for n <= 10**6."""
    if n < 1:
        raise ValueError("n must be >= 1")
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def euler_totient(n: int) -> int:
    """Count of 1 <= k <= n coprime with n."""
    phi = n
    for p in factorize(n):
        phi -= phi // p
    return phi


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def is_prime_power(n: int) -> bool:
    return len(factorize(n)) == 1 and n >= 2


def convergents(c: int, t: int, max_den: int) -> list[Fraction]:
    """Continued-fraction convergents of c/t with denominator <= max_den.

    Returned in order of strictly increasing denominator, starting with the
    integer part (denominator 1).
    """
    if not 0 <= c < t:
        raise ValueError(f"need 0 <= c < t, got c={c}, t={t}")
    out: list[Fraction] = []
    # standard recurrence: h_n = a_n h_{n-1} + h_{n-2}, seeds h_{-2}=0, h_{-1}=1
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    num, den = c, t
    while True:
        q, rem = divmod(num, den)
        h_prev, h = h, q * h + h_prev
        k_prev, k = k, q * k + k_prev
        if k > max_den:
            break
        out.append(Fraction(h, k))
        if rem == 0:
            break
        num, den = den, rem
    return out


def recover_order(c: int, t: int, a: int, n: int) -> int | None:
    """Recover the order of a mod n from a phase-estimation outcome c/t.

    Tries every continued-fraction convergent denominator q of c/t, plus the
    small-multiple rescue m*q <= n, and returns the smallest candidate d with
    a**d = 1 mod n, or None if no candidate passes.  The total number of
    candidates tested is capped at n.
    """
    if math.gcd(a, n) != 1:
        raise NotCoprime(a, n)
    best: int | None = None
    budget = n
    for frac in convergents(c, t, n):
        q = frac.denominator
        m = 1
        while m * q <= n and budget > 0:
            budget -= 1
            cand = m * q
            if pow(a, cand, n) == 1:
                if best is None or cand < best:
                    best = cand
                break  # larger multiples of q only get bigger
            m += 1
        if budget <= 0:
            break
    return best


def factor_from_order(a: int, r: int, n: int) -> tuple[int, int] | None:
    """Split n given a and an exponent r with a**r = 1 mod n.

    Returns the factor pair (smaller first) when r is even and a**(r/2) is not
    -1 mod n and both gcds are nontrivial; otherwise None.
    """
    if pow(a, r, n) != 1:
        raise ValueError(f"a**r != 1 mod N for a={a}, r={r}, N={n}")
    if r % 2 != 0:
        return None
    s = pow(a, r // 2, n)
    if s == n - 1:
        return None
    f1 = math.gcd(s - 1, n)
    f2 = math.gcd(s + 1, n)
    if 1 < f1 < n and 1 < f2 < n:
        return (min(f1, f2), max(f1, f2))
    return None
