"""Exact theoretical predictions for the factoring pipeline.

Closed-form outcome distribution of the measured integer c, eigenvalue
counting (good eigenvalues, usable pairs), success-probability lower
bounds, and the analytic comparison with single-register order finding.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numtheory import NotCoprime, euler_totient
from .orderfind import EigenphaseTable


def fejer_kernel_sq(delta: float, t: int) -> float:
    """|G(delta)|^2 = sin^2(pi t delta) / sin^2(pi delta), with value t^2
    at integer delta (removable singularity)."""
    frac = delta - round(delta)
    if abs(frac) < 1e-12 / t:
        return float(t * t)
    return math.sin(math.pi * t * delta) ** 2 / math.sin(math.pi * delta) ** 2


def _fejer_row(delta: float, t: int) -> np.ndarray:
    """|G(delta - c/t)|^2 for all c, vectorized."""
    c = np.arange(t)
    x = delta - c / t
    frac = x - np.round(x)
    num = np.sin(np.pi * t * x) ** 2
    den = np.sin(np.pi * x) ** 2
    out = np.full(t, float(t * t))
    ok = np.abs(frac) >= 1e-12 / t
    out[ok] = num[ok] / den[ok]
    return out


@dataclass(frozen=True)
class OutcomeDistribution:
    N: int
    a: int
    t: int
    probabilities: np.ndarray

    def __post_init__(self):
        p = self.probabilities
        if p.min() < 0 or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be nonnegative and sum to 1")


class BadT(ValueError):
    pass


def exact_distribution(N: int, a: int, t: int) -> OutcomeDistribution:
    """P(c) over all t outcomes, from the eigenphase-pair enumeration.

    P(c) = (1/(N^2 t^2)) sum over eigenphase pairs of |G(dphi - c/t)|^2.
    Pairs are grouped by distinct phase difference first (at most r^2 of
    them), so the work is O(r^2 t) rather than O(N^2 t).
    """
    if math.gcd(a, N) != 1:
        raise NotCoprime(a, N)
    if t & (t - 1) != 0 or not N**2 <= t <= 2 * N**2:
        raise BadT(f"t = {t} must be a power of two in [N^2, 2 N^2]")
    table = EigenphaseTable.build(N, a)
    mult = table.eigenphase_multiplicities()
    diff_weight: dict[Fraction, int] = {}
    for f1, m1 in mult.items():
        for f2, m2 in mult.items():
            d = (f1 - f2) % 1
            diff_weight[d] = diff_weight.get(d, 0) + m1 * m2
    probs = np.zeros(t)
    for d, w in diff_weight.items():
        probs += w * _fejer_row(float(d), t)
    probs /= N * N * t * t
    return OutcomeDistribution(N=N, a=a, t=t, probabilities=probs)


# ---------------------------------------------------------------------------
# counting

def count_good_eigenvalues(N: int, a: int) -> int:
    """Brute-force count of eigenphases j/r_d with r_d = r, gcd(j, r) = 1,
    restricted to orbits of residues coprime with N."""
    table = EigenphaseTable.build(N, a)
    r = table.r
    count = 0
    for g, rd, _ in table.orbits:
        if rd == r and math.gcd(g, N) == 1:
            count += sum(1 for j in range(r) if math.gcd(j, r) == 1)
    return count


def chi_closed_form(p: int, q: int, r: int) -> int:
    """phi(r) (p-1)(q-1) / r."""
    num = euler_totient(r) * (p - 1) * (q - 1)
    if num % r != 0:
        raise ValueError(f"closed form is not an integer for p={p}, q={q}, r={r}")
    return num // r


def num_c(chi: int, N: int) -> int:
    """chi (2N - chi): pairs where at least one member is good."""
    return chi * (2 * N - chi)


def count_usable_pairs(N: int, a: int) -> int:
    """Brute force over all N^2 eigenphase pairs: count pairs whose phase
    difference, in lowest terms, has denominator exactly r (the numerator is
    then automatically coprime with r)."""
    table = EigenphaseTable.build(N, a)
    mult = table.eigenphase_multiplicities()
    r = table.r
    total = 0
    for f1, m1 in mult.items():
        for f2, m2 in mult.items():
            d = (f1 - f2) % 1
            if d.denominator == r and math.gcd(d.numerator, r) == 1:
                total += m1 * m2
    return total


def count_slow_orbit_elements(N: int, a: int) -> int:
    """Residues whose orbit length is below the full order r.

    Reported alongside the p + q - 1 ceiling; a violation is surprising but
    not fatal, so it warns rather than raises.
    """
    table = EigenphaseTable.build(N, a)
    return int(np.sum(table.orbit_len < table.r))


def check_slow_orbit_ceiling(N: int, p: int, q: int, a: int) -> bool:
    n_slow = count_slow_orbit_elements(N, a)
    ok = n_slow <= p + q - 1
    if not ok:
        warnings.warn(
            f"N={N}, a={a}: {n_slow} residues with short orbits exceeds p+q-1 = {p+q-1}",
            stacklevel=2,
        )
    return ok


# ---------------------------------------------------------------------------
# bounds and comparisons

def g_sq_lower_bound(t: int) -> float:
    """|G|^2 >= 4 t^2 / pi^2 whenever |dphi - c/t| <= 1/(2t)."""
    return 4.0 * t * t / math.pi**2


def success_lower_bound(N: int, p: int, q: int, a: int) -> float:
    """Per-attempt lower bound on recovering the order:
    4/(N pi^2) (p-1)(q-1) phi(r)/r."""
    if p * q != N:
        raise ValueError(f"{p} * {q} != {N}")
    if math.gcd(a, N) != 1:
        raise NotCoprime(a, N)
    from .numtheory import multiplicative_order

    r = multiplicative_order(a % N, N)
    return 4.0 / (N * math.pi**2) * (p - 1) * (q - 1) * euler_totient(r) / r


def parker_plenio_relation(P: float) -> float:
    """P (2 - P): two-register success in terms of the single-register rate."""
    if not 0.0 <= P <= 1.0:
        raise ValueError("P must lie in [0, 1]")
    return P * (2.0 - P)


def expected_runs_estimate(p: int, q: int, r: int) -> float:
    """pq/((p-1)(q-1)) * log log r — a scale indicator only (asymptotic,
    constants unknown; natural logarithms)."""
    return p * q / ((p - 1) * (q - 1)) * math.log(math.log(r))


@dataclass(frozen=True)
class CountingReport:
    N: int
    p: int
    q: int
    a: int
    r: int
    chi: int                  # brute-force good-eigenvalue count
    chi_closed_form: int
    num_c: int
    usable_pairs: int         # brute force; >= num_c
    success_bound: float
    single_register_rate: float   # chi/N, the per-register good fraction
    pair_rate: float              # num_c/N^2 = P(2-P) with P = chi/N
    slow_orbit_elements: int
    slow_orbit_ceiling_ok: bool


def counting_report(N: int, p: int, q: int, a: int) -> CountingReport:
    table = EigenphaseTable.build(N, a)
    chi = count_good_eigenvalues(N, a)
    chi_cf = chi_closed_form(p, q, table.r)
    nc = num_c(chi, N)
    return CountingReport(
        N=N,
        p=p,
        q=q,
        a=a,
        r=table.r,
        chi=chi,
        chi_closed_form=chi_cf,
        num_c=nc,
        usable_pairs=count_usable_pairs(N, a),
        success_bound=success_lower_bound(N, p, q, a),
        single_register_rate=chi / N,
        pair_rate=nc / N**2,
        slow_orbit_elements=count_slow_orbit_elements(N, a),
        slow_orbit_ceiling_ok=check_slow_orbit_ceiling(N, p, q, a),
    )
