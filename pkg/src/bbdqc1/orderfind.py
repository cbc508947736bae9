"""The factoring pipeline built from black-box trace-estimation rounds.

Two interchangeable simulation paths produce the measured integer c:

* the eigenpath draws a pair of eigenphases of the modular-multiplication
  operator and runs the phase-estimation rounds on their difference
  (exact, O(L) per attempt);
* the faithful path simulates the literal circuit on a sparse register-pair
  amplitude map, round by round, including collapse.

For registers drawn uniformly the two give identically distributed c.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numtheory import (
    NotCoprime,
    factor_from_order,
    is_prime,
    is_prime_power,
    multiplicative_order,
    orbit_length,
    recover_order,
)

COLLAPSE_EPS = 1e-15  # branch probabilities below this are treated as zero


class EvenInput(ValueError):
    pass


class NotComposite(ValueError):
    pass


class PrimePower(ValueError):
    pass


class AttemptCapExceeded(RuntimeError):
    pass


class StateBlowup(RuntimeError):
    """Branch support exceeded its provable bound; indicates a bug."""


# ---------------------------------------------------------------------------
# eigenphase structure of x -> a*x mod N

@dataclass(frozen=True)
class EigenphaseTable:
    """Orbit decomposition of multiplication by a mod N.

    Each orbit of length r_d contributes eigenphases j/r_d, j = 0..r_d-1;
    orbit lengths sum to N and every r_d divides r.
    """

    N: int
    a: int
    r: int
    orbits: tuple[tuple[int, int, tuple[int, ...]], ...]  # (rep, length, members)
    orbit_len: np.ndarray  # length-N lookup: orbit length of each x

    @classmethod
    def build(cls, N: int, a: int) -> "EigenphaseTable":
        if math.gcd(a, N) != 1:
            raise NotCoprime(a, N)
        r = multiplicative_order(a % N, N)
        seen = np.zeros(N, dtype=bool)
        lens = np.zeros(N, dtype=np.int64)
        orbits = []
        for g in range(N):
            if seen[g]:
                continue
            members = [g]
            x = g * a % N
            while x != g:
                members.append(x)
                x = x * a % N
            for m in members:
                seen[m] = True
                lens[m] = len(members)
            orbits.append((g, len(members), tuple(members)))
        return cls(N=N, a=a % N, r=r, orbits=tuple(orbits), orbit_len=lens)

    def eigenphase_multiplicities(self) -> dict[Fraction, int]:
        """How many of the N eigenvectors carry each distinct phase."""
        counts: dict[Fraction, int] = {}
        for _, rd, _ in self.orbits:
            for j in range(rd):
                f = Fraction(j, rd)
                counts[f] = counts.get(f, 0) + 1
        return counts


def eigenphase_sample(table: EigenphaseTable, rng: np.random.Generator) -> Fraction:
    """Draw an eigenphase j_d/r_d uniformly over the N eigenvectors."""
    x = int(rng.integers(0, table.N))
    rd = int(table.orbit_len[x])
    j = int(rng.integers(0, rd))
    return Fraction(j, rd)


# ---------------------------------------------------------------------------
# semiclassical iterative phase estimation

def _turns(phi, power: int) -> float:
    """Fractional part of phi * 2**power, exact for rational phi."""
    if isinstance(phi, Fraction):
        return float((phi * (1 << power)) % 1)
    return math.fmod(float(phi) * (1 << power), 1.0)


def semiclassical_ipe(phi, L: int, rng: np.random.Generator) -> int:
    """One pass of L measured control rounds; returns c in [0, 2**L).

    Round i couples the control to the 2**(L-1-i) power of the phase,
    applies the feedback rotation built from the bits measured so far, and
    measures after a Hadamard.  The distribution of c is exactly
    |G(phi - c/t)|^2 / t^2 with t = 2**L and |G| the periodic sinc kernel.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    c = 0
    for i in range(L):
        fb = (c & ((1 << i) - 1)) / 2.0 ** (i + 1)
        x = _turns(phi, L - 1 - i) - fb
        p1 = math.sin(math.pi * x) ** 2
        bit = 1 if rng.random() < p1 else 0
        c |= bit << i
    return c


def ipe_sample_batch(phi, L: int, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized semiclassical_ipe: `shots` independent outcomes."""
    c = np.zeros(shots, dtype=np.int64)
    for i in range(L):
        fb = (c & ((1 << i) - 1)) / 2.0 ** (i + 1)
        p1 = np.sin(np.pi * (_turns(phi, L - 1 - i) - fb)) ** 2
        bits = (rng.random(shots) < p1).astype(np.int64)
        c |= bits << i
    return c


# ---------------------------------------------------------------------------
# configuration and attempt records

def default_t(N: int) -> int:
    """The power of two t with N**2 <= t <= 2 N**2."""
    return 1 << (N * N - 1).bit_length()


@dataclass(frozen=True)
class PhaseEstimationConfig:
    N: int
    t: int
    attempt_cap: int = 500
    seed: int = 0
    a: int | None = None  # pin the base; None draws it per attempt

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.t & (self.t - 1) != 0:
            raise ValueError(f"t = {self.t} is not a power of two")
        if not self.N**2 <= self.t <= 2 * self.N**2:
            raise ValueError(f"t = {self.t} outside [N^2, 2 N^2] = [{self.N**2}, {2*self.N**2}]")
        if self.attempt_cap < 1:
            raise ValueError("attempt_cap must be >= 1")
        if self.a is not None and math.gcd(self.a, self.N) != 1:
            raise NotCoprime(self.a, self.N)

    @property
    def L(self) -> int:
        return self.t.bit_length() - 1

    @classmethod
    def for_modulus(cls, N: int, **kw) -> "PhaseEstimationConfig":
        return cls(N=N, t=kw.pop("t", None) or default_t(N), **kw)


@dataclass(frozen=True)
class AttemptRecord:
    a: int
    c: int
    phase1: Fraction | None  # None on the faithful path
    phase2: Fraction | None
    order_candidate: int | None
    order_recovered: bool    # candidate equals the true order
    factors: tuple[int, int] | None
    path: str                # "eigenphase" | "faithful"


def _finish_attempt(table, config, c, phase1, phase2, path) -> AttemptRecord:
    cand = recover_order(c, config.t, table.a, table.N)
    factors = factor_from_order(table.a, cand, table.N) if cand is not None else None
    return AttemptRecord(
        a=table.a,
        c=c,
        phase1=phase1,
        phase2=phase2,
        order_candidate=cand,
        order_recovered=cand == table.r,
        factors=factors,
        path=path,
    )


def run_attempt_eigenpath(
    table: EigenphaseTable,
    config: PhaseEstimationConfig,
    rng: np.random.Generator,
    phases: tuple[Fraction, Fraction] | None = None,
) -> AttemptRecord:
    """One factoring attempt on the exact eigenphase path.

    Draws eigenphases for the box and its conjugate partner, estimates their
    difference, and runs order recovery on the outcome.  `phases` pins the
    draw for deterministic tests.
    """
    if phases is None:
        phases = (eigenphase_sample(table, rng), eigenphase_sample(table, rng))
    phi = (phases[0] - phases[1]) % 1
    c = semiclassical_ipe(phi, config.L, rng)
    return _finish_attempt(table, config, c, phases[0], phases[1], "eigenphase")


def run_attempt_faithful(
    table: EigenphaseTable,
    config: PhaseEstimationConfig,
    x: int,
    y: int,
    rng: np.random.Generator,
) -> AttemptRecord:
    """One attempt simulating the literal circuit on registers |x>|y>.

    Per round: controlled-SWAP, the appropriate power of the multiplication
    map on the first register, controlled-SWAP (so control-0 multiplies the
    first register and control-1 the second), the feedback rotation, a
    Hadamard, and a collapsing control measurement.
    """
    N, a, L = table.N, table.a, config.L
    if not (0 <= x < N and 0 <= y < N):
        raise ValueError("register values must lie in [0, N)")
    support_bound = int(table.orbit_len[x]) * int(table.orbit_len[y])
    state: dict[tuple[int, int], complex] = {(x, y): 1.0 + 0j}
    c = 0
    for i in range(L):
        g = pow(a, 1 << (L - 1 - i), N)
        fb = (c & ((1 << i) - 1)) / 2.0 ** (i + 1)
        ph = cmath.exp(-2j * math.pi * fb)
        merged: dict[tuple[int, int], tuple[complex, complex]] = {}
        for (u, v), amp in state.items():
            k0 = (u * g % N, v)
            a0, a1 = merged.get(k0, (0j, 0j))
            merged[k0] = (a0 + amp, a1)
            k1 = (u, v * g % N)
            a0, a1 = merged.get(k1, (0j, 0j))
            merged[k1] = (a0, a1 + amp * ph)
        p1 = sum(abs(a0 - a1) ** 2 for a0, a1 in merged.values()) / 4.0
        if p1 < COLLAPSE_EPS:
            m = 0
        elif p1 > 1.0 - COLLAPSE_EPS:
            m = 1
        else:
            m = 1 if rng.random() < p1 else 0
        sign = -1.0 if m else 1.0
        norm = math.sqrt(p1 if m else 1.0 - p1)
        state = {}
        for key, (a0, a1) in merged.items():
            amp = (a0 + sign * a1) / (2.0 * norm)
            if abs(amp) > 1e-12:
                state[key] = amp
        if len(state) > support_bound:
            raise StateBlowup(
                f"support {len(state)} exceeds orbit bound {support_bound}"
            )
        c |= m << i
    return _finish_attempt(table, config, c, None, None, "faithful")


# ---------------------------------------------------------------------------
# end-to-end driver

@dataclass(frozen=True)
class FactoringResult:
    N: int
    factors: tuple[int, int]
    attempts_used: int
    trivial_gcd: bool  # factors came from the classical gcd shortcut
    seed: int
    records: tuple[AttemptRecord, ...] = field(default=())


def attempt_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based per-attempt stream: a pure function of (seed, index)."""
    return np.random.default_rng([seed, index])


def factor(N: int, config: PhaseEstimationConfig) -> FactoringResult:
    """Factor an odd composite non-prime-power N.

    Each attempt draws a fresh base a (unless pinned), takes the gcd
    shortcut when it fires, and otherwise runs one eigenpath attempt.
    """
    if N % 2 == 0:
        raise EvenInput(f"{N} is even; 2 is a factor")
    if is_prime(N):
        raise NotComposite(f"{N} is prime")
    if is_prime_power(N):
        raise PrimePower(f"{N} is a prime power")
    tables: dict[int, EigenphaseTable] = {}
    records: list[AttemptRecord] = []
    for i in range(config.attempt_cap):
        rng = attempt_rng(config.seed, i)
        if config.a is not None:
            a = config.a
        else:
            a = int(rng.integers(2, N))
            g = math.gcd(a, N)
            if g > 1:
                return FactoringResult(
                    N=N,
                    factors=(min(g, N // g), max(g, N // g)),
                    attempts_used=i + 1,
                    trivial_gcd=True,
                    seed=config.seed,
                    records=tuple(records),
                )
        if a not in tables:
            tables[a] = EigenphaseTable.build(N, a)
        rec = run_attempt_eigenpath(tables[a], config, rng)
        records.append(rec)
        if rec.factors is not None:
            return FactoringResult(
                N=N,
                factors=rec.factors,
                attempts_used=i + 1,
                trivial_gcd=False,
                seed=config.seed,
                records=tuple(records),
            )
    raise AttemptCapExceeded(
        f"no factors of {N} after {config.attempt_cap} attempts"
    )
