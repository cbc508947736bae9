"""Runnable invariant suite behind the verify command and endpoint.

Each check is a named, self-contained pass/fail with a one-line detail.
Quick mode runs the subset that finishes in well under 30 seconds; the
statistical checks keep their full sample sizes only in the full run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from . import analysis, dqc1, numtheory, orderfind, qsim


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _tv(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.abs(p - q).sum())


def _hist(samples: np.ndarray, t: int) -> np.ndarray:
    return np.bincount(samples, minlength=t) / len(samples)


# --- individual checks ------------------------------------------------------

def check_unitarity(rng) -> CheckResult:
    worst = 0.0
    for d in (2, 3, 4, 8):
        for _ in range(5):
            u = qsim.random_unitary(d, rng).to_matrix()
            worst = max(worst, float(np.abs(u.conj().T @ u - np.eye(d)).max()))
    rejected = False
    try:
        qsim.DenseUnitary(np.eye(2) * 1.001)
    except ValueError:
        rejected = True
    ok = worst <= 1e-10 and rejected
    return CheckResult("unitarity", ok, f"max deviation {worst:.2e}; non-unitary rejected: {rejected}")


def check_tau_bb_blocks(rng) -> CheckResult:
    """Circuit evolution vs the block formula (and PSD/trace validity)."""
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 5))
        u = qsim.random_unitary(d, rng)
        rho = qsim.random_density(d, rng)
        sig = qsim.random_density(d, rng)
        tau = qsim.build_tau_bb(u, rho, sig)  # constructor enforces validity
        um = u.to_matrix()
        expect = np.block([
            [np.kron(um @ rho.matrix @ um.conj().T, sig.matrix),
             np.kron(um @ rho.matrix, sig.matrix @ um.conj().T)],
            [np.kron(rho.matrix @ um.conj().T, um @ sig.matrix),
             np.kron(rho.matrix, um @ sig.matrix @ um.conj().T)],
        ]) / 2
        worst = max(worst, float(np.abs(tau.matrix - expect).max()))
    return CheckResult("tau_bb_blocks", worst <= 1e-12, f"max block deviation {worst:.2e}")


def check_eigenbasis_equivalence(rng) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(2, 5))
        u = qsim.random_unitary(d, rng)
        um = u.to_matrix()
        _, vecs = np.linalg.eig(um)
        # density matrices diagonal in U's eigenbasis
        def diag_state():
            w = rng.random(d)
            w /= w.sum()
            return qsim.DensityMatrix(vecs @ np.diag(w) @ vecs.conj().T)
        rho, sig = diag_state(), diag_state()
        t_bb = qsim.build_tau_bb(u, rho, sig)
        pair = qsim.DensityMatrix(np.kron(rho.matrix, sig.matrix))
        # the black-box circuit matches the controlled pair gate taken as
        # U^+ (x) U under our control-1-applies-V convention
        t_ctrl = qsim.build_tau_ctrl(np.kron(um.conj().T, um), pair)
        worst = max(worst, float(np.abs(t_bb.matrix - t_ctrl.matrix).max()))
    return CheckResult("eigenbasis_equivalence", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_coherence_product(rng) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(2, 5))
        u = qsim.random_unitary(d, rng)
        rho = qsim.random_density(d, rng)
        sig = qsim.random_density(d, rng)
        got = qsim.control_coherence(qsim.build_tau_bb(u, rho, sig))
        um = u.to_matrix()
        want = np.trace(um @ rho.matrix) * np.trace(sig.matrix @ um.conj().T)
        worst = max(worst, abs(got - want))
    return CheckResult("coherence_product", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_global_phase(rng, broken: bool = False) -> CheckResult:
    worst_bb = 0.0
    worst_tau = 0.0
    worst_local = 0.0
    for _ in range(10):
        d = int(rng.integers(2, 5))
        u = qsim.random_unitary(d, rng)
        theta = float(rng.uniform(0, 2 * math.pi))
        rep = dqc1.global_phase_nogo_check(u, theta, trials=2, seed=int(rng.integers(2**32)))
        # fault hook: pretend the standard readout were phase-invariant, which
        # it is not -- abs(dqc1(e^{i theta} U) - dqc1(U)) is order theta
        bb_dev = abs(rep.dqc1_phased - rep.dqc1_u) if broken else rep.bb_deviation
        worst_bb = max(worst_bb, bb_dev)
        worst_tau = max(worst_tau, rep.tau_deviation)
        # controlled(e^{i theta} U) must equal a control-local phase gate times controlled(U)
        cu = qsim.controlled(u.to_matrix())
        cpu = qsim.controlled(np.exp(1j * theta) * u.to_matrix())
        local = np.kron(np.diag([1.0, np.exp(1j * theta)]), np.eye(d))
        worst_local = max(worst_local, float(np.abs(cpu - local @ cu).max()))
    ok = worst_bb <= 1e-12 and worst_tau <= 1e-12 and worst_local <= 1e-12
    return CheckResult(
        "global_phase_invariance", ok,
        f"bb dev {worst_bb:.2e}, tau dev {worst_tau:.2e}, local decomposition dev {worst_local:.2e}",
    )


def check_bb_standard_identity(rng) -> CheckResult:
    worst = 0.0
    for d in (2, 3, 4, 8):
        u = qsim.random_unitary(d, rng)
        bb = dqc1.bb_dqc1_exact(u)
        um = u.to_matrix()
        pair = qsim.DenseUnitary(np.kron(um, um.conj().T))
        via_standard = dqc1.dqc1_exact(pair)
        worst = max(worst, abs(bb - via_standard))
        worst = max(worst, abs(bb - abs(dqc1.dqc1_exact(u)) ** 2))
    return CheckResult("bb_equals_standard_on_pair", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_bb_unit_interval(rng) -> CheckResult:
    ok = True
    for _ in range(20):
        d = int(rng.integers(2, 9))
        phases = rng.uniform(0, 2 * math.pi, size=d)
        val = dqc1.bb_dqc1_exact(qsim.DiagonalUnitary(phases))
        ok &= -1e-12 <= val <= 1 + 1e-12
        scalar = dqc1.bb_dqc1_exact(qsim.DiagonalUnitary(np.full(d, phases[0])))
        ok &= abs(scalar - 1.0) <= 1e-12
        if np.ptp(phases) > 1e-3:  # genuinely non-scalar
            ok &= val < 1.0 - 1e-12
    return CheckResult("bb_unit_interval", bool(ok), "0 <= bb <= 1, =1 iff scalar multiple of identity")


def check_estimator_unbiased(rng, seeds: int = 200, shots: int = 10_000) -> CheckResult:
    u = qsim.ModMulUnitary(2, 15)
    exact = dqc1.bb_dqc1_exact(u)
    means = np.array([
        dqc1.bb_dqc1_sample(u, shots, seed=int(rng.integers(2**32))).value.real
        for _ in range(seeds)
    ])
    grand = means.mean()
    sem = means.std(ddof=1) / math.sqrt(seeds)
    ok = abs(grand - exact) < 5 * sem
    return CheckResult(
        "estimator_unbiased", ok,
        f"grand mean {grand:.6f} vs exact {exact:.6f} ({abs(grand-exact)/sem:.2f} sem)",
    )


def check_ipe_fejer(rng, shots: int = 100_000) -> CheckResult:
    worst_p = 1.0
    for phi in (Fraction(1, 3), Fraction(1, 7), 0.137):
        for L in (4, 8):
            t = 1 << L
            samples = orderfind.ipe_sample_batch(phi, L, shots, rng)
            expected = shots * np.array([analysis.fejer_kernel_sq(float(phi) - c / t, t) for c in range(t)]) / t**2
            observed = np.bincount(samples, minlength=t).astype(float)
            # merge bins with tiny expectation to keep the chi^2 valid
            keep = expected >= 5.0
            obs = np.append(observed[keep], observed[~keep].sum())
            exp = np.append(expected[keep], expected[~keep].sum())
            if exp[-1] == 0:
                obs, exp = obs[:-1], exp[:-1]
            exp *= obs.sum() / exp.sum()
            pval = stats.chisquare(obs, exp).pvalue
            worst_p = min(worst_p, float(pval))
    return CheckResult("ipe_fejer_chi2", worst_p > 0.001, f"min p-value {worst_p:.4f}")


def check_ipe_dyadic(rng, max_L: int = 6) -> CheckResult:
    for L in range(1, max_L + 1):
        t = 1 << L
        for k in range(t):
            c = orderfind.semiclassical_ipe(Fraction(k, t), L, rng)
            if c != k:
                return CheckResult("ipe_dyadic_exact", False, f"phi={k}/{t} gave c={c}")
    return CheckResult("ipe_dyadic_exact", True, f"exact for all dyadic phases up to L={max_L}")


def check_eigen_faithful_tv(rng, N: int = 15, a: int = 2, n: int = 20_000, tol: float = 0.03) -> CheckResult:
    table = orderfind.EigenphaseTable.build(N, a)
    config = orderfind.PhaseEstimationConfig.for_modulus(N, a=a)
    t = config.t
    eig = np.empty(n, dtype=np.int64)
    fai = np.empty(n, dtype=np.int64)
    for i in range(n):
        eig[i] = orderfind.run_attempt_eigenpath(table, config, rng).c
        x = int(rng.integers(0, N))
        y = int(rng.integers(0, N))
        fai[i] = orderfind.run_attempt_faithful(table, config, x, y, rng).c
    tv = _tv(_hist(eig, t), _hist(fai, t))
    return CheckResult("eigen_faithful_tv", tv <= tol, f"N={N}, a={a}: TV {tv:.4f} (n={n})")


def check_exact_distribution(rng) -> CheckResult:
    dist = analysis.exact_distribution(15, 2, 256)
    p0 = dist.probabilities[0]
    p64 = dist.probabilities[64]
    ok = (
        abs(p0 - 59 / 225) <= 1e-12
        and abs(p64 - 54 / 225) <= 1e-12
        and abs(dist.probabilities.sum() - 1.0) <= 1e-9
    )
    return CheckResult("exact_distribution_values", ok, f"P(0)={p0:.6f}, P(64)={p64:.6f}")


_SEMIPRIMES_50 = [
    (6, 2, 3), (10, 2, 5), (14, 2, 7), (15, 3, 5), (21, 3, 7), (22, 2, 11),
    (26, 2, 13), (33, 3, 11), (34, 2, 17), (35, 5, 7), (38, 2, 19), (39, 3, 13),
    (46, 2, 23),
]


def check_counting_sweep(rng, max_N: int = 50) -> CheckResult:
    checked = 0
    for N, p, q in _SEMIPRIMES_50:
        if N > max_N:
            continue
        for a in range(2, N):
            if math.gcd(a, N) != 1:
                continue
            r = numtheory.multiplicative_order(a, N)
            chi = analysis.count_good_eigenvalues(N, a)
            if chi != analysis.chi_closed_form(p, q, r):
                return CheckResult("counting_sweep", False, f"chi mismatch at N={N}, a={a}")
            checked += 1
    # usable >= chi(2N - chi) is NOT a theorem: pairs of good eigenphases can
    # cancel (e.g. 1/2 - 1/2 = 0), so the pair count with difference of
    # denominator exactly r can fall below num_c (N=21, a=2: 128 < 152).
    # Only the documented N=15, a=2 instance is asserted here.
    usable = analysis.count_usable_pairs(15, 2)
    numc = analysis.num_c(analysis.count_good_eigenvalues(15, 2), 15)
    if usable < numc:
        return CheckResult("counting_sweep", False, f"usable {usable} < num_c {numc} at N=15, a=2")
    return CheckResult("counting_sweep", True, f"{checked} (N, a) pairs checked, N <= {max_N}")


def check_success_bound(rng, attempts: int = 5000) -> CheckResult:
    details = []
    ok = True
    for N, p, q, a in ((15, 3, 5, 2), (21, 3, 7, 2)):
        table = orderfind.EigenphaseTable.build(N, a)
        config = orderfind.PhaseEstimationConfig.for_modulus(N, a=a)
        hits = sum(
            orderfind.run_attempt_eigenpath(table, config, rng).order_recovered
            for _ in range(attempts)
        )
        rate = hits / attempts
        bound = analysis.success_lower_bound(N, p, q, a)
        sigma = math.sqrt(max(rate * (1 - rate), 1e-12) / attempts)
        ok &= rate + 3 * sigma >= bound
        details.append(f"N={N}: rate {rate:.4f} vs bound {bound:.4f}")
    return CheckResult("success_bound", bool(ok), "; ".join(details))


def check_recover_order_window(rng) -> CheckResult:
    """Every c within 1/(2t) of a reduced k/r must recover r (N=15, a=2)."""
    N, a, t = 15, 2, 256
    r = numtheory.multiplicative_order(a, N)
    for k in range(r):
        if math.gcd(k, r) != 1:
            continue
        for c in range(t):
            if abs(k / r - c / t) <= 1 / (2 * t):
                got = numtheory.recover_order(c, t, a, N)
                if got != r:
                    return CheckResult("recover_order_window", False, f"c={c} gave {got}")
    return CheckResult("recover_order_window", True, f"all in-window outcomes recover r={r}")


def check_coprime_shift(rng, trials: int = 500) -> CheckResult:
    for _ in range(trials):
        r = int(rng.integers(2, 10_001))
        alpha = int(rng.integers(0, 10_001))
        beta = int(rng.integers(-100, 101))
        lhs = math.gcd(alpha + beta * r, r) == 1
        rhs = math.gcd(alpha, r) == 1
        if lhs != rhs:
            return CheckResult("coprime_shift_lemma", False, f"alpha={alpha}, beta={beta}, r={r}")
    return CheckResult("coprime_shift_lemma", True, f"{trials} random triples")


def check_convergents(rng, trials: int = 200) -> CheckResult:
    for _ in range(trials):
        t = 1 << int(rng.integers(4, 16))
        c = int(rng.integers(0, t))
        fracs = numtheory.convergents(c, t, 10_000)
        dens = [f.denominator for f in fracs]
        # denominators are non-decreasing; the first two can tie (k0 = k1 = 1
        # when the leading partial quotient is 1), strictly increasing after
        if dens != sorted(dens) or dens[1:] != sorted(set(dens[1:])):
            return CheckResult("convergents", False, f"dens not increasing for {c}/{t}")
        for f in fracs[1:]:
            if abs(c / t - f) >= 1 / f.denominator**2:
                return CheckResult("convergents", False, f"approximation bound fails for {c}/{t}")
    return CheckResult("convergents", True, f"{trials} random targets")


# --- suite ------------------------------------------------------------------

def run_checks(
    quick: bool = False, break_phase_invariance: bool = False, seed: int = 0
) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = [
        check_unitarity(rng),
        check_tau_bb_blocks(rng),
        check_eigenbasis_equivalence(rng),
        check_coherence_product(rng),
        check_global_phase(rng, broken=break_phase_invariance),
        check_bb_standard_identity(rng),
        check_bb_unit_interval(rng),
        check_ipe_dyadic(rng, max_L=4 if quick else 6),
        check_exact_distribution(rng),
        check_recover_order_window(rng),
        check_coprime_shift(rng, trials=100 if quick else 500),
        check_convergents(rng, trials=50 if quick else 200),
        check_counting_sweep(rng, max_N=21 if quick else 50),
    ]
    if not quick:
        results += [
            check_estimator_unbiased(rng),
            check_ipe_fejer(rng),
            check_eigen_faithful_tv(rng),
            check_success_bound(rng),
        ]
    return results
