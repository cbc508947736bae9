"""The two trace-estimation protocols.

Standard one-clean-qubit estimation reads tr(V)/D off the control qubit (X
and Y bases); the black-box variant uses two mixed registers and
controlled-SWAPs, needs only input-output access to U, and reads
|tr(U)|^2/d^2 from a single basis.

Maximally mixed registers are sampled as uniform basis states, so a shot
costs O(1) memory.  All sampling is driven by a counter-based generator
keyed on the seed: outcomes are a pure function of (seed, shot index), so
any parallel split over shots reproduces the sequential stream bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qsim import (
    DensityMatrix,
    DimTooLarge,
    PhasedUnitary,
    Unitary,
    build_tau_bb,
    trace_of,
)

EXACT_DIM_CAP = 10**6


@dataclass(frozen=True)
class TraceEstimate:
    value: complex          # estimate of tr(V)/D, or of |tr(U)|^2/d^2 (real)
    shots: int              # 0 flags an exact evaluation
    std_error: float

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def dqc1_exact(v: Unitary) -> complex:
    """tr(V)/D, the control coherence of the standard protocol.

    Convention: X-expectation = Re(tr V)/D, Y-expectation = -Im(tr V)/D.
    """
    if v.dim > EXACT_DIM_CAP:
        raise DimTooLarge(f"dimension {v.dim} beyond desk scale")
    return trace_of(v) / v.dim


def dqc1_sample(v: Unitary, shots: int, seed: int = 0) -> TraceEstimate:
    """Shot-sampled standard protocol; X and Y shots estimate Re and -Im."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    d = v.dim
    diag = v.diagonal()
    n_x = shots - shots // 2  # odd shot goes to X
    n_y = shots // 2
    rng = _rng(seed)
    xs = rng.integers(0, d, size=n_x)
    ys = rng.integers(0, d, size=n_y)
    ux = rng.random(n_x)
    uy = rng.random(n_y)
    # per-shot outcome +-1 with P(+1) = (1 + E)/2 for the shot's expectation
    out_x = np.where(ux < (1 + diag[xs].real) / 2, 1.0, -1.0)
    out_y = np.where(uy < (1 - diag[ys].imag) / 2, 1.0, -1.0)
    mean_x = out_x.mean()
    mean_y = out_y.mean() if n_y else 0.0
    value = mean_x - 1j * mean_y  # Y reads -Im by convention
    var_x = out_x.var(ddof=1) / n_x if n_x > 1 else 0.0
    var_y = out_y.var(ddof=1) / n_y if n_y > 1 else 0.0
    return TraceEstimate(value=value, shots=shots, std_error=float(np.sqrt(var_x + var_y)))


def bb_dqc1_exact(u: Unitary) -> float:
    """|tr U|^2 / d^2: the X-expectation of the black-box circuit's control."""
    if u.dim > EXACT_DIM_CAP:
        raise DimTooLarge(f"dimension {u.dim} beyond desk scale")
    return float(abs(trace_of(u)) ** 2) / u.dim**2


def bb_dqc1_sample(u: Unitary, shots: int, seed: int = 0) -> TraceEstimate:
    """Shot-sampled black-box protocol; a single measurement basis suffices.

    Each shot draws a register basis pair (x, y) and the +-1 outcome with
    P(+) = 1/2 + Re(conj(<x|U|x>) <y|U|y>)/2.  Any scalar phase on U cancels
    in that product, so the sample stream is identical (bit for bit, per
    seed) for U and exp(i*theta) U.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    base, _ = u.strip_phase()  # scalar phase cancels exactly; drop it up front
    d = base.dim
    diag = base.diagonal()
    rng = _rng(seed)
    xs = rng.integers(0, d, size=shots)
    ys = rng.integers(0, d, size=shots)
    us = rng.random(shots)
    coh = (np.conj(diag[xs]) * diag[ys]).real
    out = np.where(us < (1 + coh) / 2, 1.0, -1.0)
    var = out.var(ddof=1) / shots if shots > 1 else 0.0
    return TraceEstimate(value=float(out.mean()), shots=shots, std_error=float(np.sqrt(var)))


@dataclass(frozen=True)
class GlobalPhaseReport:
    """What the black-box circuit cannot see and the standard one must."""

    theta: float
    bb_exact_u: float
    bb_exact_phased: float
    bb_deviation: float          # |bb(U) - bb(e^{i theta} U)|
    tau_deviation: float         # max entrywise deviation of the circuit states
    dqc1_u: complex
    dqc1_phased: complex
    dqc1_phase_deviation: float  # |dqc1(phased) - e^{i theta} dqc1(U)|


def global_phase_nogo_check(
    u: Unitary, theta: float, trials: int = 5, seed: int = 0
) -> GlobalPhaseReport:
    """Contrast the two protocols on U versus exp(i*theta) U.

    The black-box channel output is invariant; the standard protocol's
    reading picks up exactly the factor exp(i*theta), which is why it cannot
    be run on a black box.
    """
    phased = PhasedUnitary(theta, u)
    bb_u = bb_dqc1_exact(u)
    bb_p = bb_dqc1_exact(phased)

    tau_dev = 0.0
    d = u.dim
    if 2 * d * d <= 4096:
        rng = _rng(seed)
        states = [DensityMatrix.maximally_mixed(d)]
        for _ in range(max(trials - 1, 0)):
            z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            m = z @ z.conj().T
            states.append(DensityMatrix(m / np.trace(m)))
        for rho in states:
            for sigma in states:
                t_u = build_tau_bb(u, rho, sigma)
                t_p = build_tau_bb(phased, rho, sigma)
                tau_dev = max(tau_dev, float(np.abs(t_u.matrix - t_p.matrix).max()))

    dq_u = dqc1_exact(u)
    dq_p = dqc1_exact(phased)
    return GlobalPhaseReport(
        theta=theta,
        bb_exact_u=bb_u,
        bb_exact_phased=bb_p,
        bb_deviation=abs(bb_u - bb_p),
        tau_deviation=tau_dev,
        dqc1_u=dq_u,
        dqc1_phased=dq_p,
        dqc1_phase_deviation=abs(dq_p - np.exp(1j * theta) * dq_u),
    )
