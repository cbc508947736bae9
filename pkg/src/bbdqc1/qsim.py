"""Small-dimension complex linear algebra substrate.

Dense and structured unitaries, density matrices, tensor-product plumbing,
and the density-matrix oracle for the controlled-SWAP trace circuit.  This
module favors correctness over scale: dimensions are deliberately capped.
"""

from __future__ import annotations

import json
import math

import numpy as np

DENSE_DIM_CAP = 64       # largest unitary we will materialize
TOTAL_DIM_CAP = 4096     # largest composite space (control x register x register)
UNITARY_TOL = 1e-10
DM_TOL = 1e-12
PSD_TOL = 1e-10


class DimTooLarge(ValueError):
    pass


class DimMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# unitaries

class Unitary:
    """A d-dimensional unitary, known by structure rather than always by matrix."""

    dim: int

    def to_matrix(self) -> np.ndarray:
        raise NotImplementedError

    def trace(self) -> complex:
        raise NotImplementedError

    def diagonal(self) -> np.ndarray:
        """The vector of diagonal entries <x|U|x>."""
        raise NotImplementedError

    def strip_phase(self) -> tuple["Unitary", float]:
        """Split off any scalar-phase wrapper: returns (base, theta)."""
        return self, 0.0

    def _check_dense_cap(self):
        if self.dim > DENSE_DIM_CAP:
            raise DimTooLarge(f"refusing to materialize a {self.dim}-dim matrix")


class DenseUnitary(Unitary):
    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        dev = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if dev > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max deviation {dev:.3e})")
        self._m = m
        self.dim = m.shape[0]

    def to_matrix(self):
        self._check_dense_cap()
        return self._m.copy()

    def trace(self):
        return complex(np.trace(self._m))

    def diagonal(self):
        return np.diagonal(self._m).copy()


class ModMulUnitary(Unitary):
    """The permutation |x> -> |a*x mod N> on a dimension-N qudit."""

    def __init__(self, a: int, N: int):
        if N < 2:
            raise ValueError("N must be >= 2")
        if math.gcd(a % N, N) != 1:
            raise ValueError(f"gcd({a}, {N}) != 1; map would not be a permutation")
        self.a = a % N
        self.N = N
        self.dim = N

    def to_matrix(self):
        self._check_dense_cap()
        m = np.zeros((self.N, self.N), dtype=complex)
        for x in range(self.N):
            m[self.a * x % self.N, x] = 1.0
        return m

    def trace(self):
        # fixed points of x -> a*x mod N
        return complex(sum(1 for x in range(self.N) if self.a * x % self.N == x))

    def diagonal(self):
        x = np.arange(self.N)
        return (self.a * x % self.N == x).astype(complex)


class DiagonalUnitary(Unitary):
    """diag(exp(i*phases))."""

    def __init__(self, phases):
        self._phases = np.asarray(phases, dtype=float)
        if self._phases.ndim != 1 or len(self._phases) == 0:
            raise ValueError("phases must be a nonempty 1-d sequence")
        self.dim = len(self._phases)

    def to_matrix(self):
        self._check_dense_cap()
        return np.diag(np.exp(1j * self._phases))

    def trace(self):
        return complex(np.exp(1j * self._phases).sum())

    def diagonal(self):
        return np.exp(1j * self._phases)


class PhasedUnitary(Unitary):
    """exp(i*theta) times a base unitary — same physical process, shifted trace."""

    def __init__(self, theta: float, base: Unitary):
        self.theta = float(theta)
        self.base = base
        self.dim = base.dim

    def to_matrix(self):
        return np.exp(1j * self.theta) * self.base.to_matrix()

    def trace(self):
        return np.exp(1j * self.theta) * self.base.trace()

    def diagonal(self):
        return np.exp(1j * self.theta) * self.base.diagonal()

    def strip_phase(self):
        inner, phi = self.base.strip_phase()
        return inner, phi + self.theta


def identity_unitary(dim: int) -> DiagonalUnitary:
    return DiagonalUnitary(np.zeros(dim))


def load_unitary_json(text: str) -> DenseUnitary:
    """Parse the dense-matrix file format {"dim": d, "re": [[..]], "im": [[..]]}."""
    obj = json.loads(text)
    try:
        d = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix file: {exc}") from exc
    if re.shape != (d, d) or im.shape != (d, d):
        raise ValueError(f"matrix shape does not match dim={d}")
    return DenseUnitary(re + 1j * im)


def trace_of(u: Unitary) -> complex:
    """Exact trace — the classical oracle a black-box protocol cannot evaluate."""
    return u.trace()


def random_unitary(d: int, rng: np.random.Generator) -> DenseUnitary:
    """Haar-random d x d unitary (QR of a complex Gaussian matrix)."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return DenseUnitary(q * (np.diagonal(r) / np.abs(np.diagonal(r))))


def random_density(d: int, rng: np.random.Generator) -> "DensityMatrix":
    """Random full-rank density matrix (Wishart, trace-normalized)."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = z @ z.conj().T
    return DensityMatrix(m / np.trace(m))


# ---------------------------------------------------------------------------
# density matrices

class DensityMatrix:
    """Hermitian, trace-1, PSD (to tolerance) operator."""

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if np.abs(m - m.conj().T).max() > DM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > DM_TOL:
            raise ValueError(f"trace is {np.trace(m)}, not 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("density matrix has a significantly negative eigenvalue")
        self.matrix = m
        self.dim = m.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    @classmethod
    def from_state(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))


# ---------------------------------------------------------------------------
# gates and composition

def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out_dim = a.shape[0] * b.shape[0]
    if out_dim > TOTAL_DIM_CAP:
        raise DimTooLarge(f"product dimension {out_dim} exceeds cap {TOTAL_DIM_CAP}")
    return np.kron(a, b)


def partial_trace(m: np.ndarray, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one factor of a dim_a x dim_b composite operator.

    keep is "A" or "B".
    """
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimMismatch(f"operator shape {m.shape} does not match {dim_a}x{dim_b}")
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.trace(r, axis1=1, axis2=3)
    if keep == "B":
        return np.trace(r, axis1=0, axis2=2)
    raise ValueError("keep must be 'A' or 'B'")


def controlled(u: np.ndarray) -> np.ndarray:
    """block-diag(I, U): apply U on the register when the control is |1>."""
    d = u.shape[0]
    if 2 * d > TOTAL_DIM_CAP:
        raise DimTooLarge(f"controlled operator dimension {2*d} exceeds cap")
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d)
    out[d:, d:] = u
    return out


def swap_gate(d: int) -> np.ndarray:
    """S|i>|j> = |j>|i> on two d-level systems."""
    if d * d > TOTAL_DIM_CAP:
        raise DimTooLarge(f"swap dimension {d*d} exceeds cap")
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)  # |+><+|


def build_tau_bb(u: Unitary, rho: DensityMatrix, sigma: DensityMatrix) -> DensityMatrix:
    """State of the controlled-SWAP trace circuit after the second swap.

    Evolves |+><+| (x) rho (x) sigma through cSWAP, then U on the first
    register, then cSWAP.  The control-0 branch applies U (x) I and the
    control-1 branch I (x) U, so the blocks are

        [ U rho U^+ (x) sigma       U rho (x) sigma U^+   ]
        [ rho U^+ (x) U sigma       rho (x) U sigma U^+   ]  / 2

    The off-diagonal blocks carry everything the control measurement sees.
    """
    d = u.dim
    if rho.dim != d or sigma.dim != d:
        raise DimMismatch(f"register dims {rho.dim}, {sigma.dim} != unitary dim {d}")
    if 2 * d * d > TOTAL_DIM_CAP:
        raise DimTooLarge(f"composite dimension {2*d*d} exceeds cap")
    umat = u.to_matrix()
    eye = np.eye(d)
    cswap = controlled(swap_gate(d))
    w = cswap @ kron(np.eye(2), kron(umat, eye)) @ cswap
    total = kron(PLUS, kron(rho.matrix, sigma.matrix))
    return DensityMatrix(w @ total @ w.conj().T)


def build_tau_ctrl(v: np.ndarray, rho_sigma: DensityMatrix) -> DensityMatrix:
    """State after a controlled-V on a register prepared in rho_sigma."""
    if v.shape != (rho_sigma.dim, rho_sigma.dim):
        raise DimMismatch(f"V shape {v.shape} does not match register dim {rho_sigma.dim}")
    cv = controlled(v)
    total = kron(PLUS, rho_sigma.matrix)
    return DensityMatrix(cv @ total @ cv.conj().T)


def control_coherence(tau: DensityMatrix) -> complex:
    """2 <0| Tr_registers(tau) |1>; equals tr[U rho] * tr[sigma U^+] for tau_BB."""
    if tau.dim % 2 != 0:
        raise DimMismatch("expected a control-qubit x register state")
    reduced = partial_trace(tau.matrix, 2, tau.dim // 2, keep="A")
    return 2 * complex(reduced[0, 1])
