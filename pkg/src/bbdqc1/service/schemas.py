"""Request/response models for the service API."""

from __future__ import annotations

import hashlib
import json
from typing import Literal

from pydantic import BaseModel, Field, model_validator


def config_hash(model: BaseModel) -> str:
    canonical = json.dumps(model.model_dump(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


class MatrixPayload(BaseModel):
    """Dense unitary wire format: row-major real and imaginary parts."""

    dim: int
    re: list[list[float]]
    im: list[list[float]]


class UnitarySource(BaseModel):
    """Exactly one of: a builtin family, or an explicit dense matrix."""

    builtin: Literal["identity", "modmul", "diagonal"] | None = None
    dim: int | None = None
    a: int | None = None
    N: int | None = None
    phases: list[float] | None = None
    matrix: MatrixPayload | None = None

    @model_validator(mode="after")
    def _exclusive(self):
        if (self.builtin is None) == (self.matrix is None):
            raise ValueError("specify exactly one of 'builtin' or 'matrix'")
        return self


class TraceRequest(BaseModel):
    unitary: UnitarySource
    protocol: Literal["standard", "bb", "both"] = "both"
    shots: int = Field(default=10_000, ge=1)
    seed: int = 0


class StandardTraceResult(BaseModel):
    estimate_re: float
    estimate_im: float
    exact_re: float
    exact_im: float
    std_error: float


class BBTraceResult(BaseModel):
    estimate: float
    exact: float
    std_error: float


class TraceResponse(BaseModel):
    standard: StandardTraceResult | None
    bb: BBTraceResult | None
    shots: int
    seed: int
    config_hash: str
    version: str


class FactorRequest(BaseModel):
    N: int
    a: int | None = None
    attempts: int = Field(default=500, ge=1)
    t: int | None = None
    seed: int = 0
    include_records: bool = True


class AttemptSummary(BaseModel):
    a: int
    c: int
    order_candidate: int | None
    order_recovered: bool
    factors: tuple[int, int] | None


class FactorResponse(BaseModel):
    N: int
    factors: tuple[int, int]
    attempts_used: int
    trivial_gcd: bool
    order_recovery_rate: float
    success_bound: float | None  # known only when the base a is pinned
    records: list[AttemptSummary] | None
    seed: int
    config_hash: str
    version: str


class AnalyzeRequest(BaseModel):
    N: int
    a: int
    t: int | None = None


class AnalyzeResponse(BaseModel):
    N: int
    a: int
    p: int
    q: int
    t: int
    r: int
    chi: int
    chi_closed_form: int
    num_c: int
    usable_pairs: int
    success_bound: float
    single_register_rate: float
    pair_rate: float
    parker_plenio_pair_rate: float  # P(2-P) with P = chi/N; equals pair_rate
    slow_orbit_elements: int
    slow_orbit_ceiling_ok: bool
    distribution: list[float]
    config_hash: str
    version: str


class VerifyRequest(BaseModel):
    quick: bool = False
    break_phase_invariance: bool = False
    seed: int = 0


class CheckResultModel(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    results: list[CheckResultModel]
    seed: int
    config_hash: str
    version: str
