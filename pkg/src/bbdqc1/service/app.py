"""FastAPI service exposing trace estimation, factoring, analysis and verification."""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, analysis, checks, dqc1, numtheory, orderfind, qsim
from . import schemas

app = FastAPI(title="bbdqc1", version=__version__)


def _error(status: int, kind: str, message: str, **extra):
    return HTTPException(status_code=status, detail={"kind": kind, "message": message, **extra})


def _build_unitary(src: schemas.UnitarySource) -> qsim.Unitary:
    try:
        if src.matrix is not None:
            m = np.asarray(src.matrix.re, dtype=float) + 1j * np.asarray(src.matrix.im, dtype=float)
            if m.shape != (src.matrix.dim, src.matrix.dim):
                raise ValueError(f"matrix shape {m.shape} does not match dim={src.matrix.dim}")
            return qsim.DenseUnitary(m)
        if src.builtin == "identity":
            if src.dim is None:
                raise ValueError("identity requires 'dim'")
            return qsim.identity_unitary(src.dim)
        if src.builtin == "modmul":
            if src.a is None or src.N is None:
                raise ValueError("modmul requires 'a' and 'N'")
            return qsim.ModMulUnitary(src.a, src.N)
        if src.builtin == "diagonal":
            if not src.phases:
                raise ValueError("diagonal requires 'phases'")
            return qsim.DiagonalUnitary(src.phases)
        raise ValueError("no unitary source given")
    except ValueError as exc:
        raise _error(400, "input", str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/trace", response_model=schemas.TraceResponse)
def trace(req: schemas.TraceRequest) -> schemas.TraceResponse:
    u = _build_unitary(req.unitary)
    standard = None
    bb = None
    if req.protocol in ("standard", "both"):
        exact = dqc1.dqc1_exact(u)
        est = dqc1.dqc1_sample(u, req.shots, seed=req.seed)
        standard = schemas.StandardTraceResult(
            estimate_re=est.value.real,
            estimate_im=est.value.imag,
            exact_re=exact.real,
            exact_im=exact.imag,
            std_error=est.std_error,
        )
    if req.protocol in ("bb", "both"):
        est = dqc1.bb_dqc1_sample(u, req.shots, seed=req.seed)
        bb = schemas.BBTraceResult(
            estimate=float(est.value.real),
            exact=dqc1.bb_dqc1_exact(u),
            std_error=est.std_error,
        )
    return schemas.TraceResponse(
        standard=standard,
        bb=bb,
        shots=req.shots,
        seed=req.seed,
        config_hash=schemas.config_hash(req),
        version=__version__,
    )


@app.post("/factor", response_model=schemas.FactorResponse)
def factor(req: schemas.FactorRequest) -> schemas.FactorResponse:
    try:
        config = orderfind.PhaseEstimationConfig.for_modulus(
            req.N, t=req.t, attempt_cap=req.attempts, seed=req.seed, a=req.a
        )
    except (ValueError, numtheory.NotCoprime) as exc:
        raise _error(422, "precondition", str(exc)) from exc
    try:
        result = orderfind.factor(req.N, config)
    except (orderfind.EvenInput, orderfind.NotComposite, orderfind.PrimePower) as exc:
        raise _error(422, "precondition", str(exc)) from exc
    except orderfind.AttemptCapExceeded as exc:
        raise _error(422, "precondition", str(exc)) from exc

    n_circuit = len(result.records)
    rate = (
        sum(r.order_recovered for r in result.records) / n_circuit if n_circuit else 0.0
    )
    bound = None
    if req.a is not None:
        p, fq = result.factors
        if numtheory.is_prime(p) and numtheory.is_prime(fq):
            bound = analysis.success_lower_bound(req.N, p, fq, req.a)
    records = None
    if req.include_records:
        records = [
            schemas.AttemptSummary(
                a=r.a,
                c=r.c,
                order_candidate=r.order_candidate,
                order_recovered=r.order_recovered,
                factors=r.factors,
            )
            for r in result.records
        ]
    return schemas.FactorResponse(
        N=req.N,
        factors=result.factors,
        attempts_used=result.attempts_used,
        trivial_gcd=result.trivial_gcd,
        order_recovery_rate=rate,
        success_bound=bound,
        records=records,
        seed=req.seed,
        config_hash=schemas.config_hash(req),
        version=__version__,
    )


@app.post("/analyze", response_model=schemas.AnalyzeResponse)
def analyze(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
    g = math.gcd(req.a, req.N)
    if g > 1:
        raise _error(409, "trivial_factor", f"gcd({req.a}, {req.N}) = {g} is a free factor", gcd=g)
    factors = numtheory.factorize(req.N)
    primes = sorted(factors)
    if len(primes) != 2 or any(factors[p] != 1 for p in primes):
        raise _error(422, "precondition", f"{req.N} is not a product of two distinct primes")
    p, q = primes
    t = req.t or orderfind.default_t(req.N)
    try:
        dist = analysis.exact_distribution(req.N, req.a, t)
    except analysis.BadT as exc:
        raise _error(422, "precondition", str(exc)) from exc
    report = analysis.counting_report(req.N, p, q, req.a)
    return schemas.AnalyzeResponse(
        N=req.N,
        a=req.a,
        p=p,
        q=q,
        t=t,
        r=report.r,
        chi=report.chi,
        chi_closed_form=report.chi_closed_form,
        num_c=report.num_c,
        usable_pairs=report.usable_pairs,
        success_bound=report.success_bound,
        single_register_rate=report.single_register_rate,
        pair_rate=report.pair_rate,
        parker_plenio_pair_rate=analysis.parker_plenio_relation(report.single_register_rate),
        slow_orbit_elements=report.slow_orbit_elements,
        slow_orbit_ceiling_ok=report.slow_orbit_ceiling_ok,
        distribution=[float(x) for x in dist.probabilities],
        config_hash=schemas.config_hash(req),
        version=__version__,
    )


@app.post("/verify", response_model=schemas.VerifyResponse)
def verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    results = checks.run_checks(
        quick=req.quick,
        break_phase_invariance=req.break_phase_invariance,
        seed=req.seed,
    )
    return schemas.VerifyResponse(
        passed=all(bool(r.passed) for r in results),
        results=[
            schemas.CheckResultModel(name=r.name, passed=bool(r.passed), detail=r.detail)
            for r in results
        ],
        seed=req.seed,
        config_hash=schemas.config_hash(req),
        version=__version__,
    )
