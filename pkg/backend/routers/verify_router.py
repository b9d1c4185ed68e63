"""
Trispin: Verification Router
"""

from typing import Optional

from fastapi import APIRouter, Query

from config import FIDELITY_TOL, settings
from schemas import SpinSystem, VerificationReport, VerifyRequest
from selftest import run_selftest
from sequences import build_named
from verify import verify_against

router = APIRouter(prefix="/api/verify", tags=["Verification"])


@router.post("", response_model=VerificationReport)
def verify(body: VerifyRequest):
    """Verify an uploaded or built-in sequence against a built-in target or a textual term."""
    seq = body.sequence
    if seq is None:
        seq = build_named(body.builtin, theta=body.theta, kappa=body.kappa, J=body.J, axes=body.axes)
    system = SpinSystem.chain(seq.n, body.J)
    return verify_against(seq, system, body.target, body.theta, body.kappa, body.axes, body.tol, body.term)


@router.get("/selftest", response_model=list[VerificationReport])
def selftest(
    seed: Optional[int] = Query(None, description="defaults to TRISPIN_SEED"),
    tol: float = Query(FIDELITY_TOL),
):
    return run_selftest(settings.SEED if seed is None else seed, tol=tol)
