"""
Trispin: Pulse Sequence Router

- Build a named sequence (wire JSON schema)
- Evolve an uploaded sequence into its propagator
"""

from typing import Optional

from fastapi import APIRouter, Query

from dynamics import evolve
from models import SequenceName
from schemas import EvolveOut, EvolveRequest, PulseSequence, SpinSystem
from sequences import build_named

router = APIRouter(prefix="/api/sequences", tags=["Pulse Sequences"])


@router.post("/evolve", response_model=EvolveOut)
def evolve_sequence(body: EvolveRequest):
    """Propagator of an arbitrary sequence on the J-coupled chain."""
    prop = evolve(body.sequence, SpinSystem.chain(body.sequence.n, body.J))
    return EvolveOut(
        label=body.sequence.label,
        duration_s=prop.duration,
        unitarity_error=prop.unitarity_error(),
        matrix=[[[z.real, z.imag] for z in row] for row in prop.matrix.tolist()],
    )


@router.get("/{name}", response_model=PulseSequence)
def get_sequence(
    name: SequenceName,
    theta: Optional[float] = Query(None, description="angle in radians"),
    kappa: Optional[float] = Query(None, description="angle as θ/2π"),
    J: float = Query(1.0, description="coupling in Hz"),
    axes: str = Query("zzz", pattern=r"^[xyz]{3}$"),
    xy_only: bool = False,
):
    return build_named(name, theta=theta, kappa=kappa, J=J, axes=axes, xy_only=xy_only)
