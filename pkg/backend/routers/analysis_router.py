"""
Trispin: Duration Analysis Router
"""

from fastapi import APIRouter, Query
from fastapi.responses import Response

from analysis import duration_table, sweep, sweep_to_csv
from config import DEFAULT_SWEEP_POINTS
from schemas import DurationRow

router = APIRouter(prefix="/api/analysis", tags=["Analysis"])


@router.get("/table1", response_model=list[DurationRow])
def table1(J: float = Query(1.0), kappa: float = Query(1.0)):
    return duration_table(J, kappa)


@router.get("/sweep")
def sweep_csv(
    kappa_min: float = Query(0.0),
    kappa_max: float = Query(2.0),
    n_points: int = Query(DEFAULT_SWEEP_POINTS),
    J: float = Query(1.0),
):
    rows = sweep(kappa_min, kappa_max, n_points, J)
    return Response(content=sweep_to_csv(rows), media_type="text/csv")
