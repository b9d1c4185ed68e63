"""
Trispin: Pydantic Schemas for Domain Records and Wire Formats

All records are frozen. Field names of the pulse-sequence models are the
JSON sequence schema:

    {"n": 3, "label": str, "events": [
        {"type": "hard", "spin": int, "axis": "x|y|z", "angle": float},
        {"type": "delay", "duration": float, "off_pairs": [[i, j], ...]},
        {"type": "shaped", "duration": float,
         "rf": [{"spin": int, "axis": "x|y", "amp_hz": float}]}]}
"""

import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import FIDELITY_TOL, MAX_SPINS, RESIDUAL_TOL
from errors import SequenceFormatError, SpinIndexError
from models import Axis, SequenceName, TargetName


# ──────────────────────────────────────────────────────────────────
# Product-operator Schemas
# ──────────────────────────────────────────────────────────────────

class ProductOperatorTerm(BaseModel):
    """coefficient · 2^(q-1) · Π I_{k,factor_k}; identity factors are skipped."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, le=MAX_SPINS)
    factors: tuple[Axis, ...]
    coefficient: float = 1.0

    @model_validator(mode="after")
    def check_length(self):
        if len(self.factors) != self.n:
            raise ValueError(f"expected {self.n} factors, got {len(self.factors)}")
        return self

    @property
    def q(self) -> int:
        return sum(1 for f in self.factors if f != Axis.IDENTITY)


class OperatorSum(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, le=MAX_SPINS)
    terms: tuple[ProductOperatorTerm, ...] = ()

    @model_validator(mode="after")
    def check_spin_count(self):
        for term in self.terms:
            if term.n != self.n:
                raise ValueError(f"term over {term.n} spins in a sum over {self.n}")
        return self


# ──────────────────────────────────────────────────────────────────
# Spin System Schemas
# ──────────────────────────────────────────────────────────────────

class SpinSystem(BaseModel):
    """Couplings J_ij and offsets in Hz; offsets are zero in the rotating frame."""

    model_config = ConfigDict(frozen=True)

    couplings: tuple[tuple[float, ...], ...]
    offsets: Optional[tuple[float, ...]] = None

    @model_validator(mode="after")
    def check_couplings(self):
        n = len(self.couplings)
        if not 1 <= n <= MAX_SPINS:
            raise ValueError(f"a spin system has 1..{MAX_SPINS} spins, got {n}")
        for i, row in enumerate(self.couplings):
            if len(row) != n:
                raise ValueError("coupling matrix must be square")
            if row[i] != 0.0:
                raise ValueError(f"J_{i + 1}{i + 1} must be zero")
            for j in range(n):
                if row[j] != self.couplings[j][i]:
                    raise ValueError(f"coupling matrix not symmetric at ({i + 1},{j + 1})")
        if self.offsets is not None and len(self.offsets) != n:
            raise ValueError(f"expected {n} offsets, got {len(self.offsets)}")
        return self

    @classmethod
    def chain(cls, n: int = 3, J: float = 1.0) -> "SpinSystem":
        """Linear chain with equal nearest-neighbour couplings (J_13 = 0 at n = 3)."""
        rows = [[0.0] * n for _ in range(n)]
        for i in range(n - 1):
            rows[i][i + 1] = rows[i + 1][i] = float(J)
        return cls(couplings=tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.couplings)

    def offset(self, k: int) -> float:
        return 0.0 if self.offsets is None else self.offsets[k - 1]

    def coupled_pairs(self) -> list[tuple[int, int, float]]:
        """(i, j, J_ij) for i < j with J_ij != 0, 1-based."""
        return [
            (i + 1, j + 1, self.couplings[i][j])
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.couplings[i][j] != 0.0
        ]


class RfField(BaseModel):
    """Control term 2π · amp_hz · I_{spin,axis}."""

    model_config = ConfigDict(frozen=True)

    spin: int = Field(..., ge=1)
    axis: Literal["x", "y"]
    amp_hz: float = Field(..., allow_inf_nan=False)


# ──────────────────────────────────────────────────────────────────
# Pulse Sequence Schemas
# ──────────────────────────────────────────────────────────────────

class HardPulse(BaseModel):
    """Ideal zero-duration rotation exp(-i · angle · I_{spin,axis})."""

    model_config = ConfigDict(frozen=True)

    type: Literal["hard"] = "hard"
    spin: int = Field(..., ge=1)
    axis: Literal["x", "y", "z"]
    angle: float = Field(..., allow_inf_nan=False)

    @property
    def duration(self) -> float:
        return 0.0

    def spins(self) -> set[int]:
        return {self.spin}


class Delay(BaseModel):
    """Free evolution under the drift with the couplings in off_pairs omitted."""

    model_config = ConfigDict(frozen=True)

    type: Literal["delay"] = "delay"
    duration: float = Field(..., ge=0.0, allow_inf_nan=False)
    off_pairs: tuple[tuple[int, int], ...] = ()

    @field_validator("off_pairs")
    @classmethod
    def normalize_pairs(cls, pairs):
        normalized = set()
        for i, j in pairs:
            if i == j:
                raise ValueError(f"coupling pair ({i},{j}) must join two spins")
            if min(i, j) < 1:
                raise ValueError(f"spin indices are 1-based, got ({i},{j})")
            normalized.add((min(i, j), max(i, j)))
        return tuple(sorted(normalized))

    def spins(self) -> set[int]:
        return {k for pair in self.off_pairs for k in pair}


class ShapedEvolution(BaseModel):
    """Evolution under the full drift plus constant rf fields."""

    model_config = ConfigDict(frozen=True)

    type: Literal["shaped"] = "shaped"
    duration: float = Field(..., ge=0.0, allow_inf_nan=False)
    rf: tuple[RfField, ...] = ()

    def spins(self) -> set[int]:
        return {f.spin for f in self.rf}


PulseEvent = Annotated[Union[HardPulse, Delay, ShapedEvolution], Field(discriminator="type")]


class PulseSequence(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, le=MAX_SPINS)
    label: str = ""
    events: tuple[PulseEvent, ...] = ()
    # Construction notes (e.g. resolved geodesic sign); not part of the wire schema
    meta: dict[str, Union[float, str]] = Field(default_factory=dict, exclude=True)

    @model_validator(mode="after")
    def check_spins(self):
        for index, event in enumerate(self.events):
            bad = sorted(k for k in event.spins() if k > self.n)
            if bad:
                raise SpinIndexError(
                    f"event {index} ({event.type}) references spin {bad[0]} in a {self.n}-spin sequence"
                )
        return self

    @property
    def duration(self) -> float:
        return math.fsum(event.duration for event in self.events)

    def concat(self, *others: "PulseSequence", label: Optional[str] = None) -> "PulseSequence":
        events = list(self.events)
        meta = dict(self.meta)
        for other in others:
            if other.n != self.n:
                raise SpinIndexError(f"cannot concatenate {other.n}-spin sequence onto {self.n}-spin sequence")
            events.extend(other.events)
            meta.update(other.meta)
        return PulseSequence(n=self.n, label=self.label if label is None else label, events=tuple(events), meta=meta)

    def to_json(self, indent: Optional[int] = 2) -> str:
        return self.model_dump_json(indent=indent)

    @classmethod
    def from_json(cls, text: Union[str, bytes]) -> "PulseSequence":
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise SequenceFormatError(f"malformed pulse sequence: {e.error_count()} error(s): {e.errors()[0]['msg']}") from e
        except SpinIndexError as e:
            raise SequenceFormatError(f"malformed pulse sequence: {e}") from e


class GeodesicParams(BaseModel):
    """Closed-form parameters of the time-optimal trilinear sequence."""

    model_config = ConfigDict(frozen=True)

    theta: float
    J: float
    kappa: float
    beta: float
    T: float
    nu_rf: float


# ──────────────────────────────────────────────────────────────────
# Verification Schemas
# ──────────────────────────────────────────────────────────────────

class VerificationReport(BaseModel):
    """passed ⇔ achieved ≥ target_fidelity and every residual ≤ its tolerance.

    Residual-only checks carry neutral fidelity fields (achieved 1, target 0).
    """

    model_config = ConfigDict(frozen=True)

    label: str
    passed: bool
    achieved: float = 1.0
    target_fidelity: float = 0.0
    duration_s: float = 0.0
    residuals: dict[str, float] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)
    tolerances: dict[str, float] = Field(default_factory=dict, exclude=True)

    @model_validator(mode="before")
    @classmethod
    def fill_passed(cls, data):
        if isinstance(data, dict) and "passed" not in data:
            residuals = data.get("residuals") or {}
            tolerances = data.get("tolerances") or {}
            achieved = data.get("achieved", 1.0)
            target = data.get("target_fidelity", 0.0)
            ok = achieved >= target
            for name, value in residuals.items():
                ok = ok and value <= tolerances.get(name, RESIDUAL_TOL)
            data = {**data, "passed": bool(ok)}
        return data


class DurationRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    tau_conventional_s: float
    tau_geodesic_s: float
    ratio: float

    @model_validator(mode="before")
    @classmethod
    def fill_ratio(cls, data):
        if isinstance(data, dict) and "ratio" not in data:
            data = {**data, "ratio": data["tau_geodesic_s"] / data["tau_conventional_s"]}
        return data


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa: float
    t_conventional: float
    t_improved: float
    t_optimal: float


# ──────────────────────────────────────────────────────────────────
# Service Request / Response Schemas
# ──────────────────────────────────────────────────────────────────

class EvolveRequest(BaseModel):
    sequence: PulseSequence
    J: float = 1.0


class EvolveOut(BaseModel):
    label: str
    duration_s: float
    unitarity_error: float
    # [re, im] pairs, row-major
    matrix: list[list[list[float]]]


class VerifyRequest(BaseModel):
    sequence: Optional[PulseSequence] = None
    builtin: Optional[SequenceName] = None
    target: Optional[TargetName] = None
    # Textual product-operator term, e.g. "0.25 I1z I2z I3z"; target is exp(-iθ·term)
    term: Optional[str] = None
    theta: Optional[float] = None
    kappa: Optional[float] = None
    axes: str = Field(default="zzz", pattern=r"^[xyz]{3}$")
    J: float = 1.0
    tol: float = FIDELITY_TOL

    @model_validator(mode="after")
    def check_source(self):
        if (self.sequence is None) == (self.builtin is None):
            raise ValueError("supply exactly one of 'sequence' or 'builtin'")
        if (self.target is None) == (self.term is None):
            raise ValueError("supply exactly one of 'target' or 'term'")
        if self.theta is not None and self.kappa is not None:
            raise ValueError("'theta' and 'kappa' are mutually exclusive")
        return self
