"""
Trispin: Enumerations

- Axis: spin-operator axes (identity only inside product-operator factors)
- SequenceName: built-in pulse sequences
- TargetName: built-in target propagators
- OutputFormat: CLI output formats
- ExitCode: stable CLI exit-code contract
"""

import enum


# ──────────────────────────────────────────────────────────────────
# Enums
# ──────────────────────────────────────────────────────────────────

class Axis(str, enum.Enum):
    IDENTITY = "identity"
    X = "x"
    Y = "y"
    Z = "z"


# Basis enumeration order: identity < x < y < z
AXIS_ORDER = (Axis.IDENTITY, Axis.X, Axis.Y, Axis.Z)
SPIN_AXES = (Axis.X, Axis.Y, Axis.Z)


class SequenceName(str, enum.Enum):
    CONVENTIONAL = "conventional"
    IMPROVED = "improved"
    GEODESIC = "geodesic"
    TRILINEAR = "trilinear"
    VF = "vf"
    SWAP13 = "swap13"


class TargetName(str, enum.Enum):
    TRILINEAR = "trilinear"
    VF = "vf"
    SWAP13 = "swap13"
    LAMBDA2 = "lambda2"


class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class ExitCode(enum.IntEnum):
    OK = 0
    VERIFICATION_FAILED = 1
    USAGE = 2
    IO_FORMAT = 3
