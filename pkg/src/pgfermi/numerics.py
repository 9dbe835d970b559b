"""Small dense complex linear algebra used by every other module.

All operators and states are plain ``numpy`` arrays of ``complex128``.
Dimensions never exceed 17, so nothing here tries to be clever.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateNullspace,
    InputError,
    NoNullspace,
    ShapeMismatch,
    Singular,
)

__all__ = [
    "Tolerance", "DEFAULT_TOL", "default_tolerance", "as_matrix",
    "nullspace_1d", "invert", "approx_equal", "max_abs", "mpow",
    "dag", "abs_product", "commutator", "matrix_to_json", "matrix_from_json",
    "vector_to_json", "vector_from_json", "scalar_to_json", "scalar_from_json",
]

#: minimum ratio sigma_next / sigma_min before a 1-d nullspace is accepted
NULLSPACE_GAP = 1e6
#: condition-number bound above which :func:`invert` refuses
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative tolerance: ``abs + rel * scale``."""

    abs: float = 1e-10
    rel: float = 1e-10

    def __post_init__(self):
        if self.abs < 0 or self.rel < 0:
            raise InputError("tolerance components must be non-negative")
        if self.abs == 0 and self.rel == 0:
            raise InputError("tolerance needs abs > 0 or rel > 0")

    def bound(self, scale: float = 0.0) -> float:
        return self.abs + self.rel * scale

    @classmethod
    def parse(cls, text: str) -> "Tolerance":
        """Parse ``"1e-9"`` (both parts) or ``"1e-9,1e-12"`` (abs,rel)."""
        parts = [p.strip() for p in str(text).split(",") if p.strip()]
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise InputError(f"bad tolerance {text!r}") from exc
        if len(vals) == 1:
            return cls(vals[0], vals[0])
        if len(vals) == 2:
            return cls(vals[0], vals[1])
        raise InputError(f"bad tolerance {text!r}")


DEFAULT_TOL = Tolerance()


def default_tolerance() -> Tolerance:
    """The default tolerance, overridden by ``PGFERMI_TOL`` when set."""
    env = os.environ.get("PGFERMI_TOL")
    return Tolerance.parse(env) if env else DEFAULT_TOL


def as_matrix(m) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix contains NaN or Inf")
    return arr


def max_abs(m) -> float:
    """Max-entry norm; 0 for empty input."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def mpow(m: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(np.asarray(m, dtype=complex), k)


def abs_product(*mats) -> np.ndarray:
    """|M1| |M2| ... : the componentwise scale that bounds rounding in M1 M2 ..."""
    out = np.abs(np.asarray(mats[0]))
    for m in mats[1:]:
        out = out @ np.abs(np.asarray(m))
    return out


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def nullspace_1d(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unit vector spanning the (exactly one-dimensional) nullspace of ``m``.

    The returned vector's phase is fixed so that its largest-magnitude
    component is real and positive, which makes the result reproducible.

    Raises
    ------
    NoNullspace
        The smallest singular value exceeds ``tol.bound(||m||)``.
    DegenerateNullspace
        Two or more singular values are small, or the gap between the two
        smallest is below ``NULLSPACE_GAP``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch("nullspace_1d needs a square matrix")
    _, s, vh = np.linalg.svd(m)
    norm = s[0] if s.size else 0.0
    thresh = tol.bound(norm)
    if s[-1] > thresh:
        raise NoNullspace(f"smallest singular value {s[-1]:.3e} > {thresh:.3e}")
    if s.size > 1 and (s[-2] <= thresh or s[-2] < NULLSPACE_GAP * s[-1]):
        raise DegenerateNullspace(
            f"two small singular values: {s[-2]:.3e}, {s[-1]:.3e}")
    v = np.conj(vh[-1])
    j = int(np.argmax(np.abs(v)))
    v = v * (abs(v[j]) / v[j])
    return v / np.linalg.norm(v)


def invert(m, max_condition: float = MAX_CONDITION) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch("invert needs a square matrix")
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > max_condition:
        raise Singular(f"condition number {cond:.3e} exceeds {max_condition:.1e}")
    return np.linalg.inv(m)


def approx_equal(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    return max_abs(a - b) <= tol.bound(max(max_abs(a), max_abs(b)))


# JSON encodings: {"rows": m, "cols": k, "data": [[re, im], ...]} row-major.
# Vectors are encoded as single-column matrices.

def scalar_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def scalar_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    raise InputError(f"bad scalar encoding {obj!r}")


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return {"rows": m.shape[0], "cols": m.shape[1],
            "data": [scalar_to_json(z) for z in m.ravel()]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad matrix encoding: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise ShapeMismatch(
            f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    vals = np.array([scalar_from_json(z) for z in data], dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise InputError("matrix contains NaN or Inf")
    return vals.reshape(rows, cols)


def vector_to_json(v) -> dict:
    return matrix_to_json(np.asarray(v).reshape(-1, 1))


def vector_from_json(obj) -> np.ndarray:
    m = matrix_from_json(obj)
    if m.shape[1] != 1 and m.shape[0] != 1:
        raise ShapeMismatch("vector must be a single row or column")
    return m.ravel()
