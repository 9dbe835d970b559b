"""Ladder-operator coherent states with para-Grassmann eigenvalues.

Four families per system:

=========  ==========================================  ===================
family     raw state                                   eigen-equation
=========  ==========================================  ===================
right      sum_k (-1)^k zeta^k |psi_k>                  a s = s zeta
left       sum_k (-1)^{[(k+1)/2]} zeta^k |psi_k>        a s = zeta s
right'     sum_k (-1)^k zeta^k |phi_k>                  b^dag s = s zeta
left'      sum_k (-1)^{[(k+1)/2]} zeta^k |phi_k>        b^dag s = zeta s
=========  ==========================================  ===================

Unprimed states live in the context graded by ``P``; primed states and the
bras of unprimed states live in the adjoint context graded by ``P^dag``.
Each normalized state carries one factor ``sqrt(1 - zeta* zeta)`` on the
left.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .numerics import DEFAULT_TOL, Tolerance, dag, max_abs
from .paragrassmann import (PGContext, PGElement, constant, monomial,
                            pg_adjoint, pg_integrate, pg_mul, pg_scalar,
                            pg_sqrt_even, zeta, zeta_star)
from .pseudofermion import CandidatePair, PseudoFermionSystem, build_system
from .report import VerificationReport, scale_of

SIDES = ("right", "left")


def cs_signs(n: int, side: str) -> list[int]:
    if side == "right":
        return [(-1) ** k for k in range(n + 1)]
    if side == "left":
        return [(-1) ** ((k + 1) // 2) for k in range(n + 1)]
    raise InputError(f"side must be 'right' or 'left', not {side!r}")


def pg_context(sys: PseudoFermionSystem, primed: bool = False) -> PGContext:
    """Context graded by the system parity (``P^dag`` for primed objects)."""
    ctx = sys.__dict__.get("_pg_context")
    if ctx is None:
        ctx = PGContext(sys.n, sys.P)
        object.__setattr__(sys, "_pg_context", ctx)
    return ctx.adjoint() if primed else ctx


def norm_factor(ctx: PGContext) -> PGElement:
    """sqrt(1 - zeta* zeta)."""
    return pg_sqrt_even(pg_scalar(ctx) - pg_mul(zeta_star(ctx), zeta(ctx)))


@dataclass(frozen=True, eq=False)
class CoherentFamily:
    sys: PseudoFermionSystem
    side: str
    primed: bool
    raw: PGElement
    normalized: PGElement
    norm_factor: PGElement

    @property
    def context(self) -> PGContext:
        return self.raw.context

    @property
    def lowering(self) -> np.ndarray:
        """The operator this family diagonalizes: ``a`` or ``b^dag``."""
        return dag(self.sys.b) if self.primed else self.sys.a


def ladder_cs(sys: PseudoFermionSystem, side: str = "right",
              primed: bool = False) -> CoherentFamily:
    ctx = pg_context(sys, primed)
    basis = sys.phi if primed else sys.psi
    terms = {(k, 0): c * basis[k] for k, c in enumerate(cs_signs(sys.n, side))}
    raw = PGElement(ctx, "vector", terms)
    nf = norm_factor(ctx)
    return CoherentFamily(sys, side, primed, raw, pg_mul(nf, raw), nf)


def fermion_cs(n: int, side: str = "right", normalized: bool = True) -> PGElement:
    """n-fermion coherent state on the standard Fock basis.

    Built directly from the diagonal parity, independent of any
    pseudo-fermion machinery.
    """
    ctx = PGContext.diagonal(n)
    eye = np.eye(n + 1, dtype=complex)
    raw = PGElement(ctx, "vector",
                    {(k, 0): c * eye[k] for k, c in enumerate(cs_signs(n, side))})
    return pg_mul(norm_factor(ctx), raw) if normalized else raw


def eigen_residual(fam: CoherentFamily, use_normalized: bool = False) -> PGElement:
    """``X s - s zeta`` (right) or ``X s - zeta s`` (left)."""
    ctx = fam.context
    state = fam.normalized if use_normalized else fam.raw
    lhs = pg_mul(constant(ctx, fam.lowering, "operator"), state)
    z = zeta(ctx)
    rhs = pg_mul(state, z) if fam.side == "right" else pg_mul(z, state)
    return lhs - rhs


def resolution_kernel(sys: PseudoFermionSystem, side: str = "right") -> PGElement:
    """``|zeta>'_side  <zeta|_side`` with both states normalized."""
    ket = ladder_cs(sys, side, primed=True).normalized
    bra = pg_adjoint(ladder_cs(sys, side, primed=False).normalized)
    return pg_mul(ket, bra)


def resolution_defect(sys: PseudoFermionSystem, side: str = "right") -> np.ndarray:
    """``int dzeta* dzeta |zeta>' <zeta| - 1``."""
    return pg_integrate(resolution_kernel(sys, side)) - np.eye(sys.dim)


@dataclass(frozen=True, eq=False)
class NormalizationReport:
    pairing: PGElement
    defect_by_bidegree: dict
    off_diagonal: float
    #: same pairing with one sqrt(1 - zeta* zeta) between raw bra and ket,
    #: i.e. the convention N_i N_i' = sqrt(1 - zeta* zeta)
    single_factor_defects: dict

    def deviating_bidegrees(self, atol: float = 1e-12) -> list[tuple[int, int]]:
        return [key for key, d in self.defect_by_bidegree.items() if abs(d) > atol]

    def to_json(self) -> dict:
        return {"pairing": self.pairing.to_json(),
                "defect_by_bidegree": [{"i": i, "k": k, "defect": [d.real, d.imag]}
                                       for (i, k), d in self.defect_by_bidegree.items()],
                "off_diagonal": self.off_diagonal,
                "single_factor_defects": [
                    {"i": i, "k": k, "defect": [d.real, d.imag]}
                    for (i, k), d in self.single_factor_defects.items()]}


def _defects(pairing: PGElement) -> dict:
    return {(k, k): complex(pairing.coeff(k, k)) - (1.0 if k == 0 else 0.0)
            for k in range(pairing.n + 1)}


def binormalization_report(sys: PseudoFermionSystem, side: str = "right") -> NormalizationReport:
    """Bi-pairing ``<zeta|zeta>'`` of the normalized states, minus 1 per bidegree."""
    unprimed = ladder_cs(sys, side, primed=False)
    primed = ladder_cs(sys, side, primed=True)
    pairing = pg_mul(pg_adjoint(unprimed.normalized), primed.normalized)
    off = max((abs(complex(c)) for (i, k), c in pairing.terms.items() if i != k),
              default=0.0)
    single = pg_mul(pg_mul(pg_adjoint(unprimed.raw), primed.norm_factor), primed.raw)
    return NormalizationReport(pairing, _defects(pairing), off, _defects(single))


def solve_integration_weights(n: int, side: str = "right") -> np.ndarray:
    """Weights ``w_k`` forced by ``sum_k w_k [kernel]_{kk} = 1``.

    The kernel is the Hermitian n-fermion one, so this is independent of the
    closed-form weights.  Raises if the linear system is not uniquely
    solvable.
    """
    sys = build_system(CandidatePair.hermitian(n))
    kernel = resolution_kernel(sys, side)
    d = n + 1
    A = np.column_stack([kernel.coeff(k, k).ravel() for k in range(d)])
    target = np.eye(d, dtype=complex).ravel()
    w, _, rank, _ = np.linalg.lstsq(A, target, rcond=None)
    if rank < d:
        raise InputError(f"integration weights not unique at n={n} (rank {rank})")
    if max_abs(A @ w - target) > 1e-9:
        raise InputError(f"no integration weights resolve the identity at n={n}")
    return w.real


def verify_coherent(sys: PseudoFermionSystem, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Eigen-equations of all families and both resolutions of identity."""
    th = tol.bound(1.0)
    loose = max(th, 1e-9)
    rep = VerificationReport()
    for side in SIDES:
        for primed in (False, True):
            fam = ladder_cs(sys, side, primed)
            tag = f"{side}{'_primed' if primed else ''}"
            op = "b^dag" if primed else "a"
            eq = f"{op} s = s zeta" if side == "right" else f"{op} s = zeta s"
            scale = scale_of(fam.lowering) * fam.raw.max_abs()
            rep.add(f"cs_eigen_{tag}", eigen_residual(fam).max_abs(), th, eq, scale)
            if side == "right":
                rep.add(f"cs_eigen_{tag}_normalized",
                        eigen_residual(fam, True).max_abs(), th, eq, scale)
        kernel = resolution_kernel(sys, side)
        rep.add(f"resolution_{side}", max_abs(pg_integrate(kernel) - np.eye(sys.dim)),
                loose, "int dzeta* dzeta |zeta>' <zeta| = 1", kernel.max_abs())
    return rep
