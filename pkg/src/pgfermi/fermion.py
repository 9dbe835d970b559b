"""Hermitian nonlinear n-fermions.

The annihilation operator of degree ``n`` satisfies

    A A^dag + (A^dag)^n A^n = 1,

and is realized on C^{n+1} as the superdiagonal shift with vacuum ``e_0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeOutOfRange
from .numerics import (DEFAULT_TOL, Tolerance, commutator, dag, matrix_to_json,
                       max_abs, mpow, vector_to_json)
from .report import VerificationReport

MAX_DEGREE = 16


def check_degree(n: int, lo: int = 1, hi: int = MAX_DEGREE) -> int:
    if int(n) != n or not lo <= n <= hi:
        raise DegreeOutOfRange(f"degree n={n} outside [{lo}, {hi}]")
    return int(n)


@dataclass(frozen=True, eq=False)
class FermionAlgebra:
    n: int
    A: np.ndarray
    fock: tuple
    N: np.ndarray

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def Adag(self) -> np.ndarray:
        return dag(self.A)

    def parity(self) -> np.ndarray:
        return np.diag([(-1.0) ** k for k in range(self.dim)]).astype(complex)

    def to_json(self) -> dict:
        return {"n": self.n, "A": matrix_to_json(self.A),
                "fock": [vector_to_json(v) for v in self.fock]}


def shift_matrix(dim: int) -> np.ndarray:
    return np.eye(dim, k=1, dtype=complex)


def build_fermion(n: int) -> FermionAlgebra:
    n = check_degree(n)
    A = shift_matrix(n + 1)
    vac = np.zeros(n + 1, dtype=complex)
    vac[0] = 1.0
    fock = tuple(mpow(dag(A), k) @ vac for k in range(n + 1))
    N = sum(mpow(dag(A), k) @ mpow(A, k) for k in range(1, n + 1))
    return FermionAlgebra(n, A, fock, N)


def fermion_number_operator(alg: FermionAlgebra) -> np.ndarray:
    """N = sum_{k=1}^{n} (A^dag)^k A^k."""
    Ad = dag(alg.A)
    return sum(mpow(Ad, k) @ mpow(alg.A, k) for k in range(1, alg.n + 1))


def verify_fermion(alg: FermionAlgebra, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Residuals of every defining n-fermion identity for ``alg``."""
    n, A = alg.n, np.asarray(alg.A, dtype=complex)
    Ad = dag(A)
    eye = np.eye(n + 1)
    N = fermion_number_operator(alg)
    th = tol.bound(1.0)
    rep = VerificationReport()
    rep.add("anticommutation", max_abs(A @ Ad + mpow(Ad, n) @ mpow(A, n) - eye), th,
            "A A^dag + A^dag^n A^n = 1")
    rep.add("nilpotency", max_abs(mpow(A, n + 1)), th, "A^{n+1} = 0")
    lower = max_abs([A @ alg.fock[0]] + [A @ alg.fock[k] - alg.fock[k - 1]
                                          for k in range(1, n + 1)])
    raise_ = max_abs([Ad @ alg.fock[k] - alg.fock[k + 1] for k in range(n)])
    rep.add("ladder_lowering", lower, th, "A|k> = |k-1>")
    rep.add("ladder_raising", raise_, th, "A^dag|k> = |k+1>")
    gram = np.array([[np.vdot(u, v) for v in alg.fock] for u in alg.fock])
    rep.add("fock_orthonormal", max_abs(gram - eye), th, "<j|k> = delta_jk")
    rep.add("number_eigen", max_abs([N @ alg.fock[k] - k * alg.fock[k]
                                     for k in range(n + 1)]), th, "N|k> = k|k>")
    rep.add("commutator_A", max_abs(commutator(A, N) - A), th, "[A, N] = A")
    rep.add("commutator_Adag", max_abs(commutator(Ad, N) + Ad), th, "[A^dag, N] = -A^dag")
    return rep
