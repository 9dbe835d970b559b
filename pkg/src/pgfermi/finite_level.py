"""Finite-level non-Hermitian Hamiltonians and their pseudo-fermion ladders.

Given non-degenerate levels ``eps_k`` with (non-orthogonal) eigenvectors
``psi_k``, the Hamiltonian is ``H = sum_k eps_k |psi_k><phi_k|`` where the
``phi_k`` are the bi-orthogonal duals.  Weighted ladder operators

    a(rho) = sum_k sqrt(rho_k) |psi_k><phi_{k+1}|
    b(rho) = sum_k sqrt(rho_k) |psi_{k+1}><phi_k|

reduce to n-pseudo-fermion operators at unit weight and factorize ``H``
when ``rho_k = eps_{k+1} - eps_0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateSpectrum, FactorizationFailure, InputError,
                     ReconstructionFailure, Singular, SingularBasis,
                     WeightLengthMismatch)
from .fermion import check_degree
from .numerics import (DEFAULT_TOL, Tolerance, abs_product, as_matrix,
                       commutator, dag, invert, matrix_from_json,
                       matrix_to_json, max_abs, mpow, scalar_from_json,
                       scalar_to_json)
from .pseudofermion import CandidatePair, pf_number_operator
from .report import VerificationReport, scale_of


@dataclass(frozen=True, eq=False)
class FiniteLevelSystem:
    n: int
    eps: np.ndarray
    Psi: np.ndarray
    Phi: np.ndarray
    H: np.ndarray

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def eta(self) -> np.ndarray:
        """Metric sum_k |phi_k><phi_k|."""
        return self.Phi @ dag(self.Phi)

    def to_json(self) -> dict:
        return {"eps": [scalar_to_json(e) for e in self.eps],
                "Psi": matrix_to_json(self.Psi)}

    @classmethod
    def from_json(cls, obj: dict, tol: Tolerance = DEFAULT_TOL) -> "FiniteLevelSystem":
        try:
            eps = [scalar_from_json(e) for e in obj["eps"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad FiniteLevelSystem encoding: {exc}") from exc
        Psi = matrix_from_json(obj["Psi"]) if "Psi" in obj else np.eye(len(eps))
        return from_spectrum(eps, Psi, tol)


@dataclass(frozen=True)
class LadderWeights:
    rho: tuple
    sigma: tuple
    q: complex | None = None

    @classmethod
    def from_rho(cls, rho, q=None) -> "LadderWeights":
        rho = tuple(complex(r) for r in rho)
        return cls(rho, tuple(complex(np.sqrt(r)) for r in rho), q)

    @classmethod
    def unit(cls, n: int) -> "LadderWeights":
        return cls.from_rho([1.0] * n)


def from_spectrum(eps, Psi, tol: Tolerance = DEFAULT_TOL) -> FiniteLevelSystem:
    eps = np.asarray(eps, dtype=complex).ravel()
    Psi = as_matrix(Psi)
    n = check_degree(len(eps) - 1)
    if Psi.shape != (n + 1, n + 1):
        raise InputError(f"Psi must be {n + 1}x{n + 1}, got {Psi.shape}")
    gaps = np.abs(eps[:, None] - eps[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) <= tol.bound(max_abs(eps)):
        raise DegenerateSpectrum("energy levels must be pairwise distinct")
    try:
        Psi_inv = invert(Psi)
    except Singular as exc:
        raise SingularBasis(str(exc)) from exc
    Phi = dag(Psi_inv)
    H = Psi @ np.diag(eps) @ Psi_inv
    return FiniteLevelSystem(n, eps, Psi, Phi, H)


def q_weights(n: int) -> LadderWeights:
    """rho_k = [[k+1]]_q = (q^{k+1} - q^{-k-1}) / (q - 1/q), q = exp(i pi / (n+1))."""
    n = check_degree(n)
    q = np.exp(1j * np.pi / (n + 1))
    rho = [((q ** (k + 1) - q ** -(k + 1)) / (q - 1 / q)).real for k in range(n)]
    return LadderWeights(tuple(complex(r) for r in rho),
                         tuple(complex(np.sqrt(r)) for r in rho), complex(q))


def general_ladder(sys: FiniteLevelSystem, w: LadderWeights) -> CandidatePair:
    if len(w.sigma) != sys.n:
        raise WeightLengthMismatch(f"need {sys.n} weights, got {len(w.sigma)}")
    Psi, Phi = sys.Psi, sys.Phi
    a = np.zeros((sys.dim, sys.dim), dtype=complex)
    b = np.zeros_like(a)
    for k, s in enumerate(w.sigma):
        a += s * np.outer(Psi[:, k], np.conj(Phi[:, k + 1]))
        b += s * np.outer(Psi[:, k + 1], np.conj(Phi[:, k]))
    return CandidatePair(sys.n, a, b)


def unit_ladder(sys: FiniteLevelSystem) -> CandidatePair:
    return general_ladder(sys, LadderWeights.unit(sys.n))


def factor_weights(sys: FiniteLevelSystem) -> tuple[LadderWeights, complex]:
    """Weights ``rho_k = eps_{k+1} - eps_0`` and the shift ``eps_0``."""
    shift = complex(sys.eps[0])
    return LadderWeights.from_rho(sys.eps[1:] - shift), shift


def factorize(sys: FiniteLevelSystem, tol: Tolerance = DEFAULT_TOL):
    """Return ``(pair, shift)`` with ``b a + shift = H``."""
    w, shift = factor_weights(sys)
    pair = general_ladder(sys, w)
    ba = pair.b @ pair.a
    resid = max_abs(ba + shift * np.eye(sys.dim) - sys.H)
    scale = max(1.0, scale_of(abs_product(pair.b, pair.a), sys.H))
    if resid > tol.bound(scale):
        raise FactorizationFailure(f"|b a + eps_0 - H| = {resid:.3e}")
    return pair, shift


def expand_ladder_in_pf(sys: FiniteLevelSystem, w: LadderWeights,
                        tol: Tolerance = DEFAULT_TOL) -> tuple:
    """Coefficients ``(s_0, s_1 - s_0, ..., s_{n-1} - s_{n-2})`` of the expansions

        a(rho) = c_0 a + c_1 b a^2 + ... + c_{n-1} b^{n-1} a^n
        b(rho) = c_0 b + c_1 b^2 a + ... + c_{n-1} b^n a^{n-1}

    in the unit-weight pair; raises if either reconstruction fails.
    """
    target = general_ladder(sys, w)
    unit = unit_ladder(sys)
    s = w.sigma
    coeffs = (s[0],) + tuple(s[m] - s[m - 1] for m in range(1, sys.n))
    a_rec, b_rec, scale = expansion_terms(unit, coeffs)
    resid = max(max_abs(a_rec - target.a), max_abs(b_rec - target.b))
    if resid > tol.bound(scale):
        raise ReconstructionFailure(f"expansion residual {resid:.3e}")
    return coeffs


def expansion_terms(unit: CandidatePair, coeffs):
    """Sum the expansions of :func:`expand_ladder_in_pf`; also return their scale."""
    a, b = unit.a, unit.b
    a_rec = np.zeros_like(a)
    b_rec = np.zeros_like(b)
    scale = 1.0
    for m, c in enumerate(coeffs):
        ta = mpow(b, m) @ mpow(a, m + 1)
        tb = mpow(b, m + 1) @ mpow(a, m)
        a_rec += c * ta
        b_rec += c * tb
        scale = max(scale, abs(c) * scale_of(abs_product(*[b] * m, *[a] * (m + 1)),
                                             abs_product(*[b] * (m + 1), *[a] * m)))
    return a_rec, b_rec, scale


def equidistant_step(eps, tol: Tolerance = DEFAULT_TOL):
    """Common spacing ``d`` if ``eps_k = eps_0 + k d``, else ``None``."""
    eps = np.asarray(eps, dtype=complex)
    d = eps[1] - eps[0]
    ideal = eps[0] + d * np.arange(len(eps))
    return d if max_abs(eps - ideal) <= tol.bound(max_abs(eps)) else None


def structure_checks(sys: FiniteLevelSystem, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    th = tol.bound(1.0)
    H = sys.H
    unit = unit_ladder(sys)
    N = pf_number_operator(unit)
    absN = sum(abs_product(*[unit.b] * k, *[unit.a] * k) for k in range(1, sys.n + 1))
    rep = VerificationReport()
    rep.add("H_commutes_Npf", max_abs(commutator(H, N)), th, "[H, N_pf] = 0",
            scale_of(abs_product(H, absN), abs_product(absN, H)))
    w, shift = factor_weights(sys)
    pair = general_ladder(sys, w)
    rep.add("factorization", max_abs(pair.b @ pair.a + shift * np.eye(sys.dim) - H), th,
            "H = b(eps) a(eps) + eps_0", scale_of(abs_product(pair.b, pair.a), H))
    real = bool(np.all(np.abs(sys.eps.imag) <= th))
    rep.notes["real_spectrum"] = real
    if real:
        eta = sys.eta
        rep.add("pseudo_hermiticity", max_abs(eta @ H - dag(H) @ eta), th,
                "H = eta^{-1} H^dag eta",
                scale_of(abs_product(eta, H), abs_product(dag(H), eta)))
    d = equidistant_step(sys.eps, tol)
    rep.notes["equidistant_step"] = None if d is None else scalar_to_json(d)
    if d is not None:
        rep.add("equidistant_Npf", max_abs(H - sys.eps[0] * np.eye(sys.dim) - d * N), th,
                "H = eps_0 + d N_pf", scale_of(H, abs(d) * absN))
    return rep


def random_system(n: int, rng: np.random.Generator, real: bool = True,
                  cond_max: float = 1e3) -> FiniteLevelSystem:
    """Random spectrum with unit-scale gaps and a well-conditioned random basis."""
    while True:
        Psi = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
        if np.linalg.cond(Psi) < cond_max:
            break
    eps = np.cumsum(rng.uniform(0.5, 1.5, size=n + 1)) + rng.normal()
    if not real:
        eps = eps + 1j * rng.normal(size=n + 1)
    return from_spectrum(eps, Psi)
