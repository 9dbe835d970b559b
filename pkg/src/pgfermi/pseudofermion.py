"""Nonlinear n-pseudo-fermions: non-Hermitian pairs (a, b) with

    a b + b^n a^n = 1,     b != a^dag.

:func:`build_system` turns a valid pair into its bi-orthonormal Fock
system {psi_k}, {phi_k}, metric ``eta``, number operator and parity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (BiorthogonalityFailure, InputError, InvalidParams,
                     PairingSingular, ShapeMismatch, TerminationFailure)
from .fermion import check_degree, shift_matrix
from .numerics import (DEFAULT_TOL, Tolerance, abs_product, as_matrix, commutator, dag,
                       matrix_from_json, matrix_to_json, max_abs, mpow,
                       nullspace_1d, scalar_from_json, scalar_to_json,
                       vector_to_json)
from .report import VerificationReport, scale_of


@dataclass(frozen=True, eq=False)
class CandidatePair:
    n: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        n = check_degree(self.n)
        a, b = as_matrix(self.a), as_matrix(self.b)
        if a.shape != (n + 1, n + 1) or b.shape != (n + 1, n + 1):
            raise ShapeMismatch(f"a {a.shape}, b {b.shape}; expected {n + 1}x{n + 1}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.n + 1

    @classmethod
    def hermitian(cls, n: int) -> "CandidatePair":
        """The n-fermion pair (A, A^dag)."""
        A = shift_matrix(check_degree(n) + 1)
        return cls(n, A, dag(A))

    def to_json(self) -> dict:
        return {"n": self.n, "a": matrix_to_json(self.a), "b": matrix_to_json(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> "CandidatePair":
        try:
            return cls(int(obj["n"]), matrix_from_json(obj["a"]),
                       matrix_from_json(obj["b"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad CandidatePair encoding: {exc}") from exc


@dataclass(frozen=True, eq=False)
class PseudoFermionSystem:
    pair: CandidatePair
    psi: tuple
    phi: tuple
    eta: np.ndarray
    eta_inv: np.ndarray
    N_pf: np.ndarray
    P: np.ndarray

    @property
    def n(self) -> int:
        return self.pair.n

    @property
    def dim(self) -> int:
        return self.pair.dim

    @property
    def a(self) -> np.ndarray:
        return self.pair.a

    @property
    def b(self) -> np.ndarray:
        return self.pair.b

    def to_json(self) -> dict:
        return {"n": self.n, "a": matrix_to_json(self.a), "b": matrix_to_json(self.b),
                "psi": [vector_to_json(v) for v in self.psi],
                "phi": [vector_to_json(v) for v in self.phi],
                "eta": matrix_to_json(self.eta)}


def pf_number_operator(pair: CandidatePair) -> np.ndarray:
    """N_pf = sum_{k=1}^{n} b^k a^k."""
    return sum(mpow(pair.b, k) @ mpow(pair.a, k) for k in range(1, pair.n + 1))


def verify_pf_relation(pair: CandidatePair, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    n, a, b = pair.n, pair.a, pair.b
    th = tol.bound(1.0)
    ab, bnan = a @ b, mpow(b, n) @ mpow(a, n)
    rep = VerificationReport()
    rep.add("pf_relation", max_abs(ab + bnan - np.eye(n + 1)), th, "a b + b^n a^n = 1",
            scale_of(abs_product(a, b), abs_product(*[b] * n, *[a] * n)))
    rep.add("nilpotency_a", max_abs(mpow(a, n + 1)), th, "a^{n+1} = 0", scale_of(a) ** (n + 1))
    rep.add("nilpotency_b", max_abs(mpow(b, n + 1)), th, "b^{n+1} = 0", scale_of(b) ** (n + 1))
    rep.notes["hermitian"] = bool(np.allclose(b, dag(a), atol=th, rtol=0))
    return rep


def find_vacua(pair: CandidatePair, tol: Tolerance = DEFAULT_TOL):
    """Return ``(psi0, phi0)`` with ``a psi0 = 0``, ``b^dag phi0 = 0``.

    ``psi0`` has unit norm (phase fixed by :func:`nullspace_1d`) and
    ``phi0`` is scaled so that ``<phi0|psi0> = 1``.
    """
    psi0 = nullspace_1d(pair.a, tol)
    phi0 = nullspace_1d(dag(pair.b), tol)
    overlap = np.vdot(phi0, psi0)
    if abs(overlap) <= tol.bound(1.0):
        raise PairingSingular(f"<phi0|psi0> = {overlap:.3e}")
    return psi0, phi0 / np.conj(overlap)


def build_system(pair: CandidatePair, tol: Tolerance = DEFAULT_TOL) -> PseudoFermionSystem:
    n, a, b = pair.n, pair.a, pair.b
    psi0, phi0 = find_vacua(pair, tol)
    psi = [psi0]
    phi = [phi0]
    for _ in range(n):
        psi.append(b @ psi[-1])
        phi.append(dag(a) @ phi[-1])
    scale = max(max_abs(v) for v in psi)
    overflow = np.linalg.norm(b @ psi[-1])
    if overflow > tol.bound(scale):
        raise TerminationFailure(f"|b^(n+1) psi0| = {overflow:.3e}")

    N_pf = pf_number_operator(pair)
    # order by N_pf eigenvalue; construction order must already agree
    levels = [np.vdot(v, N_pf @ v).real / np.vdot(v, v).real for v in psi]
    order = np.argsort(levels, kind="stable")
    if list(order) != list(range(n + 1)):
        raise BiorthogonalityFailure("b-ladder does not follow N_pf ordering")

    gram = np.array([[np.vdot(f, p) for p in psi] for f in phi])
    scale = np.outer([np.linalg.norm(f) for f in phi], [np.linalg.norm(p) for p in psi])
    bad = np.abs(gram - np.eye(n + 1)) > tol.abs + tol.rel * scale
    if np.any(bad):
        j, k = np.argwhere(bad)[0]
        raise BiorthogonalityFailure(f"<phi_{j}|psi_{k}> = {gram[j, k]:.3e}")

    eta = sum(np.outer(f, np.conj(f)) for f in phi)
    eta_inv = sum(np.outer(p, np.conj(p)) for p in psi)
    P = sum((-1) ** k * np.outer(psi[k], np.conj(phi[k])) for k in range(n + 1))
    return PseudoFermionSystem(pair, tuple(psi), tuple(phi), eta, eta_inv, N_pf, P)


def biorthogonality_defect(sys: PseudoFermionSystem) -> float:
    gram = np.array([[np.vdot(f, p) for p in sys.psi] for f in sys.phi])
    return max_abs(gram - np.eye(sys.dim))


def completeness_defect(sys: PseudoFermionSystem) -> float:
    """max-entry |sum_k |psi_k><phi_k| - 1|."""
    total = sum(np.outer(p, np.conj(f)) for p, f in zip(sys.psi, sys.phi))
    return max_abs(total - np.eye(sys.dim))


def pseudo_adjoint_defect(sys: PseudoFermionSystem) -> float:
    """max-entry |b - eta^{-1} a^dag eta|."""
    return max_abs(sys.b - sys.eta_inv @ dag(sys.a) @ sys.eta)


def verify_system(sys: PseudoFermionSystem, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Residuals of the bi-orthonormal Fock structure of a built system."""
    n, a, b, N = sys.n, sys.a, sys.b, sys.N_pf
    absN = sum(abs_product(*[b] * k, *[a] * k) for k in range(1, n + 1))
    psi, phi, P = sys.psi, sys.phi, sys.P
    th = tol.bound(1.0)
    loose = max(th, 1e-9)
    vs = scale_of(*psi)
    rep = VerificationReport()
    rep.add("vacuum_a", max_abs(a @ psi[0]), th, "a|psi_0> = 0", scale_of(a))
    rep.add("vacuum_bdag", max_abs(dag(b) @ phi[0]), th, "b^dag|phi_0> = 0",
            scale_of(b) * scale_of(phi[0]))
    rep.add("termination", max_abs(b @ psi[-1]), th, "b^{n+1}|psi_0> = 0",
            scale_of(b) * scale_of(psi[-1]))
    rep.add("ladder_b", max_abs([b @ psi[k] - psi[k + 1] for k in range(n)]),
            loose, "b|psi_k> = |psi_{k+1}>", scale_of(b) * vs)
    rep.add("ladder_a", max_abs([a @ psi[k + 1] - psi[k] for k in range(n)]),
            loose, "a|psi_k> = |psi_{k-1}>", scale_of(a) * vs)
    outer = [np.outer(p, np.conj(f)) for p, f in zip(psi, phi)]
    rep.add("biorthonormality", biorthogonality_defect(sys), loose,
            "<phi_k|psi_j> = delta_kj")
    rep.add("completeness", completeness_defect(sys), loose,
            "1 = sum_k |psi_k><phi_k|", scale_of(*outer))
    rep.add("pseudo_adjoint", pseudo_adjoint_defect(sys), loose,
            "b = eta^{-1} a^dag eta", scale_of(b, sys.eta_inv @ dag(a) @ sys.eta))
    rep.add("npf_eigen", max_abs([N @ v - k * v for k, v in enumerate(psi)]),
            loose, "N_pf|psi_k> = k|psi_k>", scale_of(absN) * vs)
    rep.add("commutator_a", max_abs(commutator(a, N) - a), th, "[a, N_pf] = a",
            scale_of(abs_product(a, absN), abs_product(absN, a)))
    rep.add("commutator_b", max_abs(commutator(b, N) + b), th, "[b, N_pf] = -b",
            scale_of(abs_product(b, absN), abs_product(absN, b)))
    rep.add("parity_P_squared", max_abs(P @ P - np.eye(sys.dim)), loose,
            "P^2 = 1", scale_of(P) ** 2)
    rep.add("parity_PaP", max_abs(P @ a @ P + a), loose, "P a P = -a",
            scale_of(P) ** 2 * scale_of(a))
    rep.add("parity_PbP", max_abs(P @ b @ P + b), loose, "P b P = -b",
            scale_of(P) ** 2 * scale_of(b))
    return rep


# example families ---------------------------------------------------

@dataclass(frozen=True)
class ExampleParams:
    kind: str
    alpha: complex = 1.0
    beta: complex = 1.0
    gamma: complex = 1.0
    delta: complex = 1.0
    alphas: tuple = field(default=(1.0, 1.0))
    p: complex = 1.0

    def to_json(self) -> dict:
        out = {"kind": self.kind, "p": scalar_to_json(self.p)}
        if self.kind == "ex3":
            out["alphas"] = [scalar_to_json(z) for z in self.alphas]
        else:
            for name in ("alpha", "beta") + (("gamma", "delta") if self.kind == "ex2" else ()):
                out[name] = scalar_to_json(getattr(self, name))
        return out

    @classmethod
    def from_json(cls, kind: str, obj: dict | None = None, n: int | None = None) -> "ExampleParams":
        obj = dict(obj or {})
        obj.pop("kind", None)
        kw = {}
        for name in ("alpha", "beta", "gamma", "delta", "p"):
            if name in obj:
                kw[name] = scalar_from_json(obj.pop(name))
        if "alphas" in obj:
            kw["alphas"] = tuple(scalar_from_json(z) for z in obj.pop("alphas"))
        elif kind == "ex3" and n is not None:
            kw["alphas"] = (1.0,) * n
        if obj:
            raise InvalidParams(f"unknown parameters {sorted(obj)}")
        return cls(kind, **kw)


def example_family(params: ExampleParams) -> CandidatePair:
    """Candidate pair for one of the three worked example families.

    ``ex1`` (n = 2) is built from the 2-fermion operators, ``ex2`` is the
    explicit n = 3 pair, and ``ex3`` puts ``alphas`` on the superdiagonal
    of ``a`` and their inverses on the subdiagonal of ``b``.
    """
    kind = params.kind
    if kind == "ex1":
        al, be = complex(params.alpha), complex(params.beta)
        if al == 0 or abs(al + be) == 0:
            raise InvalidParams("ex1 needs alpha != 0 and alpha != -beta")
        A = shift_matrix(3)
        Ad = dag(A)
        a = al * Ad + be * Ad @ Ad @ A
        b = A / (al + be) + be / (al * (al + be)) * A @ A @ Ad
        return CandidatePair(2, a, b)
    if kind == "ex2":
        al, be, ga, de = (complex(v) for v in
                          (params.alpha, params.beta, params.gamma, params.delta))
        if 0 in (al, be, ga, de):
            raise InvalidParams("ex2 parameters must all be nonzero")
        a = np.array([[0, al, 0, 0],
                      [0, 0, 0, 0],
                      [de * ga, 0, be / de, -be / de ** 2],
                      [0, 0, be, -be / de]])
        b = np.array([[0, 0, 1 / (ga * de), -1 / (ga * de ** 2)],
                      [1 / al, 0, 0, 0],
                      [0, 0, 0, 1 / be],
                      [0, 0, 0, 0]])
        return CandidatePair(3, a, b)
    if kind == "ex3":
        alphas = np.array(params.alphas, dtype=complex)
        n = check_degree(len(alphas), 2)
        if np.any(alphas == 0):
            raise InvalidParams("ex3 alphas must all be nonzero")
        return CandidatePair(n, np.diag(alphas, 1), np.diag(1 / alphas, -1))
    raise InvalidParams(f"unknown example family {kind!r}")


def random_example_params(kind: str, rng: np.random.Generator, n: int = 3,
                          lo: float = 0.1, hi: float = 10.0) -> ExampleParams:
    """Magnitudes log-uniform in ``[lo, hi]`` with uniform random phases."""
    def draw():
        return np.exp(rng.uniform(np.log(lo), np.log(hi))
                      + 1j * rng.uniform(0, 2 * np.pi))

    if kind == "ex1":
        while True:
            al, be = draw(), draw()
            if abs(al + be) > 1e-3 * max(abs(al), abs(be)):
                return ExampleParams("ex1", alpha=al, beta=be)
    if kind == "ex2":
        return ExampleParams("ex2", alpha=draw(), beta=draw(), gamma=draw(), delta=draw())
    if kind == "ex3":
        return ExampleParams("ex3", alphas=tuple(draw() for _ in range(n)))
    raise InvalidParams(f"unknown example family {kind!r}")
