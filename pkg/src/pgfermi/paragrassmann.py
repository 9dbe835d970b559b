"""Para-Grassmann calculus for a single nilpotent pair (zeta, zeta*).

The generators obey

    zeta zeta* = -zeta* zeta,     zeta^{n+1} = 0 = zeta*^{n+1},

and zeta commutes with itself (so ``zeta**2 != 0`` for n >= 2).  Elements
are kept in canonical form ``sum_{i,k} zeta^i zeta*^k C_{ik}`` with every
generator to the left of its coefficient, so integration is a diagonal
read-off.

Moving one generator past a coefficient conjugates it by the parity
operator ``P`` of the context (``P v``, ``w P``, ``P M P``).  With this rule
the ladder operators anticommute with both generators while the vacuum
commutes with them.  For a non-Hermitian ``P`` the adjoint lives in the
context with parity ``P^dag``; :func:`pg_adjoint` switches contexts
accordingly, and in the Hermitian case the two contexts coincide.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import (ContextMismatch, DegreeOutOfRange, InputError,
                     KindMismatch, NotUnitLeading)
from .fermion import MAX_DEGREE, check_degree
from .numerics import as_matrix, dag, matrix_from_json, matrix_to_json, max_abs

KINDS = ("scalar", "vector", "covector", "operator")
_ADJOINT_KIND = {"scalar": "scalar", "vector": "covector",
                 "covector": "vector", "operator": "operator"}


class NotEvenElement(InputError):
    pass


def g_coefficients(n: int) -> tuple[int, ...]:
    """Integration weights ``g_k(n) = 1 + sum_{i=1}^{n-k} (-1)^{k i + i(i+1)/2}``."""
    n = check_degree(n)
    return tuple(1 + sum((-1) ** ((k * i + i * (i + 1) // 2) % 2)
                         for i in range(1, n - k + 1))
                 for k in range(n + 1))


@dataclass(frozen=True, eq=False)
class PGContext:
    """Degree ``n`` plus the parity operator that grades coefficients."""

    n: int
    P: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = check_degree(self.n, 1, MAX_DEGREE)
        P = as_matrix(self.P)
        if P.shape != (n + 1, n + 1):
            raise InputError(f"parity must be {n + 1}x{n + 1}, got {P.shape}")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "g", g_coefficients(n))

    @property
    def dim(self) -> int:
        return self.n + 1

    @classmethod
    def diagonal(cls, n: int) -> "PGContext":
        """Context whose parity is ``diag(+1, -1, +1, ...)``."""
        return cls(n, np.diag([(-1.0) ** k for k in range(n + 1)]))

    def adjoint(self) -> "PGContext":
        cached = self.__dict__.get("_adjoint")
        if cached is None:
            cached = PGContext(self.n, dag(self.P))
            object.__setattr__(cached, "_adjoint", self)
            object.__setattr__(self, "_adjoint", cached)
        return cached

    def same_as(self, other: "PGContext") -> bool:
        if other is self:
            return True
        return (self.n == other.n
                and np.allclose(self.P, other.P, rtol=1e-12, atol=1e-12))

    def parity_defect(self) -> float:
        """max |P^2 - 1|."""
        return max_abs(self.P @ self.P - np.eye(self.dim))


def parity_conjugate(ctx: PGContext, x, kind: str) -> np.ndarray:
    """Transform a coefficient as one generator moves past it."""
    x = np.asarray(x, dtype=complex)
    if kind == "scalar":
        return x
    if kind == "vector":
        return ctx.P @ x
    if kind == "covector":
        return x @ ctx.P
    if kind == "operator":
        return ctx.P @ x @ ctx.P
    raise KindMismatch(f"unknown kind {kind!r}")


def _zero(kind: str, dim: int) -> np.ndarray:
    return np.zeros({"scalar": (), "vector": (dim,), "covector": (dim,),
                     "operator": (dim, dim)}[kind], dtype=complex)


def _check_coeff(kind: str, c, dim: int) -> np.ndarray:
    c = np.array(c, dtype=complex)
    if c.shape != _zero(kind, dim).shape:
        raise KindMismatch(f"{kind} coefficient has shape {c.shape}")
    return c


@dataclass(frozen=True, eq=False)
class PGElement:
    """``sum_{(i,k)} zeta^i zeta*^k coeff[(i,k)]`` in a fixed context."""

    context: PGContext
    kind: str
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindMismatch(f"unknown kind {self.kind!r}")
        n, dim = self.context.n, self.context.dim
        clean = {}
        for (i, k), c in self.terms.items():
            if not (0 <= i <= n and 0 <= k <= n):
                continue
            c = _check_coeff(self.kind, c, dim)
            if np.any(c != 0):
                c.setflags(write=False)
                clean[(int(i), int(k))] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @property
    def n(self) -> int:
        return self.context.n

    def coeff(self, i: int, k: int) -> np.ndarray:
        c = self.terms.get((i, k))
        return _zero(self.kind, self.context.dim) if c is None else c

    def bidegrees(self) -> list[tuple[int, int]]:
        return list(self.terms)

    def max_abs(self) -> float:
        return max((max_abs(c) for c in self.terms.values()), default=0.0)

    def in_context(self, ctx: PGContext) -> "PGElement":
        if ctx.n != self.n:
            raise ContextMismatch("degree mismatch")
        if self.kind != "scalar" and not ctx.same_as(self.context):
            raise ContextMismatch("only scalars may change parity context")
        return PGElement(ctx, self.kind, self.terms)

    # arithmetic -------------------------------------------------------
    def _linear(self, other: "PGElement", sign: int) -> "PGElement":
        if not isinstance(other, PGElement):
            return NotImplemented
        if other.kind != self.kind:
            raise KindMismatch(f"cannot add {self.kind} and {other.kind}")
        ctx = _common_context(self, other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0) + sign * c
        return PGElement(ctx, self.kind, terms)

    def __add__(self, other):
        return self._linear(other, 1)

    def __sub__(self, other):
        return self._linear(other, -1)

    def __neg__(self):
        return PGElement(self.context, self.kind,
                         {key: -c for key, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PGElement):
            return pg_mul(self, other)
        if np.isscalar(other):
            return PGElement(self.context, self.kind,
                             {key: c * other for key, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def adjoint(self) -> "PGElement":
        return pg_adjoint(self)

    def integrate(self) -> np.ndarray:
        return pg_integrate(self)

    def allclose(self, other: "PGElement", atol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= atol

    def to_json(self) -> dict:
        return element_to_json(self)


def _common_context(x: PGElement, y: PGElement) -> PGContext:
    if x.n != y.n:
        raise ContextMismatch(f"degrees differ: {x.n} vs {y.n}")
    if x.kind == "scalar":
        return y.context
    if y.kind == "scalar" or x.context.same_as(y.context):
        return x.context
    raise ContextMismatch("elements carry different parity operators")


def _combine(kx: str, ky: str, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if kx == "scalar" or ky == "scalar":
        return X * Y
    if (kx, ky) == ("vector", "covector"):
        return np.outer(X, Y)
    return X @ Y


_PRODUCT_KIND = {
    ("operator", "operator"): "operator",
    ("operator", "vector"): "vector",
    ("covector", "operator"): "covector",
    ("vector", "covector"): "operator",
    ("covector", "vector"): "scalar",
}


def product_kind(kx: str, ky: str) -> str:
    if kx == "scalar":
        return ky
    if ky == "scalar":
        return kx
    try:
        return _PRODUCT_KIND[(kx, ky)]
    except KeyError:
        raise KindMismatch(f"cannot multiply {kx} by {ky}") from None


def pg_mul(x: PGElement, y: PGElement) -> PGElement:
    """Canonical-form product.

    ``(zeta^i zeta*^k X)(zeta^j zeta*^l Y)
       = (-1)^{k j} zeta^{i+j} zeta*^{k+l} par^{j+l}(X) Y``
    """
    ctx = _common_context(x, y)
    n = ctx.n
    kind = product_kind(x.kind, y.kind)
    out: dict = {}
    par_x = {}
    for (i, k), X in x.terms.items():
        par_x[(i, k)] = (X, parity_conjugate(ctx, X, x.kind))
    for (i, k), (X, Xp) in par_x.items():
        for (j, l), Y in y.terms.items():
            if i + j > n or k + l > n:
                continue
            Z = _combine(x.kind, y.kind, Xp if (j + l) % 2 else X, Y)
            if (k * j) % 2:
                Z = -Z
            key = (i + j, k + l)
            out[key] = out[key] + Z if key in out else Z
    return PGElement(ctx, kind, out)


def pg_adjoint(x: PGElement) -> PGElement:
    """``(zeta^i zeta*^k C)^dag = C^dag zeta^k zeta*^i``, re-canonicalized.

    The result lives in the adjoint context (parity ``P^dag``).
    """
    ctx = x.context.adjoint()
    kind = _ADJOINT_KIND[x.kind]
    out = {}
    for (i, k), C in x.terms.items():
        Cd = np.conj(C).T if x.kind == "operator" else np.conj(C)
        if (i + k) % 2:
            Cd = parity_conjugate(ctx, Cd, kind)
        out[(k, i)] = Cd
    return PGElement(ctx, kind, out)


def pg_integrate(x: PGElement) -> np.ndarray:
    """``sum_k g_k(n) coeff[k, k]``: the functional picks diagonal bidegrees."""
    total = _zero(x.kind, x.context.dim)
    for k, gk in enumerate(x.context.g):
        if gk and (k, k) in x.terms:
            total = total + gk * x.terms[(k, k)]
    return total


def pg_sqrt_even(s: PGElement, atol: float = 1e-12) -> PGElement:
    """Square root of ``1 + y`` with ``y`` even and nilpotent.

    Uses the binomial series, which terminates because ``y^{n+1} = 0``.
    """
    if s.kind != "scalar":
        raise KindMismatch("pg_sqrt_even needs a scalar element")
    if abs(complex(s.coeff(0, 0)) - 1) > atol:
        raise NotUnitLeading(f"leading term is {complex(s.coeff(0, 0))}, not 1")
    if any(i != k for i, k in s.terms):
        raise NotEvenElement("only equal-bidegree terms are allowed")
    one = pg_scalar(s.context, 1.0)
    y = s - one
    result, power, c = one, one, 1.0
    for m in range(1, s.n + 1):
        power = pg_mul(power, y)
        c *= (0.5 - (m - 1)) / m
        result = result + c * power
    return result


# constructors --------------------------------------------------------

def monomial(ctx: PGContext, i: int, k: int, coeff=1.0, kind: str = "scalar") -> PGElement:
    """``zeta^i zeta*^k coeff``; zero when a power exceeds ``n``."""
    if kind not in KINDS:
        raise KindMismatch(f"unknown kind {kind!r}")
    return PGElement(ctx, kind, {(i, k): coeff})


def pg_scalar(ctx: PGContext, c=1.0) -> PGElement:
    return monomial(ctx, 0, 0, c)


def constant(ctx: PGContext, coeff, kind: str) -> PGElement:
    return monomial(ctx, 0, 0, coeff, kind)


def zeta(ctx: PGContext, power: int = 1) -> PGElement:
    return monomial(ctx, power, 0)


def zeta_star(ctx: PGContext, power: int = 1) -> PGElement:
    return monomial(ctx, 0, power)


def random_element(ctx: PGContext, kind: str, rng: np.random.Generator,
                   density: float = 0.6) -> PGElement:
    """Random element with roughly ``density`` of bidegrees populated."""
    shape = _zero(kind, ctx.dim).shape
    terms = {}
    for i in range(ctx.n + 1):
        for k in range(ctx.n + 1):
            if rng.random() < density:
                size = prod(shape)
                c = rng.normal(size=size) + 1j * rng.normal(size=size)
                terms[(i, k)] = c.reshape(shape)
    return PGElement(ctx, kind, terms)


# serialization ------------------------------------------------------

def element_to_json(x: PGElement) -> dict:
    def enc(c):
        if x.kind == "scalar":
            return [complex(c).real, complex(c).imag]
        if x.kind == "covector":
            return matrix_to_json(np.asarray(c).reshape(1, -1))
        return matrix_to_json(c)

    return {"n": x.n, "kind": x.kind, "parity": matrix_to_json(x.context.P),
            "terms": [{"i": i, "k": k, "coeff": enc(c)} for (i, k), c in x.terms.items()]}


def element_from_json(obj: dict) -> PGElement:
    try:
        n, kind, raw_terms = int(obj["n"]), obj["kind"], obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad PGElement encoding: {exc}") from exc
    if kind not in KINDS:
        raise KindMismatch(f"unknown kind {kind!r}")
    ctx = (PGContext(n, matrix_from_json(obj["parity"])) if "parity" in obj
           else PGContext.diagonal(n))
    terms = {}
    for t in raw_terms:
        i, k = int(t["i"]), int(t["k"])
        if not (0 <= i <= n and 0 <= k <= n):
            raise DegreeOutOfRange(f"bidegree ({i},{k}) outside [0,{n}]")
        c = t["coeff"]
        if kind == "scalar":
            val = complex(float(c[0]), float(c[1]))
        elif kind == "operator":
            val = matrix_from_json(c)
        else:
            val = matrix_from_json(c).ravel()
        terms[(i, k)] = _check_coeff(kind, val, n + 1)
    return PGElement(ctx, kind, terms)
