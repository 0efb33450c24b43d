"""Flat-spacetime four-vector and rank-2 tensor algebra, signature (-,+,+,+).

Components are stored contravariantly with respect to one fixed global
Lorentz frame (index 0 timelike).  Frames are not first-class objects; a
boost is just a matrix acting on components.

The dot product of a tensor with a vector contracts through the metric,

    (T . v)^mu = sum_nu T^{mu nu} g_{nu nu} v^nu,

so the metric tensor acts as the identity on four-vectors.  For a general
tensor T . v != v . T; both orders are provided.  Values are immutable
after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: metric components g_{mu nu} = g^{mu nu} = diag(-1, +1, +1, +1)
METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])
METRIC.flags.writeable = False

#: default absolute tolerance for constraint checks
DEFAULT_TOL = 1e-10


def _levi_civita4() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm, sign in (
        ((0, 1, 2, 3), 1), ((0, 2, 3, 1), 1), ((0, 3, 1, 2), 1),
        ((1, 0, 3, 2), 1), ((1, 2, 0, 3), 1), ((1, 3, 2, 0), 1),
        ((2, 0, 1, 3), 1), ((2, 1, 3, 0), 1), ((2, 3, 0, 1), 1),
        ((3, 0, 2, 1), 1), ((3, 1, 0, 2), 1), ((3, 2, 1, 0), 1),
    ):
        eps[perm] = sign
        # odd permutations: swap the last two indices
        eps[perm[0], perm[1], perm[3], perm[2]] = -sign
    eps.flags.writeable = False
    return eps


#: rank-4 Levi-Civita symbol with eps[0,1,2,3] = +1
LEVI_CIVITA = _levi_civita4()


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FourVector:
    """Contravariant components (c0, c1, c2, c3) in the global frame."""

    c: np.ndarray

    def __init__(self, c0, c1=None, c2=None, c3=None):
        if c1 is None:
            arr = _frozen(c0)
        else:
            arr = _frozen([c0, c1, c2, c3])
        if arr.shape != (4,):
            raise ValueError("FourVector needs 4 components")
        object.__setattr__(self, "c", arr)

    # -- constructors -------------------------------------------------
    @staticmethod
    def basis(mu: int) -> "FourVector":
        c = np.zeros(4)
        c[mu] = 1.0
        return FourVector(c)

    @staticmethod
    def from_time_space(t: float, x3) -> "FourVector":
        return FourVector([t, *np.asarray(x3, dtype=float)])

    # -- component access ---------------------------------------------
    @property
    def time(self) -> float:
        return float(self.c[0])

    @property
    def space(self) -> np.ndarray:
        return self.c[1:].copy()

    # -- algebra --------------------------------------------------------
    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.c + other.c)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.c - other.c)

    def __mul__(self, s: float) -> "FourVector":
        return FourVector(self.c * s)

    __rmul__ = __mul__

    def __neg__(self) -> "FourVector":
        return FourVector(-self.c)

    def dot(self, other):
        """Inner product with a vector, or row action v . T on a tensor."""
        if isinstance(other, FourVector):
            return inner(self, other)
        if isinstance(other, Rank2Tensor):
            return FourVector((METRIC @ self.c) @ other.m)
        raise TypeError(type(other))

    def norm2(self) -> float:
        """Minkowski square v.v (negative for timelike vectors)."""
        return inner(self, self)

    def classify(self, tol: float = DEFAULT_TOL) -> str:
        n2 = self.norm2()
        if abs(n2) <= tol:
            return "lightlike"
        return "timelike" if n2 < 0 else "spacelike"

    def __repr__(self):
        return f"FourVector({self.c.tolist()})"


@dataclass(frozen=True)
class Rank2Tensor:
    """Contravariant components T^{mu nu}; optional symmetry tag."""

    m: np.ndarray
    symmetry: str | None = field(default=None)

    def __init__(self, m, symmetry: str | None = None):
        arr = _frozen(m)
        if arr.shape != (4, 4):
            raise ValueError("Rank2Tensor needs a 4x4 component matrix")
        if symmetry not in (None, "symmetric", "antisymmetric", "general"):
            raise ValueError(f"unknown symmetry tag {symmetry!r}")
        object.__setattr__(self, "m", arr)
        object.__setattr__(self, "symmetry", symmetry)

    @staticmethod
    def zero() -> "Rank2Tensor":
        return Rank2Tensor(np.zeros((4, 4)), symmetry="general")

    @property
    def operator(self) -> np.ndarray:
        """Matrix of the left action on contravariant components, T @ g."""
        return self.m @ METRIC

    def dot(self, other):
        if isinstance(other, FourVector):
            return FourVector(self.operator @ other.c)
        if isinstance(other, Rank2Tensor):
            return Rank2Tensor(self.operator @ other.m)
        raise TypeError(type(other))

    def __add__(self, other: "Rank2Tensor") -> "Rank2Tensor":
        sym = self.symmetry if self.symmetry == other.symmetry else None
        return Rank2Tensor(self.m + other.m, symmetry=sym)

    def __sub__(self, other: "Rank2Tensor") -> "Rank2Tensor":
        sym = self.symmetry if self.symmetry == other.symmetry else None
        return Rank2Tensor(self.m - other.m, symmetry=sym)

    def __mul__(self, s: float) -> "Rank2Tensor":
        return Rank2Tensor(self.m * s, symmetry=self.symmetry)

    __rmul__ = __mul__

    def __neg__(self) -> "Rank2Tensor":
        return Rank2Tensor(-self.m, symmetry=self.symmetry)

    def transpose(self) -> "Rank2Tensor":
        return Rank2Tensor(self.m.T, symmetry=self.symmetry)

    def check_symmetry(self, tol: float = 0.0) -> bool:
        if self.symmetry == "symmetric":
            return bool(np.all(np.abs(self.m - self.m.T) <= tol))
        if self.symmetry == "antisymmetric":
            return bool(np.all(np.abs(self.m + self.m.T) <= tol))
        return True

    def __repr__(self):
        return f"Rank2Tensor({self.m.tolist()}, symmetry={self.symmetry!r})"


#: the metric as a tensor value (acts as identity on four-vectors)
METRIC_TENSOR = Rank2Tensor(METRIC, symmetry="symmetric")


# ---------------------------------------------------------------------------
# elementary products
# ---------------------------------------------------------------------------

def inner(a: FourVector, b: FourVector) -> float:
    """-a0 b0 + a1 b1 + a2 b2 + a3 b3."""
    return float(a.c @ METRIC @ b.c)


def outer(a: FourVector, b: FourVector) -> Rank2Tensor:
    """Tensor product a (x) b with (a (x) b) . c = a (b . c)."""
    return Rank2Tensor(np.outer(a.c, b.c), symmetry="general")


def wedge_up(a: FourVector, b: FourVector) -> Rank2Tensor:
    """Exterior product a (x) b - b (x) a, antisymmetric."""
    m = np.outer(a.c, b.c)
    return Rank2Tensor(m - m.T, symmetry="antisymmetric")


def wedge_down(a: FourVector, b: FourVector) -> Rank2Tensor:
    """Symmetrized tensor product a (x) b + b (x) a."""
    m = np.outer(a.c, b.c)
    return Rank2Tensor(m + m.T, symmetry="symmetric")


def trace(t: Rank2Tensor) -> float:
    """Four-trace sum_mu g^{mu mu} T^{mu mu}; trace(metric) = 4."""
    return float(np.trace(METRIC @ t.m))


def commutators(a: Rank2Tensor, b: Rank2Tensor, sign: int) -> Rank2Tensor:
    """A . B + sign * B . A with the metric-contracted matrix action."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    ab = a.operator @ b.m
    ba = b.operator @ a.m
    sym = None
    if sign == +1 and a.symmetry == "antisymmetric" and b.symmetry == "antisymmetric":
        sym = "symmetric"
    return Rank2Tensor(ab + sign * ba, symmetry=sym)


def commutator(a: Rank2Tensor, b: Rank2Tensor) -> Rank2Tensor:
    return commutators(a, b, -1)


def anticommutator(a: Rank2Tensor, b: Rank2Tensor) -> Rank2Tensor:
    return commutators(a, b, +1)


# ---------------------------------------------------------------------------
# decompositions relative to a timelike unit vector
# ---------------------------------------------------------------------------

def _require_unit_timelike(u: FourVector, tol: float) -> None:
    if abs(inner(u, u) + 1.0) > tol:
        raise ValueError(f"u is not unit timelike: u.u = {inner(u, u)}")


def space_projector(u: FourVector) -> Rank2Tensor:
    """g + u (x) u, projecting onto the space slice orthogonal to u."""
    return Rank2Tensor(METRIC + np.outer(u.c, u.c), symmetry="symmetric")


def split_space_time(s: Rank2Tensor, u: FourVector, tol: float = DEFAULT_TOL):
    """Split an antisymmetric tensor into space-space and time-space parts.

    Returns (s_perp, s_par, h) with

        s_perp = s + [u (x) u, s]_+        (space-space, s_perp . u = 0)
        s_par  = u ^ (s . u)               (time-space)
        h      = s . u                     (helicity vector)

    and s_perp + s_par = s.
    """
    _require_unit_timelike(u, tol)
    uu = Rank2Tensor(np.outer(u.c, u.c), symmetry="symmetric")
    s_perp = s + anticommutator(uu, s)
    h = s.dot(u)
    s_par = wedge_up(u, h)
    return (Rank2Tensor(s_perp.m, symmetry="antisymmetric"), s_par, h)


def dual_vector(omega: Rank2Tensor, u: FourVector, tol: float = DEFAULT_TOL) -> FourVector:
    """Spacelike vector w dual to an antisymmetric space-space tensor.

    Requires omega . u = 0.  Satisfies omega . w = 0, w . u = 0 and
    ||w||^2 = -(1/2) trace(omega . omega).  In the rest frame u = e0 with
    omega = omega_z e1 ^ e2 this returns (0, 0, 0, omega_z), the angular
    velocity with omega . x = -(0, w x x).
    """
    resid = omega.dot(u)
    scale = max(1.0, float(np.max(np.abs(omega.m))))
    if np.max(np.abs(resid.c)) > tol * scale:
        raise ValueError("omega is not space-space w.r.t. u (omega.u != 0)")
    u_low = METRIC @ u.c
    om_low = METRIC @ omega.m @ METRIC
    w = 0.5 * np.einsum("abcd,b,cd->a", LEVI_CIVITA, u_low, om_low)
    return FourVector(w)


def dual_tensor(w: FourVector, u: FourVector) -> Rank2Tensor:
    """Inverse of :func:`dual_vector`: antisymmetric tensor dual to w wrt u."""
    w_low = METRIC @ w.c
    u_low = METRIC @ u.c
    m = np.einsum("abcd,c,d->ab", LEVI_CIVITA, w_low, u_low)
    return Rank2Tensor(m, symmetry="antisymmetric")


# ---------------------------------------------------------------------------
# Lorentz boosts (components of one global frame expressed in another)
# ---------------------------------------------------------------------------

def boost_matrix(v3, c: float = 1.0) -> np.ndarray:
    """Boost taking e0 to the four-velocity of a frame moving with v3."""
    v = np.asarray(v3, dtype=float)
    beta = v / c
    b2 = float(beta @ beta)
    if b2 >= 1.0:
        raise ValueError("superluminal boost velocity")
    lam = np.eye(4)
    if b2 == 0.0:
        return lam
    gamma = 1.0 / np.sqrt(1.0 - b2)
    lam[0, 0] = gamma
    lam[0, 1:] = gamma * beta
    lam[1:, 0] = gamma * beta
    lam[1:, 1:] = np.eye(3) + (gamma - 1.0) * np.outer(beta, beta) / b2
    return lam


def boost_vector(v: FourVector, lam: np.ndarray) -> FourVector:
    return FourVector(lam @ v.c)


def boost_tensor(t: Rank2Tensor, lam: np.ndarray) -> Rank2Tensor:
    return Rank2Tensor(lam @ t.m @ lam.T, symmetry=t.symmetry)
