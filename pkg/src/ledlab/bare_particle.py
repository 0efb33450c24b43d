"""Bare-particle inertial functionals of a rigidly gyrating extended body.

A spherical rest-frame density f(|x|) (mass or charge) is reduced to its
radial measure; every slice integral of the rigid rotation then factors
into a radial integral against closed-form angular kernels:

    <gamma>_sphere(beta)        = artanh(beta)/beta
    <gamma sin^2 theta>_sphere  = ((1+beta^2)/(2 beta^3)) artanh(beta) - 1/(2 beta^2)

with beta = omega r / c the equatorial speed at radius r.  The gyrational
mass, bare spin, Minkowski inertia tensor and the spin -> angular-velocity
inversion are built from these.  For a surface (shell) density the radial
integral collapses to the closed forms used by the renormalization flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .minkowski import Rank2Tensor


# ---------------------------------------------------------------------------
# density profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityProfile:
    """Spherically symmetric radial measure with compact support [0, R].

    kind            'shell' | 'volume' | 'custom'
    total           integral of the measure (m_b for mass, -e for charge)
    R               support radius
    point_fraction  fraction of `total` sitting as a point at the origin
                    (mass profiles only; must be < 1 so the moment of
                    inertia stays strictly positive)
    table           (r, f(r)) arrays for kind='custom', trapezoid-integrated
    """

    kind: str
    total: float
    R: float
    point_fraction: float = 0.0
    table: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("shell", "volume", "custom"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.R <= 0:
            raise ValueError("R must be positive")
        if not (0.0 <= self.point_fraction < 1.0):
            raise ValueError("point_fraction must lie in [0, 1): a complete "
                             "point mass has no moment of inertia")
        if self.kind == "custom" and self.table is None:
            raise ValueError("custom profile needs a radial table")

    # -- constructors ---------------------------------------------------
    @staticmethod
    def shell(total: float, R: float, point_fraction: float = 0.0) -> "DensityProfile":
        return DensityProfile("shell", total, R, point_fraction)

    @staticmethod
    def volume(total: float, R: float, point_fraction: float = 0.0) -> "DensityProfile":
        return DensityProfile("volume", total, R, point_fraction)

    @staticmethod
    def from_table(r, f, point_fraction: float = 0.0) -> "DensityProfile":
        """Radial table (r, f(r)); the total is its trapezoid integral."""
        r = np.asarray(r, dtype=float)
        f = np.asarray(f, dtype=float)
        if r.ndim != 1 or r.shape != f.shape or len(r) < 2:
            raise ValueError("table needs matching 1-d r and f arrays")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise ValueError("table radii must be increasing and nonnegative")
        spread = float(np.trapezoid(f * 4.0 * np.pi * r**2, r))
        total = spread / (1.0 - point_fraction)
        rr = r.copy(); rr.flags.writeable = False
        ff = f.copy(); ff.flags.writeable = False
        return DensityProfile("custom", total, float(r[-1]), point_fraction,
                              table=(rr, ff))

    @staticmethod
    def load_table(path, point_fraction: float = 0.0) -> "DensityProfile":
        """Two-column text table (r, density)."""
        data = np.loadtxt(path)
        return DensityProfile.from_table(data[:, 0], data[:, 1], point_fraction)

    # -- radial quadrature -----------------------------------------------
    @property
    def spread_total(self) -> float:
        """Mass/charge carried by the extended (non-point) part."""
        return self.total * (1.0 - self.point_fraction)

    def radial_rule(self, order: int = 64):
        """Nodes and weights with sum_k w_k g(r_k) ~ int g(r) f(r) 4 pi r^2 dr.

        The point-mass fraction is not included (its r = 0 location
        contributes nothing to any r-weighted kernel with kernel(0)
        finite handled separately by the callers that need it).
        """
        if self.kind == "shell":
            return np.array([self.R]), np.array([self.spread_total])
        if self.kind == "volume":
            x, w = np.polynomial.legendre.leggauss(order)
            r = 0.5 * self.R * (x + 1.0)
            wr = 0.5 * self.R * w
            dens = self.spread_total * 3.0 / (4.0 * np.pi * self.R**3)
            return r, wr * dens * 4.0 * np.pi * r**2
        r, f = self.table
        scale = self.spread_total / max(
            float(np.trapezoid(f * 4.0 * np.pi * r**2, r)), np.finfo(float).tiny)
        w = np.zeros_like(r)
        dr = np.diff(r)
        w[:-1] += 0.5 * dr
        w[1:] += 0.5 * dr
        return r.copy(), w * f * 4.0 * np.pi * r**2 * scale

    def radial_integral(self, kernel, order: int = 64, include_point: bool = True) -> float:
        """int kernel(r) f(r) 4 pi r^2 d r, plus the point part kernel(0)."""
        r, w = self.radial_rule(order)
        out = float(w @ kernel(r))
        if include_point and self.point_fraction:
            out += self.total * self.point_fraction * float(kernel(np.zeros(1))[0])
        return out

    def moment(self, n: int, order: int = 64) -> float:
        """int r^n f(r) 4 pi r^2 dr (point part contributes only to n=0)."""
        if self.kind == "shell":
            base = self.spread_total * self.R**n
        elif self.kind == "volume":
            base = self.spread_total * 3.0 / (n + 3.0) * self.R**n
        else:
            base = self.radial_integral(lambda r: r**n, order, include_point=False)
        if n == 0:
            base += self.total * self.point_fraction
        return base

    def moment_of_inertia(self) -> float:
        """Non-relativistic principal moment (2/3) int r^2 f d^3x."""
        return (2.0 / 3.0) * self.moment(2)

    def enclosed(self, r) -> np.ndarray:
        """Cumulative integral of the measure up to radius r.

        At a surface jump the midpoint convention is used: enclosed(R) for
        a shell is the point part plus half the shell (the distributional
        value relevant for fields evaluated on the support).
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        pt = self.total * self.point_fraction
        s = self.spread_total
        if self.kind == "shell":
            # points within rounding distance of the surface take the
            # midpoint (distributional) value
            band = 1e-12 * self.R
            out = np.where(r < self.R - band, 0.0,
                           np.where(r > self.R + band, s, 0.5 * s))
        elif self.kind == "volume":
            out = s * np.clip(r / self.R, 0.0, 1.0) ** 3
        else:
            rt, f = self.table
            integrand = f * 4.0 * np.pi * rt**2
            cum = np.concatenate([[0.0], np.cumsum(
                0.5 * (integrand[1:] + integrand[:-1]) * np.diff(rt))])
            cum *= s / cum[-1] if cum[-1] != 0 else 1.0
            out = np.interp(r, rt, cum, left=0.0, right=s)
        return out + pt

    def support_rule(self, order_r: int = 32, order_theta: int = 64, order_phi: int = 32):
        """3-d product rule: points (N,3) and weights with
        sum w_k g(x_k) ~ int g(x) f(|x|) d^3x  (extended part only)."""
        r, wr = self.radial_rule(order_r)
        mu, wmu = np.polynomial.legendre.leggauss(order_theta)
        phi = 2.0 * np.pi * np.arange(order_phi) / order_phi
        wphi = np.full(order_phi, 1.0 / order_phi)
        # radial weights carry f(r) 4 pi r^2 dr; the angular rule averages
        # over the sphere, so combined weights reproduce the 3-d measure
        st = np.sqrt(1.0 - mu**2)
        pts = np.empty((len(r), len(mu), len(phi), 3))
        pts[..., 0] = r[:, None, None] * st[None, :, None] * np.cos(phi)[None, None, :]
        pts[..., 1] = r[:, None, None] * st[None, :, None] * np.sin(phi)[None, None, :]
        pts[..., 2] = r[:, None, None] * mu[None, :, None]
        w = (wr[:, None, None] * (0.5 * wmu)[None, :, None] * wphi[None, None, :])
        return pts.reshape(-1, 3), w.reshape(-1)


# ---------------------------------------------------------------------------
# angular kernels of rigid relativistic rotation
# ---------------------------------------------------------------------------

def gamma_kernel(beta):
    """Spherical average of the Lorentz factor: artanh(beta)/beta."""
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    out = np.ones_like(beta)
    nz = beta > 0
    out[nz] = np.arctanh(beta[nz]) / beta[nz]
    return out


def spin_kernel(beta):
    """Spherical average of gamma sin^2(theta).

    Closed form ((1+b^2)/(2 b^3)) artanh b - 1/(2 b^2); evaluated by its
    even power series 2/3 + (4/15) b^2 + ... for small b where the closed
    form cancels catastrophically.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    out = np.empty_like(beta)
    small = beta < 0.3
    b = beta[small]
    acc = np.zeros_like(b)
    b2k = np.ones_like(b)
    for k in range(1, 18):
        acc += (2.0 * k) / (4.0 * k * k - 1.0) * b2k
        b2k = b2k * b * b
    out[small] = acc
    b = beta[~small]
    out[~small] = ((1.0 + b**2) / (2.0 * b**3)) * np.arctanh(b) - 1.0 / (2.0 * b**2)
    return out


# ---------------------------------------------------------------------------
# inertial functionals
# ---------------------------------------------------------------------------

def _check_subluminal(fm: DensityProfile, omega_mag: float, c: float) -> None:
    if omega_mag * fm.R >= c:
        raise ValueError(
            f"equatorial speed omega R = {omega_mag * fm.R:g} >= c = {c:g}")


def gyrational_mass(fm: DensityProfile, omega: float, c: float = 1.0) -> float:
    """Bare gyrational mass: rest mass dressed with rigid-rotation energy.

    int artanh(omega r / c)/(omega r / c) f(r) 4 pi r^2 dr; equals
    m_b (c / omega R) artanh(omega R / c) for a shell.
    """
    omega = abs(float(omega))
    _check_subluminal(fm, omega, c)
    if omega == 0.0:
        return fm.total
    return fm.radial_integral(lambda r: gamma_kernel(omega * r / c))


def maclaurin_check(fm: DensityProfile, c: float = 1.0, eps: float = 1e-3):
    """Fit M(omega) ~ m0 + (1/2) I omega^2 at small omega by differences.

    Returns the fitted (m0, I); for consistency m0 should reproduce the
    profile total and I the non-relativistic moment of inertia.
    """
    w1 = eps * c / fm.R
    w2 = 2.0 * w1
    m1 = gyrational_mass(fm, w1, c)
    m2 = gyrational_mass(fm, w2, c)
    # solve m(w) = m0 + I/2 w^2 through both samples (quartic term cancels
    # to leading order in the Richardson combination for m0)
    ib = 2.0 * (m2 - m1) / (w2**2 - w1**2)
    m0 = (4.0 * m1 - m2) / 3.0
    return m0, ib


def spin_magnitude(fm: DensityProfile, omega: float, c: float = 1.0) -> float:
    """|s_b|(|omega|): int r^2 <gamma sin^2> f 4 pi r^2 dr * omega."""
    omega = abs(float(omega))
    _check_subluminal(fm, omega, c)
    if omega == 0.0:
        return 0.0
    return omega * fm.radial_integral(lambda r: r**2 * spin_kernel(omega * r / c))


def bare_spin(fm: DensityProfile, omega3, c: float = 1.0) -> np.ndarray:
    """Bare spin three-vector int x cross (w cross x) gamma f d^3x.

    Parallel to omega by isotropy; for a shell equals
    m_b c R [ (1 + c^2/w^2R^2)/2 artanh(wR/c) - c/(2wR) ] unit(omega).
    """
    omega3 = np.asarray(omega3, dtype=float)
    mag = float(np.linalg.norm(omega3))
    if mag == 0.0:
        return np.zeros(3)
    return spin_magnitude(fm, mag, c) * omega3 / mag


def spin_supremum(fm: DensityProfile, c: float = 1.0, margin: float = 1e-12) -> float:
    """Largest representable |s_b| as omega R -> c.

    Infinite for a shell (the surface gyrational energy diverges); finite
    for continuous profiles, estimated at the admissibility edge.
    """
    if fm.kind == "shell" or (fm.kind == "custom" and fm.table[1][-1] > 0):
        return np.inf
    return spin_magnitude(fm, (1.0 - margin) * c / fm.R, c)


def omega_from_spin(fm: DensityProfile, s3, c: float = 1.0,
                    rtol: float = 1e-13) -> np.ndarray:
    """Unique omega parallel to s with bare_spin(fm, omega) = s.

    The map |omega| -> |s_b| is strictly increasing on [0, c/R), so a
    bracketing root-find inverts it.  For a surface profile any finite s
    is reachable; for a volume profile |s| beyond the finite supremum at
    omega R -> c is rejected.
    """
    s3 = np.asarray(s3, dtype=float)
    smag = float(np.linalg.norm(s3))
    if smag == 0.0:
        return np.zeros(3)
    cap = 1.0 - 1e-14
    lo, hi = 0.0, 0.5 * c / fm.R
    while spin_magnitude(fm, hi, c) < smag:
        nxt = 0.5 * (hi * fm.R / c + 1.0)  # approach the edge geometrically
        hi_new = min(nxt, cap) * c / fm.R
        if hi_new <= hi:
            raise ValueError(
                f"|s| = {smag:g} exceeds the profile's gyrational supremum "
                f"{spin_magnitude(fm, hi, c):g} (omega R -> c)")
        lo, hi = hi, hi_new
    wmag = brentq(lambda w: spin_magnitude(fm, w, c) - smag, lo, hi,
                  rtol=max(rtol, 4 * np.finfo(float).eps), xtol=1e-300)
    return wmag * s3 / smag


def spin_magnitude_many(fm: DensityProfile, omegas, c: float = 1.0,
                        order: int = 64) -> np.ndarray:
    """Vectorized |s_b| over an array of angular speeds (outer-product rule)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    r, w = fm.radial_rule(order)
    beta = np.abs(omegas)[:, None] * r[None, :] / c
    kern = spin_kernel(beta.ravel()).reshape(beta.shape)
    return np.abs(omegas) * (kern * (w * r**2)[None, :]).sum(axis=1)


def invert_spin_many(fm: DensityProfile, smags, c: float = 1.0,
                     curve: "GyroMassCurve" = None, iters: int = 60,
                     rtol: float = 1e-12) -> np.ndarray:
    """Vectorized inverse of |omega| -> |s_b| by safeguarded bisection.

    Used by the evolution and iteration loops where many inversions per
    step are needed; agrees with :func:`omega_from_spin` to the stated
    tolerance.
    """
    smags = np.atleast_1d(np.asarray(smags, dtype=float))
    out = np.zeros_like(smags)
    pos = smags > 0
    if not np.any(pos):
        return out
    s = smags[pos]
    lo = np.zeros_like(s)
    hi = np.full_like(s, 0.5 * c / fm.R)
    # expand brackets toward the admissibility edge where needed
    for _ in range(200):
        short = spin_magnitude_many(fm, hi, c) < s
        if not np.any(short):
            break
        beta = hi[short] * fm.R / c
        nxt = 0.5 * (beta + 1.0)
        if np.any(nxt >= 1.0 - 1e-15):
            raise ValueError("spin exceeds the profile's gyrational supremum")
        lo[short] = hi[short]
        hi[short] = nxt * c / fm.R
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = spin_magnitude_many(fm, mid, c)
        high = val > s
        hi[high] = mid[high]
        lo[~high] = mid[~high]
        if np.max((hi - lo) / np.maximum(hi, 1e-300)) < rtol:
            break
    out[pos] = 0.5 * (lo + hi)
    return out


def minkowski_inertia(fm: DensityProfile, omega3, c: float = 1.0) -> Rank2Tensor:
    """Rest-frame Minkowski inertia tensor of the gyrating bare particle.

    Contravariant components of int (||x||^2 g - x (x) x) gamma f delta(u.x);
    the operator (contraction with the metric) has time-time entry
    + int r^2 gamma f and space block I_perp (1 - w w) + I_par w w.
    Contracting with the gyration dual vector reproduces the bare spin.
    """
    omega3 = np.asarray(omega3, dtype=float)
    mag = float(np.linalg.norm(omega3))
    _check_subluminal(fm, mag, c)

    r2gam = fm.radial_integral(lambda r: r**2 * gamma_kernel(mag * r / c))
    i_par = fm.radial_integral(lambda r: r**2 * spin_kernel(mag * r / c))
    i_perp = r2gam - 0.5 * i_par

    if mag > 0:
        n = omega3 / mag
    else:
        n = np.array([0.0, 0.0, 1.0])
    space = i_perp * (np.eye(3) - np.outer(n, n)) + i_par * np.outer(n, n)
    m = np.zeros((4, 4))
    m[0, 0] = -r2gam   # r^2 g^{00}; the operator entry is +r2gam
    m[1:, 1:] = space
    return Rank2Tensor(m, symmetry="symmetric")


# ---------------------------------------------------------------------------
# cached gyration curves
# ---------------------------------------------------------------------------

class GyroMassCurve:
    """Sampled map omega -> gyrational mass and spin with a fast inverse.

    Built once per profile and then read-only.  The gyrational mass is
    validated to be strictly positive, increasing and strictly convex on
    the sampled range; the inverse |s| -> omega is monotone interpolation
    refined against the exact spin magnitude.
    """

    def __init__(self, fm: DensityProfile, c: float = 1.0, n: int = 400,
                 edge: float = 0.999):
        from scipy.interpolate import PchipInterpolator

        self.fm = fm
        self.c = c
        w = np.linspace(0.0, edge * c / fm.R, n)
        m = np.array([gyrational_mass(fm, wi, c) for wi in w])
        s = np.array([spin_magnitude(fm, wi, c) for wi in w])
        if np.any(m <= 0) or np.any(np.diff(m) < 0):
            raise ValueError("gyrational mass must be positive and increasing")
        if np.any(np.diff(m, 2) < -1e-12 * m[-1]):
            raise ValueError("gyrational mass must be convex")
        self.omega_grid = w
        self.mass_grid = m
        self.spin_grid = s
        self._mass = PchipInterpolator(w, m)
        self._omega_of_spin = PchipInterpolator(s, w)
        self.spin_max = s[-1]

    def mass(self, omega):
        return self._mass(np.abs(omega))

    def omega_of_spin_mag(self, smag):
        """Vectorized approximate inverse (interpolation grade)."""
        return self._omega_of_spin(np.clip(smag, 0.0, self.spin_max))

    def omega_of_spin_exact(self, smag: float) -> float:
        return float(np.linalg.norm(
            omega_from_spin(self.fm, [0.0, 0.0, smag], self.c)))
