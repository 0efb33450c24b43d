"""Stationary renormalization flow to vanishing bare rest mass.

Matching charge, total mass and magnetic moment of the shell particle to
electron data leaves a one-parameter curve in (R, omega, m_b) space:

    omega(R)  = 3 mu_e c / (e R^2)             (moment matching)
    m_b(R)    = m_e x [1 - (e^2/2 m_e c^2 R)(1 + 2 mu_e^2/e^2 R^2)]
                / artanh(x),        x = 3 mu_e / (e R) = omega R / c,

well-defined on R > R0 = 3 mu_e / e, monotone increasing, with
m_b -> m_e as R -> infinity and m_b -> 0 as R -> R0 (where the
equatorial speed reaches c exactly).

Near the endpoint the (R, m_b) relation is logarithmic: artanh(x)
diverges only like log(1/(1-x)), so m_b decreases slowly along R while
R(m_b) - R0 ~ exp(-2 m_e NUM / m_b) collapses below double-precision
resolution already for m_b < 5e-2 m_e.  The flow is therefore
parametrized internally by eta = artanh(x) in (0, inf), in which both
directions are smooth and the inversion m_b -> eta is well conditioned
for every m_b in (0, m_e).

Internally everything is computed in natural units (hbar = m_e = c = 1,
e^2 = alpha); units are converted only at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

ALPHA_DEFAULT = 1.0 / 137.036
ANOMALY_DEFAULT = 0.001159652


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system and electron data for the flow.

    Natural units by default: hbar = m_e = c = 1 and e = sqrt(alpha).
    The magnetic-moment anomaly is a toggle; with it off mu_e equals the
    Bohr magneton exactly.
    """

    alpha: float = ALPHA_DEFAULT
    anomaly: float = ANOMALY_DEFAULT
    include_anomaly: bool = True
    hbar: float = 1.0
    m_e: float = 1.0
    c: float = 1.0

    @property
    def e(self) -> float:
        return float(np.sqrt(self.alpha * self.hbar * self.c))

    @property
    def mu_bohr(self) -> float:
        return 0.5 * self.hbar * self.e / (self.m_e * self.c)

    @property
    def a_eff(self) -> float:
        return self.anomaly if self.include_anomaly else 0.0

    @property
    def mu_e(self) -> float:
        return (1.0 + self.a_eff) * self.mu_bohr

    @property
    def R_compton(self) -> float:
        return self.hbar / (self.m_e * self.c)

    @property
    def R_classical(self) -> float:
        return self.e**2 / (self.m_e * self.c**2)

    @property
    def R_endpoint(self) -> float:
        """Flow endpoint 3 mu_e / e = (3/2)(1 + a) R_compton."""
        return 3.0 * self.mu_e / self.e

    def without_anomaly(self) -> "PhysicalConstants":
        return PhysicalConstants(self.alpha, self.anomaly, False,
                                 self.hbar, self.m_e, self.c)


NATURAL = PhysicalConstants()


@dataclass(frozen=True)
class RenormPoint:
    """One point of the flow curve with its derived observables."""

    R: float
    omegaE: float
    m_b: float
    W_b: float
    W_f: float
    s_b: float
    s_f: float
    s: float
    g: float
    mu: float
    eta: float

    @property
    def x(self) -> float:
        """Equatorial speed omega R / c."""
        return float(np.tanh(self.eta))

    def as_row(self, k: PhysicalConstants) -> dict:
        return {
            "mb_over_me": self.m_b / k.m_e,
            "R_over_RC": self.R / k.R_compton,
            "omegaR_over_c": self.omegaE * self.R / k.c,
            "W_b": self.W_b,
            "W_f": self.W_f,
            "sb_over_hbar": self.s_b / k.hbar,
            "sf_over_hbar": self.s_f / k.hbar,
            "s_over_hbar": self.s / k.hbar,
            "g": self.g,
        }


def omega_of_R(R: float, k: PhysicalConstants = NATURAL) -> float:
    """Angular speed matching the electron magnetic moment: 3 mu_e c/(e R^2).

    Subluminal (omega R < c) exactly when R exceeds the endpoint radius."""
    if R <= 0:
        raise ValueError("R must be positive")
    return 3.0 * k.mu_e * k.c / (k.e * R**2)


def _num_factor(R: float, k: PhysicalConstants) -> float:
    """1 - (e^2 / 2 m_e c^2 R)(1 + 2 mu_e^2 / e^2 R^2)."""
    return 1.0 - (k.e**2 / (2.0 * k.m_e * k.c**2 * R)) * (
        1.0 + 2.0 * k.mu_e**2 / (k.e**2 * R**2))


def mb_of_R(R: float, k: PhysicalConstants = NATURAL) -> float:
    """Bare rest mass along the flow as a function of the radius."""
    x = k.R_endpoint / R
    if x >= 1.0:
        raise ValueError(
            f"R = {R:g} is outside the flow domain (R must exceed {k.R_endpoint:g})")
    return k.m_e * x * _num_factor(R, k) / np.arctanh(x)


def flow_point(eta: float, k: PhysicalConstants = NATURAL) -> RenormPoint:
    """Evaluate all observables at the flow parameter eta = artanh(omega R/c).

    Uniformly stable from eta -> 0 (R -> infinity) to arbitrarily large
    eta (m_b -> 0, R -> endpoint); no intermediate quantity degrades even
    when x = tanh(eta) rounds to 1.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = float(np.tanh(eta))
    R = k.R_endpoint / x
    num = _num_factor(R, k)
    m_b = k.m_e * x * num / eta
    omega = x * k.c / R
    w_f = 0.5 * (k.e**2 / R) * (1.0 + (2.0 / 9.0) * x**2)
    w_b = m_b * k.c**2 * eta / x
    # bare spin m_b c R [ (1 + 1/x^2)/2 eta - 1/(2x) ]; the product
    # m_b * eta stays finite as eta -> inf
    s_b = 0.5 * k.c * R * (m_b * eta * (1.0 + 1.0 / x**2) - m_b / x)
    s_f = (2.0 / 9.0) * (k.e**2 / k.c) * x
    s = s_b + s_f
    g = 2.0 * k.m_e * k.c * k.mu_e / (k.e * s)
    return RenormPoint(R=R, omegaE=omega, m_b=m_b, W_b=w_b, W_f=w_f,
                       s_b=s_b, s_f=s_f, s=s, g=g, mu=k.mu_e, eta=eta)


def eta_of_mb(m_b: float, k: PhysicalConstants = NATURAL,
              rtol: float = 1e-15) -> float:
    """Invert m_b(eta); smooth and well conditioned for all m_b in (0, m_e)."""
    if not (0.0 < m_b < k.m_e):
        raise ValueError(f"m_b must lie strictly between 0 and m_e = {k.m_e:g}")

    def f(eta):
        return flow_point(eta, k).m_b - m_b

    # eta ~ m_e NUM(R0)/m_b for small m_b, eta ~ x for m_b near m_e
    guess = max(k.m_e * _num_factor(k.R_endpoint, k) / m_b, 1e-8)
    lo, hi = guess / 16.0, guess * 16.0
    while f(lo) < 0:  # m_b(eta) decreases with eta
        lo /= 16.0
        if lo < 1e-300:
            raise RuntimeError("bracketing failed")
    while f(hi) > 0:
        hi *= 16.0
        if hi > 1e300:
            raise RuntimeError("bracketing failed")
    return brentq(f, lo, hi, rtol=max(rtol, 4 * np.finfo(float).eps), xtol=1e-300)


def observables(R: float, k: PhysicalConstants = NATURAL) -> RenormPoint:
    """Flow observables at radius R (R-parametrized interior evaluation)."""
    x = k.R_endpoint / R
    if x >= 1.0:
        raise ValueError(
            f"R = {R:g} is outside the flow domain (R must exceed {k.R_endpoint:g})")
    return flow_point(float(np.arctanh(x)), k)


def observables_from_mb(m_b: float, k: PhysicalConstants = NATURAL) -> RenormPoint:
    """Flow observables at bare mass m_b (endpoint-capable parametrization)."""
    return flow_point(eta_of_mb(m_b, k), k)


def R_of_mb(m_b: float, k: PhysicalConstants = NATURAL) -> float:
    """Radius along the flow for a given bare mass.

    Round-trips mb_of_R wherever R - R_endpoint is representable; for
    m_b below about 5e-2 m_e the exact radius collapses onto the endpoint
    in double precision (the offset is exp(-2 eta) R0).
    """
    if m_b >= k.m_e:
        raise ValueError("no finite radius: m_b must be below m_e")
    return flow_point(eta_of_mb(m_b, k), k).R


def flow_sweep(mb_grid, k: PhysicalConstants = NATURAL) -> list:
    """Table of RenormPoint rows over a bare-mass grid within (0, m_e)."""
    mb_grid = np.asarray(mb_grid, dtype=float)
    if np.any(mb_grid <= 0) or np.any(mb_grid >= k.m_e):
        raise ValueError("grid must lie strictly inside (0, m_e)")
    return [observables_from_mb(float(mb), k) for mb in mb_grid]


# ---------------------------------------------------------------------------
# limit constants
# ---------------------------------------------------------------------------

def limit_constants(k: PhysicalConstants = NATURAL) -> dict:
    """Closed-form constants of the vanishing-bare-mass endpoint.

    The published alpha-series of the g factor is exact with the anomaly
    off, where s_ren = (3/2) hbar (1 - 7 alpha / 27) and therefore
    g = (2/3) / (1 - 7 alpha / 27) = (2/3)(1 + q + q^2 + ...) with
    q = 7 alpha / 27.
    """
    a = k.a_eff
    alpha = k.alpha
    r0 = k.R_endpoint
    w_f_lim = 0.5 * (k.e**2 / r0) * (11.0 / 9.0)
    m_ph = k.m_e - w_f_lim / k.c**2
    s_b_lim = k.m_e * k.c * r0 * _num_factor(r0, k)
    s_f_lim = (2.0 / 9.0) * k.e**2 / k.c
    s_ren = s_b_lim + s_f_lim
    g = 2.0 * k.m_e * k.c * k.mu_e / (k.e * s_ren)
    q = 7.0 * alpha / 27.0
    hb = k.hbar
    return {
        "R_lim": r0,
        "R_lim_over_RC": r0 / k.R_compton,
        "m_ph": m_ph,
        "m_ph_over_me": m_ph / k.m_e,
        "s_b_lim": s_b_lim,
        "s_f_lim": s_f_lim,
        "s_ren": s_ren,
        "s_ren_over_hbar": s_ren / hb,
        "g": g,
        "g0": 2.0 / 3.0,
        "g_series_ratio": q,
        "g_series": [2.0 / 3.0, (2.0 / 3.0) * q, (2.0 / 3.0) * q * q],
        "photonic_spin": 1.5 * hb * (1.0 - 11.0 * alpha / 27.0),
        "kappa": k.m_e * k.c**2 / (hb**2 * (1.0 - 11.0 * alpha / 27.0)),
        "euler_frequency": k.m_e * k.c**2 / hb,
        "anomaly": a,
    }


def spin_decomposition_identity() -> bool:
    """Exact rational check (3/2)(1 - 11q/27) + (2/9)q = (3/2)(1 - 7q/27)."""
    lhs = Fraction(3, 2) * (1 - Fraction(11, 27)) + Fraction(2, 9)
    rhs = Fraction(3, 2) * (1 - Fraction(7, 27))
    return lhs == rhs
