"""Initial-data consistency classifiers for the singular particle limits.

The point-mass (Nodvik) and purely electromagnetic (Abraham) limits turn
evolution equations into constraints on the initial fields and on the
particle's velocity/angular-velocity data.  With the charge-weighted
averages <g> = (-e)^{-1} int g f_e d^3x the constraints read

  Nodvik          t_E + (1/c) omega x sigma_B = 0
  Abraham spin    c <E> + qdot x <B> - (<x(x)B> - tr<x(x)B> I) . omega = 0
                  c <x cross E> + omega x <x x.B> = 0
  Abraham no-spin c <E> + qdot x <B> = 0

with t_E = int x cross E f_e and sigma_B = int x (x.B) f_e.  Each model
is classified by assembling the constraints as one linear system in the
unknown (qdot, omega): inconsistent when no solution exists, consistent
when the data impose no restriction, conditionally consistent when a
lower-dimensional admissible family remains.  The emitted family is the
minimum-norm particular solution plus a nullspace basis; substituting any
member back into the constraints gives residuals at solver tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bare_particle import DensityProfile
from .fields import ComplexField3, StationaryState

ZERO_TOL = 1e-10


def _cross_matrix(v: np.ndarray) -> np.ndarray:
    """[v]_x with [v]_x w = v cross w."""
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


@dataclass(frozen=True)
class InitialData:
    """Charge profile plus initial field snapshot (vectorized callables)."""

    fe: DensityProfile
    e_fn: callable
    b_fn: callable
    v0: np.ndarray = None
    omega0: np.ndarray = None
    label: str = ""

    def validate_gauss(self, n_r: int = 6, n_ang: int = 26, tol: float = 1e-6) -> float:
        """Spot-check the Gauss constraints by sphere fluxes.

        Returns the worst relative defect of flux(E)/4pi against the
        enclosed charge, checking div B = 0 the same way.
        """
        rng = np.linspace(1.2 * self.fe.R, 4.0 * self.fe.R, n_r)
        mu, wmu = np.polynomial.legendre.leggauss(n_ang)
        phi = 2.0 * np.pi * np.arange(n_ang) / n_ang
        st = np.sqrt(1.0 - mu**2)
        nx = np.stack([np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)),
                       np.tile(mu[:, None], (1, n_ang))], axis=-1).reshape(-1, 3)
        wgt = (np.outer(0.5 * wmu, np.full(n_ang, 1.0 / n_ang))).reshape(-1)
        worst = 0.0
        qtot = self.fe.total
        for r in rng:
            pts = r * nx
            fe_flux = 4.0 * np.pi * r**2 * float(
                np.einsum("k,ki,ki->", wgt, self.e_fn(pts), nx))
            fb_flux = 4.0 * np.pi * r**2 * float(
                np.einsum("k,ki,ki->", wgt, self.b_fn(pts), nx))
            worst = max(worst,
                        abs(fe_flux / (4.0 * np.pi) - qtot) / max(abs(qtot), 1e-30),
                        abs(fb_flux) / max(abs(qtot), 1e-30))
        if worst > tol:
            raise ValueError(f"Gauss constraint violated: defect {worst:.3e}")
        return worst


@dataclass(frozen=True)
class Moments:
    """Charge-weighted field moments entering the constraint algebra."""

    mean_e: np.ndarray          # <E>
    mean_b: np.ndarray          # <B>
    torque_e: np.ndarray        # t_E = int x cross E f_e (unnormalized)
    sigma_b: np.ndarray         # int x (x.B) f_e (unnormalized)
    mean_x_cross_e: np.ndarray  # <x cross E>
    mean_x_xb: np.ndarray       # <x x.B>
    xb_traceless: np.ndarray    # <x (x) B> - tr <x (x) B> I
    e_scale: float
    b_scale: float
    radius: float

    def as_dict(self) -> dict:
        return {
            "mean_E": self.mean_e.tolist(),
            "mean_B": self.mean_b.tolist(),
            "torque_E": self.torque_e.tolist(),
            "sigma_B": self.sigma_b.tolist(),
            "mean_x_cross_E": self.mean_x_cross_e.tolist(),
            "mean_x_xdotB": self.mean_x_xb.tolist(),
            "xB_traceless": self.xb_traceless.tolist(),
        }


def field_moments(data: InitialData, orders=(24, 48, 24)) -> Moments:
    pts, w = data.fe.support_rule(*orders)
    e = np.asarray(data.e_fn(pts), dtype=float)
    b = np.asarray(data.b_fn(pts), dtype=float)
    q = data.fe.total
    mean_e = np.einsum("k,ki->i", w, e) / q
    mean_b = np.einsum("k,ki->i", w, b) / q
    torque_e = np.einsum("k,ki->i", w, np.cross(pts, e))
    sigma_b = np.einsum("k,ki->i", w, pts * np.einsum("ki,ki->k", pts, b)[:, None])
    mean_xce = torque_e / q
    mean_xxb = sigma_b / q
    xb = np.einsum("k,ki,kj->ij", w, pts, b) / q
    xb_traceless = xb - np.trace(xb) * np.eye(3)
    return Moments(mean_e, mean_b, torque_e, sigma_b, mean_xce, mean_xxb,
                   xb_traceless,
                   e_scale=float(np.max(np.abs(e))) if e.size else 0.0,
                   b_scale=float(np.max(np.abs(b))) if b.size else 0.0,
                   radius=data.fe.R)


@dataclass(frozen=True)
class ConstraintReport:
    model: str
    verdict: str                      # consistent | conditionally-consistent | inconsistent
    moments: Moments
    dim_family: int
    dim_full: int
    particular: dict = None           # minimum-norm solution {qdot0, omega0}
    family_basis: list = field(default_factory=list)
    residual: float = 0.0
    description: str = ""

    def family_member(self, coeffs) -> dict:
        """Particular solution shifted along the nullspace basis."""
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if len(coeffs) != len(self.family_basis):
            raise ValueError("one coefficient per basis vector")
        y = np.concatenate([np.asarray(self.particular["qdot0"]),
                            np.asarray(self.particular["omega0"])])
        for cc, base in zip(coeffs, self.family_basis):
            y = y + cc * np.asarray(base)
        return {"qdot0": y[:3], "omega0": y[3:]}

    def as_dict(self) -> dict:
        out = {
            "model": self.model,
            "verdict": self.verdict,
            "dim_family": self.dim_family,
            "dim_full": self.dim_full,
            "residual": self.residual,
            "description": self.description,
            "moments": self.moments.as_dict(),
        }
        if self.particular is not None:
            out["particular"] = {k: np.asarray(v).tolist()
                                 for k, v in self.particular.items()}
            out["family_basis"] = [np.asarray(b).tolist() for b in self.family_basis]
        return out


def _classify(a_rows: np.ndarray, b_rows: np.ndarray, scale: float,
              zero_tol: float, model: str, moments: Moments,
              active: np.ndarray) -> ConstraintReport:
    """Solve A y = b in the least-squares sense and classify.

    `active` masks which unknowns the model owns (Nodvik: omega only;
    no-spin Abraham: qdot only); inactive unknowns are reported free.
    """
    n_active = int(np.count_nonzero(active))
    a = a_rows[:, active]
    thresh = max(zero_tol * max(scale, 1e-300), 1e-13 * max(scale, 1e-300))

    if a.size and np.linalg.norm(a) > 0:
        y_act, *_ = np.linalg.lstsq(a, b_rows, rcond=None)
        resid = float(np.linalg.norm(a @ y_act - b_rows))
        u, s, vt = np.linalg.svd(a)
        rank = int(np.sum(s > max(s[0], 1e-300) * 1e-12)) if s.size else 0
        null = vt[rank:].T
    else:
        y_act = np.zeros(n_active)
        resid = float(np.linalg.norm(b_rows))
        rank = 0
        null = np.eye(n_active)

    dim = n_active - rank
    if resid > thresh:
        return ConstraintReport(model, "inconsistent", moments, 0, n_active,
                                None, [], resid,
                                "constraints admit no solution")
    y_full = np.zeros(6)
    y_full[active] = y_act
    basis = []
    for col in null.T:
        v = np.zeros(6)
        v[active] = col
        basis.append(v)
    verdict = "consistent" if dim == n_active else "conditionally-consistent"
    desc = (f"{dim}-parameter family of admissible data"
            if verdict == "conditionally-consistent"
            else "no restriction beyond the field constraints")
    return ConstraintReport(model, verdict, moments, dim, n_active,
                            {"qdot0": y_full[:3], "omega0": y_full[3:]},
                            basis, resid, desc)


def nodvik_check(data: InitialData, zero_tol: float = ZERO_TOL,
                 c: float = 1.0, orders=(24, 48, 24)) -> ConstraintReport:
    """Point-mass-limit torque constraint t_E + (1/c) omega x sigma_B = 0.

    sigma_B = 0 requires t_E = 0 (omega then free); sigma_B != 0 requires
    t_E . sigma_B = 0, leaving the one-parameter family
    omega = c t_E x sigma_B / |sigma_B|^2 + alpha sigma_B.
    """
    m = field_moments(data, orders)
    a = np.zeros((3, 6))
    a[:, 3:] = -_cross_matrix(m.sigma_b) / c
    b = -m.torque_e
    scale = abs(data.fe.total) * m.radius * max(m.e_scale, m.b_scale * m.radius / c, 1e-300)
    rep = _classify(a, b, scale, zero_tol, "nodvik", m,
                    np.array([False] * 3 + [True] * 3))
    return rep


def abraham_spin_check(data: InitialData, zero_tol: float = ZERO_TOL,
                       c: float = 1.0, orders=(24, 48, 24)) -> ConstraintReport:
    """Purely electromagnetic model with spin: both degenerate equations."""
    m = field_moments(data, orders)
    a = np.zeros((6, 6))
    b = np.zeros(6)
    # c <E> + qdot x <B> - M . omega = 0
    a[:3, :3] = -_cross_matrix(m.mean_b)
    a[:3, 3:] = -m.xb_traceless
    b[:3] = -c * m.mean_e
    # c <x cross E> + omega x <x x.B> = 0
    a[3:, 3:] = -_cross_matrix(m.mean_x_xb)
    b[3:] = -c * m.mean_x_cross_e
    scale = max(c * m.e_scale, m.b_scale * max(1.0, m.radius))
    return _classify(a, b, scale, zero_tol, "abraham_spin", m,
                     np.array([True] * 6))


def abraham_nospin_check(data: InitialData, zero_tol: float = ZERO_TOL,
                         c: float = 1.0, orders=(24, 48, 24)) -> ConstraintReport:
    """Spinless Abraham constraint c <E> + qdot x <B> = 0 at the instant."""
    m = field_moments(data, orders)
    a = np.zeros((3, 6))
    a[:, :3] = -_cross_matrix(m.mean_b)
    b = -c * m.mean_e
    scale = max(c * m.e_scale, m.b_scale)
    return _classify(a, b, scale, zero_tol, "abraham_nospin", m,
                     np.array([True] * 3 + [False] * 3))


def constraint_residuals(data: InitialData, model: str, qdot0, omega0,
                         c: float = 1.0, orders=(24, 48, 24)) -> float:
    """Residual norm of the defining constraint equations at (qdot0, omega0).

    Evaluated from the field moments exactly as the equations are written,
    normalized by the moment scale.
    """
    m = field_moments(data, orders)
    qdot0 = np.asarray(qdot0, dtype=float)
    omega0 = np.asarray(omega0, dtype=float)
    if model == "nodvik":
        r = m.torque_e + np.cross(omega0, m.sigma_b) / c
        scale = abs(data.fe.total) * m.radius * max(m.e_scale, m.b_scale, 1e-300)
        return float(np.linalg.norm(r)) / scale
    if model == "abraham_spin":
        r1 = c * m.mean_e + np.cross(qdot0, m.mean_b) - m.xb_traceless @ omega0
        r2 = c * m.mean_x_cross_e + np.cross(omega0, m.mean_x_xb)
        scale = max(c * m.e_scale, m.b_scale * max(1.0, m.radius), 1e-300)
        return float(np.sqrt(np.linalg.norm(r1)**2 + np.linalg.norm(r2)**2)) / scale
    if model == "abraham_nospin":
        r = c * m.mean_e + np.cross(qdot0, m.mean_b)
        scale = max(c * m.e_scale, m.b_scale, 1e-300)
        return float(np.linalg.norm(r)) / scale
    raise ValueError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# semi-relativistic conserved functionals
# ---------------------------------------------------------------------------

def semirel_functionals(fieldgrid: ComplexField3, m_b: float, i_b: float,
                        qdot=(0.0, 0.0, 0.0), s_b=(0.0, 0.0, 0.0),
                        q3=(0.0, 0.0, 0.0), variant: str = "spin",
                        c: float = 1.0, support_radius: float = 0.0) -> dict:
    """Energy, momentum, angular momentum, charge of a field + particle
    snapshot in the semi-relativistic massive models.

    variant 'spin'     : W includes |s_b|^2/2I_b and |p_b|^2/2m_b (Newtonian)
    variant 'infI'     : infinite-inertia limit; spin kinetic energy drops
    variant 'einstein' : Einsteinian momentum p = m gamma qdot and kinetic
                         energy m c^2 sqrt(1 + p^2/m^2 c^2)
    """
    if variant not in ("spin", "infI", "einstein"):
        raise ValueError(f"unknown variant {variant!r}")
    x, y, z = fieldgrid.axes
    half = min(x[-1], y[-1], z[-1], -x[0], -y[0], -z[0])
    if half < support_radius:
        raise ValueError("grid does not enclose the particle support")
    qdot = np.asarray(qdot, dtype=float)
    s_b = np.asarray(s_b, dtype=float)
    q3 = np.asarray(q3, dtype=float)

    e, b = fieldgrid.E, fieldgrid.B
    w_field = fieldgrid.volume_integral(np.sum(e**2 + b**2, axis=0)) / (8.0 * np.pi)
    poy = np.cross(np.moveaxis(e, 0, -1), np.moveaxis(b, 0, -1)) / (4.0 * np.pi * c)
    p_field = np.array([fieldgrid.volume_integral(poy[..., i]) for i in range(3)])
    xx, yy, zz = np.meshgrid(x, y, z, indexing="ij")
    pos = np.stack([xx, yy, zz], axis=-1)
    ang = np.cross(pos, poy)
    l_field = np.array([fieldgrid.volume_integral(ang[..., i]) for i in range(3)])

    if variant == "einstein":
        v2 = float(qdot @ qdot) / c**2
        gamma = 1.0 / np.sqrt(1.0 - v2)
        p_b = m_b * gamma * qdot
        kinetic = m_b * c**2 * np.sqrt(1.0 + float(p_b @ p_b) / (m_b * c)**2)
    else:
        p_b = m_b * qdot
        kinetic = 0.5 * float(p_b @ p_b) / m_b
    w = w_field + kinetic
    if variant == "spin":
        w += 0.5 * float(s_b @ s_b) / i_b
    p = p_field + p_b
    l = l_field + np.cross(q3, p_b) + s_b
    q_charge = fieldgrid.boundary_flux("real") / (4.0 * np.pi)
    return {"W": w, "W_field": w_field, "P": p, "L": l, "Q": q_charge}


# ---------------------------------------------------------------------------
# built-in scenarios
# ---------------------------------------------------------------------------

def make_initial_data(fe: DensityProfile, e_uniform=(0.0, 0.0, 0.0),
                      b_uniform=(0.0, 0.0, 0.0), include_coulomb: bool = True,
                      e_curl: float = 0.0, label: str = "") -> InitialData:
    """Analytic Gauss-consistent data: Coulomb self-field plus a uniform E,
    a uniform B and an optional divergence-free curl field
    e_curl (-y, x, 0) used to engineer a nonzero electric torque."""
    e_uniform = np.asarray(e_uniform, dtype=float)
    b_uniform = np.asarray(b_uniform, dtype=float)
    coul = StationaryState(fe, np.zeros(3)) if include_coulomb else None

    def e_fn(pts):
        pts = np.atleast_2d(pts)
        out = np.tile(e_uniform, (len(pts), 1))
        if coul is not None:
            out = out + coul.E(pts)
        if e_curl:
            out = out + e_curl * np.stack(
                [-pts[:, 1], pts[:, 0], np.zeros(len(pts))], axis=-1)
        return out

    def b_fn(pts):
        pts = np.atleast_2d(pts)
        return np.tile(b_uniform, (len(pts), 1))

    return InitialData(fe, e_fn, b_fn, label=label)


SCENARIOS = {
    "uniform-E-coulomb": dict(e_uniform=(0.05, 0.0, 0.0)),
    "coulomb-only": dict(),
    "uniform-B": dict(b_uniform=(0.0, 0.0, 0.08)),
    "uniform-EB-crossed": dict(e_uniform=(0.03, 0.0, 0.0), b_uniform=(0.0, 0.0, 0.08)),
    "curlE-uniform-B": dict(e_curl=0.04, b_uniform=(0.0, 0.0, 0.08)),
}


def build_scenario(name: str, fe: DensityProfile = None) -> tuple:
    """Resolve 'scenario-model' names like 'uniform-E-coulomb-nodvik'.

    Returns (InitialData, model).  The scenario part indexes SCENARIOS;
    the model suffix selects the classifier.
    """
    models = ("nodvik", "abraham-nospin", "abraham")
    model = None
    base = name
    for m in models:
        if name.endswith("-" + m):
            model = {"nodvik": "nodvik", "abraham": "abraham_spin",
                     "abraham-nospin": "abraham_nospin"}[m]
            base = name[: -(len(m) + 1)]
            break
    if model is None or base not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}")
    if fe is None:
        fe = DensityProfile.shell(-1.0, 1.0)
    data = make_initial_data(fe, label=base, **SCENARIOS[base])
    return data, model


def run_check(data: InitialData, model: str, **kw) -> ConstraintReport:
    fn = {"nodvik": nodvik_check, "abraham_spin": abraham_spin_check,
          "abraham_nospin": abraham_nospin_check}[model]
    return fn(data, **kw)
