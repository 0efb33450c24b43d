import numpy as np
import pytest
from scipy.integrate import quad

from ledlab.bare_particle import (
    DensityProfile,
    GyroMassCurve,
    bare_spin,
    gamma_kernel,
    gyrational_mass,
    invert_spin_many,
    maclaurin_check,
    minkowski_inertia,
    omega_from_spin,
    spin_kernel,
    spin_magnitude,
    spin_magnitude_many,
)
from ledlab.minkowski import FourVector

SHELL = DensityProfile.shell(1.0, 1.0)
VOLUME = DensityProfile.volume(1.0, 1.0)


# ---------------------------------------------------------------------------
# independent quadrature oracles for the defining slice integrals
# ---------------------------------------------------------------------------

def oracle_gyro_mass(fm, omega, c=1.0):
    """2-d quadrature of int gamma(w r sin(theta)/c) f(r) dV."""
    def angular(r):
        g = lambda mu: 1.0 / np.sqrt(1.0 - (omega * r / c) ** 2 * (1.0 - mu**2))
        return 0.5 * quad(g, -1.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]

    if fm.kind == "shell":
        return fm.spread_total * angular(fm.R)
    rho = fm.spread_total * 3.0 / (4.0 * np.pi * fm.R**3)
    val = quad(lambda r: angular(r) * rho * 4.0 * np.pi * r**2, 0.0, fm.R,
               epsabs=1e-12, epsrel=1e-12, limit=200)[0]
    return val + fm.total * fm.point_fraction


def oracle_spin(fm, omega, c=1.0):
    """2-d quadrature of |int x cross (w cross x) gamma f dV|."""
    def angular(r):
        g = lambda mu: (1.0 - mu**2) / np.sqrt(
            1.0 - (omega * r / c) ** 2 * (1.0 - mu**2))
        return 0.5 * quad(g, -1.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]

    if fm.kind == "shell":
        return fm.spread_total * fm.R**2 * omega * angular(fm.R)
    rho = fm.spread_total * 3.0 / (4.0 * np.pi * fm.R**3)
    return omega * quad(lambda r: angular(r) * rho * 4.0 * np.pi * r**4,
                        0.0, fm.R, epsabs=1e-12, epsrel=1e-12, limit=200)[0]


class TestProfiles:
    def test_totals(self):
        assert SHELL.moment(0) == pytest.approx(1.0)
        assert VOLUME.moment(0) == pytest.approx(1.0)

    def test_moments(self):
        assert SHELL.moment(2) == pytest.approx(1.0)
        assert VOLUME.moment(2) == pytest.approx(0.6)

    def test_point_fraction_allowed_below_one(self):
        p = DensityProfile.shell(2.0, 1.0, point_fraction=0.5)
        assert p.moment(0) == pytest.approx(2.0)
        assert p.moment(2) == pytest.approx(1.0)  # only the spread part

    def test_full_point_mass_rejected(self):
        with pytest.raises(ValueError):
            DensityProfile.shell(1.0, 1.0, point_fraction=1.0)

    def test_custom_table_roundtrip(self, tmp_path):
        r = np.linspace(0.0, 1.0, 400)
        f = np.exp(-((r / 0.4) ** 2))
        p = DensityProfile.from_table(r, f)
        expect = np.trapezoid(f * 4 * np.pi * r**2, r)
        assert p.total == pytest.approx(expect, rel=1e-12)
        path = tmp_path / "prof.txt"
        np.savetxt(path, np.column_stack([r, f]))
        p2 = DensityProfile.load_table(path)
        assert p2.total == pytest.approx(p.total, rel=1e-10)
        assert p2.moment(2) == pytest.approx(p.moment(2), rel=1e-8)

    def test_radial_rule_integrates_totals(self):
        for p in (SHELL, VOLUME):
            r, w = p.radial_rule()
            assert np.sum(w) == pytest.approx(p.total, rel=1e-12)

    def test_support_rule_measure(self):
        pts, w = VOLUME.support_rule(16, 24, 16)
        assert np.sum(w) == pytest.approx(1.0, rel=1e-10)
        r2 = np.einsum("k,ki,ki->", w, pts, pts)
        assert r2 == pytest.approx(VOLUME.moment(2), rel=1e-10)

    def test_enclosed_midpoint_convention(self):
        assert SHELL.enclosed(1.0)[0] == pytest.approx(0.5)
        assert SHELL.enclosed(0.5)[0] == 0.0
        assert SHELL.enclosed(2.0)[0] == pytest.approx(1.0)


class TestGyrationalMass:
    def test_static_limit(self):
        assert gyrational_mass(SHELL, 0.0) == 1.0
        assert gyrational_mass(SHELL, 1e-9) == pytest.approx(1.0, rel=1e-12)

    def test_shell_closed_form(self):
        # shell value m_b artanh(x)/x at x = 0.5
        assert gyrational_mass(SHELL, 0.5) == pytest.approx(
            2.0 * np.arctanh(0.5), rel=1e-14)

    @pytest.mark.parametrize("x", [0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
    def test_shell_vs_quadrature(self, x):
        assert gyrational_mass(SHELL, x) == pytest.approx(
            oracle_gyro_mass(SHELL, x), rel=1e-10)

    @pytest.mark.parametrize("x", [0.1, 0.5, 0.9])
    def test_volume_vs_quadrature(self, x):
        assert gyrational_mass(VOLUME, x) == pytest.approx(
            oracle_gyro_mass(VOLUME, x), rel=1e-8)

    def test_superluminal_rejected_all_profiles(self):
        for p in (SHELL, VOLUME):
            with pytest.raises(ValueError):
                gyrational_mass(p, 1.0)

    def test_surface_mass_diverges(self):
        # grows beyond any bound as the equator approaches c
        assert gyrational_mass(SHELL, 1.0 - 1e-12) > 13.0

    def test_volume_mass_bounded(self):
        # continuous profiles keep a finite gyrational-energy limit
        near = gyrational_mass(VOLUME, 1.0 - 1e-10)
        # exact limit 3 int_0^1 artanh(s) s ds = 3/2; the fixed-order rule
        # resolves the edge log-singularity to a few 1e-4 only
        limit = quad(lambda s: 3.0 * s * np.arctanh(s), 0, 1, epsabs=1e-13)[0]
        assert limit == pytest.approx(1.5, rel=1e-12)
        assert near == pytest.approx(limit, rel=5e-4)
        assert near < 2.0

    def test_monotone_convex(self):
        w = np.linspace(0.0, 0.95, 60)
        m = np.array([gyrational_mass(SHELL, wi) for wi in w])
        assert np.all(np.diff(m) > 0)
        assert np.all(np.diff(m, 2) > -1e-12)


class TestMaclaurin:
    def test_shell(self):
        m0, ib = maclaurin_check(SHELL)
        assert m0 == pytest.approx(1.0, rel=1e-8)
        assert ib == pytest.approx(2.0 / 3.0, rel=1e-4)
        assert ib == pytest.approx(SHELL.moment_of_inertia(), rel=1e-4)

    def test_volume(self):
        m0, ib = maclaurin_check(VOLUME)
        assert m0 == pytest.approx(1.0, rel=1e-8)
        assert ib == pytest.approx(0.4, rel=1e-4)

    def test_volume_inertia_oracle(self):
        # (2/3) int r^2 f 4 pi r^2 dr by quadrature
        rho = 3.0 / (4.0 * np.pi)
        oracle = (2.0 / 3.0) * quad(
            lambda r: r**2 * rho * 4 * np.pi * r**2, 0, 1)[0]
        assert VOLUME.moment_of_inertia() == pytest.approx(oracle, rel=1e-12)


class TestBareSpin:
    def test_zero_omega(self):
        np.testing.assert_allclose(bare_spin(SHELL, [0, 0, 0]), 0.0)

    def test_shell_closed_form_value(self):
        s = bare_spin(SHELL, [0, 0, 0.5])
        expect = (1 + 1 / 0.25) / 2 * np.arctanh(0.5) - 1.0
        np.testing.assert_allclose(s, [0, 0, expect], rtol=1e-13)
        assert expect == pytest.approx(0.3732654, abs=5e-8)

    @pytest.mark.parametrize("x", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_shell_vs_quadrature(self, x):
        assert spin_magnitude(SHELL, x) == pytest.approx(
            oracle_spin(SHELL, x), rel=1e-10)

    @pytest.mark.parametrize("x", [0.3, 0.8])
    def test_volume_vs_quadrature(self, x):
        assert spin_magnitude(VOLUME, x) == pytest.approx(
            oracle_spin(VOLUME, x), rel=1e-8)

    def test_small_omega_series(self):
        # sympy Taylor oracle of the closed form: s ~ I w (1 + (2/5) w^2 R^2 ...)
        import sympy as sp

        w = sp.symbols("w", positive=True)
        closed = ((1 + 1 / w**2) / 2 * sp.atanh(w) - 1 / (2 * w))
        series = sp.series(closed, w, 0, 11).removeO()
        for x in (1e-3, 1e-2, 0.05):
            assert spin_magnitude(SHELL, x) == pytest.approx(
                float(series.subs(w, x)), rel=1e-10)

    def test_direction_isotropy(self):
        rng = np.random.default_rng(12)
        for _ in range(4):
            w3 = rng.normal(size=3) * 0.3
            s = bare_spin(SHELL, w3)
            np.testing.assert_allclose(np.cross(s, w3), 0.0, atol=1e-14)


class TestOmegaFromSpin:
    def test_zero(self):
        np.testing.assert_allclose(omega_from_spin(SHELL, [0, 0, 0]), 0.0)

    @pytest.mark.parametrize("x", [0.1, 0.5, 0.9])
    def test_round_trip(self, x):
        w3 = np.array([0.0, 0.0, x])
        s = bare_spin(SHELL, w3)
        back = omega_from_spin(SHELL, s)
        np.testing.assert_allclose(back, w3, rtol=1e-10)

    def test_round_trip_volume(self):
        w3 = np.array([0.2, -0.1, 0.6])
        s = bare_spin(VOLUME, w3)
        np.testing.assert_allclose(omega_from_spin(VOLUME, s), w3, rtol=1e-9)

    def test_monotone_inverse(self):
        smags = np.linspace(0.01, 3.0, 25)
        ws = invert_spin_many(SHELL, smags)
        assert np.all(np.diff(ws) > 0)

    def test_shell_accepts_large_spin(self):
        # surface inertia stores unbounded gyrational spin; any |s| up to
        # the double-precision resolution of artanh near the light edge
        # inverts (here |s| = 10 needs omega R / c = 1 - 6e-10)
        w = omega_from_spin(SHELL, [0, 0, 10.0])
        assert 0 < np.linalg.norm(w) < 1.0
        # sigma is log-steep at the edge, so the spin round trip is only
        # conditioned to ~|sigma'| * eps_machine
        assert spin_magnitude(SHELL, np.linalg.norm(w)) == pytest.approx(10.0, rel=1e-5)

    def test_volume_supremum_rejected(self):
        with pytest.raises(ValueError):
            omega_from_spin(VOLUME, [0, 0, 10.0])

    def test_vectorized_matches_scalar(self):
        smags = np.array([0.05, 0.4, 1.3])
        ws = invert_spin_many(SHELL, smags)
        for s, w in zip(smags, ws):
            expect = np.linalg.norm(omega_from_spin(SHELL, [0, 0, s]))
            assert w == pytest.approx(expect, rel=1e-10)

    def test_spin_magnitude_many_consistent(self):
        ws = np.array([0.1, 0.4, 0.85])
        vals = spin_magnitude_many(SHELL, ws)
        for w, v in zip(ws, vals):
            assert v == pytest.approx(spin_magnitude(SHELL, w), rel=1e-12)


class TestMinkowskiInertia:
    def test_static_shell_blocks(self):
        t = minkowski_inertia(SHELL, [0, 0, 0])
        op = t.operator
        # operator time-time entry: int r^2 f = m R^2; space block (2/3) m R^2
        assert op[0, 0] == pytest.approx(1.0)
        np.testing.assert_allclose(np.diag(op)[1:], 2.0 / 3.0, rtol=1e-12)
        np.testing.assert_allclose(op - np.diag(np.diag(op)), 0.0, atol=1e-14)

    def test_contraction_reproduces_spin(self):
        w3 = np.array([0.1, 0.2, 0.4])
        t = minkowski_inertia(SHELL, w3)
        got = t.dot(FourVector([0.0, *w3]))
        np.testing.assert_allclose(got.c[1:], bare_spin(SHELL, w3), rtol=1e-12)
        assert got.c[0] == pytest.approx(0.0, abs=1e-14)

    def test_symmetric(self):
        t = minkowski_inertia(VOLUME, [0.3, 0.0, 0.4])
        np.testing.assert_allclose(t.m, t.m.T, atol=1e-12)

    def test_component_oracle(self):
        # direct quadrature of the defining integrand for the shell
        w = 0.6

        def angular(fn):
            return 0.5 * quad(fn, -1, 1, epsabs=1e-13, epsrel=1e-13)[0]

        gam = lambda mu: 1.0 / np.sqrt(1.0 - w**2 * (1.0 - mu**2))
        i_par = angular(lambda mu: (1 - mu**2) * gam(mu))        # zz kernel
        i_time = angular(gam)
        t = minkowski_inertia(SHELL, [0, 0, w])
        assert t.operator[3, 3] == pytest.approx(i_par, rel=1e-10)
        assert t.operator[0, 0] == pytest.approx(i_time, rel=1e-10)
        # xx entry: <gamma (1 - sin^2 cos^2 phi)> = <gamma> - i_par/2
        assert t.operator[1, 1] == pytest.approx(i_time - 0.5 * i_par, rel=1e-10)

    def test_superluminal_rejected(self):
        with pytest.raises(ValueError):
            minkowski_inertia(SHELL, [0, 0, 1.2])


class TestGyroMassCurve:
    def test_monotone_and_convex(self):
        curve = GyroMassCurve(SHELL)
        assert np.all(np.diff(curve.mass_grid) > 0)
        assert curve.mass(0.0) == pytest.approx(1.0, rel=1e-10)

    def test_inverse_consistency(self):
        curve = GyroMassCurve(SHELL)
        s = spin_magnitude(SHELL, 0.45)
        approx = float(curve.omega_of_spin_mag(s))
        exact = curve.omega_of_spin_exact(s)
        assert approx == pytest.approx(exact, rel=1e-5)
        assert exact == pytest.approx(0.45, rel=1e-10)
