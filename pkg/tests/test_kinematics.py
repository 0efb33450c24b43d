import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ledlab.kinematics import (
    AdmissibilityFlags,
    GyrographSample,
    WorldlineSample,
    angular_velocity,
    fermi_walker,
    four_velocity,
    gyration_tensor,
    thomas_precession,
    validate_state,
)
from ledlab.minkowski import FourVector, Rank2Tensor, inner

E0 = FourVector.basis(0)

subluminal = st.tuples(*[st.floats(min_value=-0.57, max_value=0.57)
                         for _ in range(3)])


class TestFourVelocity:
    def test_at_rest(self):
        np.testing.assert_allclose(four_velocity([0, 0, 0]).c, [1, 0, 0, 0])

    def test_known_boost(self):
        np.testing.assert_allclose(four_velocity([0.6, 0, 0]).c,
                                   [1.25, 0.75, 0.0, 0.0])

    @given(subluminal)
    @settings(deadline=None, max_examples=60)
    def test_unit_norm(self, v):
        u = four_velocity(np.array(v))
        assert inner(u, u) == pytest.approx(-1.0, abs=1e-12)
        assert u.time >= 1.0

    def test_superluminal_rejected(self):
        with pytest.raises(ValueError):
            four_velocity([1.0, 0.2, 0.0])

    def test_explicit_c(self):
        c = 3.0e10
        u = four_velocity([0.6 * c, 0, 0], c=c)
        np.testing.assert_allclose(u.c, [1.25, 0.75, 0, 0])


class TestFermiWalker:
    def test_inertial_motion_gives_zero(self):
        t = fermi_walker(E0, FourVector([0, 0, 0, 0]))
        np.testing.assert_allclose(t.m, 0.0)

    def test_basis_case(self):
        t = fermi_walker(E0, FourVector.basis(1))
        expect = np.outer(FourVector.basis(1).c, E0.c)
        np.testing.assert_allclose(t.m, expect - expect.T)

    def test_action_on_u_gives_minus_a(self):
        # (a ^ u) . u = a (u.u) - u (a.u) = -a for unit timelike u
        u = four_velocity([0.3, -0.2, 0.4])
        a3 = np.array([0.1, 0.5, -0.2])
        # build an admissible four-acceleration orthogonal to u
        a = FourVector([0.0, *a3])
        proj = a.c + inner(a, u) * u.c  # project out the u component
        a = FourVector(proj)
        t = fermi_walker(u, a)
        np.testing.assert_allclose(t.dot(u).c, -a.c, atol=1e-12)
        assert t.check_symmetry(1e-15) and t.symmetry == "antisymmetric"

    def test_annihilates_orthogonal_complement(self):
        u = E0
        a = FourVector.basis(1)
        t = fermi_walker(u, a)
        for mu in (2, 3):
            np.testing.assert_allclose(t.dot(FourVector.basis(mu)).c, 0.0)

    def test_constraint_rejection(self):
        with pytest.raises(ValueError):
            fermi_walker(FourVector([2, 0, 0, 0]), FourVector([0, 1, 0, 0]))
        with pytest.raises(ValueError):
            fermi_walker(E0, FourVector([1.0, 1, 0, 0]))


class TestThomasPrecession:
    def test_known_value(self):
        # gamma = 1.25, (gamma-1) a x v / |v|^2 with a x v = (0,0,-0.6)
        got = thomas_precession([0.6, 0, 0], [0, 1, 0])
        np.testing.assert_allclose(got, [0.0, 0.0, -0.25 * 0.6 / 0.36])

    def test_parallel_acceleration(self):
        np.testing.assert_allclose(thomas_precession([0.5, 0, 0], [2, 0, 0]), 0.0)

    def test_zero_velocity_extension(self):
        np.testing.assert_allclose(thomas_precession([0, 0, 0], [0, 1, 0]), 0.0)

    def test_small_velocity_limit(self):
        # omega_T -> (a x v)/2 (1 + O(v^2))
        v = np.array([1e-4, 0, 0])
        a = np.array([0, 1.0, 0])
        got = thomas_precession(v, a)
        np.testing.assert_allclose(got, np.cross(a, v) / 2, rtol=1e-7)

    @given(subluminal, st.tuples(*[st.floats(-3, 3) for _ in range(3)]))
    @settings(deadline=None, max_examples=60)
    def test_direction_parallel_to_a_cross_v(self, v, a):
        v, a = np.array(v), np.array(a)
        if np.linalg.norm(v) < 1e-6:
            return
        got = thomas_precession(v, a)
        np.testing.assert_allclose(np.cross(got, np.cross(a, v)), 0.0, atol=1e-9)


class TestGyrationTensor:
    def test_round_trip(self):
        w3 = np.array([0.2, -0.1, 0.4])
        om = gyration_tensor(w3, E0)
        np.testing.assert_allclose(angular_velocity(om, E0), w3, atol=1e-13)

    def test_element_velocity_convention(self):
        # U = u - Om.x must have space part (w x x)/c
        w3 = np.array([0.0, 0.0, 0.5])
        c = 2.0
        om = gyration_tensor(w3, E0, c=c)
        x = FourVector([0.0, 1.0, 0.0, 0.0])
        u_el = E0.c - om.dot(x).c
        np.testing.assert_allclose(u_el, [1.0, *(np.cross(w3, [1, 0, 0]) / c)])


def make_state(u, a, w3, R=1.0):
    om = gyration_tensor(w3, u)
    from ledlab.minkowski import dual_vector
    w4 = dual_vector(om, u)
    wl = WorldlineSample(0.0, FourVector([0, 0, 0, 0]), u, a)
    gg = GyrographSample(0.0, om, w4)
    return validate_state(wl, gg, R)


class TestValidateState:
    def test_stationary_all_pass(self):
        flags = make_state(E0, FourVector([0, 0, 0, 0]), [0, 0, 0.5])
        assert flags.all_ok
        assert flags.equatorial_speed == pytest.approx(0.5)

    def test_superluminal_equator_fails(self):
        flags = make_state(E0, FourVector([0, 0, 0, 0]), [0, 0, 1.01])
        assert not flags.equatorial_ok
        assert flags.velocity_ok and flags.gyration_ok

    def test_acceleration_bound_fails(self):
        flags = make_state(E0, FourVector([0.0, 1.1, 0, 0]), [0, 0, 0.3])
        assert not flags.acceleration_ok
        assert flags.rest_acceleration == pytest.approx(1.1)

    def test_reports_are_pure(self):
        a = FourVector([0.0, 0.5, 0, 0])
        f1 = make_state(E0, a, [0, 0, 0.2])
        f2 = make_state(E0, a, [0, 0, 0.2])
        assert f1 == f2

    def test_residual_fields_numeric(self):
        flags = make_state(E0, FourVector([0, 0, 0, 0]), [0, 0, 0.2])
        assert isinstance(flags, AdmissibilityFlags)
        assert flags.unit_velocity_residual == 0.0
        assert flags.gyration_residual == 0.0
