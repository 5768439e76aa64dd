import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from phasebalance.curve import (
    CurveSpec,
    arc_length,
    arc_length_at,
    curvature,
    curvature_at,
    curve_phase,
    frame,
    offset_boundary,
    perimeter,
    point_on_curve,
    position_error,
    project,
    radial_distance,
    speed,
    tangent_heading,
)

PI = math.pi
CIRCLE = CurveSpec.circle(1.0)
E21 = CurveSpec.ellipse(2.0, 1.0)
E125 = CurveSpec.ellipse(1.25, 1.0)

PERIMETER_21 = 9.68844822054767619843  # 8 E(3/4), mpmath


def quad_arc(curve, t0, t1):
    return integrate.quad(lambda t: speed(curve, t), t0, t1, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


axes = st.floats(0.2, 5.0)
angles = st.floats(-10.0, 10.0)


def test_curve_spec_validation():
    with pytest.raises(ValueError):
        CurveSpec.circle(0.0)
    with pytest.raises(ValueError):
        CurveSpec.ellipse(1.0, -1.0)
    with pytest.raises(ValueError):
        CurveSpec.ellipse(1.0, 1.0, perimeter_mode="guess")
    with pytest.raises(AttributeError):
        E21.r
    assert CIRCLE.r == 1.0


class TestProject:
    def test_circle_heading_zero(self):
        t = project(CIRCLE, 0.0)
        assert t == pytest.approx(-PI / 2)
        # tangent at (0, -1) is (1, 0)
        assert point_on_curve(CIRCLE, t) == pytest.approx((0.0, -1.0), abs=1e-15)

    def test_ellipse_heading_pi(self):
        assert project(E125, PI) == pytest.approx(PI / 2, abs=1e-15)

    def test_ellipse_tan_relation(self):
        t = project(E21, PI / 4)
        assert math.tan(t) == pytest.approx(-0.5 * (1 / math.tan(PI / 4)), rel=1e-14)
        # tangent (-a sin t, b cos t) points along the heading, not against it
        tx, ty = -2 * math.sin(t), math.cos(t)
        assert tx * math.cos(PI / 4) + ty * math.sin(PI / 4) > 0
        assert t == pytest.approx(-0.463647609000806116, abs=1e-15)

    @settings(max_examples=300, deadline=None)
    @given(a=axes, b=axes, t0=st.floats(-PI + 1e-9, PI))
    def test_fixed_point(self, a, b, t0):
        c = CurveSpec.ellipse(a, b)
        assert project(c, tangent_heading(c, t0)) == pytest.approx(t0, abs=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(a=axes, b=axes, theta=angles)
    def test_tangent_relation(self, a, b, theta):
        s = math.sin(theta)
        if abs(s) < 1e-3 or abs(math.cos(theta)) < 1e-3:
            return
        c = CurveSpec.ellipse(a, b)
        t = project(c, theta)
        assert math.tan(t) == pytest.approx(-(b / a) * math.cos(theta) / s, rel=1e-10, abs=1e-10)


def test_point_on_curve():
    assert point_on_curve(E21, 0.0) == (2.0, 0.0)
    assert point_on_curve(CIRCLE, PI / 2) == pytest.approx((0.0, 1.0), abs=1e-15)
    assert point_on_curve(E125, PI / 2) == pytest.approx((0.0, 1.0), abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(a=axes, b=axes, theta=angles)
def test_frame_point_on_curve(a, b, theta):
    f = frame(CurveSpec.ellipse(a, b), theta)
    x, y = f.point
    assert (x / a) ** 2 + (y / b) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert f.kappa > 0
    assert 0 <= f.psi < 2 * PI


class TestRadialDistanceAndCurvature:
    def test_circle(self):
        c2 = CurveSpec.circle(2.0)
        for th in (0.0, 0.3, 2.0):
            assert radial_distance(c2, th) == 2.0
            assert curvature(c2, th) == 0.5
        assert curvature(CIRCLE, 1.0) == 1.0

    def test_ellipse_vertices(self):
        assert radial_distance(E21, PI / 2) == pytest.approx(2.0, rel=1e-15)
        assert radial_distance(E21, 0.0) == pytest.approx(1.0, rel=1e-15)
        # a / b^2 at the major vertex, b / a^2 at the minor vertex
        assert curvature(E21, PI / 2) == pytest.approx(2.0, rel=1e-15)
        assert curvature(E21, 0.0) == pytest.approx(0.25, rel=1e-15)
        assert curvature_at(E21, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_heading_form_matches_parametric(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for a, b, th in zip(rng.uniform(0.2, 5, 1000), rng.uniform(0.2, 5, 1000), rng.uniform(-PI, PI, 1000)):
            c = CurveSpec.ellipse(a, b)
            k1 = curvature(c, th)
            k2 = curvature_at(c, project(c, th))
            worst = max(worst, abs(k1 - k2) / k2)
        assert worst <= 1e-10


class TestArcLength:
    def test_circle_origin(self):
        assert arc_length(CIRCLE, PI) == 0.0

    def test_circle_differences(self):
        for t1, t2 in [(0.3, 1.1), (-1.0, 1.5), (1.0, 3.0)]:
            assert arc_length(CIRCLE, t2) - arc_length(CIRCLE, t1) == pytest.approx(t2 - t1, abs=1e-14)

    def test_circle_closed_form(self):
        c = CurveSpec.circle(0.7)
        for th in np.linspace(-3, 3, 13):
            t = project(c, th)
            assert arc_length(c, th) == 0.7 * (t - PI / 2)

    def test_origin_at_minor_vertex(self):
        assert arc_length_at(E21, PI / 2) == pytest.approx(0.0, abs=1e-15)

    def test_against_quadrature(self):
        for t in (-3.0, -1.2, 0.0, 0.4, 2.9):
            assert arc_length_at(E21, t) == pytest.approx(quad_arc(E21, PI / 2, t), abs=1e-11)

    def test_full_lap_accumulates_perimeter(self):
        # heading sweeps a full turn; unwrap the sigma jump at the branch cut
        ths = np.linspace(0.0, 2 * PI, 4001)
        sig = np.array([arc_length(E21, th) for th in ths])
        steps = np.diff(sig)
        steps[steps < -1.0] += perimeter(E21)
        assert steps.sum() == pytest.approx(quad_arc(E21, 0, 2 * PI), abs=1e-9)
        assert steps.sum() == pytest.approx(PERIMETER_21, abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(a=axes, b=axes, t=st.floats(-3.0, 3.0))
    def test_derivative_is_speed(self, a, b, t):
        c = CurveSpec.ellipse(a, b)
        h = 1e-5
        d = (arc_length_at(c, t + h) - arc_length_at(c, t - h)) / (2 * h)
        assert d == pytest.approx(speed(c, t), abs=1e-6)


class TestPerimeter:
    def test_circle_both_modes(self):
        assert perimeter(CIRCLE, "ramanujan") == 2 * PI
        assert perimeter(CIRCLE, "exact") == 2 * PI

    def test_ramanujan_21(self):
        assert perimeter(E21, "ramanujan") == pytest.approx(PI * (9 - math.sqrt(35)), rel=1e-15)
        assert perimeter(E21, "ramanujan") == pytest.approx(9.688421097671288, abs=1e-12)

    def test_exact_21(self):
        assert perimeter(E21) == pytest.approx(PERIMETER_21, abs=1e-12)
        assert perimeter(E21) == pytest.approx(quad_arc(E21, 0, 2 * PI), abs=1e-10)

    def test_symmetric_in_axes(self):
        assert perimeter(CurveSpec.ellipse(1.0, 2.0)) == pytest.approx(PERIMETER_21, abs=1e-12)

    @pytest.mark.parametrize("ratio", np.linspace(1.0, 3.0, 21))
    def test_ramanujan_close_to_exact(self, ratio):
        c = CurveSpec.ellipse(ratio, 1.0)
        assert abs(perimeter(c, "ramanujan") / perimeter(c, "exact") - 1) <= 1e-4


class TestCurvePhase:
    def test_circle_differences(self):
        for t1, t2 in [(0.3, 1.1), (-2.0, 2.5), (5.0, -4.0)]:
            d = curve_phase(CIRCLE, t2) - curve_phase(CIRCLE, t1)
            assert math.remainder(d - (t2 - t1), 2 * PI) == pytest.approx(0.0, abs=1e-13)

    def test_lap_closure(self):
        ths = np.linspace(0.0, 2 * PI, 2001)
        psi = np.unwrap([curve_phase(E21, th) for th in ths])
        assert psi[-1] - psi[0] == pytest.approx(2 * PI, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(a=axes, b=axes, theta=angles, mode=st.sampled_from(["exact", "ramanujan"]))
    def test_range(self, a, b, theta, mode):
        p = curve_phase(CurveSpec.ellipse(a, b, mode), theta)
        assert 0.0 <= p < 2 * PI


class TestPositionError:
    def test_circle_outside(self):
        e = position_error(CIRCLE, (1.5, 0.0, PI / 2))
        assert e == pytest.approx((0.5, 0.0), abs=1e-15)

    def test_ellipse_outside(self):
        assert position_error(E125, (1.75, 0.0, PI / 2)) == pytest.approx((0.5, 0.0), abs=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(a=axes, b=axes, t0=st.floats(-PI, PI))
    def test_on_curve_vanishes(self, a, b, t0):
        c = CurveSpec.ellipse(a, b)
        x, y = point_on_curve(c, t0)
        e = position_error(c, (x, y, tangent_heading(c, t0)))
        assert math.hypot(*e) <= 1e-12 * max(a, b)


class TestCircleDegeneracy:
    def test_ellipse_with_equal_axes_matches_circle(self):
        circ = CurveSpec.circle(1.3)
        ell = CurveSpec.ellipse(1.3, 1.3)
        for th in np.linspace(-7, 7, 57):
            assert project(ell, th) == project(circ, th)
            assert radial_distance(ell, th) == pytest.approx(1.3, abs=1e-12)
            assert curvature(ell, th) == pytest.approx(1 / 1.3, abs=1e-12)
            assert arc_length(ell, th) == pytest.approx(arc_length(circ, th), abs=1e-12)
            assert perimeter(ell) == pytest.approx(perimeter(circ), abs=1e-12)


class TestOffsetBoundary:
    def test_circle_radius_two(self):
        with pytest.warns(RuntimeWarning):
            outer, inner = offset_boundary(CIRCLE, 1.0, 64)
        np.testing.assert_allclose(np.hypot(outer[:, 0], outer[:, 1]), 2.0, atol=1e-14)
        np.testing.assert_allclose(np.hypot(inner[:, 0], inner[:, 1]), 0.0, atol=1e-14)

    def test_circle_radii(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            outer, inner = offset_boundary(CurveSpec.circle(2.0), 0.5, 32)
        np.testing.assert_allclose(np.hypot(*outer.T), 2.5, atol=1e-14)
        np.testing.assert_allclose(np.hypot(*inner.T), 1.5, atol=1e-14)

    def test_ellipse_inner_warning(self):
        with pytest.warns(RuntimeWarning, match="0.8"):
            offset_boundary(E125, 1.0, 64)

    def test_offset_distance(self):
        outer, inner = offset_boundary(E21, 0.3, 400)
        dense = np.array([point_on_curve(E21, t) for t in np.linspace(0, 2 * PI, 20001)])
        d = np.min(np.hypot(outer[:, None, 0] - dense[None, :, 0], outer[:, None, 1] - dense[None, :, 1]), axis=1)
        np.testing.assert_allclose(d, 0.3, atol=1e-4)

    def test_arguments(self):
        with pytest.raises(ValueError):
            offset_boundary(E21, 0.0, 64)
        with pytest.raises(ValueError):
            offset_boundary(E21, 0.1, 8)
