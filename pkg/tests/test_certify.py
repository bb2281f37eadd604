import math

import numpy as np
import pytest
from scipy import integrate, special

from lvwave.certify import (LOWER, UPPER, build_lower_th1, build_upper_th2, convolve_closed_form,
                            residuals)
from lvwave.errors import ConstructionError, PreconditionError
from lvwave.kernel import gaussian, laplace


@pytest.fixture(scope="module")
def lower(ex1):
    return build_lower_th1(ex1)


@pytest.fixture(scope="module")
def upper(ex2):
    return build_upper_th2(ex2, s0=0.81)


@pytest.mark.parametrize("kernel", [gaussian(1.0), laplace(0.6)])
@pytest.mark.parametrize("start", [-np.inf, 0.3])
def test_convolution_against_quad(kernel, start):
    f = lambda s: special.expit(0.8 * s - 0.2)
    z = np.array([-3.0, 0.0, 0.35, 2.5])
    got = convolve_closed_form(kernel, z, f, start=start, mu=0.8)
    r = kernel.quadrature_radius
    for zi, g in zip(z, got):
        lo = max(zi - r, start)
        pts = [zi] if lo < zi < zi + r else None
        ref = integrate.quad(lambda s: kernel.density(zi - s) * f(s), lo, zi + r,
                             points=pts, epsabs=1e-13, limit=400)[0]
        assert g == pytest.approx(ref, abs=1e-11)


def test_convolution_of_constant_is_mass():
    z = np.linspace(-2, 2, 5)
    np.testing.assert_allclose(convolve_closed_form(gaussian(1.0), z, lambda s: 1.0 + 0 * s), 1.0,
                               atol=1e-13)


def test_candidate_shapes(lower, upper):
    assert lower.kind == LOWER and upper.kind == UPPER
    z = np.linspace(-60, 60, 2001)
    Phi, Psi = lower.values(z, 0.3)
    np.testing.assert_allclose(Phi, lower.k * Psi)
    assert np.all(np.diff(Psi) >= 0)
    Phi, Psi = upper.values(z, 0.3)
    assert Phi.min() == pytest.approx(upper.s0) and Psi.max() == 1.0
    assert upper.z1(0.3) < upper.z2(0.3)


@pytest.mark.parametrize("which", ["lower", "upper"])
def test_analytic_derivatives_match_differences(which, request):
    cand = request.getfixturevalue(which)
    z = np.linspace(cand.z_center() - 20, cand.z_center() + 20, 97) + 0.0123
    t, h = 0.7, 1e-6
    Pz, Pt, Sz, St = cand.derivatives(z, t)
    fp, fm = cand.values(z + h, t), cand.values(z - h, t)
    gp, gm = cand.values(z, t + h), cand.values(z, t - h)
    np.testing.assert_allclose(Pz, (fp[0] - fm[0]) / (2 * h), atol=1e-7)
    np.testing.assert_allclose(Sz, (fp[1] - fm[1]) / (2 * h), atol=1e-7)
    np.testing.assert_allclose(Pt, (gp[0] - gm[0]) / (2 * h), atol=1e-6)
    np.testing.assert_allclose(St, (gp[1] - gm[1]) / (2 * h), atol=1e-6)


def _coarse(cand):
    zc = cand.z_center()
    return np.linspace(zc - 40.03, zc + 40.02, 161), np.arange(8) * math.pi / 8


def test_finite_difference_residuals_converge_second_order(ex1, lower):
    z, t = _coarse(lower)
    exact = residuals(ex1, lower, z, t)
    errs = []
    for h in (0.02, 0.01, 0.005):
        fd = residuals(ex1, lower, z, t, fd_step=h)
        errs.append(max(np.max(np.abs(fd.R1 - exact.R1)), np.max(np.abs(fd.R2 - exact.R2))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.8), rates


def test_lower_residual_sign_on_coarse_grid(ex1, lower):
    z, t = _coarse(lower)
    rep = residuals(ex1, lower, z, t)
    assert rep.passes
    d = rep.to_dict()
    assert d["requirement"] == ">= -tol" and d["R1"]["passes"]


def test_upper_report_masks_junctions(ex2, upper):
    z, t = _coarse(upper)
    rep = residuals(ex2, upper, z, t)
    assert not rep.mask.all()
    assert rep.to_dict()["requirement"] == "<= +tol"
    # masked cells sit next to a junction line
    i, j = np.nonzero(~rep.mask)
    near = np.minimum(np.abs(z[i] - upper.z1(t[j])), np.abs(z[i] - upper.z2(t[j])))
    assert np.all(near < 2 * (z[1] - z[0]) + 1e-12)


def test_far_field_residuals_vanish(ex2, upper):
    # the profile tends to the stable limits where the operator is zero
    z, t = _coarse(upper)
    rep = residuals(ex2, upper, z, t)
    assert np.max(np.abs(rep.R1[-1])) < 1e-6 and np.max(np.abs(rep.R2[-1])) < 1e-6


def test_residual_grid_coverage(ex1, lower):
    with pytest.raises(ConstructionError):
        residuals(ex1, lower, np.linspace(-10, 10, 50))


def test_builders_validate(ex1, ex2):
    with pytest.raises(PreconditionError):
        build_lower_th1(ex1, k1=5.0)
    with pytest.raises(PreconditionError):
        build_lower_th1(ex1, c_small=-1e-3)
    with pytest.raises(PreconditionError):
        build_upper_th2(ex2, c_small=1e-3)
    with pytest.raises(PreconditionError):
        build_upper_th2(ex1, s0=0.81)
