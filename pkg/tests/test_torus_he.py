import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from fareyflow.torus_he import (ConnectionField, EndoField, MetricField,
                                TorusGrid, TwistData, build_model_bundle,
                                chern_weil_check, conformal_normalize,
                                he_residual, identity_metric, second_fundamental_form,
                                section_basis, theta_section, threshold_probe)
from fareyflow.torus_he.fields import FormField, mm


@pytest.fixture(scope="module")
def model21():
    grid = TorusGrid(1j, 64)
    tw, conn, H0 = build_model_bundle(2, 1, grid)
    return grid, tw, conn, H0


# ----------------------------------------------------------------------------
# model bundles


def test_model_residuals_coprime():
    g = TorusGrid(1j, 32)
    for r, d in [(1, 0), (2, 1), (3, 2), (5, 3), (5, -2), (7, 4)]:
        tw, conn, H0 = build_model_bundle(r, d, g)
        assert he_residual(conn, H0, Fraction(d, r)) < 1e-10


def test_model_rejects_common_factor():
    g = TorusGrid(1j, 32)
    with pytest.raises(ValueError, match="gcd"):
        build_model_bundle(4, 2, g)
    with pytest.raises(ValueError, match="gcd"):
        build_model_bundle(2, 0, g)


def test_model_generic_modulus():
    g = TorusGrid(-0.35 + 0.8j, 32)
    tw, conn, H0 = build_model_bundle(3, 1, g)
    assert he_residual(conn, H0, Fraction(1, 3)) < 1e-10


def test_residual_detects_wrong_slope():
    g = TorusGrid(1j, 32)
    tw, conn, H0 = build_model_bundle(2, 1, g)
    delta = Fraction(1, 50)
    assert he_residual(conn, H0, Fraction(1, 2) + delta) >= float(2 * math.pi * delta) - 1e-9


def test_residual_of_conformal_weight_vs_spectral_laplacian():
    # rank 1, d = 0, H = e^psi: residual must equal sup |Lap psi| / 2
    g = TorusGrid(1j, 64)
    tw, conn, H0 = build_model_bundle(1, 0, g)
    psi = np.sin(2 * np.pi * g.X)
    H = MetricField(g, tw, np.exp(psi)[..., None, None] * H0.data)
    res = he_residual(conn, H, 0)
    oracle = np.abs(g.laplacian(psi)).max() / 2       # spectral route
    assert res == pytest.approx(oracle, rel=1e-5)
    assert oracle == pytest.approx(2 * np.pi ** 2, rel=1e-12)


# ----------------------------------------------------------------------------
# theta sections


def test_theta_r1_d1_matches_jtheta():
    # component 0 in the holomorphic frame is sum exp(i pi tau t^2 + 2 pi i t z)
    # = jtheta(3, pi z, exp(i pi tau)) in mpmath's convention
    g = TorusGrid(1j, 16)
    tw, conn, H0 = build_model_bundle(1, 1, g)
    sec = theta_section(tw, g, (0, 0))
    q = complex(mpmath.exp(1j * mpmath.pi * g.tau))
    for ix, iy in [(0, 0), (3, 7), (10, 2), (15, 15)]:
        z = g.Z[ix, iy]
        ref = complex(mpmath.jtheta(3, mpmath.pi * z, q))
        mine = sec.data[ix, iy, 0] * np.exp(np.pi * g.v * g.Y[ix, iy] ** 2)
        assert abs(mine - ref) < 1e-12 * max(1.0, abs(ref))


def test_theta_automorphy_residuals():
    g = TorusGrid(0.2 + 1.0j, 32)
    for r, d in [(1, 1), (2, 1), (3, 1), (3, 2), (1, 3)]:
        tw, conn, H0 = build_model_bundle(r, d, g)
        sec = theta_section(tw, g, (0, 0))
        assert sec.automorphy_residual < 1e-12


def test_theta_section_errors():
    g = TorusGrid(1j, 32)
    tw, conn, H0 = build_model_bundle(2, 1, g)
    with pytest.raises(ValueError, match="integer"):
        theta_section(tw, g, (Fraction(1, 2), 0))
    with pytest.raises(ValueError, match="multiple"):
        theta_section(tw, g, (0, Fraction(1, 2)))
    tw0, conn0, _ = build_model_bundle(1, 0, g)
    with pytest.raises(ValueError, match="degree"):
        theta_section(tw0, g)


def test_theta_r2_d1_nowhere_vanishing(model21):
    g, tw, conn, H0 = model21
    sec = theta_section(tw, g, (0, 0))
    assert sec.min_singular_value() > 0.5
    # zero set is empty on every grid line
    norms = np.linalg.norm(sec.data, axis=-1)
    assert norms.min(axis=0).min() > 0.5 and norms.min(axis=1).min() > 0.5


def test_theta_r1_d3_three_sections():
    g = TorusGrid(1j, 32)
    tw, conn, H0 = build_model_bundle(1, 3, g)
    basis = section_basis(tw, g)
    gram = basis.gram()
    assert gram.shape == (3, 3)
    w = np.linalg.eigvalsh(gram)
    assert w.min() > 1e-3 * w.max()       # rank 3


def test_theta_r3_d2_two_sections():
    g = TorusGrid(1j, 32)
    tw, conn, H0 = build_model_bundle(3, 2, g)
    gram = section_basis(tw, g).gram()
    assert gram.shape == (2, 2)
    w = np.linalg.eigvalsh(gram)
    assert w.min() > 1e-3 * w.max()       # the section space has dimension d


def test_theta_twisted_cauchy_riemann(model21):
    g, tw, conn, H0 = model21
    sec = theta_section(tw, g, (0, 0))
    from fareyflow.torus_he.twist import d4_section
    dzb = (g.czb[0] * d4_section(sec.data, tw, g, 0, g.h)
           + g.czb[1] * d4_section(sec.data, tw, g, 1, g.h))
    cr = dzb + np.einsum("xyab,xyb->xya", conn.a_zbar(), sec.data)
    assert np.abs(cr).max() < 5e-6        # 4th-order differences at N = 64


# ----------------------------------------------------------------------------
# second fundamental forms


def test_sff_full_inclusion_vanishes(model21):
    g, tw, conn, H0 = model21
    cols = np.broadcast_to(np.eye(2, dtype=complex), (g.N, g.N, 2, 2)).copy()
    from fareyflow.torus_he import SectionField
    sff = second_fundamental_form(SectionField(g, tw, cols), H0, conn)
    assert np.abs(sff.projection.data - np.eye(2)).max() < 1e-12
    assert np.abs(sff.norm_sq).max() < 1e-20


def test_sff_parallel_summand_vanishes():
    # constant orthogonal summand of the flat trivial rank-2 bundle
    g = TorusGrid(1j, 32)
    tw = TwistData.trivial(2)
    H0 = identity_metric(g, tw)
    conn = ConnectionField(g, tw, np.zeros_like(H0.data), np.zeros_like(H0.data))
    from fareyflow.torus_he import SectionField
    col = np.zeros((g.N, g.N, 2), complex)
    col[..., 0] = 1 / math.sqrt(2)
    col[..., 1] = 1 / math.sqrt(2)
    sff = second_fundamental_form(SectionField(g, tw, col), H0, conn)
    assert np.abs(sff.norm_sq).max() < 1e-24


def test_sff_near_singular_inclusion_names_node():
    g = TorusGrid(1j, 32)
    tw, conn, H0 = build_model_bundle(2, 1, g)
    sec = theta_section(tw, g, (0, 0))
    bad = sec.data.copy()
    bad[3, 5] *= 1e-12
    from fareyflow.torus_he import SectionField
    with pytest.raises(ValueError, match=r"\(3, 5\)"):
        second_fundamental_form(SectionField(g, tw, bad), H0, conn)


def test_chern_weil_line_subbundle(model21):
    g, tw, conn, H0 = model21
    sec = theta_section(tw, g, (0, 0))
    sff = second_fundamental_form(sec, H0, conn)
    lhs, rhs, rel = chern_weil_check(sff, H0, Fraction(1, 2), 0, 1)
    assert rhs == pytest.approx(math.pi, abs=1e-14)
    assert rel < 1e-4
    assert sff.holomorphy_residual < 1e-4


def test_chern_weil_zero_beta(model21):
    g, tw, conn, H0 = model21
    beta = FormField(g, tw, np.zeros((g.N, g.N, 2, 2), complex))
    lhs, rhs, rel = chern_weil_check(beta, H0, Fraction(1, 2), Fraction(1, 2), 1)
    assert (lhs, rhs, rel) == (0.0, 0.0, 0.0)


def test_chern_weil_refines_at_fourth_order():
    errs = []
    for N in (32, 64):
        g = TorusGrid(1j, N)
        tw, conn, H0 = build_model_bundle(2, 1, g)
        sff = second_fundamental_form(theta_section(tw, g, (0, 0)), H0, conn)
        errs.append(chern_weil_check(sff, H0, Fraction(1, 2), 0, 1)[2])
    order = math.log2(errs[0] / errs[1])
    assert 3.2 <= order <= 4.8


# ----------------------------------------------------------------------------
# threshold probe


def test_threshold_constant_field_is_one(model21):
    g, tw, conn, H0 = model21
    probe = threshold_probe(np.ones((g.N, g.N)))
    assert probe.ratio == 1.0


def test_threshold_zero_beta_flagged(model21):
    g, tw, conn, H0 = model21
    with pytest.raises(ValueError, match="vanishes"):
        threshold_probe(np.zeros((g.N, g.N)))


def test_threshold_theta_subbundle_ratio(model21):
    # the pointwise |beta|^2 of the theta line subbundle is a theta-type
    # density with one zero, not a constant: the ratio is ~2.19, stable in N
    g, tw, conn, H0 = model21
    sff = second_fundamental_form(theta_section(tw, g, (0, 0)), H0, conn)
    probe = threshold_probe(sff)
    assert probe.ratio == pytest.approx(2.18844, abs=2e-3)
    assert probe.ratio > 1
    g2 = TorusGrid(1j, 96)
    tw2, conn2, H02 = build_model_bundle(2, 1, g2)
    sff2 = second_fundamental_form(theta_section(tw2, g2, (0, 0)), H02, conn2)
    assert threshold_probe(sff2).ratio == pytest.approx(probe.ratio, abs=1e-4)


def test_threshold_perturbed_metric_above_one(model21):
    g, tw, conn, H0 = model21
    bump = 1.0 + 0.2 * np.cos(2 * np.pi * g.X)
    H = MetricField(g, tw, bump[..., None, None] * H0.data)
    sff = second_fundamental_form(theta_section(tw, g, (0, 0)), H, conn)
    assert threshold_probe(sff).ratio > 1.0


# ----------------------------------------------------------------------------
# conformal normalization


def test_conformal_flat_input_is_noop(model21):
    g, tw, conn, H0 = model21
    res = conformal_normalize(H0, H0, (Fraction(1, 2), Fraction(1, 2)), conn)
    assert np.abs(res.phi).max() < 1e-10
    assert res.det_deviation < 1e-10


def test_conformal_manufactured_cosine():
    g = TorusGrid(1j, 64)
    tw, conn, H0 = build_model_bundle(1, 0, g)
    psi = np.cos(2 * np.pi * g.X) / (4 * np.pi ** 2)
    H = MetricField(g, tw, np.exp(-psi)[..., None, None] * H0.data)
    res = conformal_normalize(H, H0, (0, 0), conn)
    assert np.abs(res.phi - psi).max() < 1e-6
    assert res.det_deviation < 1e-6
    assert res.mean_phi < 1e-12


def test_conformal_rejects_nonzero_mean():
    g = TorusGrid(1j, 32)
    tw, conn, H0 = build_model_bundle(1, 0, g)
    # a metric whose curvature integral does not match the claimed slope
    H = MetricField(g, tw, np.exp(0.1 * np.cos(2 * np.pi * g.X))[..., None, None] * H0.data)
    with pytest.raises(ValueError, match="mean"):
        conformal_normalize(H, H0, (0, Fraction(1, 5)), conn)


def test_conformal_matches_logdet_route(model21):
    # independent identity: the zero-mean solution equals
    # -(1/rk)(log det h - mean log det h) for the restricted metric
    g, tw, conn, H0 = model21
    sec = theta_section(tw, g, (0, 0))
    h_s = np.einsum("xya,xya->xy", sec.data.conj(), sec.data).real
    tw1 = TwistData.clock_shift(1, 0)
    Hs = MetricField(g, tw1, h_s[..., None, None].astype(complex))
    H0s = identity_metric(g, tw1)
    res = conformal_normalize(Hs, H0s, (Fraction(1, 2), 0))
    oracle = -(np.log(h_s) - np.log(h_s).mean())
    assert np.abs(res.phi - oracle).max() < 2e-5
    scaled_det = np.exp(res.phi) * h_s
    assert scaled_det.std() / scaled_det.mean() < 2e-5     # constant determinant
