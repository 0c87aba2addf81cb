"""Curvature of metrics over the background connection, constant-curvature
residuals, second fundamental forms, the integral trace identity, the
sup/mean threshold probe, and conformal determinant normalization.

Conventions: with the background unitary connection d + A (compatible with
the identity reference metric) and another metric H, the Chern connection
adds the (1,0) piece  gamma = H^-1 (d_z H + [A_z, H]) dz  and the curvature
contraction becomes

    i Lambda F_H = i F^A_xy - 2 v (d_zbar g + [A_zbar, g]),   g = gamma coeff.

For the constant-curvature model, i Lambda F = 2 pi mu Id exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fields import (ConnectionField, EndoField, FormField, MetricField,
                     SectionField, comm, mm, rho_norm_field)


def metric_gamma(H: MetricField, conn: ConnectionField) -> np.ndarray:
    """(1,0)-coefficient of the Chern-connection correction of H."""
    az = conn.a_z()
    return mm(np.linalg.inv(H.data), H.d_z() + comm(az, H.data))


def i_lambda_F_metric(H: MetricField, conn: ConnectionField) -> np.ndarray:
    """i Lambda of the curvature of the metric H over the background."""
    g = EndoField(H.grid, H.twist, metric_gamma(H, conn))
    azb = conn.a_zbar()
    correction = g.d_zbar() + comm(azb, g.data)
    return conn.i_lambda_F() - 2 * H.grid.v * correction


def he_residual(conn: ConnectionField, H: MetricField, mu) -> float:
    """sup over nodes of |i Lambda F_H - 2 pi mu Id| in the H-operator norm."""
    mu = float(Fraction(mu)) if not isinstance(mu, float) else mu
    r = H.twist.rank
    field = i_lambda_F_metric(H, conn) - 2 * np.pi * mu * np.eye(r)
    return float(rho_norm_field(field, H).max())


# ----------------------------------------------------------------------------
# subbundles and second fundamental forms


@dataclass
class SecondFundamentalForm:
    beta: FormField              # (1,0)-form, maps the subbundle to its complement
    projection: EndoField        # H-orthogonal projection onto the subbundle
    norm_sq: np.ndarray          # pointwise |beta|_H^2
    holomorphy_residual: float   # max |(1 - pi) dbar_A pi| (0 for a holomorphic subbundle)


def second_fundamental_form(incl: SectionField, H: MetricField,
                            conn: ConnectionField, sv_floor: float = 1e-8) -> SecondFundamentalForm:
    """beta = (1 - pi) d_H pi for the subbundle spanned by the given columns.

    The inclusion must be fiberwise injective: the smallest singular value of
    the column block is checked against sv_floor and the offending node is
    named on failure.  Returns beta with the projection and the pointwise
    norm field |beta|^2 = 2 v tr(H^-1 b^dag H b).
    """
    cols = incl.columns
    svals = np.linalg.svd(cols, compute_uv=False)[..., -1]
    worst = np.unravel_index(np.argmin(svals), svals.shape)
    if svals[worst] < sv_floor:
        raise ValueError("inclusion nearly singular at node %r (sigma_min = %.3e)"
                         % (tuple(int(i) for i in worst), svals[worst]))
    Hd = H.data
    gram = np.einsum("xyam,xyab,xybn->xymn", cols.conj(), Hd, cols)
    gram_inv = np.linalg.inv(gram)
    pi = np.einsum("xyam,xymn,xybn,xybc->xyac", cols, gram_inv, cols.conj(), Hd)
    pi_field = EndoField(H.grid, H.twist, pi)

    az, azb = conn.a_z(), conn.a_zbar()
    gamma = metric_gamma(H, conn)
    dz_pi = pi_field.d_z() + comm(az + gamma, pi)
    dzb_pi = pi_field.d_zbar() + comm(azb, pi)
    one_minus = np.eye(H.twist.rank) - pi
    b = mm(one_minus, dz_pi)
    holo = float(np.abs(mm(one_minus, dzb_pi)).max())
    beta = FormField(H.grid, H.twist, b)
    return SecondFundamentalForm(beta, pi_field, beta.norm_sq_field(H), holo)


def chern_weil_check(beta: FormField | SecondFundamentalForm, H: MetricField,
                     muE, muS, rkS: int) -> tuple[float, float, float]:
    """Integral of |beta|^2 against 2 pi (mu_E - mu_S) rk(S); returns
    (lhs, rhs, relative error)."""
    if isinstance(beta, SecondFundamentalForm):
        field = beta.norm_sq
    else:
        field = beta.norm_sq_field(H)
    lhs = float(field.mean())
    rhs = float(2 * np.pi * (Fraction(muE) - Fraction(muS)) * rkS)
    rel = abs(lhs - rhs) / abs(rhs) if rhs else abs(lhs)
    return lhs, rhs, rel


@dataclass
class ThresholdProbe:
    ratio: float
    sup: float
    mean: float


def threshold_probe(beta: FormField | SecondFundamentalForm,
                    H: MetricField | None = None) -> ThresholdProbe:
    """sup |beta|^2 / mean |beta|^2: an empirical lower bound for the
    constant relating the two in the convergence-threshold inequality."""
    if isinstance(beta, SecondFundamentalForm):
        field = beta.norm_sq
    elif isinstance(beta, np.ndarray):
        field = beta
    else:
        if H is None:
            raise ValueError("a metric is required to evaluate |beta|^2")
        field = beta.norm_sq_field(H)
    mean = float(field.mean())
    if mean <= 0:
        raise ValueError("beta vanishes identically; the ratio is undefined")
    return ThresholdProbe(float(field.max()) / mean, float(field.max()), mean)


# ----------------------------------------------------------------------------
# conformal normalization (Poisson solve on the torus)


@dataclass
class ConformalResult:
    phi: np.ndarray
    normalized: MetricField
    mean_phi: float
    rhs_mean_defect: float
    det_deviation: float         # max |det(e^phi H H0^-1) - 1|


def conformal_normalize(H_restricted: MetricField, H0: MetricField, mu_pair,
                        conn: ConnectionField | None = None,
                        mean_tol: float = 1e-6) -> ConformalResult:
    """Solve  Lap(phi) = (2/rk) (tr i Lambda F_H - 2 pi mu_S rk)  with zero
    mean and rescale H by e^phi.

    The right side integrates to zero up to discretization (its mean is the
    curvature integral minus the degree), which is checked against mean_tol.
    The determinant det(e^phi H H0^-1) comes out constant; it equals 1 when
    the input pair is compatibly scaled (the reported deviation makes the
    leftover constant visible instead of hiding it).
    """
    grid = H_restricted.grid
    rk = H_restricted.twist.rank
    muE, muS = mu_pair
    if conn is None:
        conn = ConnectionField(grid, H_restricted.twist,
                               np.zeros_like(H_restricted.data),
                               np.zeros_like(H_restricted.data))
    tr_ilf = np.einsum("...aa->...", i_lambda_F_metric(H_restricted, conn)).real
    rhs = (2.0 / rk) * (tr_ilf - 2 * np.pi * float(Fraction(muS)) * rk)
    defect = float(abs(rhs.mean()))
    if defect > mean_tol * max(1.0, float(np.abs(rhs).max())):
        raise ValueError("conformal equation not solvable: right side has mean %.3e"
                         % rhs.mean())
    phi = grid.poisson_solve(rhs - rhs.mean(), mean_tol=np.inf)
    scaled = MetricField(grid, H_restricted.twist,
                         np.exp(phi)[..., None, None] * H_restricted.data)
    ratio = mm(scaled.data, np.linalg.inv(H0.data))
    det = np.linalg.det(ratio)
    return ConformalResult(phi, scaled, float(abs(phi.mean())), defect,
                           float(np.abs(det - 1).max()))
