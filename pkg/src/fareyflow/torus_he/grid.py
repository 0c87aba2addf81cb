"""Flat-torus grid: coordinates, quadrature, and spectral scalar calculus.

The torus is C/(Z + tau Z) with Im(tau) > 0, sampled at (x, y) = (j/N, k/N),
z = x + tau y.  The Kaehler form is the flat one scaled to unit total volume,
so the quadrature weight of every node is 1/N^2 and contraction against the
form turns a two-form coefficient F_xy into i*Lambda*F = i F_xy.
"""

from __future__ import annotations

import numpy as np


class TorusGrid:
    """N x N sample grid on the unit-volume flat torus of modulus tau."""

    def __init__(self, tau: complex, N: int):
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("modulus must have positive imaginary part")
        if N < 16 or N % 2:
            raise ValueError("grid resolution must be even and >= 16")
        self.tau = tau
        self.N = int(N)
        self.v = tau.imag
        self.h = 1.0 / N
        x = np.arange(N) / N
        self.X, self.Y = np.meshgrid(x, x, indexing="ij")
        self.Z = self.X + tau * self.Y
        # dz = c1 dx + c2 dy pullbacks: d/dz and d/dzbar in grid coordinates
        two_iv = 2j * self.v
        self.cz = (1 - tau / two_iv, 1 / two_iv)      # d_z  = cz[0] d_x + cz[1] d_y
        self.czb = (tau / two_iv, -1 / two_iv)        # d_zb = czb[0] d_x + czb[1] d_y

    @property
    def weight(self) -> float:
        return self.h * self.h

    def mean(self, field: np.ndarray) -> complex:
        """Integral against the unit-volume form (= grid average)."""
        return field.mean(axis=(0, 1)) if field.ndim > 2 else field.mean()

    # --- spectral calculus for fully periodic scalar fields -----------------
    def _laplace_symbol(self) -> np.ndarray:
        N, v, re = self.N, self.v, self.tau.real
        m = np.fft.fftfreq(N, d=1.0 / N)
        M, Nn = np.meshgrid(m, m, indexing="ij")
        return -4 * np.pi ** 2 * (v * M ** 2 + (M * re - Nn) ** 2 / v)

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        """Laplace-Beltrami operator of the unit-volume flat metric."""
        return np.fft.ifft2(self._laplace_symbol() * np.fft.fft2(f)).real \
            if np.isrealobj(f) else np.fft.ifft2(self._laplace_symbol() * np.fft.fft2(f))

    def poisson_solve(self, rhs: np.ndarray, mean_tol: float = 1e-8) -> np.ndarray:
        """Solve Laplace(phi) = rhs with mean(phi) = 0.

        The right side must integrate to ~0 (solvability on a closed surface);
        a larger defect raises with the measured value.
        """
        defect = float(np.abs(rhs.mean()))
        scale = float(np.abs(rhs).max()) or 1.0
        if defect > mean_tol * max(scale, 1.0):
            raise ValueError("Poisson right side has nonzero mean %.3e" % defect)
        sym = self._laplace_symbol()
        sym[0, 0] = 1.0
        hat = np.fft.fft2(rhs - rhs.mean())
        hat /= sym
        hat[0, 0] = 0.0
        out = np.fft.ifft2(hat)
        return out.real if np.isrealobj(rhs) else out
