"""Marchenko-Pastur law for the bulk spectrum of pure-noise matrices.

For an m x n matrix with i.i.d. unit-variance entries and m <= n, the
eigenvalues of X X^T / n approach the Marchenko-Pastur distribution with
aspect ratio gamma = m/n, supported on [(1 - sqrt(gamma))^2,
(1 + sqrt(gamma))^2].  Its median is the calibration constant that turns
the median singular value of an observed matrix into a noise-level
estimate.
"""

from __future__ import annotations

import math
from functools import cached_property

from scipy.integrate import quad

_BISECT_WIDTH = 1e-12
_QUANTILE_TOL = 1e-8


class MPLaw:
    """Marchenko-Pastur distribution (unit variance) for gamma in (0, 1].

    gamma = 1 is admitted by continuity of the density formula; gamma > 1
    is rejected, callers must pass min(m, n) / max(m, n).
    """

    def __init__(self, gamma: float) -> None:
        gamma = float(gamma)
        if not 0.0 < gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {gamma}")
        self.gamma = gamma
        root = math.sqrt(gamma)
        self.gamma_minus = (1.0 - root) ** 2
        self.gamma_plus = (1.0 + root) ** 2

    def __repr__(self) -> str:
        return f"MPLaw(gamma={self.gamma!r})"

    @property
    def _span(self) -> float:
        return self.gamma_plus - self.gamma_minus

    def density(self, x: float) -> float:
        """Density sqrt((g+ - x)(x - g-)) / (2 pi gamma x); zero off support."""
        if x <= self.gamma_minus or x >= self.gamma_plus:
            return 0.0
        radicand = (self.gamma_plus - x) * (x - self.gamma_minus)
        return math.sqrt(radicand) / (2.0 * math.pi * self.gamma * x)

    def _theta_integrand(self, theta: float) -> float:
        # Density transported through x = g- + (g+ - g-) sin^2(theta).  The
        # substitution absorbs both square-root edge zeros and, at gamma = 1,
        # the x^(-1/2) blow-up at the origin, leaving a smooth integrand.
        s2 = math.sin(theta) ** 2
        x = self.gamma_minus + self._span * s2
        if x == 0.0:  # gamma = 1, theta = 0: limit of the ratio below
            return self._span / (math.pi * self.gamma)
        c2 = math.cos(theta) ** 2
        return self._span**2 * s2 * c2 / (math.pi * self.gamma * x)

    def cdf(self, x: float) -> float:
        """Probability mass on [gamma_minus, x], by quadrature in theta."""
        if x <= self.gamma_minus:
            return 0.0
        if x >= self.gamma_plus:
            return 1.0
        theta_x = math.asin(math.sqrt((x - self.gamma_minus) / self._span))
        value, _ = quad(self._theta_integrand, 0.0, theta_x,
                        epsabs=1e-12, epsrel=1e-12, limit=200)
        return min(max(value, 0.0), 1.0)

    def quantile(self, p: float) -> float:
        """Inverse CDF by bisection; |cdf(result) - p| <= 1e-8 certified."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {p}")
        if p == 0.0:
            return self.gamma_minus
        if p == 1.0:
            return self.gamma_plus
        lo, hi = self.gamma_minus, self.gamma_plus
        while hi - lo > _BISECT_WIDTH:
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
        if abs(self.cdf(x) - p) > _QUANTILE_TOL:
            raise RuntimeError(
                f"quantile certification failed at p={p}: |cdf - p| > {_QUANTILE_TOL}")
        return x

    @cached_property
    def median(self) -> float:
        """The calibration constant F^{-1}(1/2), computed once per instance."""
        return self.quantile(0.5)
