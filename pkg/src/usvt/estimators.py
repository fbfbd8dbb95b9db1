"""Noise-level estimation and universal singular value thresholding.

The noise level of X = M + sigma * A is estimated from the median singular
value of X, calibrated by the Marchenko-Pastur median:

    sigma_hat = med(lambda_i(X)) / sqrt(n * mu_gamma),    n = max(m, n).

Denoising keeps exactly the singular components whose values reach
(2 + eta) * sigma * sqrt(n) and zeroes the rest; the adaptive variant
plugs in sigma_hat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mp_law import MPLaw
from .spectral import as_matrix, svd, singular_values

DEFAULT_ETA = 0.02


@lru_cache(maxsize=None)
def _law(gamma: float) -> MPLaw:
    # Shared per-aspect-ratio instances so mu_gamma is computed once per shape.
    return MPLaw(gamma)


@dataclass(frozen=True)
class DenoiseReport:
    """Full audit of one thresholding run.

    kept_indices are 1-based positions into the descending singular values;
    with an inclusive threshold they always form the prefix 1..kept_rank.
    degenerate_sigma flags a zero noise level (threshold 0, output = input).
    """

    m: int
    n: int
    eta: float
    sigma_used: float
    mu_gamma: float
    threshold: float
    kept_rank: int
    kept_indices: tuple[int, ...]
    degenerate_sigma: bool

    def to_dict(self) -> dict:
        """Flat key/value form used by the JSON report file."""
        return {
            "m": self.m,
            "n": self.n,
            "eta": self.eta,
            "sigma_used": self.sigma_used,
            "mu_gamma": self.mu_gamma,
            "threshold": self.threshold,
            "kept_rank": self.kept_rank,
            "kept_indices": list(self.kept_indices),
            "degenerate_sigma": self.degenerate_sigma,
        }


def estimate_sigma(x) -> float:
    """Median-singular-value estimate of the noise level; 0 for X = 0."""
    a = as_matrix(x)
    lo, hi = min(a.shape), max(a.shape)
    law = _law(lo / hi)
    med = float(np.median(singular_values(a)))
    return med / math.sqrt(hi * law.median)


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    return eta


def usvt_denoise(x, sigma: float, eta: float = DEFAULT_ETA):
    """Threshold the SVD of x at (2 + eta) * sigma * sqrt(max(m, n)).

    Returns (denoised matrix, DenoiseReport).  Singular values exactly equal
    to the threshold are kept.  sigma = 0 keeps everything and returns the
    input unchanged.
    """
    a = as_matrix(x)
    eta = _check_eta(eta)
    sigma = float(sigma)
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")

    m, n = a.shape
    work = a.T if m > n else a
    law = _law(min(m, n) / max(m, n))
    threshold = (2.0 + eta) * sigma * math.sqrt(max(m, n))

    if threshold == 0.0:
        # Zero threshold keeps every index (lambda_i >= 0) and the
        # reconstruction is the input itself; skip the SVD round trip so
        # the identity is exact.
        kept = min(m, n)
        denoised = a.copy()
    else:
        dec = svd(work)
        kept = int(np.count_nonzero(dec.singular_values >= threshold))
        if kept == 0:
            denoised = np.zeros_like(a)
        else:
            top = (dec.left_vectors[:, :kept] * dec.singular_values[:kept]) \
                @ dec.right_vectors[:, :kept].T
            denoised = top.T if m > n else top

    report = DenoiseReport(
        m=m, n=n, eta=eta, sigma_used=sigma, mu_gamma=law.median,
        threshold=threshold, kept_rank=kept,
        kept_indices=tuple(range(1, kept + 1)),
        degenerate_sigma=(sigma == 0.0),
    )
    return denoised, report


def usvt_adaptive(x, eta: float = DEFAULT_ETA):
    """Denoise with the estimated noise level; report records sigma_hat.

    A degenerate sigma_hat of exactly 0 yields threshold 0 and output equal
    to the input, flagged in the report rather than raised.
    """
    _check_eta(eta)
    return usvt_denoise(x, estimate_sigma(x), eta)


def mse(a, b) -> float:
    """Per-entry squared distance ||A - B||_F^2 / (m n)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))
