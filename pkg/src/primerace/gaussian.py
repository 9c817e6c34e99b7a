"""Gaussian CDF and orthant probabilities: closed forms for r <= 2, randomized
quasi Monte Carlo beyond.

The general-dimension path is the separation-of-variables transform: sequential
conditioning through the Cholesky factor turns P(Z <= x) into an integral over
the unit cube of dimension r-1, evaluated with scrambled Sobol points. The
standard error comes from the spread across independent scramblings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import qmc

DEFAULT_POINTS = 1 << 17
DEFAULT_SHIFTS = 16


@dataclass(frozen=True)
class OrthantEstimate:
    value: float
    stderr: float
    sample_count: int
    method: str  # 'closed-form' | 'mc'

    # closed forms are exact to roundoff, not to zero; keep the rounding
    # floor separate from stderr so identity tests can budget for it
    @property
    def accuracy(self) -> float:
        return self.stderr if self.method == "mc" else 5e-11


def std_normal_cdf(x: float) -> float:
    """Phi(x) via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2))


def bvn_orthant_zero(rho: float) -> float:
    """P(X <= 0, Y <= 0) for standard bivariate normals with correlation rho."""
    if abs(rho) >= 1:
        raise ValueError("correlation must lie strictly inside (-1, 1)")
    return 0.25 + math.asin(rho) / (2 * math.pi)


# Gauss-Legendre nodes/weights on (0,1), halved orders kick in for small |rho|
_GL = {
    6: (
        [0.1713244923791705, 0.3607615730481384, 0.4679139345726904],
        [0.9324695142031522, 0.6612093864662647, 0.2386191860831970],
    ),
    12: (
        [0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
         0.2031674267230659, 0.2334925365383547, 0.2491470458134029],
        [0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
         0.5873179542866171, 0.3678314989981802, 0.1252334085114692],
    ),
    20: (
        [0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
         0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
         0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
         0.1527533871307259],
        [0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
         0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
         0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
         0.07652652113349733],
    ),
}


def bvn_cdf(h: float, k: float, rho: float) -> float:
    """P(X <= h, Y <= k) for standard bivariate normals with correlation rho."""
    if abs(rho) > 1:
        raise ValueError("correlation must lie in [-1, 1]")
    return _bvnu(-h, -k, rho)


def _bvnu(dh: float, dk: float, r: float) -> float:
    """Upper quadrant probability P(X > dh, Y > dk); Drezner-Wesolowsky with
    the near-singular expansion for |r| > 0.925."""
    if dh == math.inf or dk == math.inf:
        return 0.0
    if dh == -math.inf:
        return 1.0 if dk == -math.inf else std_normal_cdf(-dk)
    if dk == -math.inf:
        return std_normal_cdf(-dh)
    if r == 0.0:
        return std_normal_cdf(-dh) * std_normal_cdf(-dk)
    order = 6 if abs(r) < 0.3 else 12 if abs(r) < 0.75 else 20
    w, x = (np.array(v) for v in _GL[order])
    h, k = dh, dk
    hk = h * k
    if abs(r) < 0.925:
        hs = (h * h + k * k) / 2
        asr = math.asin(r)
        sn = np.sin(asr / 2 * np.concatenate([1 - x, 1 + x]))
        terms = np.exp((sn * hk - hs) / (1 - sn * sn))
        return float(
            asr / (4 * math.pi) * np.concatenate([w, w]).dot(terms)
            + std_normal_cdf(-h) * std_normal_cdf(-k)
        )
    if r < 0:
        k, hk = -k, -hk
    bvn = 0.0
    if abs(r) < 1:
        a_sq = (1 - r) * (1 + r)
        a = math.sqrt(a_sq)
        bs = (h - k) ** 2
        c = (4 - hk) / 8
        d = (12 - hk) / 16
        asr = -(bs / a_sq + hk) / 2
        if asr > -100:
            bvn = a * math.exp(asr) * (1 - c * (bs - a_sq) * (1 - d * bs / 5) / 3
                                       + c * d * a_sq * a_sq / 5)
        if -hk < 100:
            b = math.sqrt(bs)
            bvn -= (math.exp(-hk / 2) * math.sqrt(2 * math.pi) * std_normal_cdf(-b / a)
                    * b * (1 - c * bs * (1 - d * bs / 5) / 3))
        a /= 2
        xs = (a * np.concatenate([x, -x]) + a) ** 2
        rs = np.sqrt(1 - xs)
        asr_v = -(bs / xs + hk) / 2
        live = asr_v > -100
        sp = 1 + c * xs * (1 + d * xs)
        ep = np.exp(-hk * (1 - rs) / (2 * (1 + rs))) / rs
        bvn += a * np.concatenate([w, w])[live].dot(
            np.exp(asr_v[live]) * (ep[live] - sp[live])
        )
        bvn = -bvn / (2 * math.pi)
    if r > 0:
        bvn += std_normal_cdf(-max(h, k))
    else:
        bvn = -bvn + max(0.0, std_normal_cdf(-h) - std_normal_cdf(-k))
    return float(min(1.0, max(0.0, bvn)))


def _closed_form(x: np.ndarray, sigma: np.ndarray) -> float:
    scale = np.sqrt(np.diag(sigma))
    if len(x) == 1:
        return std_normal_cdf(x[0] / scale[0])
    rho = sigma[0, 1] / (scale[0] * scale[1])
    return bvn_cdf(x[0] / scale[0], x[1] / scale[1], rho)


def mvn_cdf(
    x,
    sigma,
    samples: int = DEFAULT_POINTS,
    seed: int = 0,
    shifts: int = DEFAULT_SHIFTS,
    force_mc: bool = False,
) -> OrthantEstimate:
    """P(Z <= x componentwise) for Z centered Gaussian with covariance sigma.

    Dimensions 1 and 2 use closed forms unless force_mc is set; `samples` is
    the point count per scrambled-Sobol shift (rounded up to a power of two).
    """
    x = np.asarray(x, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    r = len(x)
    if sigma.shape != (r, r):
        raise ValueError("covariance shape does not match the threshold vector")
    if np.isnan(x).any() or np.isnan(sigma).any():
        raise ValueError("NaN input")
    if samples * shifts < 10**4:
        raise ValueError("at least 10^4 samples are required across all shifts")
    if r <= 2 and not force_mc:
        return OrthantEstimate(_closed_form(x, sigma), 0.0, 0, "closed-form")
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix is not positive definite") from exc

    d_first = float(ndtr(x[0] / chol[0, 0]))
    if r == 1:
        return OrthantEstimate(d_first, 0.0, samples, "mc")

    log2n = max(1, math.ceil(math.log2(samples)))
    children = np.random.SeedSequence(seed).spawn(shifts)
    shift_means = np.empty(shifts)
    n = 1 << log2n
    for s in range(shifts):
        u = qmc.Sobol(d=r - 1, scramble=True, seed=np.random.default_rng(children[s]))
        pts = u.random_base2(log2n)
        prod = np.full(n, d_first)
        d_prev = prod.copy()
        ys = np.empty((n, r - 1))
        for i in range(1, r):
            ys[:, i - 1] = ndtri(np.clip(pts[:, i - 1] * d_prev, 1e-300, 1.0))
            arg = (x[i] - ys[:, :i] @ chol[i, :i]) / chol[i, i]
            d_prev = ndtr(arg)
            prod *= d_prev
        shift_means[s] = prod.mean()
    value = float(shift_means.mean())
    stderr = float(shift_means.std(ddof=1) / math.sqrt(shifts))
    return OrthantEstimate(min(1.0, max(0.0, value)), stderr, n * shifts, "mc")


def w_r(
    r: int,
    rho: float,
    samples: int = DEFAULT_POINTS,
    seed: int = 0,
    shifts: int = DEFAULT_SHIFTS,
    force_mc: bool = False,
) -> OrthantEstimate:
    """W_r(rho) = P(Z <= 0) under Sigma_r(rho), the tridiagonal race covariance."""
    from .race import structured_matrices

    if r < 2:
        raise ValueError("W_r needs dimension at least 2")
    if abs(rho) > 1 / math.sqrt(2) + 1e-12:
        raise ValueError("correlation outside the positive-definite window |rho| <= 1/sqrt(2)")
    _, sigma, _ = structured_matrices(r, rho)
    return mvn_cdf(np.zeros(r), sigma, samples=samples, seed=seed, shifts=shifts,
                   force_mc=force_mc)
