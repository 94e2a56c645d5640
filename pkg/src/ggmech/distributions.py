"""Exact samplers for the noise laws used by the mechanisms.

All samplers take a :class:`~ggmech.streams.RandomStream` and are
deterministic in it.  Batch variants (``*_batch``) return an ``(n, k)``
array and are what the Monte Carlo harness uses; the vector variants wrap
a single row in a :class:`NoiseVector`.

The Generalized Gaussian with shape ``p`` and scale ``sigma`` has density
proportional to ``exp(-(|x|/sigma)**p)`` per coordinate.  It is sampled by
the power transform ``sign * sigma * G**(1/p)`` with ``G ~ Gamma(1/p)``:
if ``|X|/sigma = G**(1/p)`` then ``|X|/sigma`` has density proportional to
``g**(1/p - 1) e^{-g}`` pushed through ``g -> g**(1/p)``, which is
``e^{-u**p}`` on ``(0, inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .streams import RandomStream

__all__ = [
    "GGammaParams",
    "NoiseVector",
    "lp_norm",
    "pth_power_sum",
    "sample_gamma",
    "sample_laplace",
    "sample_univariate_ggauss",
    "sample_ggauss_batch",
    "sample_ggauss_vector",
    "sample_ggamma",
    "sample_lp_sphere",
    "sample_lp_sphere_batch",
    "sample_ggauss_pq_batch",
    "sample_ggauss_pq_vector",
]


def _check_positive(name, value):
    if not (value > 0) or not math.isfinite(value):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


def _check_shape_p(p):
    if not (p >= 1) or not math.isfinite(p):
        raise ParameterError(f"shape p must satisfy p >= 1, got {p!r}")


def _check_dim(k):
    if int(k) != k or k < 1:
        raise ParameterError(f"dimension k must be a positive integer, got {k!r}")


def pth_power_sum(values, p: float) -> float:
    """Correctly rounded ``sum(|v|**p)`` for a single vector."""
    a = np.abs(np.asarray(values, dtype=float))
    return math.fsum((a ** p).tolist())


def lp_norm(values, p: float, axis: int = -1):
    """``l_p`` norm along ``axis`` (``p = inf`` gives the max norm).

    Rows are rescaled by their max before powering so that large ``p`` or
    large scales neither overflow nor underflow.
    """
    a = np.abs(np.asarray(values, dtype=float))
    if math.isinf(p):
        return a.max(axis=axis)
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((a / safe) ** p, axis=axis)
    return np.squeeze(safe, axis=axis) * s ** (1.0 / p)


@dataclass(frozen=True)
class GGammaParams:
    """Generalized Gamma with density ``b x^{a-1} e^{-x^b} / Gamma(a/b)``."""

    a: float
    b: float

    def __post_init__(self):
        _check_positive("a", self.a)
        _check_positive("b", self.b)

    @classmethod
    def for_privacy_loss(cls, p: float) -> "GGammaParams":
        """The law of ``|X|**(p-1)`` when ``X`` has density prop. to ``e^{-|x|^p}``."""
        if p <= 1:
            raise ParameterError(f"p must exceed 1, got {p!r}")
        return cls(1.0 / (p - 1.0), p / (p - 1.0))

    def moment(self, r: float) -> float:
        """Closed-form ``E[X**r] = Gamma((a+r)/b) / Gamma(a/b)``."""
        return math.exp(math.lgamma((self.a + r) / self.b) - math.lgamma(self.a / self.b))

    @property
    def mean(self) -> float:
        return self.moment(1.0)


@dataclass(frozen=True, eq=False)
class NoiseVector:
    """An immutable noise draw with a lazily filled cache of its norms."""

    values: np.ndarray
    _norms: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ParameterError("a noise vector must be a non-empty 1-d array")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.size

    @property
    def k(self) -> int:
        return self.values.size

    def norm(self, order: float) -> float:
        order = float(order)
        if order not in self._norms:
            if math.isinf(order):
                val = float(np.max(np.abs(self.values)))
            else:
                m = float(np.max(np.abs(self.values)))
                val = 0.0 if m == 0 else m * pth_power_sum(self.values / m, order) ** (1.0 / order)
            self._norms[order] = val
        return self._norms[order]

    def cached_norms(self) -> dict:
        return dict(self._norms)

    def cache_consistent(self, rtol: float = 1e-12) -> bool:
        for order, cached in self._norms.items():
            fresh = NoiseVector(self.values).norm(order)
            if not math.isclose(cached, fresh, rel_tol=rtol, abs_tol=0.0):
                return False
        return True


# Univariate laws


def sample_gamma(shape: float, stream: RandomStream, size=None):
    """Gamma(shape) with unit scale, density prop. to ``x^{shape-1} e^{-x}``.

    numpy's generator is exact (Marsaglia-Tsang squeeze for ``shape >= 1``,
    a rejection scheme below 1), which covers the ``1/p < 1`` shapes the
    Generalized Gaussian needs.
    """
    _check_positive("shape", shape)
    return stream.standard_gamma(float(shape), size)


def sample_laplace(scale: float, stream: RandomStream, size=None):
    """Laplace(scale) by inverting its CDF at an open-interval uniform."""
    _check_positive("scale", scale)
    u = stream.uniform_open(size)
    # F^{-1}(u) = b log(2u) for u < 1/2, -b log(2(1-u)) otherwise
    out = np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u))) * scale
    return float(out) if size is None else out


def sample_univariate_ggauss(p: float, sigma: float, stream: RandomStream, size=None):
    _check_shape_p(p)
    _check_positive("sigma", sigma)
    g = stream.standard_gamma(1.0 / p, size)
    s = stream.signs(size)
    out = s * sigma * g ** (1.0 / p)
    return float(out) if size is None else out


def sample_ggamma(params: GGammaParams, stream: RandomStream, size=None):
    """GGamma(a, b) as ``G**(1/b)`` with ``G ~ Gamma(a/b)``."""
    if not isinstance(params, GGammaParams):
        raise ParameterError("params must be a GGammaParams instance")
    g = stream.standard_gamma(params.a / params.b, size)
    out = g ** (1.0 / params.b)
    return float(out) if size is None else out


# Multivariate laws


def sample_ggauss_batch(n: int, k: int, p: float, sigma: float, stream: RandomStream) -> np.ndarray:
    """``n`` independent GGauss(p, sigma) vectors in R^k as an ``(n, k)`` array."""
    _check_dim(k)
    _check_dim(n)
    return sample_univariate_ggauss(p, sigma, stream, size=(int(n), int(k)))


def sample_ggauss_vector(k: int, p: float, sigma: float, stream: RandomStream) -> NoiseVector:
    return NoiseVector(sample_ggauss_batch(1, k, p, sigma, stream)[0])


def sample_lp_sphere_batch(n: int, k: int, p: float, radius: float, stream: RandomStream) -> np.ndarray:
    """Rows distributed as ``radius * x / ||x||_p`` for ``x ~ GGauss(p, 1)``."""
    _check_positive("radius", radius)
    x = sample_ggauss_batch(n, k, p, 1.0, stream)
    norms = lp_norm(x, p)
    zero = norms == 0
    # measure-zero event; redraw those rows only
    while np.any(zero):
        idx = np.flatnonzero(zero)
        x[idx] = sample_ggauss_batch(idx.size, k, p, 1.0, stream)
        norms[idx] = lp_norm(x[idx], p)
        zero = norms == 0
    return x * (radius / norms)[:, None]


def sample_lp_sphere(k: int, p: float, radius: float, stream: RandomStream) -> NoiseVector:
    return NoiseVector(sample_lp_sphere_batch(1, k, p, radius, stream)[0])


def _check_pq(p, q):
    _check_shape_p(p)
    if not (q >= 1) or not math.isfinite(q):
        raise ParameterError(f"q must satisfy q >= 1, got {q!r}")
    if q > p:
        raise ParameterError(f"q must not exceed p (got q={q}, p={p})")


def sample_ggauss_pq_batch(n: int, k: int, p: float, q: float, sigma: float,
                           stream: RandomStream) -> np.ndarray:
    """Rows with density prop. to ``exp(-(||x||_p / sigma)**q)``.

    The radius ``||x||_p / sigma`` is ``Gamma(k/q)**(1/q)`` and the direction
    is an independent draw from the unit ``l_p`` sphere.
    """
    _check_pq(p, q)
    _check_positive("sigma", sigma)
    _check_dim(k)
    _check_dim(n)
    radius = sigma * stream.standard_gamma(k / q, int(n)) ** (1.0 / q)
    direction = sample_lp_sphere_batch(n, k, p, 1.0, stream)
    return direction * radius[:, None]


def sample_ggauss_pq_vector(k: int, p: float, q: float, sigma: float,
                            stream: RandomStream) -> NoiseVector:
    return NoiseVector(sample_ggauss_pq_batch(1, k, p, q, sigma, stream)[0])
