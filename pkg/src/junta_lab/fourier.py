"""Fourier analysis over the mu-biased hypercube.

The basis functions are ``prod_{i in S} phi(y_i)`` with
``phi(y) = (y - mu) / sqrt(1 - mu^2)``, orthonormal under (pi_mu)^k.
Coefficients are stored densely, indexed by subset bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._cube import cube_points, kron_apply, popcount, subset_product_weights
from .boolfn import Distribution, ProductDist, TruthTable
from .config import MAX_SPECTRUM_ARITY, TOL
from .exceptions import ArityMismatchError, CapacityError, ParsevalError


def check_bias(mu):
    mu = float(mu)
    if not abs(mu) < 1.0 - TOL.bias_margin:
        raise ValueError(f"bias mu={mu!r} must lie in the open interval (-1, 1)")
    return mu


def phi(y, mu):
    """The normalized character (y - mu) / sigma, applied elementwise."""
    return (np.asarray(y, dtype=float) - mu) / np.sqrt(1.0 - mu * mu)


@dataclass(frozen=True, eq=False)
class BiasedSpectrum:
    k: int
    mu: float
    coeffs: np.ndarray

    @property
    def sigma(self):
        return float(np.sqrt(1.0 - self.mu**2))

    def __getitem__(self, mask):
        return float(self.coeffs[mask])

    def parseval_sum(self):
        return float(np.dot(self.coeffs, self.coeffs))

    def level_weights(self):
        """Total squared weight on each subset size 0..k."""
        sizes = popcount(np.arange(1 << self.k))
        return np.bincount(sizes, weights=self.coeffs**2, minlength=self.k + 1)

    def inverse(self):
        """Recover the function values from the coefficients."""
        lo, hi = phi(-1.0, self.mu), phi(1.0, self.mu)
        return kron_apply([[[1.0, lo], [1.0, hi]]] * self.k, self.coeffs)

    def to_json(self):
        return {"mu": self.mu, "k": self.k, "coeffs": [float(c) for c in self.coeffs]}


def _values(g):
    if isinstance(g, TruthTable):
        return g.n, g.values.astype(float)
    vals = np.asarray(g, dtype=float).reshape(-1)
    k = vals.size.bit_length() - 1
    if vals.size < 1 or (1 << k) != vals.size:
        raise ValueError("table length must be a power of two")
    return k, vals


def biased_spectrum(g, mu):
    """mu-biased Fourier coefficients of a truth table (or any real table).

    Uses a butterfly over coordinates, ``O(k 2^k)``.
    """
    mu = check_bias(mu)
    k, vals = _values(g)
    if k > MAX_SPECTRUM_ARITY:
        raise CapacityError(f"spectrum arity {k} exceeds {MAX_SPECTRUM_ARITY}")
    pm, pp = (1.0 - mu) / 2.0, (1.0 + mu) / 2.0
    lo, hi = phi(-1.0, mu), phi(1.0, mu)
    step = [[pm, pp], [pm * lo, pp * hi]]
    return BiasedSpectrum(k, mu, kron_apply([step] * k, vals))


def biased_spectrum_direct(g, mu):
    """Reference implementation summing the defining expectation, ``O(4^k)``."""
    mu = check_bias(mu)
    k, vals = _values(g)
    if k > 8:
        raise CapacityError("direct summation is only kept for k <= 8")
    pts = cube_points(k).astype(float)
    w = ProductDist(np.full(k, mu)).weights
    ph = phi(pts, mu)
    coeffs = np.empty(1 << k)
    for S in range(1 << k):
        chi = np.ones(1 << k)
        for i in range(k):
            if (S >> i) & 1:
                chi = chi * ph[:, i]
        coeffs[S] = np.sum(w * vals * chi)
    return BiasedSpectrum(k, mu, coeffs)


def mean_under_product(spec, nu):
    """E_{y ~ pi_nu}[g(y)] read off the mu-biased spectrum of g."""
    nu = np.asarray(nu, dtype=float).reshape(-1)
    if nu.size != spec.k:
        raise ArityMismatchError(f"mean vector has {nu.size} entries, spectrum has arity {spec.k}")
    if np.any(np.abs(nu) > 1):
        raise ValueError("means must lie in [-1, 1]")
    return float(np.dot(spec.coeffs, subset_product_weights(phi(nu, spec.mu))))


def spectral_sample(spec):
    """Distribution over subsets (as bitmasks) with mass coeff(S)^2."""
    mass = spec.coeffs**2
    total = mass.sum()
    if abs(total - 1.0) > TOL.identity:
        raise ParsevalError(f"squared coefficients sum to {total!r}; source is not +-1 valued")
    return Distribution(mass / total, spec.k)


def plancherel(spec_g, spec_h):
    if spec_g.k != spec_h.k or spec_g.mu != spec_h.mu:
        raise ArityMismatchError("spectra must share arity and bias")
    return float(np.dot(spec_g.coeffs, spec_h.coeffs))
