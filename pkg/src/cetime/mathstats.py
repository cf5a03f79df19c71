"""Numerically stable scalar primitives and the deterministic random source.

Everything operates in float64 and accepts scalars or numpy arrays
(broadcasting elementwise). The log-domain normal helpers are the
building blocks of the censored log-likelihoods: log-survivor values
anywhere between ~0 and ~-700 occur during normal training, so the
naive ``log(1 - cdf)`` route is never used.
"""

from __future__ import annotations

import numpy as np
from scipy import special

LOG_TWO_PI = float(np.log(2.0 * np.pi))


def _checked(x, name: str):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def std_normal_log_pdf(z):
    """log of the standard normal density: -z^2/2 - log(2*pi)/2."""
    z = _checked(z, "z")
    return -0.5 * z * z - 0.5 * LOG_TWO_PI


def std_normal_cdf(z):
    """Phi(z) via the erfc-based rational approximation (abs error < 1e-15)."""
    z = _checked(z, "z")
    return special.ndtr(z)


def std_normal_log_survival(z):
    """log(1 - Phi(z)) without cancellation for large positive z.

    Uses the complementary relation log(1 - Phi(z)) = log(Phi(-z)) with a
    log-domain CDF that switches to an asymptotic expansion in the far
    tail, so the result stays finite and accurate for any float64 z.
    """
    z = _checked(z, "z")
    return special.log_ndtr(-z)


def sigmoid(a):
    """Logistic function 1 / (1 + exp(-a))."""
    a = _checked(a, "a")
    return special.expit(a)


def log_sigmoid(a):
    """log(sigmoid(a)) = -softplus(-a), stable for large |a|."""
    a = _checked(a, "a")
    return -np.logaddexp(0.0, -a)


def sample_logistic(rng: "Rng", size=None):
    """Draw standard logistic noise as log(u) - log(1-u), u uniform on (0,1).

    The uniform draw excludes both endpoints, so the result is always
    finite. This is the noise of the binary-concrete relaxation.
    """
    u = rng.uniform_open(size)
    return np.log(u) - np.log1p(-u)


class Rng:
    """Deterministic random source: counter-based Philox generator.

    A stream is identified by ``(seed, path)`` where ``path`` is a tuple
    of child indices. Children are derived through numpy's SeedSequence
    spawn keys, so streams with distinct paths never overlap and every
    draw is reproducible across runs and platforms for a fixed numpy
    major version.
    """

    algorithm = "numpy-philox4x64/seedsequence"

    def __init__(self, seed: int, path: tuple = ()):
        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def child(self, *indices: int) -> "Rng":
        """Independent stream for this seed at ``path + indices``."""
        return Rng(self.seed, self.path + tuple(indices))

    def uniform_open(self, size=None):
        """Uniform draws on the open interval (0, 1); exact 0.0 is redrawn."""
        u = self._gen.random(size)
        if np.ndim(u) == 0:
            while u == 0.0:
                u = self._gen.random()
            return float(u)
        mask = u == 0.0
        while mask.any():
            u[mask] = self._gen.random(int(mask.sum()))
            mask = u == 0.0
        return u

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def permutation(self, n: int):
        return self._gen.permutation(n)

    def __repr__(self):
        return f"Rng(seed={self.seed}, path={self.path})"
