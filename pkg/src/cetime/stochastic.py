"""Binary stochastic occurrence layer.

Log-odds in, occurrence indicators out: hard Bernoulli samples, the
binary-concrete (Gumbel-Softmax) relaxation for reparameterized
gradients, and the antithetic ARM estimator for unbiased gradients of
expectations over multivariate Bernoulli variables.
"""

from __future__ import annotations

import numpy as np

from .mathstats import Rng, sample_logistic, sigmoid


class EstimationError(RuntimeError):
    """The callback handed to the gradient estimator produced non-finite values."""


def occurrence_probability(logits):
    """Elementwise sigma(h): probability that each event ever occurs."""
    return sigmoid(logits)


def sample_hard(logits, rng: Rng):
    """Independent Bernoulli(sigma(h)) draws as a 0/1 float matrix."""
    logits = np.asarray(logits, dtype=np.float64)
    u = rng.uniform_open(logits.shape)
    return (u < sigmoid(logits)).astype(np.float64)


def sample_concrete(logits, temperature: float, rng: Rng):
    """Binary-concrete relaxation: sigma((h + L) / temperature), L logistic.

    Differentiable in the logits with dc/dh = c (1 - c) / temperature.
    Thresholding the output at 1/2 recovers the hard Bernoulli law for
    any temperature, since (h + L)/tau > 0 iff L > -h.
    """
    if not temperature > 0.0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    logits = np.asarray(logits, dtype=np.float64)
    noise = sample_logistic(rng, logits.shape)
    return sigmoid((logits + noise) / temperature)


def arm_antithetic_pair(logits, u):
    """The two coupled hard samples of the ARM estimator.

    Returns (c_anti, c_true) where c_true = 1[u < sigma(h)] is an exact
    Bernoulli(sigma(h)) draw and c_anti = 1[u > sigma(-h)] is its
    antithetic twin from the same uniforms.
    """
    c_anti = (u > sigmoid(-logits)).astype(np.float64)
    c_true = (u < sigmoid(logits)).astype(np.float64)
    return c_anti, c_true


def arm_gradient(logits, f, rng: Rng):
    """Single-draw ARM estimate of d/dh E_{c ~ Bern(sigma(h))}[f(c)].

    ``f`` maps a hard 0/1 matrix [n, M] to one scalar per row. Each row
    gets its own uniform vector u and the estimate

        g_j = (f(1[u > sigma(-h)]) - f(1[u < sigma(h)])) * (u_j - 1/2),

    which is unbiased; callers average over repeated draws (or over
    replicated rows) to reduce variance.
    """
    logits = np.asarray(logits, dtype=np.float64)
    u = rng.uniform_open(logits.shape)
    c_anti, c_true = arm_antithetic_pair(logits, u)
    f_anti = np.asarray(f(c_anti), dtype=np.float64)
    f_true = np.asarray(f(c_true), dtype=np.float64)
    if f_anti.shape != (logits.shape[0],) or f_true.shape != (logits.shape[0],):
        raise EstimationError(
            f"f must return one scalar per row, got {f_anti.shape} for {logits.shape[0]} rows"
        )
    if not (np.all(np.isfinite(f_anti)) and np.all(np.isfinite(f_true))):
        raise EstimationError("f returned non-finite values")
    return (f_anti - f_true)[:, None] * (u - 0.5)
