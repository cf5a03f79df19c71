"""Log-normal accelerated-failure-time head.

Maps raw network outputs to the (mu, nu) parameters of a log-normal
event-time density and evaluates the log-density / log-survivor pair
that the censored likelihoods are built from:

    log T = mu + nu * eps,  eps ~ N(0, 1),  nu > 0.

Gradient helpers return the partials needed for backpropagation; the
survivor derivatives go through the standard-normal hazard ratio
``exp(log_pdf - log_survival)`` so they stay finite in both tails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathstats import std_normal_log_pdf, std_normal_log_survival

# exp() clamp for the raw nu output and the floor applied after it;
# outside (NU_FLOOR, exp(NU_RAW_MAX)) the exp-gradient is zeroed.
NU_RAW_MAX = 30.0
NU_FLOOR = 1e-6
_NU_RAW_MIN = float(np.log(NU_FLOOR))


@dataclass
class AftOutput:
    """Per-sample, per-event log-normal parameters.

    mu is the mean of log-time; nu the strictly positive standard
    deviation. ``nu_grad`` is d(nu)/d(raw_nu) — equal to nu where the
    exp was neither clamped nor floored, else 0 — and ``n_clamped``
    counts raw values above NU_RAW_MAX for the caller's warning counter.
    """

    mu: np.ndarray
    nu: np.ndarray
    nu_grad: np.ndarray
    n_clamped: int


def aft_heads(raw_mu, raw_nu) -> AftOutput:
    """mu = raw_mu, nu = exp(raw_nu) with overflow clamp and 1e-6 floor."""
    raw_mu = np.asarray(raw_mu, dtype=np.float64)
    raw_nu = np.asarray(raw_nu, dtype=np.float64)
    if raw_mu.shape != raw_nu.shape:
        raise ValueError(f"shape mismatch: raw_mu {raw_mu.shape} vs raw_nu {raw_nu.shape}")
    clamped = raw_nu > NU_RAW_MAX
    nu = np.exp(np.minimum(raw_nu, NU_RAW_MAX))
    np.maximum(nu, NU_FLOOR, out=nu)
    active = (raw_nu > _NU_RAW_MIN) & ~clamped
    return AftOutput(
        mu=raw_mu,
        nu=nu,
        nu_grad=np.where(active, nu, 0.0),
        n_clamped=int(clamped.sum()),
    )


def _check_t_nu(t, nu):
    t = np.asarray(t, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    if np.any(t <= 0.0) or not np.all(np.isfinite(t)):
        raise ValueError("event/censoring times must be finite and > 0")
    if np.any(nu <= 0.0):
        raise ValueError("nu must be > 0")
    return t, nu


def lognormal_log_density(t, mu, nu):
    """log f(t) = -log t - log nu + log phi((log t - mu) / nu)."""
    t, nu = _check_t_nu(t, nu)
    log_t = np.log(t)
    z = (log_t - mu) / nu
    return -log_t - np.log(nu) + std_normal_log_pdf(z)


def lognormal_log_survivor(t, mu, nu):
    """log P(T > t) = log(1 - Phi((log t - mu) / nu))."""
    t, nu = _check_t_nu(t, nu)
    z = (np.log(t) - mu) / nu
    return std_normal_log_survival(z)


@dataclass
class EventTerms:
    """Log-density and log-survivor values with their (mu, nu) partials.

    One shared evaluation of z, the normal log-pdf, and the log-survivor
    feeds both the loss and its backward pass.
    """

    log_density: np.ndarray
    log_survivor: np.ndarray
    d_density_mu: np.ndarray
    d_density_nu: np.ndarray
    d_survivor_mu: np.ndarray
    d_survivor_nu: np.ndarray


def lognormal_event_terms(t, mu, nu) -> EventTerms:
    t, nu = _check_t_nu(t, nu)
    log_t = np.log(t)
    z = (log_t - mu) / nu
    log_pdf_z = std_normal_log_pdf(z)
    log_sf_z = std_normal_log_survival(z)
    # hazard of the standard normal at z; ~z + 1/z for large z, ~0 for z << 0
    hazard = np.exp(log_pdf_z - log_sf_z)
    return EventTerms(
        log_density=-log_t - np.log(nu) + log_pdf_z,
        log_survivor=log_sf_z,
        d_density_mu=z / nu,
        d_density_nu=(z * z - 1.0) / nu,
        d_survivor_mu=hazard / nu,
        d_survivor_nu=hazard * z / nu,
    )


def predict_time(mu):
    """Median point prediction exp(mu) of the conditional log-normal."""
    mu = np.asarray(mu, dtype=np.float64)
    if not np.all(np.isfinite(mu)):
        raise ValueError("mu must be finite")
    return np.exp(mu)
