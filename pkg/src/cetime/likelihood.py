"""Censored log-likelihood assemblies.

Four pieces: the standard event-time likelihood (observed rows hit the
log-density, censored rows the log-survivor), its occurrence-conditional
generalization (linear in the occurrence indicator c, with an epsilon
penalty for observed events the model claims never occur), the Monte
Carlo lower bound that trains the conditional model, and the plain
cross-entropy of the binary-classifier baseline.

Conventions: all elementwise functions broadcast; ``s`` is the 0/1
indicator that the time is a true event time; relaxed occurrence values
c may lie anywhere in [0, 1]. The conditional likelihood reduces
exactly (bit for bit) to the event-time likelihood at c = 1, and a
censored row with c = 0 contributes exactly zero.
"""

from __future__ import annotations

import numpy as np

from .aft import lognormal_event_terms, lognormal_log_density, lognormal_log_survivor
from .mathstats import Rng, log_sigmoid, sigmoid
from .stochastic import arm_antithetic_pair, sample_logistic


class TrainingError(RuntimeError):
    """Non-finite loss or gradient during a training step."""


def _check_s(s):
    s = np.asarray(s, dtype=np.float64)
    if not np.all((s == 0.0) | (s == 1.0)):
        raise ValueError("censoring indicator s must be 0 or 1")
    return s


def _check_c(c):
    c = np.asarray(c, dtype=np.float64)
    if np.any(c < 0.0) or np.any(c > 1.0) or not np.all(np.isfinite(c)):
        raise ValueError("occurrence value c must lie in [0, 1]")
    return c


def et_loglik(t, s, mu, nu):
    """s * log f(t) + (1 - s) * log F(t); censoring-density terms dropped."""
    s = _check_s(s)
    return s * lognormal_log_density(t, mu, nu) + (1.0 - s) * lognormal_log_survivor(t, mu, nu)


def et_loglik_with_grads(t, s, mu, nu):
    """(loglik, d/dmu, d/dnu) of the event-time likelihood."""
    s = _check_s(s)
    terms = lognormal_event_terms(t, mu, nu)
    ll = s * terms.log_density + (1.0 - s) * terms.log_survivor
    dmu = s * terms.d_density_mu + (1.0 - s) * terms.d_survivor_mu
    dnu = s * terms.d_density_nu + (1.0 - s) * terms.d_survivor_nu
    return ll, dmu, dnu


def cet_conditional_loglik(t, s, c, mu, nu, log_eps: float):
    """Occurrence-conditional log-likelihood, affine in c.

    s (1-c) log_eps + s log f(t) + (1-s) c log F(t): at c = 1 this is
    the event-time likelihood; an observed event with c = 0 pays the
    epsilon penalty; a censored row with c = 0 contributes nothing.
    """
    s = _check_s(s)
    c = _check_c(c)
    if not log_eps < 0.0:
        raise ValueError(f"log_eps must be negative, got {log_eps}")
    return (
        s * (1.0 - c) * log_eps
        + s * lognormal_log_density(t, mu, nu)
        + (1.0 - s) * c * lognormal_log_survivor(t, mu, nu)
    )


def cet_conditional_loglik_with_grads(t, s, c, mu, nu, log_eps: float):
    """(loglik, d/dmu, d/dnu, d/dc) of the conditional likelihood."""
    s = _check_s(s)
    c = _check_c(c)
    if not log_eps < 0.0:
        raise ValueError(f"log_eps must be negative, got {log_eps}")
    terms = lognormal_event_terms(t, mu, nu)
    not_s = 1.0 - s
    ll = s * (1.0 - c) * log_eps + s * terms.log_density + not_s * c * terms.log_survivor
    dmu = s * terms.d_density_mu + not_s * c * terms.d_survivor_mu
    dnu = s * terms.d_density_nu + not_s * c * terms.d_survivor_nu
    dc = -s * log_eps + not_s * terms.log_survivor
    return ll, dmu, dnu, dc


def bc_loglik(s, logit):
    """Bernoulli log-likelihood of the observed-event indicator."""
    s = _check_s(s)
    logit = np.asarray(logit, dtype=np.float64)
    return s * log_sigmoid(logit) + (1.0 - s) * log_sigmoid(-logit)


def _raise_non_finite(ll, what, k_offset):
    bad = np.argwhere(~np.isfinite(ll))
    k, i, j = (int(v) for v in bad[0])
    raise TrainingError(f"non-finite {what} at sample {i}, event {j} (draw {k + k_offset})")


def _checked_heads(mu, nu, shape, k_offset):
    mu = np.asarray(mu, dtype=np.float64).reshape(shape)
    nu = np.asarray(nu, dtype=np.float64).reshape(shape)
    bad = ~np.isfinite(mu) | ~np.isfinite(nu) | (nu <= 0.0)
    if bad.any():
        _raise_non_finite(np.where(bad, np.nan, 0.0), "time-head output", k_offset)
    return mu, nu


# draws are processed in chunks of roughly this many stacked rows; a pure
# cache-locality knob — the noise for all K draws is generated up front,
# so results do not depend on it beyond float summation order
_CHUNK_TARGET_ROWS = 4000


def mc_lower_bound(
    t,
    s,
    logits,
    time_heads,
    *,
    n_samples: int,
    temperature: float = 0.3,
    log_eps: float = -2.0,
    estimator: str = "concrete",
    rng: Rng,
    want_grads: bool = True,
):
    """Monte Carlo lower-bound loss over the latent occurrence vector.

    loss = -(1/(B*K)) sum_i sum_k sum_j conditional_loglik(obs_ij, c_ik)

    with K = ``n_samples`` occurrence vectors per observation drawn from
    the selected estimator.

    ``time_heads`` produces the per-draw log-normal parameters: called
    with a [K*B, M] occurrence matrix (draw-major: row k*B + i belongs
    to observation i, draw k) it returns (mu, nu, backward). When
    gradients are wanted, ``backward(dmu, dnu)`` is invoked with the
    already-scaled loss cotangents — it must backpropagate them into
    whatever produced mu and nu, accumulate any parameter gradients on
    the caller's side, and return the gradient with respect to its c
    input. Under the concrete estimator the relaxed c enters both the
    likelihood exponents and the heads, and the logit gradient flows
    through both paths by reparameterization; under ARM the heads see
    hard samples and the logit gradient comes from the antithetic pair,
    while mu/nu gradients flow through the true-sample branch.

    Returns (loss, dlogits); dlogits is None when ``want_grads`` is
    false.
    """
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    logits = np.asarray(logits, dtype=np.float64)
    if t.ndim != 2 or t.shape != s.shape or t.shape != logits.shape:
        raise ValueError(
            f"t, s, logits must share one [batch, events] shape, got "
            f"{t.shape}, {s.shape}, {logits.shape}"
        )
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if estimator not in ("concrete", "arm"):
        raise ValueError(f"unknown estimator {estimator!r}")
    n_batch, n_events = t.shape
    k = n_samples
    scale = -1.0 / (k * n_batch)
    t3 = t[None]
    s3 = s[None]
    if estimator == "concrete" and not temperature > 0.0:
        raise ValueError(f"temperature must be > 0, got {temperature}")

    # all K draws up front, then chunked evaluation
    if estimator == "concrete":
        noise = sample_logistic(rng, (k, n_batch, n_events))
    else:
        noise = rng.uniform_open((k, n_batch, n_events))
    k_chunk = max(1, _CHUNK_TARGET_ROWS // n_batch)

    loss_sum = 0.0
    dlogits = np.zeros_like(logits) if want_grads else None
    for k0 in range(0, k, k_chunk):
        chunk = noise[k0 : k0 + k_chunk]
        flat = (chunk.shape[0] * n_batch, n_events)
        if estimator == "concrete":
            c = sigmoid((logits[None] + chunk) / temperature)
            mu, nu, backward = time_heads(c.reshape(flat))
            mu3, nu3 = _checked_heads(mu, nu, c.shape, k0)
            ll, dmu, dnu, dc = cet_conditional_loglik_with_grads(t3, s3, c, mu3, nu3, log_eps)
            if not np.all(np.isfinite(ll)):
                _raise_non_finite(ll, "log-likelihood", k0)
            loss_sum += ll.sum()
            if want_grads:
                dc_heads = backward((scale * dmu).reshape(flat), (scale * dnu).reshape(flat))
                dc_total = scale * dc + dc_heads.reshape(c.shape)
                dlogits += (dc_total * c * (1.0 - c)).sum(axis=0) / temperature
        else:
            c_anti, c_true = arm_antithetic_pair(logits[None], chunk)
            mu2, nu2, backward = time_heads(c_true.reshape(flat))
            mu2, nu2 = _checked_heads(mu2, nu2, c_true.shape, k0)
            ll2, dmu2, dnu2, _ = cet_conditional_loglik_with_grads(t3, s3, c_true, mu2, nu2, log_eps)
            if not np.all(np.isfinite(ll2)):
                _raise_non_finite(ll2, "log-likelihood", k0)
            loss_sum += ll2.sum()
            if want_grads:
                mu1, nu1, _ = time_heads(c_anti.reshape(flat))
                mu1, nu1 = _checked_heads(mu1, nu1, c_anti.shape, k0)
                ll1 = cet_conditional_loglik(t3, s3, c_anti, mu1, nu1, log_eps)
                if not np.all(np.isfinite(ll1)):
                    _raise_non_finite(ll1, "antithetic log-likelihood", k0)
                backward((scale * dmu2).reshape(flat), (scale * dnu2).reshape(flat))
                f_gap = ll1.sum(axis=2) - ll2.sum(axis=2)
                dlogits += scale * (f_gap[:, :, None] * (chunk - 0.5)).sum(axis=0)
    return float(scale * loss_sum), dlogits
