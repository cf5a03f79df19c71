"""Minimal dense network core: one-hidden-layer MLPs with hand-written
exact gradients, inverted dropout, and the Adam optimizer.

All model heads in this package share the shape ``in -> hidden(ReLU) ->
out``. There is no autodiff graph: forward returns a cache, backward
consumes it, and the test suite checks every gradient path against
central finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mathstats import Rng

_FIELDS = ("W1", "b1", "W2", "b2")


class ConfigError(ValueError):
    """Invalid layer sizes or inconsistent shapes."""


@dataclass
class MlpParams:
    """Weights of a single-hidden-layer perceptron.

    W1: [hidden, in], b1: [hidden], W2: [out, hidden], b2: [out].
    Also reused as the container for gradients and Adam moments, which
    are congruent by construction.
    """

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def n_in(self) -> int:
        return self.W1.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.W1.shape[0]

    @property
    def n_out(self) -> int:
        return self.W2.shape[0]

    def copy(self) -> "MlpParams":
        return MlpParams(*(getattr(self, f).copy() for f in _FIELDS))

    def zeros_like(self) -> "MlpParams":
        return MlpParams(*(np.zeros_like(getattr(self, f)) for f in _FIELDS))

    def check(self) -> None:
        h, i = self.W1.shape
        o, h2 = self.W2.shape
        if h2 != h or self.b1.shape != (h,) or self.b2.shape != (o,):
            raise ConfigError(
                f"inconsistent shapes: W1 {self.W1.shape}, b1 {self.b1.shape}, "
                f"W2 {self.W2.shape}, b2 {self.b2.shape}"
            )
        for f in _FIELDS:
            if not np.all(np.isfinite(getattr(self, f))):
                raise ConfigError(f"non-finite entries in {f}")


@dataclass
class AdamState:
    """First/second-moment accumulators plus the step counter."""

    m: MlpParams
    v: MlpParams
    t: int = 0

    @classmethod
    def for_params(cls, p: MlpParams) -> "AdamState":
        return cls(m=p.zeros_like(), v=p.zeros_like(), t=0)


@dataclass
class DropoutMask:
    """Per-sample binary keep mask for the hidden layer.

    mask: [batch, hidden] of 0/1 floats; inverted-dropout scaling by
    1/p_keep happens at train time so evaluation needs no mask at all
    (pass ``mask=None`` to forward).
    """

    mask: np.ndarray
    p_keep: float


def mlp_init(n_in: int, n_hidden: int, n_out: int, rng: Rng) -> MlpParams:
    """He-scaled random weights, zero biases.

    W1 ~ N(0, 2/n_in) for the ReLU layer, W2 ~ N(0, 1/n_hidden) for the
    linear output layer.
    """
    if min(n_in, n_hidden, n_out) < 1:
        raise ConfigError(f"layer sizes must be >= 1, got ({n_in}, {n_hidden}, {n_out})")
    W1 = rng.standard_normal((n_hidden, n_in)) * np.sqrt(2.0 / n_in)
    W2 = rng.standard_normal((n_out, n_hidden)) * np.sqrt(1.0 / n_hidden)
    return MlpParams(W1=W1, b1=np.zeros(n_hidden), W2=W2, b2=np.zeros(n_out))


def make_dropout_mask(n_batch: int, n_hidden: int, p_drop: float, rng: Rng) -> DropoutMask | None:
    """Fresh keep mask; returns None when p_drop == 0 (no-op mask)."""
    if not 0.0 <= p_drop < 1.0:
        raise ConfigError(f"dropout probability must be in [0, 1), got {p_drop}")
    if p_drop == 0.0:
        return None
    keep = (rng.uniform_open((n_batch, n_hidden)) > p_drop).astype(np.float64)
    return DropoutMask(mask=keep, p_keep=1.0 - p_drop)


def _scaled_mask(mask: DropoutMask, n_rows: int) -> np.ndarray:
    """mask/p_keep, viewable against [n_rows, hidden] rows.

    n_rows may be an integer multiple of the mask's batch (the Monte
    Carlo trainer stacks K replicas of a minibatch and shares one mask
    across them); the replica axis is handled by a reshape view.
    """
    b = mask.mask.shape[0]
    if n_rows % b != 0:
        raise ConfigError(f"mask batch {b} does not divide input rows {n_rows}")
    scale = mask.mask / mask.p_keep
    if n_rows == b:
        return scale
    return np.broadcast_to(scale, (n_rows // b, b, scale.shape[1]))


def mlp_forward(x: np.ndarray, p: MlpParams, mask: DropoutMask | None = None):
    """Forward pass; returns (y, cache) with cache consumed by mlp_backward.

    y = W2 @ (mask * relu(W1 @ x + b1)) / p_keep + b2, row per sample.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != p.n_in:
        raise ConfigError(f"input shape {x.shape} incompatible with n_in={p.n_in}")
    a = x @ p.W1.T
    a += p.b1
    np.maximum(a, 0.0, out=a)
    if mask is not None:
        scale = _scaled_mask(mask, x.shape[0])
        a.reshape(scale.shape)[...] *= scale
    y = a @ p.W2.T
    y += p.b2
    cache = (x, a, mask, p)
    return y, cache


def mlp_backward(cache, dy: np.ndarray):
    """Exact gradients of the affine-ReLU-affine map.

    Returns (grads, dx): grads congruent with MlpParams, dx the gradient
    with respect to the input rows (for chaining into whatever produced
    them). Entries of ``a`` that are zero — negative pre-activation or
    dropped unit — block the gradient, which is exactly the ReLU/dropout
    gate because the kept-and-positive units are strictly positive.
    """
    x, a, mask, p = cache
    dy = np.asarray(dy, dtype=np.float64)
    if dy.shape != (x.shape[0], p.n_out):
        raise ConfigError(f"cotangent shape {dy.shape}, expected {(x.shape[0], p.n_out)}")
    dW2 = dy.T @ a
    db2 = dy.sum(axis=0)
    da = dy @ p.W2
    if mask is not None:
        scale = _scaled_mask(mask, x.shape[0])
        da.reshape(scale.shape)[...] *= scale
    da *= a > 0.0
    dW1 = da.T @ x
    db1 = da.sum(axis=0)
    dx = da @ p.W1
    return MlpParams(W1=dW1, b1=db1, W2=dW2, b2=db2), dx


def adam_step(
    p: MlpParams,
    g: MlpParams,
    s: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
):
    """One bias-corrected Adam update, in place; returns (p, s).

    Rejects non-finite gradients before touching any state, so a failed
    step leaves parameters and moments unchanged.
    """
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
        raise ConfigError(f"betas must lie in [0, 1), got ({beta1}, {beta2})")
    for f in _FIELDS:
        if not np.all(np.isfinite(getattr(g, f))):
            raise FloatingPointError(f"non-finite gradient in {f}; update rejected")
    s.t += 1
    c1 = 1.0 - beta1**s.t
    c2 = 1.0 - beta2**s.t
    for f in _FIELDS:
        gf = getattr(g, f)
        mf = getattr(s.m, f)
        vf = getattr(s.v, f)
        mf *= beta1
        mf += (1.0 - beta1) * gf
        vf *= beta2
        vf += (1.0 - beta2) * gf * gf
        getattr(p, f)[...] -= lr * (mf / c1) / (np.sqrt(vf / c2) + eps)
    return p, s


# --- checkpoint container ------------------------------------------------

CHECKPOINT_FORMAT = "cetime-checkpoint"
CHECKPOINT_VERSION = 1


def _params_to_doc(p: MlpParams) -> dict:
    return {
        f: {"shape": list(getattr(p, f).shape), "data": getattr(p, f).ravel().tolist()}
        for f in _FIELDS
    }


def _params_from_doc(doc: dict) -> MlpParams:
    arrays = {}
    for f in _FIELDS:
        entry = doc[f]
        arrays[f] = np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
    return MlpParams(**arrays)


def save_checkpoint(path, nets: dict, seed: int, meta: dict | None = None) -> None:
    """Write a versioned JSON checkpoint: shapes, row-major weights, seed.

    ``nets`` maps a head name to MlpParams or to (MlpParams, AdamState).
    """
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "seed": int(seed),
        "meta": meta or {},
        "nets": {},
    }
    for name, value in nets.items():
        if isinstance(value, tuple):
            params, state = value
            doc["nets"][name] = {
                "params": _params_to_doc(params),
                "adam": {
                    "m": _params_to_doc(state.m),
                    "v": _params_to_doc(state.v),
                    "t": state.t,
                },
            }
        else:
            doc["nets"][name] = {"params": _params_to_doc(value)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_checkpoint(path):
    """Read a checkpoint; returns (nets, seed, meta) with AdamState where saved."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {doc.get('version')}")
    nets = {}
    for name, entry in doc["nets"].items():
        params = _params_from_doc(entry["params"])
        if "adam" in entry:
            state = AdamState(
                m=_params_from_doc(entry["adam"]["m"]),
                v=_params_from_doc(entry["adam"]["v"]),
                t=int(entry["adam"]["t"]),
            )
            nets[name] = (params, state)
        else:
            nets[name] = params
    return nets, int(doc["seed"]), doc.get("meta", {})
