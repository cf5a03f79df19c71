"""The three estimators: conditional event time (CET), plain event time
(ET), and the observed-event binary classifier (BC).

sklearn-style API: hyperparameters are constructor arguments, fitted
state lives in trailing-underscore attributes, ``get_params`` /
``set_params`` come from BaseEstimator. All three share layer widths
and training hyperparameters so comparisons isolate the modeling
difference, and every fit is bit-reproducible from its seed.
"""

from __future__ import annotations

import inspect

import numpy as np
from scipy.special import ndtri
from sklearn.base import BaseEstimator

from . import net
from .aft import aft_heads, predict_time as aft_predict_time
from .data import Dataset
from .likelihood import TrainingError, bc_loglik, et_loglik_with_grads, mc_lower_bound
from .mathstats import Rng, sigmoid
from .metrics import MetricError, auc

# child-stream indices under the model seed
_INIT, _SHUFFLE, _STEP, _VAL = 0, 1, 2, 3

# Monte Carlo draws for the validation loss (a stopping diagnostic, not
# the training objective, so a small K suffices)
_K_VAL = 8

# cap on the occurrence-adjusted prediction quantile, and the multiple of
# the training horizon at which a predicted-never event is reported
_Z_CAP = 8.0
_HORIZON_MARGIN = 1.05

_MIN_IMPROVEMENT = 1e-6


def _log_time_moments(t, s):
    """Per-event location/scale of log observed event times.

    The time heads are trained in standardized log-time coordinates
    (mu = loc + scale * net output, nu = scale * exp(net output)), so a
    freshly initialized net starts at the marginal distribution of the
    observed times instead of at exp(0) — the optimizer then only
    learns O(1) corrections, which matters at small learning rates.
    """
    log_t = np.log(t)
    observed = s == 1.0
    loc = np.empty(t.shape[1])
    scale = np.empty(t.shape[1])
    for j in range(t.shape[1]):
        col = log_t[observed[:, j], j]
        if col.size == 0:
            col = log_t[:, j]
        loc[j] = col.mean()
        scale[j] = max(float(col.std()), 0.1)
    return loc, scale


def _check_features(X, n_features=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {X.shape[1]}")
    return X


def _check_targets(t, s, n_rows):
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if t.ndim != 2 or t.shape != s.shape or t.shape[0] != n_rows:
        raise ValueError(f"t and s must be [n, events] matching the features, got {t.shape}, {s.shape}")
    if np.any(t <= 0.0) or not np.all(np.isfinite(t)):
        raise ValueError("times must be finite and > 0")
    if not np.all((s == 0.0) | (s == 1.0)):
        raise ValueError("status must be 0 or 1")
    return t, s


def _accumulate(store: dict, key: str, grads: net.MlpParams) -> None:
    if store[key] is None:
        store[key] = grads
    else:
        acc = store[key]
        for f in ("W1", "b1", "W2", "b2"):
            getattr(acc, f)[...] += getattr(grads, f)


class _CensoredEventModel(BaseEstimator):
    """Shared fit loop: seeded shuffling, Adam steps, early stopping on
    the validation criterion (occurrence AUC when ground-truth labels
    are available, otherwise validation loss), best-epoch restore."""

    kind = ""

    def _validate_config(self):
        if self.hidden < 1:
            raise ValueError(f"hidden must be >= 1, got {self.hidden}")
        if not self.lr > 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if self.batch_size < 1 or self.epochs < 1 or self.patience < 1:
            raise ValueError("batch_size, epochs, patience must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")

    # subclasses: _init_nets, _train_step, _val_loss, _occ_scores

    def _fit_loop(self, X, t, s, X_val, t_val, s_val, c_val):
        self._validate_config()
        n = X.shape[0]
        rng = Rng(self.seed)
        self.nets_ = self._init_nets(X.shape[1], t.shape[1], rng.child(_INIT))
        self.rng_algorithm_ = Rng.algorithm
        self.nu_clamp_count_ = 0
        self.history_ = []
        have_val = X_val is not None
        have_labels = have_val and c_val is not None
        best_crit = -np.inf
        best_snapshot = None
        best_epoch = -1
        stale = 0
        for epoch in range(self.epochs):
            perm = rng.child(_SHUFFLE, epoch).permutation(n)
            losses = []
            for b_idx, start in enumerate(range(0, n, self.batch_size)):
                idx = perm[start : start + self.batch_size]
                try:
                    losses.append(self._train_step(X[idx], t[idx], s[idx], rng.child(_STEP, epoch, b_idx)))
                except (TrainingError, FloatingPointError) as exc:
                    raise TrainingError(f"epoch {epoch}, batch {b_idx}: {exc}") from exc
            record = {"epoch": epoch, "train_loss": float(np.mean(losses))}
            if have_val:
                record["val_loss"] = self._val_loss(X_val, t_val, s_val, rng.child(_VAL, epoch))
                record["val_auc"] = self._val_auc(X_val, c_val) if have_labels else None
                crit = record["val_auc"] if record["val_auc"] is not None else -record["val_loss"]
            else:
                record["val_loss"] = None
                record["val_auc"] = None
                crit = -record["train_loss"]
            self.history_.append(record)
            if crit > best_crit + _MIN_IMPROVEMENT:
                best_crit = crit
                best_epoch = epoch
                best_snapshot = {name: p.copy() for name, (p, _) in self.nets_.items()}
                stale = 0
            else:
                stale += 1
                if have_val and stale >= self.patience:
                    break
        if best_snapshot is not None:
            self.nets_ = {name: (best_snapshot[name], self.nets_[name][1]) for name in self.nets_}
        self.best_epoch_ = best_epoch
        return self

    def _val_auc(self, X_val, c_val):
        scores = self._occ_scores(X_val)
        per_event = []
        for j in range(scores.shape[1]):
            try:
                per_event.append(auc(scores[:, j], c_val[:, j]))
            except MetricError:
                continue
        return float(np.mean(per_event)) if per_event else None

    def _forward_eval(self, X, name):
        params, _ = self.nets_[name]
        y, _ = net.mlp_forward(X, params)
        return y

    def _require_fitted(self):
        if not hasattr(self, "nets_"):
            raise RuntimeError(f"{type(self).__name__} is not fitted")

    def save(self, path):
        self._require_fitted()
        meta = {
            "kind": self.kind,
            "params": self.get_params(),
            "n_features": self.n_features_,
            "n_events": self.n_events_,
            "event_names": list(getattr(self, "event_names_", [])),
            "rng_algorithm": self.rng_algorithm_,
        }
        for attr in ("log_t_loc_", "log_t_scale_", "t_max_train_"):
            if hasattr(self, attr):
                meta[attr] = list(getattr(self, attr))
        net.save_checkpoint(path, self.nets_, seed=self.seed, meta=meta)


class ConditionalEventTimeModel(_CensoredEventModel):
    """Censored event-time model with a latent eventual-occurrence layer.

    An occurrence head maps features to per-event log-odds; time heads
    map (features, occurrence vector) to log-normal (mu, nu). Training
    maximizes a Monte Carlo lower bound on the censored log-likelihood
    over sampled occurrence vectors, with logit gradients from either
    the binary-concrete relaxation (default) or the ARM estimator.
    """

    kind = "cet"

    def __init__(
        self,
        hidden: int = 100,
        lr: float = 3e-4,
        batch_size: int = 400,
        dropout: float = 0.5,
        epochs: int = 300,
        patience: int = 20,
        n_samples: int = 100,
        temperature: float = 0.3,
        log_eps: float = -2.0,
        estimator: str = "concrete",
        seed: int = 0,
    ):
        self.hidden = hidden
        self.lr = lr
        self.batch_size = batch_size
        self.dropout = dropout
        self.epochs = epochs
        self.patience = patience
        self.n_samples = n_samples
        self.temperature = temperature
        self.log_eps = log_eps
        self.estimator = estimator
        self.seed = seed

    def _validate_config(self):
        super()._validate_config()
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0.0 < self.temperature < 1.0:
            raise ValueError(f"temperature must lie in (0, 1), got {self.temperature}")
        if not -4.0 < self.log_eps < 0.0:
            raise ValueError(f"log_eps must lie in (-4, 0), got {self.log_eps}")
        if self.estimator not in ("concrete", "arm"):
            raise ValueError(f"estimator must be 'concrete' or 'arm', got {self.estimator!r}")

    def fit(self, X, t, s, *, X_val=None, t_val=None, s_val=None, c_val=None, event_names=None):
        X = _check_features(X)
        t, s = _check_targets(t, s, X.shape[0])
        if X_val is not None:
            X_val = _check_features(X_val, X.shape[1])
            t_val, s_val = _check_targets(t_val, s_val, X_val.shape[0])
        self.n_features_ = X.shape[1]
        self.n_events_ = t.shape[1]
        self.event_names_ = list(event_names) if event_names else [f"e{j + 1}" for j in range(self.n_events_)]
        self.log_t_loc_, self.log_t_scale_ = _log_time_moments(t, s)
        self.t_max_train_ = t.max(axis=0)
        return self._fit_loop(X, t, s, X_val, t_val, s_val, c_val)

    def _init_nets(self, d, m, rng):
        nets = {
            "occ": net.mlp_init(d, self.hidden, m, rng.child(0)),
            "mu": net.mlp_init(d + m, self.hidden, m, rng.child(1)),
            "nu": net.mlp_init(d + m, self.hidden, m, rng.child(2)),
        }
        return {name: (p, net.AdamState.for_params(p)) for name, p in nets.items()}

    def _make_time_heads(self, xb, masks, grad_store):
        """Closure mapping a stacked occurrence matrix to (mu, nu, backward).

        Network outputs are in standardized log-time coordinates and get
        the affine calibration from the training moments before the exp
        head. ``backward`` backpropagates through both heads, accumulates
        their parameter gradients, and returns the gradient with respect
        to the occurrence input columns.
        """
        d = xb.shape[1]
        mu_p = self.nets_["mu"][0]
        nu_p = self.nets_["nu"][0]
        mask_mu, mask_nu = masks
        loc, scale = self.log_t_loc_, self.log_t_scale_

        def time_heads(c_flat):
            reps = c_flat.shape[0] // xb.shape[0]
            inp = np.concatenate([np.tile(xb, (reps, 1)), c_flat], axis=1)
            y_mu, cache_mu = net.mlp_forward(inp, mu_p, mask_mu)
            y_nu, cache_nu = net.mlp_forward(inp, nu_p, mask_nu)
            out = aft_heads(loc + scale * y_mu, y_nu + np.log(scale))
            self.nu_clamp_count_ += out.n_clamped

            def backward(dmu, dnu):
                g_mu, dinp_mu = net.mlp_backward(cache_mu, dmu * scale)
                g_nu, dinp_nu = net.mlp_backward(cache_nu, dnu * out.nu_grad)
                _accumulate(grad_store, "mu", g_mu)
                _accumulate(grad_store, "nu", g_nu)
                return dinp_mu[:, d:] + dinp_nu[:, d:]

            return out.mu, out.nu, backward

        return time_heads

    def _train_step(self, xb, tb, sb, rng_step):
        n_b = xb.shape[0]
        masks = (
            net.make_dropout_mask(n_b, self.hidden, self.dropout, rng_step.child(1)),
            net.make_dropout_mask(n_b, self.hidden, self.dropout, rng_step.child(2)),
        )
        mask_occ = net.make_dropout_mask(n_b, self.hidden, self.dropout, rng_step.child(0))
        occ_p, occ_s = self.nets_["occ"]
        h, occ_cache = net.mlp_forward(xb, occ_p, mask_occ)
        grad_store = {"mu": None, "nu": None}
        heads = self._make_time_heads(xb, masks, grad_store)
        loss, dh = mc_lower_bound(
            tb,
            sb,
            h,
            heads,
            n_samples=self.n_samples,
            temperature=self.temperature,
            log_eps=self.log_eps,
            estimator=self.estimator,
            rng=rng_step.child(3),
        )
        g_occ, _ = net.mlp_backward(occ_cache, dh)
        net.adam_step(occ_p, g_occ, occ_s, self.lr)
        net.adam_step(self.nets_["mu"][0], grad_store["mu"], self.nets_["mu"][1], self.lr)
        net.adam_step(self.nets_["nu"][0], grad_store["nu"], self.nets_["nu"][1], self.lr)
        return loss

    def _val_loss(self, X_val, t_val, s_val, rng):
        h = self._forward_eval(X_val, "occ")
        heads = self._make_time_heads(X_val, (None, None), {"mu": None, "nu": None})
        loss, _ = mc_lower_bound(
            t_val,
            s_val,
            h,
            heads,
            n_samples=min(self.n_samples, _K_VAL),
            temperature=self.temperature,
            log_eps=self.log_eps,
            estimator=self.estimator,
            rng=rng,
            want_grads=False,
        )
        return loss

    def _occ_scores(self, X):
        return sigmoid(self._forward_eval(X, "occ"))

    def predict_occurrence(self, X):
        """Probability that each event ever occurs: sigma(h(x))."""
        self._require_fitted()
        X = _check_features(X, self.n_features_)
        return self._occ_scores(X)

    def _eval_heads(self, X, c):
        """Calibrated (mu, nu) at explicit occurrence inputs, no dropout."""
        inp = np.concatenate([X, c], axis=1)
        return aft_heads(
            self.log_t_loc_ + self.log_t_scale_ * net.mlp_forward(inp, self.nets_["mu"][0])[0],
            net.mlp_forward(inp, self.nets_["nu"][0])[0] + np.log(self.log_t_scale_),
        )

    def predict_time(self, X):
        """Median of the predicted event-time distribution per event.

        The time heads are evaluated with the event's own occurrence
        input forced to 1 (a time prediction presupposes occurrence) and
        the other events' inputs at their thresholded predictions. The
        median then accounts for the predicted occurrence probability p:
        solving p * Phi((log t - mu)/nu) = 1/2 gives
        t = exp(mu + nu * ndtri(1/(2p))) for p > 1/2, while a
        predicted-never event (p <= 1/2) has no finite median. Both the
        inflation and the never case are capped just beyond the training
        horizon (1.05x the largest observed time), which is how the
        one-sided censored error treats a "never" call without letting a
        runaway scale head produce astronomical outputs.
        """
        self._require_fitted()
        X = _check_features(X, self.n_features_)
        p = self.predict_occurrence(X)
        c_hat = (p >= 0.5).astype(np.float64)
        t_hat = np.empty_like(p)
        for j in range(self.n_events_):
            c_in = c_hat.copy()
            c_in[:, j] = 1.0
            out = self._eval_heads(X, c_in)
            p_j = p[:, j]
            q = 1.0 / (2.0 * np.maximum(p_j, 0.5 + 1e-12))
            z = np.where(p_j > 0.5, np.minimum(ndtri(q), _Z_CAP), _Z_CAP)
            cap = _HORIZON_MARGIN * self.t_max_train_[j]
            t_hat[:, j] = np.minimum(np.exp(out.mu[:, j] + z * out.nu[:, j]), cap)
        return t_hat


class EventTimeModel(_CensoredEventModel):
    """Standard censored event-time model: log-normal heads on features
    alone, maximum likelihood on observed and censored rows alike."""

    kind = "et"

    def __init__(
        self,
        hidden: int = 100,
        lr: float = 3e-4,
        batch_size: int = 400,
        dropout: float = 0.5,
        epochs: int = 300,
        patience: int = 20,
        seed: int = 0,
    ):
        self.hidden = hidden
        self.lr = lr
        self.batch_size = batch_size
        self.dropout = dropout
        self.epochs = epochs
        self.patience = patience
        self.seed = seed

    def fit(self, X, t, s, *, X_val=None, t_val=None, s_val=None, c_val=None, event_names=None):
        X = _check_features(X)
        t, s = _check_targets(t, s, X.shape[0])
        if X_val is not None:
            X_val = _check_features(X_val, X.shape[1])
            t_val, s_val = _check_targets(t_val, s_val, X_val.shape[0])
        self.n_features_ = X.shape[1]
        self.n_events_ = t.shape[1]
        self.event_names_ = list(event_names) if event_names else [f"e{j + 1}" for j in range(self.n_events_)]
        self.log_t_loc_, self.log_t_scale_ = _log_time_moments(t, s)
        return self._fit_loop(X, t, s, X_val, t_val, s_val, c_val)

    def _init_nets(self, d, m, rng):
        nets = {
            "mu": net.mlp_init(d, self.hidden, m, rng.child(1)),
            "nu": net.mlp_init(d, self.hidden, m, rng.child(2)),
        }
        return {name: (p, net.AdamState.for_params(p)) for name, p in nets.items()}

    def _heads(self, xb, masks=(None, None)):
        y_mu, cache_mu = net.mlp_forward(xb, self.nets_["mu"][0], masks[0])
        y_nu, cache_nu = net.mlp_forward(xb, self.nets_["nu"][0], masks[1])
        out = aft_heads(
            self.log_t_loc_ + self.log_t_scale_ * y_mu,
            y_nu + np.log(self.log_t_scale_),
        )
        self.nu_clamp_count_ += out.n_clamped
        return out, cache_mu, cache_nu

    def _train_step(self, xb, tb, sb, rng_step):
        n_b = xb.shape[0]
        masks = (
            net.make_dropout_mask(n_b, self.hidden, self.dropout, rng_step.child(1)),
            net.make_dropout_mask(n_b, self.hidden, self.dropout, rng_step.child(2)),
        )
        out, cache_mu, cache_nu = self._heads(xb, masks)
        ll, dmu, dnu = et_loglik_with_grads(tb, sb, out.mu, out.nu)
        if not np.all(np.isfinite(ll)):
            bad = np.argwhere(~np.isfinite(ll))[0]
            raise TrainingError(f"non-finite log-likelihood at sample {bad[0]}, event {bad[1]}")
        scale = -1.0 / n_b
        loss = scale * ll.sum()
        g_mu, _ = net.mlp_backward(cache_mu, scale * dmu * self.log_t_scale_)
        g_nu, _ = net.mlp_backward(cache_nu, scale * dnu * out.nu_grad)
        net.adam_step(self.nets_["mu"][0], g_mu, self.nets_["mu"][1], self.lr)
        net.adam_step(self.nets_["nu"][0], g_nu, self.nets_["nu"][1], self.lr)
        return loss

    def _val_loss(self, X_val, t_val, s_val, rng):
        out, _, _ = self._heads(X_val)
        ll, _, _ = et_loglik_with_grads(t_val, s_val, out.mu, out.nu)
        return float(-ll.sum() / X_val.shape[0])

    def _predict_mu(self, X):
        return self.log_t_loc_ + self.log_t_scale_ * self._forward_eval(X, "mu")

    def _occ_scores(self, X):
        # earlier predicted time ranks as higher occurrence propensity;
        # AUC is rank-based so -mu is as good as any monotone transform
        return -self._predict_mu(X)

    def ranking_score(self, X):
        """Occurrence-ranking surrogate: negated location parameter."""
        self._require_fitted()
        X = _check_features(X, self.n_features_)
        return self._occ_scores(X)

    def predict_time(self, X):
        """Median point prediction exp(mu(x))."""
        self._require_fitted()
        X = _check_features(X, self.n_features_)
        return aft_predict_time(self._predict_mu(X))


class OccurrenceClassifier(_CensoredEventModel):
    """Binary classifier on the observed-event indicator s (the
    censoring-blind baseline: censored positives count as negatives)."""

    kind = "bc"

    def __init__(
        self,
        hidden: int = 100,
        lr: float = 3e-4,
        batch_size: int = 400,
        dropout: float = 0.5,
        epochs: int = 300,
        patience: int = 20,
        seed: int = 0,
    ):
        self.hidden = hidden
        self.lr = lr
        self.batch_size = batch_size
        self.dropout = dropout
        self.epochs = epochs
        self.patience = patience
        self.seed = seed

    def fit(self, X, s, *, X_val=None, s_val=None, c_val=None, event_names=None):
        X = _check_features(X)
        s = np.asarray(s, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != X.shape[0]:
            raise ValueError(f"s must be [n, events], got {s.shape}")
        if not np.all((s == 0.0) | (s == 1.0)):
            raise ValueError("status must be 0 or 1")
        placeholder_t = np.ones_like(s)
        t_val = None
        if X_val is not None:
            X_val = _check_features(X_val, X.shape[1])
            s_val = np.asarray(s_val, dtype=np.float64)
            t_val = np.ones_like(s_val)
        self.n_features_ = X.shape[1]
        self.n_events_ = s.shape[1]
        self.event_names_ = list(event_names) if event_names else [f"e{j + 1}" for j in range(self.n_events_)]
        return self._fit_loop(X, placeholder_t, s, X_val, t_val, s_val, c_val)

    def _init_nets(self, d, m, rng):
        p = net.mlp_init(d, self.hidden, m, rng.child(0))
        return {"clf": (p, net.AdamState.for_params(p))}

    def _train_step(self, xb, tb, sb, rng_step):
        mask = net.make_dropout_mask(xb.shape[0], self.hidden, self.dropout, rng_step.child(0))
        logits, cache = net.mlp_forward(xb, self.nets_["clf"][0], mask)
        ll = bc_loglik(sb, logits)
        loss = float(-ll.sum() / xb.shape[0])
        dlogits = (sigmoid(logits) - sb) / xb.shape[0]
        g, _ = net.mlp_backward(cache, dlogits)
        net.adam_step(self.nets_["clf"][0], g, self.nets_["clf"][1], self.lr)
        return loss

    def _val_loss(self, X_val, t_val, s_val, rng):
        logits = self._forward_eval(X_val, "clf")
        return float(-bc_loglik(s_val, logits).sum() / X_val.shape[0])

    def _occ_scores(self, X):
        return sigmoid(self._forward_eval(X, "clf"))

    def predict_occurrence(self, X):
        """sigma of the classifier logits."""
        self._require_fitted()
        X = _check_features(X, self.n_features_)
        return self._occ_scores(X)


MODEL_KINDS = {
    "cet": ConditionalEventTimeModel,
    "et": EventTimeModel,
    "bc": OccurrenceClassifier,
}


def _accepted_params(cls) -> set:
    return set(inspect.signature(cls.__init__).parameters) - {"self"}


def train(kind: str, train_ds: Dataset, val_ds: Dataset | None, config: dict | None = None):
    """Construct the estimator for ``kind`` from a shared config dict and
    fit it on a dataset split; returns (model, history).

    Keys the model kind does not accept (the baselines ignore the Monte
    Carlo settings, for instance) are filtered out, so one config drives
    all three models.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {sorted(MODEL_KINDS)}")
    cls = MODEL_KINDS[kind]
    config = dict(config or {})
    kwargs = {k: v for k, v in config.items() if k in _accepted_params(cls)}
    model = cls(**kwargs)
    common = {
        "event_names": train_ds.event_names,
        "c_val": None if val_ds is None or val_ds.c_true is None else val_ds.c_true,
    }
    if kind == "bc":
        model.fit(
            train_ds.x,
            train_ds.s,
            X_val=None if val_ds is None else val_ds.x,
            s_val=None if val_ds is None else val_ds.s,
            **common,
        )
    else:
        model.fit(
            train_ds.x,
            train_ds.t,
            train_ds.s,
            X_val=None if val_ds is None else val_ds.x,
            t_val=None if val_ds is None else val_ds.t,
            s_val=None if val_ds is None else val_ds.s,
            **common,
        )
    return model, model.history_


def load_model(path):
    """Rebuild a fitted estimator from a checkpoint written by .save()."""
    nets, seed, meta = net.load_checkpoint(path)
    kind = meta.get("kind")
    if kind not in MODEL_KINDS:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    model = MODEL_KINDS[kind](**meta["params"])
    model.nets_ = {
        name: value if isinstance(value, tuple) else (value, None) for name, value in nets.items()
    }
    model.n_features_ = int(meta["n_features"])
    model.n_events_ = int(meta["n_events"])
    model.event_names_ = list(meta.get("event_names", []))
    model.rng_algorithm_ = meta.get("rng_algorithm", Rng.algorithm)
    for attr in ("log_t_loc_", "log_t_scale_", "t_max_train_"):
        if attr in meta:
            setattr(model, attr, np.array(meta[attr], dtype=np.float64))
    model.nu_clamp_count_ = 0
    model.history_ = []
    return model
