"""Independent oracles for the test suite.

Deliberately brute-force and separate from the library code paths they
check: direct pair enumeration for the rank metrics, central finite
differences for gradients, quadrature for densities, exact enumeration
of Bernoulli expectations, and a textbook Adam recursion.
"""

import numpy as np


def brute_force_auc(scores, labels):
    """O(n^2) pair statistic: wins + half-ties over pos x neg pairs."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                wins += 1.0
            elif sp == sn:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def brute_force_concordance(t, s, t_hat):
    """O(n^2) scan over ordered pairs with the eligibility rule:
    both observed with distinct times, or observed-before-censored."""
    n = len(t)
    num = 0.0
    den = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if s[i] == 1 and s[j] == 1:
                if not t[i] < t[j]:
                    continue  # counted from the other side; ties excluded
            elif s[i] == 1 and s[j] == 0:
                if not t[i] < t[j]:
                    continue
            else:
                continue
            den += 1
            if t_hat[i] < t_hat[j]:
                num += 1.0
            elif t_hat[i] == t_hat[j]:
                num += 0.5
    return num / den


def finite_difference_grads(f, params, h=1e-5):
    """Central finite differences of a scalar function of a flat vector."""
    params = np.asarray(params, dtype=float)
    grads = np.empty_like(params)
    for i in range(params.size):
        bumped = params.copy()
        bumped[i] += h
        up = f(bumped)
        bumped[i] -= 2 * h
        down = f(bumped)
        grads[i] = (up - down) / (2 * h)
    return grads


def enumerate_bernoulli_expectation(h, f):
    """Exact E[f(c)] for c ~ prod Bern(sigmoid(h)): sum over 2^M outcomes."""
    h = np.asarray(h, dtype=float)
    m = h.shape[0]
    p = 1.0 / (1.0 + np.exp(-h))
    total = 0.0
    for bits in range(2**m):
        c = np.array([(bits >> j) & 1 for j in range(m)], dtype=float)
        w = np.prod(np.where(c == 1, p, 1.0 - p))
        total += w * f(c)
    return total


def enumerate_bernoulli_gradient(h, f):
    """Exact gradient of E[f(c)] wrt the logits.

    d/dh_j E[f] = sigma'(h_j) * (E[f | c_j = 1] - E[f | c_j = 0]).
    """
    h = np.asarray(h, dtype=float)
    m = h.shape[0]
    p = 1.0 / (1.0 + np.exp(-h))
    grad = np.zeros(m)
    for j in range(m):
        others = [i for i in range(m) if i != j]
        e1 = 0.0
        e0 = 0.0
        for bits in range(2 ** len(others)):
            c = np.zeros(m)
            w = 1.0
            for idx, i in enumerate(others):
                c[i] = (bits >> idx) & 1
                w *= p[i] if c[i] == 1 else 1.0 - p[i]
            c[j] = 1.0
            e1 += w * f(c.copy())
            c[j] = 0.0
            e0 += w * f(c.copy())
        grad[j] = p[j] * (1.0 - p[j]) * (e1 - e0)
    return grad


def random_multilinear(rng, m):
    """Random multilinear polynomial of c: sum of coefficients over subsets."""
    coeffs = {}
    for bits in range(2**m):
        coeffs[bits] = rng.normal()

    def f(c):
        c = np.asarray(c, dtype=float)
        total = 0.0
        for bits, a in coeffs.items():
            term = a
            for j in range(m):
                if (bits >> j) & 1:
                    term *= c[..., j]
            total += term
        return total

    return f


def lognormal_density_quadrature(mu, nu, upper_t=None, z_span=12.0, n_points=40001):
    """Simpson integration of the log-normal density.

    Substituting t = exp(g) turns the integral into a plain normal one;
    integrating the library's own density through the substitution keeps
    this an independent check of normalization, not of the formula used.
    """
    from scipy.integrate import simpson

    from cetime.aft import lognormal_log_density

    if upper_t is None:
        g_hi = mu + z_span * nu
    else:
        g_hi = np.log(upper_t)
    g = np.linspace(mu - z_span * nu, g_hi, n_points)
    t = np.exp(g)
    integrand = np.exp(lognormal_log_density(t, mu, nu)) * t
    return float(simpson(integrand, x=g))


def reference_adam(grad_fn, p0, lr, n_steps, beta1=0.9, beta2=0.999, eps=1e-8):
    """Textbook scalar Adam recursion, for trajectory comparison."""
    p = float(p0)
    m = 0.0
    v = 0.0
    trajectory = []
    for t in range(1, n_steps + 1):
        g = grad_fn(p)
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)
        trajectory.append(p)
    return np.array(trajectory)
