"""Random-instance generators shared by property and acceptance tests."""

import numpy as np

from entropy_sandwich.densities import GenGaussian, MixtureDensity, PiecewiseLinearDensity, UniformComponent, gg_beta_for_variance


def random_weights(rng, n):
    w = rng.uniform(0.05, 1.0, n)
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return tuple(w.tolist())


def random_gg_mixture(rng, n_max=5, theta_range=(0.5, 5.0), max_var_ratio=100.0, m=None):
    """Common-centre generalized-Gaussian mixture with bounded component-variance ratio."""
    n = int(rng.integers(1, n_max + 1))
    m = float(rng.uniform(-3, 3)) if m is None else m
    thetas = rng.uniform(*theta_range, n)
    log_var = rng.uniform(0.0, np.log(max_var_ratio), n)
    log_var -= log_var.min()
    scale = rng.uniform(0.2, 3.0)
    comps = [GenGaussian(m, float(t), gg_beta_for_variance(float(t), scale * float(np.exp(v))))
             for t, v in zip(thetas, log_var)]
    return MixtureDensity(random_weights(rng, n), tuple(comps))


def random_uniform_mixture(rng, n_max=5, m=None):
    n = int(rng.integers(1, n_max + 1))
    m = float(rng.uniform(-3, 3)) if m is None else m
    eps = rng.uniform(0.1, 5.0, n)
    return MixtureDensity(random_weights(rng, n), tuple(UniformComponent(m, float(e)) for e in eps))


def random_asymmetric_lipschitz(rng):
    """Random asymmetric triangle or trapezoid with mode b."""
    b = float(rng.uniform(-2, 2))
    left, right = rng.uniform(0.2, 3.0, 2)
    while abs(left - right) < 0.05:
        right = rng.uniform(0.2, 3.0)
    if rng.random() < 0.5:
        return PiecewiseLinearDensity.triangle(b, float(left), float(right))
    pl = float(rng.uniform(0.0, 0.8) * left)
    pr = float(rng.uniform(0.0, 0.8) * right)
    return PiecewiseLinearDensity.trapezoid(b, float(left), float(right), pl, pr)
