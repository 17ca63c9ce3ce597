"""Shared test utilities: the closed-form reference channels and a
well-conditioned random outer-model generator."""

from fractions import Fraction

import numpy as np

import spectralfactors as sf


def channel_transfer(z, zero, pole):
    """Scalar rational (z - zero)/(z - pole) over Fractions or complex."""
    return (z - zero) / (z - pole)


def ref_w_minus_entry(z, i):
    """Diagonal entry i of the reference outer factor, exact rational."""
    zeros = (Fraction(1, 4), Fraction(1, 3))
    return channel_transfer(z, zeros[i], Fraction(1, 2))


def ref_density_entry(z, i):
    """Diagonal entry i of the reference density, exact rational in z."""
    return ref_w_minus_entry(z, i) * ref_w_minus_entry(1 / z, i)


def random_outer(seed, n_max=5, m=2):
    """Random minimal outer factor with D = I and the zero matrix kept
    stable by shrinking the output map.

    Models are rejected unless both Stein solutions are well conditioned;
    the ensemble probes the factorization theorem, so it stays where double
    precision can represent the theorem's content.
    """
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        n = int(rng.integers(1, n_max + 1))
        a = rng.normal(size=(n, n))
        radius = max(abs(np.linalg.eigvals(a)))
        a *= rng.uniform(0.4, 0.85) / radius
        if min(abs(np.linalg.eigvals(a))) < 0.2:
            continue
        b = rng.normal(size=(n, m)) / np.sqrt(n)
        c = rng.normal(size=(m, n)) / np.sqrt(n)
        ok = False
        for _ in range(60):
            gamma_eigs = np.linalg.eigvals(a - b @ c)
            if max(abs(gamma_eigs)) < 0.9 and min(abs(gamma_eigs)) > 0.2:
                ok = True
                break
            c = c * 0.7
        if not ok:
            continue
        w = sf.Realization(a, b, c, np.eye(m))
        try:
            sf.validate_outer(w)
            ext = sf.extremal_set(w)
        except sf.SpectralFactorsError:
            continue
        ex = np.abs(np.linalg.eigvalsh(ext.x))
        ey = np.abs(np.linalg.eigvalsh(ext.y))
        if ex.max() / ex.min() > 200 or ey.max() / ey.min() > 200 or ey.max() > 100:
            continue
        return w
    raise RuntimeError(f"no admissible model for seed {seed}")


def circle_points(k):
    return np.exp(2j * np.pi * np.arange(k) / k)
