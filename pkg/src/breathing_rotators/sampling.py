"""Seeded random states, frames and models for scans and property checks."""

from __future__ import annotations

import numpy as np

from .hessian import GaugeCoords, gauge_with_invariants
from .models import Polynomial


def unit_vector(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_velocity(rng, vmax=0.6):
    return unit_vector(rng) * vmax * rng.uniform() ** (1 / 3)


def random_frame(rng, vmax=0.6):
    """(V, N, tangent direction) for building gauge coordinates."""
    return random_velocity(rng, vmax), unit_vector(rng), unit_vector(rng)


def random_gauge(rng, vmax=0.6, omega_scale=1.0, psi_scale=0.5):
    """Unconstrained gauge point: any V, N, Omega, Psi."""
    V, N, _ = random_frame(rng, vmax)
    return GaugeCoords(V, N, rng.uniform(-psi_scale, psi_scale), omega_scale * rng.normal(size=3))


def gauge_at(P, Q, rng, vmax=0.6, psi_scale=0.5):
    V, N, d = random_frame(rng, vmax)
    return gauge_with_invariants(P, Q, V, N, d, rng.uniform(-psi_scale, psi_scale))


def random_invariants(model, rng, p_range=(-1.5, 1.5), q_range=(0.1, 3.0), tries=200):
    """(P, Q) drawn uniformly and accepted when the model evaluates there."""
    for _ in range(tries):
        P, Q = rng.uniform(*p_range), rng.uniform(*q_range)
        if model.in_domain(P, Q):
            return P, Q
    raise ValueError(f"no admissible (P, Q) found for {model!r}")


def random_generic_polynomial(rng, scale=0.3):
    """1 + small random quadratic in (P, Q); generic for almost every draw."""
    terms = [(0, 0, 1.0)]
    for i, j in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2)):
        terms.append((i, j, float(scale * rng.uniform(-1, 1))))
    return Polynomial(terms)


def generic_models(rng, n=5):
    return [random_generic_polynomial(rng) for _ in range(n)]

