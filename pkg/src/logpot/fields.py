"""Concrete scalar fields with analytic derivative oracles."""

from __future__ import annotations

import math

import numpy as np

from .multiindex import MultiIndex, ScalarField

SMOOTH = 99  # stand-in smoothness class for C-infinity fields


def constant_field(c: float) -> ScalarField:
    """The field identically equal to c."""

    def evaluate(z):
        return np.full_like(np.asarray(z, dtype=complex).real, float(c))

    def partials(j, z):
        shape = np.asarray(z, dtype=complex).real
        return np.full_like(shape, float(c)) if j.order == 0 else np.zeros_like(shape)

    return ScalarField(evaluate=evaluate, partials=partials,
                       smoothness=SMOOTH, hoelder_nu=1.0)


def polynomial_field(coeffs: dict) -> ScalarField:
    """Bivariate polynomial sum(c * x^a1 * y^a2) from {(a1, a2): c}."""
    terms = [(int(a1), int(a2), float(c)) for (a1, a2), c in sorted(coeffs.items())]

    def evaluate(z):
        za = np.asarray(z, dtype=complex)
        x, y = za.real, za.imag
        out = np.zeros_like(x)
        for a1, a2, c in terms:
            out = out + c * x ** a1 * y ** a2
        return out

    def partials(j, z):
        za = np.asarray(z, dtype=complex)
        x, y = za.real, za.imag
        out = np.zeros_like(x)
        for a1, a2, c in terms:
            if a1 < j.j1 or a2 < j.j2:
                continue
            fall = (math.factorial(a1) // math.factorial(a1 - j.j1)) * \
                   (math.factorial(a2) // math.factorial(a2 - j.j2))
            out = out + c * fall * x ** (a1 - j.j1) * y ** (a2 - j.j2)
        return out

    return ScalarField(evaluate=evaluate, partials=partials,
                       smoothness=SMOOTH, hoelder_nu=1.0)


def _hermite(n: int, x):
    """Physicists' Hermite polynomial H_n by recurrence."""
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h


def gaussian_field() -> ScalarField:
    """f(z) = exp(-|z|^2); partials come from the Hermite recurrence."""

    def evaluate(z):
        za = np.asarray(z, dtype=complex)
        return np.exp(-(za.real ** 2 + za.imag ** 2))

    def partials(j, z):
        za = np.asarray(z, dtype=complex)
        x, y = za.real, za.imag
        sign = (-1.0) ** j.order
        return sign * _hermite(j.j1, x) * _hermite(j.j2, y) * np.exp(-(x * x + y * y))

    return ScalarField(evaluate=evaluate, partials=partials,
                       smoothness=SMOOTH, hoelder_nu=1.0)


def cosine_field(u: float = 1.1, v: float = 0.6, shift: float = 2.0) -> ScalarField:
    """f(z) = shift + cos(u*x + v*y), a positive smooth non-radial test field."""

    def evaluate(z):
        za = np.asarray(z, dtype=complex)
        return shift + np.cos(u * za.real + v * za.imag)

    def partials(j, z):
        za = np.asarray(z, dtype=complex)
        phase = u * za.real + v * za.imag + j.order * (np.pi / 2.0)
        return (u ** j.j1) * (v ** j.j2) * np.cos(phase)

    return ScalarField(evaluate=evaluate, partials=partials,
                       smoothness=SMOOTH, hoelder_nu=1.0)


def log_density_field(density, smoothness: int = SMOOTH) -> ScalarField:
    """log(lambda) of a conformal density as a ScalarField (FD derivative oracle)."""

    def evaluate(z):
        return np.log(np.asarray(density.density(z), dtype=float))

    return ScalarField(evaluate=evaluate, partials=None,
                       smoothness=smoothness, hoelder_nu=1.0)


def random_polynomial(rng: np.random.Generator, degree: int = 5,
                      scale: float = 1.0) -> ScalarField:
    """Random dense polynomial of the given total degree (for property tests)."""
    coeffs = {}
    for a1 in range(degree + 1):
        for a2 in range(degree + 1 - a1):
            coeffs[(a1, a2)] = scale * rng.uniform(-1.0, 1.0)
    return polynomial_field(coeffs)
