"""Deterministic disk, annulus and circle quadrature tolerant of point singularities.

The workhorse is a tensor-product rule in polar coordinates: Gauss-Legendre
in radius, periodic trapezoid in angle.  When an integrand has a declared
singular point, the polar frame is recentred there; the rho-Jacobian then
tames 1/rho blow-ups, and an exponentially graded radial map resolves
logarithmic factors down to machine scale.  Summation order is fixed, so
identical inputs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi

# exp(-_INNER_DECAY) ~ 2e-16: the graded map rho = s*exp(-beta*(1-t)) reaches
# machine-scale radii before truncating the subdisk at t = 0
_INNER_DECAY = 36.0


@dataclass(frozen=True)
class DiskDomain:
    """Origin-centred open disk, optionally punctured at the origin."""

    radius: float
    punctured: bool = False

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError("disk radius must be positive")


@dataclass(frozen=True)
class QuadratureConfig:
    """Node counts and split radius that fully determine every numeric result.

    ``singular_split_radius=None`` means a quarter of the disk radius at the
    point of use.  ``target_rel_tol`` records the accuracy the default node
    counts are tuned for; the rules themselves are non-adaptive.
    """

    radial_nodes: int = 64
    angular_nodes: int = 256
    singular_split_radius: Optional[float] = None
    target_rel_tol: float = 1e-8

    def __post_init__(self):
        if self.radial_nodes < 8 or self.angular_nodes < 8:
            raise ValueError("node counts must be at least 8")
        if not (0.0 < self.target_rel_tol <= 1e-2):
            raise ValueError("target_rel_tol must lie in (0, 1e-2]")
        if self.singular_split_radius is not None and not (self.singular_split_radius > 0):
            raise ValueError("singular_split_radius must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolated r -> 0 value together with the evidence used to get it."""

    value: float
    radii_used: Tuple[float, ...]
    fit_residual: float


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _angles(m: int):
    return np.arange(m) * (TWO_PI / m)


def _sampled(g, pts):
    vals = np.asarray(g(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand not finite")
    return vals


def _plain_polar(g, radius, cfg):
    theta = _angles(cfg.angular_nodes)
    x, w = _gauss_legendre(cfg.radial_nodes)
    rho = 0.5 * radius * (x + 1.0)
    w_rho = 0.5 * radius * w
    pts = rho[:, None] * np.exp(1j * theta[None, :])
    vals = _sampled(g, pts)
    return float(np.sum(vals * (w_rho * rho)[:, None]) * (TWO_PI / cfg.angular_nodes))


def disk_integral(g, disk: DiskDomain, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  singular_at: Optional[complex] = None,
                  inner_rule: str = "graded") -> float:
    """Area integral of ``g`` over the disk.

    ``g`` must broadcast over complex arrays.  With ``singular_at`` inside
    the disk, integration recentres polar coordinates on that point: a
    dedicated radial rule covers the subdisk of radius
    ``cfg.singular_split_radius`` and a smooth rule covers the rest out to
    the angle-dependent boundary distance.  ``g`` may then blow up like
    1/|z - p| times logarithms.

    ``inner_rule`` selects the subdisk radial rule: "graded" resolves log
    factors down to machine-scale radii, while "plain" keeps Gauss-Legendre
    nodes away from the centre.  Use "plain" for integrands that are bounded
    at the singular point but catastrophically cancellation-prone there
    (high-order kernels against Taylor remainders).

    Raises ``ValueError("integrand not finite")`` if any sample away from the
    declared singular point fails to be finite.
    """
    radius = disk.radius
    if singular_at is None or abs(singular_at) >= radius:
        return _plain_polar(g, radius, cfg)
    if inner_rule not in ("graded", "plain"):
        raise ValueError("inner_rule must be 'graded' or 'plain'")

    p = complex(singular_at)
    theta = _angles(cfg.angular_nodes)
    rays = np.exp(1j * theta)
    proj = (p.conjugate() * rays).real
    rho_max = -proj + np.sqrt(proj * proj + (radius * radius - abs(p) ** 2))
    split = cfg.singular_split_radius if cfg.singular_split_radius is not None else 0.25 * radius
    s = min(split, 0.9 * float(rho_max.min()))

    x, w = _gauss_legendre(cfg.radial_nodes)

    if inner_rule == "graded":
        # rho = s * exp(-beta (1 - t)), drho = beta * rho * dt; the smallest
        # radius stays above the rounding scale of p so p + rho never
        # collapses onto p itself
        floor = 64.0 * np.finfo(float).eps * (1.0 + abs(p))
        beta = min(_INNER_DECAY, max(1.0, math.log(s / floor)))
        t = 0.5 * (x + 1.0)
        rho_in = s * np.exp(-beta * (1.0 - t))
        w_in = 0.5 * w * beta * rho_in
    else:
        rho_in = 0.5 * s * (x + 1.0)
        w_in = 0.5 * s * w
    pts_in = p + rho_in[:, None] * rays[None, :]
    inner = np.sum(_sampled(g, pts_in) * (w_in * rho_in)[:, None])

    # smooth band from the split radius to the boundary along each ray
    half = 0.5 * (rho_max - s)
    rho_out = s + half[None, :] * (x[:, None] + 1.0)
    w_out = half[None, :] * w[:, None]
    pts_out = p + rho_out * rays[None, :]
    outer = np.sum(_sampled(g, pts_out) * w_out * rho_out)

    return float((inner + outer) * (TWO_PI / cfg.angular_nodes))


def annulus_integral(g, inner_radius: float, outer_radius: float,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Area integral of ``g`` over the origin-centred annulus."""
    if not (0.0 <= inner_radius < outer_radius):
        raise ValueError("annulus radii must satisfy 0 <= inner < outer")
    theta = _angles(cfg.angular_nodes)
    x, w = _gauss_legendre(cfg.radial_nodes)
    half = 0.5 * (outer_radius - inner_radius)
    rho = inner_radius + half * (x + 1.0)
    w_rho = half * w
    pts = rho[:, None] * np.exp(1j * theta[None, :])
    vals = _sampled(g, pts)
    return float(np.sum(vals * (w_rho * rho)[:, None]) * (TWO_PI / cfg.angular_nodes))


def circle_integral(g, radius: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Arclength integral over |z| = radius by the periodic trapezoid rule.

    Spectrally accurate for smooth periodic integrands; the node count is
    ``cfg.angular_nodes``.
    """
    if not (radius > 0.0):
        raise ValueError("circle radius must be positive")
    pts = radius * np.exp(1j * _angles(cfg.angular_nodes))
    vals = _sampled(g, pts)
    return float(np.sum(vals) * radius * (TWO_PI / cfg.angular_nodes))


def shrinking_limit(samples: Sequence[Tuple[float, float]]) -> LimitEstimate:
    """Extrapolate (radius, value) samples to radius 0 by a c0 + c1*r^2 fit.

    The quadratic model matches the leading correction of circumferential
    means of C^2 functions, so c0 is the r -> 0 limit for every input in
    scope.  The fit residual (RMS) is reported, never hidden.
    """
    if len(samples) < 4:
        raise ValueError("insufficient samples")
    radii = np.asarray([s[0] for s in samples], dtype=float)
    values = np.asarray([s[1] for s in samples], dtype=float)
    if np.any(radii <= 0.0):
        raise ValueError("radii must be positive")
    if np.any(np.diff(radii) >= 0.0):
        raise ValueError("radii must be strictly decreasing")
    design = np.stack([np.ones_like(radii), radii ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    resid = values - design @ coef
    return LimitEstimate(value=float(coef[0]),
                         radii_used=tuple(float(r) for r in radii),
                         fit_residual=float(np.sqrt(np.mean(resid ** 2))))
