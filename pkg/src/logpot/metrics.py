"""Curvature, singularity order and maximum-principle machinery for densities.

Gaussian curvature is computed two ways: from the Laplacian of log(lambda)
(closed form or finite differences) and from the shrinking-circle limit of
circumferential means, which also covers densities that are merely upper
semi-continuous along crossing sets.  On top sit the SK checks: curvature
subordinate to -4, maximality comparisons, gluing, and the asymptotic decay
of remainders of curvature-equation solutions near a singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .densities import ConformalDensity, GlueConditionError
from .multiindex import MultiIndex, ScalarField, fd_partial
from .quadrature import (DEFAULT_CONFIG, DiskDomain, QuadratureConfig, TWO_PI,
                         circle_integral, shrinking_limit)

# slope threshold on the cusp normal-form remainder: below it the remainder
# counts as trend-free over the probing window
_CUSP_SLOPE_TOL = 0.05


@dataclass(frozen=True)
class OrderEstimate:
    """Singularity order regression result with its quality evidence."""

    alpha: float
    fit_quality: float
    radii: Tuple[float, ...]
    cusp_flag: bool


@dataclass(frozen=True)
class SkReport:
    """Outcome of a curvature-subordination sweep over a point grid."""

    passed: bool
    worst_margin: float
    worst_point: complex
    checked: int
    skipped: int
    failures: Tuple[Tuple[complex, float], ...]


def _domain_gap(d: ConformalDensity, z: complex) -> float:
    gap = d.domain.radius - abs(z)
    if d.domain.punctured:
        gap = min(gap, abs(z))
    return gap


def default_probe_radii(d: ConformalDensity, z) -> Tuple[float, ...]:
    """Circle radii for mean-value probes at z, scaled to the free space."""
    gap = _domain_gap(d, complex(z))
    if gap <= 0.0:
        raise ValueError("probe point has no room inside the density domain")
    base = gap / 16.0
    return tuple(base / k for k in (1.0, 1.5, 2.0, 3.0, 4.0))


def curvature_laplace(d: ConformalDensity, z) -> float:
    """Gaussian curvature -Lap(log lambda)/lambda^2 at a positive-density point.

    Uses the density's closed-form log-Laplacian when available, otherwise
    Richardson-extrapolated central differences with a step kept clear of the
    domain boundary and the puncture.
    """
    z = complex(z)
    lam = float(d.density(z))
    if lam <= 0.0:
        raise ValueError("curvature undefined at zero density")
    if d.log_laplacian is not None:
        lap = float(d.log_laplacian(z))
    else:
        gap = _domain_gap(d, z)
        h = min(1e-4 * (1.0 + abs(z)), gap / 8.0)
        lap = (fd_partial(d.log_density, MultiIndex(2, 0), z, h=h)
               + fd_partial(d.log_density, MultiIndex(0, 2), z, h=h))
    return -lap / lam ** 2


def curvature_meanvalue(d: ConformalDensity, z, radii: Optional[Sequence[float]] = None,
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Generalized Gaussian curvature from circumferential means of log lambda.

    For each radius r the probe is (4/r^2) * (mean on |w - z| = r minus the
    centre value); the r -> 0 limit of the probes is extracted by
    :func:`logpot.quadrature.shrinking_limit` and turned into a curvature.
    """
    z = complex(z)
    lam = float(d.density(z))
    if lam <= 0.0:
        raise ValueError("curvature undefined at zero density")
    if radii is None:
        radii = default_probe_radii(d, z)
    radii = [float(r) for r in radii]
    gap = _domain_gap(d, z)
    if max(radii) >= gap:
        raise ValueError("probe circle escapes the density domain")
    centre = math.log(lam)
    samples = []
    for r in radii:
        mean = circle_integral(lambda zeta: d.log_density(z + zeta), r, cfg) / (TWO_PI * r)
        samples.append((r, 4.0 / r ** 2 * (mean - centre)))
    est = shrinking_limit(samples)
    return -est.value / lam ** 2


def _linear_fit(x: np.ndarray, y: np.ndarray):
    design = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float(coef[0]), float(coef[1]), float(np.sum(resid ** 2))


def _fit_quality(y: np.ndarray, ssr: float) -> float:
    # coefficient of determination with a unit variance floor, so flat
    # signals (slope ~ 0) do not spuriously report a bad fit
    sst = float(np.sum((y - y.mean()) ** 2))
    return max(0.0, 1.0 - ssr / (sst + len(y)))


def order_of(u: ScalarField, radii: Optional[Sequence[float]] = None,
             angular_samples: int = 720) -> OrderEstimate:
    """Singularity order of u at the origin from circle maxima.

    Regresses M_u(r) = max over |z| = r of u against log(1/r); the slope is
    the order.  A cusp is recognized when the normal-form remainder
    M_u(r) + log r + log log(1/r) stays bounded over the window, in which
    case the regression is rerun with the double-log term stripped and the
    order is clamped to 1.
    """
    if radii is None:
        radii = [2.0 ** -k for k in range(4, 21)]
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii[1:], radii)):
        raise ValueError("radii must be positive and strictly decreasing")
    ring = np.exp(1j * np.arange(angular_samples) * (TWO_PI / angular_samples))
    maxima = []
    for r in radii:
        vals = np.asarray(u(r * ring), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"non-finite samples on the circle |z| = {r:g}")
        maxima.append(float(vals.max()))

    x = np.log(1.0 / np.asarray(radii))
    y = np.asarray(maxima)
    slope_raw, _, ssr_raw = _linear_fit(x, y)

    # cusp normal form: u = -log|z| - log log(1/|z|) + O(1)
    w = y - x + np.log(x)
    slope_w, _, _ = _linear_fit(x, w)
    ssr_cusp = float(np.sum((w - w.mean()) ** 2))
    cusp = bool(abs(slope_w) <= _CUSP_SLOPE_TOL and ssr_cusp < ssr_raw)

    if cusp:
        corrected = y + np.log(x)
        alpha, _, ssr = _linear_fit(x, corrected)
        quality = _fit_quality(corrected, ssr)
        alpha = min(alpha, 1.0)
    else:
        alpha, quality = slope_raw, _fit_quality(y, ssr_raw)
    return OrderEstimate(alpha=float(alpha), fit_quality=float(quality),
                         radii=tuple(radii), cusp_flag=cusp)


def sk_verify(d: ConformalDensity, grid, tol: float = 1e-6,
              cfg: QuadratureConfig = DEFAULT_CONFIG,
              radii: Optional[Sequence[float]] = None) -> SkReport:
    """Check curvature <= -4 + tol wherever the density is positive.

    Zero-density points are skipped (the SK property constrains only the
    set lambda > 0).  The closed-form Laplacian is used when the density
    carries one, otherwise the mean-value definition.
    """
    pts = np.asarray(grid, dtype=complex).ravel()
    failures = []
    worst = -math.inf
    worst_point = complex(np.nan, np.nan)
    checked = 0
    skipped = 0
    for z in pts:
        z = complex(z)
        lam = float(d.density(z))
        if lam <= 0.0:
            skipped += 1
            continue
        if d.log_laplacian is not None:
            kappa = curvature_laplace(d, z)
        else:
            kappa = curvature_meanvalue(d, z, radii=radii, cfg=cfg)
        checked += 1
        margin = kappa + 4.0
        if margin > worst:
            worst = margin
            worst_point = z
        if margin > tol:
            failures.append((z, float(kappa)))
    return SkReport(passed=not failures, worst_margin=float(worst),
                    worst_point=worst_point, checked=checked, skipped=skipped,
                    failures=tuple(failures))


def _inward_limsup(inner: ConformalDensity, xi: complex,
                   n_dirs: int = 8, n_steps: int = 16) -> float:
    """Upper estimate of limsup of the inner density along z -> xi from inside."""
    r_u = inner.domain.radius
    if xi == 0:
        raise ValueError("probe point must be away from the origin")
    base_angle = np.angle(xi)
    spread = np.linspace(-0.25 * np.pi, 0.25 * np.pi, n_dirs)
    directions = -np.exp(1j * (base_angle + spread))
    offsets = 0.05 * r_u * 2.0 ** -np.arange(n_steps)
    best = -math.inf
    for dvec in directions:
        pts = xi + dvec * offsets
        keep = np.abs(pts) < r_u
        if inner.domain.punctured:
            keep &= pts != 0
        if not np.any(keep):
            continue
        vals = np.asarray(inner.density(pts[keep]), dtype=float)
        best = max(best, float(vals.max()))
    if not math.isfinite(best):
        raise ValueError("no inward samples available at the probe point")
    return best


def glue(outer: ConformalDensity, inner: ConformalDensity,
         boundary_probe: Sequence[complex], tol: float = 1e-6) -> ConformalDensity:
    """Maximum-principle gluing of an inner density into an outer one.

    Verifies limsup(inner) <= outer at each probe point near the interface
    circle and on success returns max(outer, inner) on the inner domain and
    outer elsewhere.  With coinciding domains the interface is empty and the
    condition is vacuous.
    """
    if inner.domain.radius > outer.domain.radius + 1e-12:
        raise ValueError("inner domain must sit inside the outer one")
    has_interface = inner.domain.radius < outer.domain.radius
    if has_interface:
        for xi in boundary_probe:
            xi = complex(xi)
            limsup = _inward_limsup(inner, xi)
            outer_val = float(outer.density(xi))
            if limsup > outer_val + tol:
                raise GlueConditionError(xi, limsup, outer_val)

    r_u = inner.domain.radius
    punctured = outer.domain.punctured or inner.domain.punctured

    def density(z):
        za = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.asarray(outer.density(za), dtype=float).copy()
        mask = np.abs(za) < r_u
        if inner.domain.punctured:
            mask &= za != 0
        if np.any(mask):
            out[mask] = np.maximum(out[mask],
                                   np.asarray(inner.density(za[mask]), dtype=float))
        if np.ndim(z) == 0:
            return float(out[0])
        return out.reshape(np.shape(z))

    order = None
    if outer.declared_order is not None and inner.declared_order is not None:
        order = max(outer.declared_order, inner.declared_order)

    return ConformalDensity(density=density,
                            domain=DiskDomain(outer.domain.radius, punctured),
                            log_laplacian=None,
                            declared_order=order,
                            label=f"glue({outer.label}|{inner.label})")


def ahlfors_margin(sk: ConformalDensity, reference: ConformalDensity, grid) -> float:
    """Smallest value of reference - sk over the grid (>= 0 when domination holds)."""
    pts = np.asarray(grid, dtype=complex).ravel()
    margins = (np.asarray(reference.density(pts), dtype=float)
               - np.asarray(sk.density(pts), dtype=float))
    return float(margins.min())


def liouville_residual(u: ScalarField, kappa, z) -> float:
    """Defect Lap(u) + kappa * e^(2u) of the curvature equation at z."""
    z = complex(z)
    lap = (float(u.derivative(MultiIndex(2, 0), z))
           + float(u.derivative(MultiIndex(0, 2), z)))
    return lap + float(kappa(z)) * math.exp(2.0 * float(u(z)))


def remainder_field(u: ScalarField, alpha: float, z):
    """Remainder after removing the singular normal form from u.

    Returns u(z) + alpha*log|z| for alpha < 1 and
    u(z) + log|z| + log log(1/|z|) at alpha = 1.
    """
    if alpha > 1.0:
        raise ValueError("order must satisfy alpha <= 1")
    za = np.asarray(z, dtype=complex)
    if np.any(za == 0):
        raise ValueError("remainder undefined at the origin")
    r = np.abs(za)
    vals = np.asarray(u(za), dtype=float)
    if alpha == 1.0:
        out = vals + np.log(r) + np.log(np.log(1.0 / r))
    else:
        out = vals + alpha * np.log(r)
    if np.ndim(z) == 0:
        return float(out)
    return out


def asymptotic_slope(u: ScalarField, alpha: float, deriv_order: int,
                     dyadic_radii: Optional[Sequence[float]] = None,
                     ray_angle: float = 0.37) -> float:
    """Measured log-log decay rate of an order-n mixed partial of the remainder.

    Differences the remainder field at |z| = dyadic radii along a fixed ray
    with steps proportional to |z|, then regresses log|derivative| against
    log|z|.  Slower decay than the theory allows shows up as a slope below
    2 - 2*alpha - n.  Raises "signal lost" when the derivative magnitudes sit
    at the rounding floor (identically vanishing remainder).
    """
    if deriv_order < 1:
        raise ValueError("derivative order must be at least 1")
    if dyadic_radii is None:
        dyadic_radii = [2.0 ** -k for k in range(4, 13)]
    index = MultiIndex(deriv_order - 1, 1)
    direction = np.exp(1j * ray_angle)
    eps = np.finfo(float).eps
    mags = []
    for r in dyadic_radii:
        z = r * direction
        h = r / 64.0
        val = fd_partial(lambda w: remainder_field(u, alpha, w), index, z, h=h)
        scale = max(1.0, abs(float(remainder_field(u, alpha, z))))
        floor = 1e3 * eps * scale / h ** deriv_order
        if abs(val) <= floor:
            raise ValueError("signal lost")
        mags.append(abs(val))
    slope, _, _ = _linear_fit(np.log(np.asarray(dyadic_radii)),
                              np.log(np.asarray(mags)))
    return float(slope)
