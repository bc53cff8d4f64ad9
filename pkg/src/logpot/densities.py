"""Conformal densities on plane disks: catalog, pullbacks, registry and CSV I/O.

A conformal metric is written lambda(z)|dz|; only the density lambda matters
here.  The catalog holds the constant-curvature references: the hyperbolic
density of the unit disk, its punctured-disk counterpart, and the maximal
density with a prescribed singularity order alpha <= 1 at the origin.  Each
carries a closed form for the Laplacian of log(lambda), so curvature can be
evaluated without differencing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .quadrature import DiskDomain


@dataclass(frozen=True)
class ConformalDensity:
    """Non-negative density on a disk domain.

    ``density`` must broadcast over complex arrays.  ``log_laplacian``, when
    present, is the closed-form Laplacian of log(density) and must agree with
    numerical differencing (asserted by the tests).  ``declared_order`` is
    the singularity order alpha <= 1 at the origin, if known.
    """

    density: Callable
    domain: DiskDomain
    log_laplacian: Optional[Callable] = None
    declared_order: Optional[float] = None
    label: str = ""

    def __call__(self, z):
        return self.density(z)

    def log_density(self, z):
        return np.log(np.asarray(self.density(z), dtype=float))


@dataclass(frozen=True)
class HolomorphicMap:
    """A holomorphic map together with its complex derivative."""

    evaluate: Callable
    derivative: Callable
    label: str = ""

    def __call__(self, w):
        return self.evaluate(w)


class GlueConditionError(ValueError):
    """Boundary limsup condition of the gluing construction failed at a point."""

    def __init__(self, point: complex, inner_limit: float, outer_value: float):
        self.point = point
        self.inner_limit = inner_limit
        self.outer_value = outer_value
        self.excess = inner_limit - outer_value
        super().__init__(
            "gluing condition violated at z = {:.6g}{:+.6g}i: inner density "
            "approaches {:.6g} > outer density {:.6g} (excess {:.4g})".format(
                point.real, point.imag, inner_limit, outer_value, self.excess))


def hyperbolic_disk() -> ConformalDensity:
    """Density 1/(1 - |z|^2) of the unit disk, constant curvature -4."""

    def density(z):
        return 1.0 / (1.0 - np.abs(np.asarray(z, dtype=complex)) ** 2)

    def log_laplacian(z):
        return 4.0 / (1.0 - np.abs(np.asarray(z, dtype=complex)) ** 2) ** 2

    return ConformalDensity(density=density, domain=DiskDomain(1.0),
                            log_laplacian=log_laplacian, label="hyperbolic-disk")


def hyperbolic_punctured() -> ConformalDensity:
    """Density 1/(2|z| log(1/|z|)) of the punctured unit disk; order-1 cusp."""

    def density(z):
        r = np.abs(np.asarray(z, dtype=complex))
        return 1.0 / (2.0 * r * np.log(1.0 / r))

    def log_laplacian(z):
        r = np.abs(np.asarray(z, dtype=complex))
        return 1.0 / (r * np.log(1.0 / r)) ** 2

    return ConformalDensity(density=density, domain=DiskDomain(1.0, punctured=True),
                            log_laplacian=log_laplacian, declared_order=1.0,
                            label="hyperbolic-punctured")


def maximal_density(alpha: float, R: float = 1.0) -> ConformalDensity:
    """Largest density with curvature <= -4 and a singularity of order alpha.

    On the punctured disk of radius R this is
    (1-alpha) / (2|z| sinh((1-alpha) log(R/|z|)))  for alpha < 1 and the
    limit form 1 / (2|z| log(R/|z|)) at alpha = 1.  Curvature is exactly -4
    away from the puncture.
    """
    if alpha > 1.0:
        raise ValueError("singularity order must satisfy alpha <= 1")
    if not (R > 0.0):
        raise ValueError("domain radius must be positive")
    label = f"maximal:alpha={alpha:g},R={R:g}"

    if alpha == 1.0:
        def density(z):
            r = np.abs(np.asarray(z, dtype=complex))
            return 1.0 / (2.0 * r * np.log(R / r))

        def log_laplacian(z):
            r = np.abs(np.asarray(z, dtype=complex))
            return 1.0 / (r * np.log(R / r)) ** 2
    else:
        a = 1.0 - alpha

        def density(z):
            r = np.abs(np.asarray(z, dtype=complex))
            return a / (2.0 * r * np.sinh(a * np.log(R / r)))

        def log_laplacian(z):
            r = np.abs(np.asarray(z, dtype=complex))
            return (a / (r * np.sinh(a * np.log(R / r)))) ** 2

    return ConformalDensity(density=density, domain=DiskDomain(R, punctured=True),
                            log_laplacian=log_laplacian, declared_order=float(alpha),
                            label=label)


def scaled_density(base: ConformalDensity, factor: float) -> ConformalDensity:
    """c * lambda; log-Laplacian is unchanged, curvature divides by c^2."""
    if not (factor > 0.0):
        raise ValueError("scale factor must be positive")

    return ConformalDensity(
        density=lambda z: factor * np.asarray(base.density(z), dtype=float),
        domain=base.domain,
        log_laplacian=base.log_laplacian,
        declared_order=base.declared_order,
        label=f"scaled({factor:g}):{base.label}",
    )


def reference_density(kind: str, z, alpha: Optional[float] = None,
                      R: Optional[float] = None) -> float:
    """Value at ``z`` of one of the reference densities.

    ``kind`` is "disk", "punctured" or "maximal"; the latter takes the order
    ``alpha <= 1`` and the domain radius ``R``.  The puncture itself and
    points outside the domain are rejected.
    """
    z = complex(z)
    if kind == "disk":
        if abs(z) >= 1.0:
            raise ValueError("point outside the unit disk")
        return float(hyperbolic_disk().density(z))
    if kind == "punctured":
        if z == 0:
            raise ValueError("density undefined at the puncture")
        if abs(z) >= 1.0:
            raise ValueError("point outside the punctured unit disk")
        return float(hyperbolic_punctured().density(z))
    if kind == "maximal":
        if alpha is None:
            raise ValueError("maximal density requires the order alpha")
        R = 1.0 if R is None else float(R)
        if z == 0:
            raise ValueError("density undefined at the puncture")
        if abs(z) >= R:
            raise ValueError("point outside the punctured disk of radius R")
        return float(maximal_density(alpha, R).density(z))
    raise ValueError(f"unknown reference density kind: {kind!r}")


def identity_map() -> HolomorphicMap:
    return HolomorphicMap(evaluate=lambda w: np.asarray(w, dtype=complex),
                          derivative=lambda w: np.ones_like(np.asarray(w, dtype=complex)),
                          label="identity")


def power_map(k: int) -> HolomorphicMap:
    """w -> w^k; "square" and "cube" in the registry."""
    if k < 1:
        raise ValueError("power must be a positive integer")
    return HolomorphicMap(evaluate=lambda w: np.asarray(w, dtype=complex) ** k,
                          derivative=lambda w: k * np.asarray(w, dtype=complex) ** (k - 1),
                          label={2: "square", 3: "cube"}.get(k, f"power({k})"))


def mobius_map(a: float) -> HolomorphicMap:
    """Disk automorphism w -> (w + a)/(1 + a w) for real |a| < 1."""
    if not (-1.0 < a < 1.0):
        raise ValueError("Möbius parameter must satisfy |a| < 1")

    def evaluate(w):
        w = np.asarray(w, dtype=complex)
        return (w + a) / (1.0 + a * w)

    def derivative(w):
        w = np.asarray(w, dtype=complex)
        return (1.0 - a * a) / (1.0 + a * w) ** 2

    return HolomorphicMap(evaluate=evaluate, derivative=derivative,
                          label=f"mobius({a:g})")


def compose_maps(outer: HolomorphicMap, inner: HolomorphicMap) -> HolomorphicMap:
    """outer after inner, with the chain-rule derivative."""

    def evaluate(w):
        return outer.evaluate(inner.evaluate(w))

    def derivative(w):
        return outer.derivative(inner.evaluate(w)) * inner.derivative(w)

    return HolomorphicMap(evaluate=evaluate, derivative=derivative,
                          label=f"{outer.label}+{inner.label}")


def pullback(d: ConformalDensity, f: HolomorphicMap, w) -> float:
    """Density of the pullback metric at ``w``: lambda(f(w)) * |f'(w)|.

    The image point must land in the metric's domain (and off its puncture).
    """
    w = complex(w)
    fw = complex(np.asarray(f.evaluate(w)).item())
    if abs(fw) >= d.domain.radius or (d.domain.punctured and fw == 0):
        raise ValueError("image escapes metric domain")
    return float(d.density(fw)) * abs(complex(np.asarray(f.derivative(w)).item()))


def pullback_density(base: ConformalDensity, f: HolomorphicMap,
                     domain: Optional[DiskDomain] = None) -> ConformalDensity:
    """The pullback as a density object on ``domain`` (unit disk by default).

    Curvature is conformally invariant, so when the base has a closed-form
    log-Laplacian the pullback inherits it scaled by |f'(w)|^2.
    """
    dom = domain if domain is not None else DiskDomain(1.0)

    def density(w):
        warr = np.asarray(w, dtype=complex)
        fw = np.asarray(f.evaluate(warr), dtype=complex)
        if np.any(np.abs(fw) >= base.domain.radius):
            raise ValueError("image escapes metric domain")
        return np.asarray(base.density(fw), dtype=float) * np.abs(np.asarray(f.derivative(warr), dtype=complex))

    log_laplacian = None
    if base.log_laplacian is not None:
        def log_laplacian(w):
            warr = np.asarray(w, dtype=complex)
            fw = np.asarray(f.evaluate(warr), dtype=complex)
            return (np.asarray(base.log_laplacian(fw), dtype=float)
                    * np.abs(np.asarray(f.derivative(warr), dtype=complex)) ** 2)

    return ConformalDensity(density=density, domain=dom,
                            log_laplacian=log_laplacian,
                            label=f"pullback:{f.label}:{base.label}")


# ---------------------------------------------------------------------------
# name registry (CLI front end) and CSV import/export


def parse_map(spec: str) -> HolomorphicMap:
    """Parse a map spec: atoms 'identity', 'square', 'cube', 'mobius(a)',
    composed outer-to-inner with '+', e.g. 'square+mobius(0.3)'."""
    atoms = spec.split("+")
    built = None
    for atom in reversed(atoms):
        atom = atom.strip()
        if atom == "identity":
            m = identity_map()
        elif atom == "square":
            m = power_map(2)
        elif atom == "cube":
            m = power_map(3)
        elif atom.startswith("mobius(") and atom.endswith(")"):
            m = mobius_map(float(atom[len("mobius("):-1]))
        else:
            raise ValueError(f"unknown holomorphic map: {atom!r}")
        built = m if built is None else compose_maps(m, built)
    if built is None:
        raise ValueError("empty map spec")
    return built


def _parse_params(text: str) -> dict:
    out = {}
    for piece in text.split(","):
        if not piece:
            continue
        key, _, val = piece.partition("=")
        out[key.strip()] = float(val)
    return out


def parse_density(spec: str) -> ConformalDensity:
    """Resolve a density registry name.

    Grammar: 'hyperbolic-disk' | 'hyperbolic-punctured' |
    'maximal:alpha=A,R=B' | 'scaled(c):<base>' | 'pullback:<map>:<base>' |
    'csv:<path>'.
    """
    if spec == "hyperbolic-disk":
        return hyperbolic_disk()
    if spec == "hyperbolic-punctured":
        return hyperbolic_punctured()
    if spec.startswith("maximal:"):
        params = _parse_params(spec[len("maximal:"):])
        if "alpha" not in params:
            raise ValueError("maximal density requires alpha=<order>")
        return maximal_density(params["alpha"], params.get("R", 1.0))
    if spec.startswith("scaled(")and "):" in spec:
        head, _, rest = spec.partition("):")
        factor = float(head[len("scaled("):])
        return scaled_density(parse_density(rest), factor)
    if spec.startswith("pullback:"):
        rest = spec[len("pullback:"):]
        map_spec, sep, base_spec = rest.partition(":")
        if not sep:
            raise ValueError("pullback spec needs 'pullback:<map>:<base>'")
        return pullback_density(parse_density(base_spec), parse_map(map_spec))
    if spec.startswith("csv:"):
        return density_from_csv(spec[len("csv:"):])
    raise ValueError(f"unknown density spec: {spec!r}")


def density_to_csv(d: ConformalDensity, points, path) -> None:
    """Write rows x,y,lambda at the given complex points (17 significant digits)."""
    pts = np.asarray(points, dtype=complex).ravel()
    vals = np.asarray(d.density(pts), dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "lambda"])
        for z, lam in zip(pts, vals):
            writer.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{lam:.17g}"])


def load_density_grid(path):
    """Read an x,y,lambda CSV into flat arrays (no interpolation)."""
    xs, ys, lams = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip().lower() for h in header[:3]] != ["x", "y", "lambda"]:
            raise ValueError("density CSV must have columns x,y,lambda")
        for row in reader:
            if not row:
                continue
            xs.append(float(row[0]))
            ys.append(float(row[1]))
            lams.append(float(row[2]))
    return np.asarray(xs), np.asarray(ys), np.asarray(lams)


def density_from_csv(path, punctured: bool = False) -> ConformalDensity:
    """Interpolating density from a regular-grid x,y,lambda CSV.

    The rows must cover a full cartesian product of x and y values; a cubic
    spline then supplies the off-grid values needed by mean-value curvature
    probes.  The domain is the largest origin-centred disk inscribed in the
    grid's bounding box.
    """
    from scipy.interpolate import RectBivariateSpline

    xs, ys, lams = load_density_grid(path)
    ux, uy = np.unique(xs), np.unique(ys)
    if ux.size * uy.size != xs.size:
        raise ValueError("density CSV must sample a regular x-y grid")
    order = np.lexsort((ys, xs))
    grid = lams[order].reshape(ux.size, uy.size)
    kx = min(3, ux.size - 1)
    ky = min(3, uy.size - 1)
    spline = RectBivariateSpline(ux, uy, grid, kx=kx, ky=ky)
    radius = min(ux.max(), -ux.min(), uy.max(), -uy.min())
    if not (radius > 0.0):
        raise ValueError("grid must surround the origin to define a disk domain")

    def density(z):
        za = np.asarray(z, dtype=complex)
        return spline.ev(za.real, za.imag)

    return ConformalDensity(density=density,
                            domain=DiskDomain(float(radius), punctured=punctured),
                            label=f"csv:{path}")
