"""Multi-index algebra, two-variable Taylor polynomials and log-kernel derivatives.

Points in the plane are complex numbers ``z = x1 + i*x2`` throughout the
package.  All evaluation callables are expected to broadcast over numpy
arrays of complex points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np


class OracleError(RuntimeError):
    """A derivative oracle failed or returned a non-finite value."""


@dataclass(frozen=True)
class MultiIndex:
    """Exponent pair (j1, j2) for the mixed partial d^{j1}/dx1 d^{j2}/dx2."""

    j1: int
    j2: int

    def __post_init__(self):
        if self.j1 < 0 or self.j2 < 0:
            raise ValueError("multi-index entries must be non-negative")

    @property
    def order(self) -> int:
        return self.j1 + self.j2

    def factorial(self) -> int:
        return math.factorial(self.j1) * math.factorial(self.j2)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(self.j1 + other.j1, self.j2 + other.j2)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.j1, self.j2)


E1 = MultiIndex(1, 0)
E2 = MultiIndex(0, 1)
ZERO = MultiIndex(0, 0)


@dataclass(frozen=True)
class IndexDecomposition:
    """Unit steps e_1..e_n of an index with the (theta, e, phi) split at each tau.

    For every tau the invariant theta_tau + e_{tau+1} + phi_tau = sum(steps)
    holds; phi_{n-1} is the zero index.
    """

    steps: Tuple[MultiIndex, ...]
    triples: Tuple[Tuple[MultiIndex, MultiIndex, MultiIndex], ...]


def _sum_steps(steps) -> MultiIndex:
    total = ZERO
    for s in steps:
        total = total + s
    return total


def mi_decompose(j: MultiIndex, reverse: bool = False) -> IndexDecomposition:
    """Split ``j`` into unit steps plus all theta/e/phi triples.

    The canonical order puts every (1,0) step before the (0,1) steps;
    ``reverse=True`` flips it.  Consumers must produce the same value for
    either order because mixed partials commute, which the test suite
    asserts.
    """
    n = j.order
    if n == 0:
        raise ValueError("no decomposition of the zero index")
    steps = (E1,) * j.j1 + (E2,) * j.j2
    if reverse:
        steps = steps[::-1]
    triples = []
    for tau in range(1, n):
        theta = _sum_steps(steps[:tau])
        phi = _sum_steps(steps[tau + 1:])
        triples.append((theta, steps[tau], phi))
    return IndexDecomposition(steps=steps, triples=tuple(triples))


def central_diff_weights(m: int):
    """Offsets and weights of the shortest central stencil for the m-th derivative."""
    half = (m + 1) // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    powers = np.arange(2 * half + 1)
    vander = offsets[None, :] ** powers[:, None]
    rhs = np.zeros(2 * half + 1)
    rhs[m] = math.factorial(m)
    return offsets, np.linalg.solve(vander, rhs)


def _fd_stencil(func, j: MultiIndex, z, h: float):
    ox, wx = central_diff_weights(j.j1)
    oy, wy = central_diff_weights(j.j2)
    zarr = np.asarray(z, dtype=complex)
    pts = zarr[..., None, None] + (ox[:, None] + 1j * oy[None, :]) * h
    vals = np.asarray(func(pts), dtype=float)
    return np.einsum("i,j,...ij->...", wx, wy, vals) / h ** j.order


def fd_partial(func, j: MultiIndex, z, h: Optional[float] = None):
    """Richardson-extrapolated central difference for an arbitrary mixed partial.

    The default step is 1e-4 * (1 + |z|); two levels h and h/2 cancel the
    leading h^2 truncation term.
    """
    if h is None:
        h = 1e-4 * (1.0 + float(np.max(np.abs(z))))
    coarse = _fd_stencil(func, j, z, h)
    fine = _fd_stencil(func, j, z, 0.5 * h)
    out = (4.0 * fine - coarse) / 3.0
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ScalarField:
    """Real-valued field on a plane region together with a derivative oracle.

    ``evaluate`` must broadcast over complex arrays.  ``partials``, when
    supplied, is the analytic oracle ``(MultiIndex, z) -> value``; without it
    derivatives fall back to :func:`fd_partial`.  ``smoothness`` and
    ``hoelder_nu`` are the claimed C^n class and Hölder exponent consumed by
    the potential routines.
    """

    evaluate: Callable
    partials: Optional[Callable] = None
    smoothness: int = 2
    hoelder_nu: Optional[float] = None

    def __call__(self, z):
        return self.evaluate(z)

    def derivative(self, j: MultiIndex, z):
        if j.order == 0:
            return self.evaluate(z)
        if self.partials is not None:
            return self.partials(j, z)
        return fd_partial(self.evaluate, j, z)


def shifted_field(f: ScalarField, shift: MultiIndex) -> ScalarField:
    """The field whose value is the ``shift``-th partial of ``f``."""
    if shift.order == 0:
        return f
    return ScalarField(
        evaluate=lambda z: f.derivative(shift, z),
        partials=lambda j, z: f.derivative(j + shift, z),
        smoothness=max(f.smoothness - shift.order, 0),
        hoelder_nu=f.hoelder_nu,
    )


def _oracle_value(f: ScalarField, idx: MultiIndex, z) -> float:
    try:
        val = float(f.derivative(idx, z))
    except OracleError:
        raise
    except Exception as exc:
        raise OracleError(
            f"derivative oracle failed at index ({idx.j1}, {idx.j2})"
        ) from exc
    if not math.isfinite(val):
        raise OracleError(
            f"derivative oracle returned a non-finite value at index ({idx.j1}, {idx.j2})"
        )
    return val


def taylor_poly(f: ScalarField, n: int, z, zeta):
    """Degree-n Taylor polynomial of ``f`` about ``z`` evaluated at ``zeta``.

    ``zeta`` may be an array; all derivatives of ``f`` are taken at ``z``
    only, so array evaluation costs one oracle call per index.
    """
    if n < 0:
        raise ValueError("polynomial degree must be non-negative")
    z = complex(z)
    dz = np.asarray(zeta, dtype=complex) - z
    dx, dy = dz.real, dz.imag
    total = np.zeros_like(dx, dtype=float)
    for a1 in range(n + 1):
        for a2 in range(n + 1 - a1):
            idx = MultiIndex(a1, a2)
            coeff = _oracle_value(f, idx, z) / idx.factorial()
            total = total + coeff * dx ** a1 * dy ** a2
    if np.ndim(zeta) == 0:
        return float(total)
    return total


def taylor_remainder(f: ScalarField, n: int, z, zeta):
    """f(zeta) minus the degree-n Taylor polynomial about z."""
    vals = np.asarray(f(zeta), dtype=float)
    rem = vals - taylor_poly(f, n, z, zeta)
    if np.ndim(zeta) == 0:
        return float(rem)
    return rem


def kernel_partial(j: MultiIndex, z, zeta):
    """Mixed z-partial of log|z - zeta| in closed form.

    Writes log|z - zeta| = Re log(z - zeta) and differentiates the
    holomorphic branch:  d^(a,b) = Re(i^b * (-1)^(n-1) * (n-1)! / (z-zeta)^n)
    with n = a + b.  The result is exact and obeys the n!/|z-zeta|^n bound.
    ``zeta`` may be an array of points distinct from ``z``.
    """
    diff = complex(z) - np.asarray(zeta, dtype=complex)
    if np.any(diff == 0):
        raise ValueError("kernel singularity")
    n = j.order
    if n == 0:
        out = np.log(np.abs(diff))
    else:
        coeff = (1j ** j.j2) * ((-1.0) ** (n - 1)) * math.factorial(n - 1)
        out = (coeff / diff ** n).real
    if np.ndim(zeta) == 0:
        return float(out)
    return out
