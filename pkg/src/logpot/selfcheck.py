"""Invariant suite behind the CLI selfcheck command.

Each check exercises one invariant from the library's contracts: kernel and
Taylor identities, quadrature exactness and determinism, derivative-formula
consistency against the finite-difference oracle, curvature identities,
maximum principles, gluing, and output determinism.  A check returns a
pass flag plus a one-line detail; the runner prints one line per check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import (ConformalDensity, DiskDomain, GlueConditionError, MultiIndex,
               PotentialProblem, QuadratureConfig, ScalarField, ahlfors_margin,
               annulus_integral, circle_integral, compose_maps, constant_field,
               cosine_field, curvature_laplace, curvature_meanvalue,
               disk_integral, fd_oracle, fd_partial, gaussian_field, glue,
               greens_identity_residual, hyperbolic_disk, hyperbolic_punctured,
               kernel_partial, liouville_residual, log_density_field,
               maximal_density, mi_decompose, mobius_map, order_of,
               polynomial_field, potential_deriv, potential_hess, power_map,
               pullback_density, random_polynomial, scaled_density, shifted_field,
               sk_verify, taylor_poly, asymptotic_slope)
from .multiindex import E1, E2
from .quadrature import TWO_PI


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _interior_points(rng: np.random.Generator, count: int, radius: float):
    rho = radius * 0.7 * np.sqrt(rng.uniform(size=count))
    phi = rng.uniform(0.0, TWO_PI, size=count)
    return rho * np.exp(1j * phi)


def check_recurrence() -> Tuple[bool, str]:
    """Lemma-style recurrence: d/dzeta of P_n[f] equals P_{n-1} of the derivative."""
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(4):
        f = random_polynomial(rng, degree=5)
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        zeta = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        for n in range(1, 5):
            for e, axis in ((E1, 1), (E2, 2)):
                fd = fd_partial(lambda w: taylor_poly(f, n, z, w), e, zeta, h=1e-5)
                direct = taylor_poly(shifted_field(f, e), n - 1, z, zeta)
                worst = max(worst, abs(fd - direct) / (1.0 + abs(direct)))
    return worst <= 1e-6, f"worst rel defect {worst:.2e} (tol 1e-06)"


def check_kernel_harmonicity() -> Tuple[bool, str]:
    pts = [(0.3 + 0.1j, -0.2 + 0.4j), (1.0, 0.0), (0.5j, 0.2), (-0.7 + 0.2j, 0.1 - 0.9j)]
    worst = max(abs(kernel_partial(MultiIndex(2, 0), z, s)
                    + kernel_partial(MultiIndex(0, 2), z, s)) for z, s in pts)
    return worst <= 1e-12, f"worst |trace| {worst:.2e} (tol 1e-12)"


def check_kernel_bound() -> Tuple[bool, str]:
    pts = [(0.3 + 0.1j, -0.2 + 0.4j), (1.0, 0.0), (0.5j, 0.2), (-0.7 + 0.2j, 0.1 - 0.9j),
           (0.01, 0.02j)]
    worst = -math.inf
    for z, s in pts:
        for j1 in range(6):
            for j2 in range(6 - j1):
                j = MultiIndex(j1, j2)
                if j.order == 0:
                    continue
                bound = math.factorial(j.order) / abs(z - s) ** j.order
                worst = max(worst, abs(kernel_partial(j, z, s)) - bound)
    return worst <= 0.0, f"worst excess over n!/|z-zeta|^n: {worst:.2e}"


def check_kernel_skew() -> Tuple[bool, str]:
    worst = 0.0
    for z, s in [(0.3 + 0.1j, -0.2 + 0.4j), (1.2, 0.3j)]:
        for e in (E1, E2):
            dz = kernel_partial(e, z, s)
            ds = fd_partial(lambda w: kernel_partial(MultiIndex(0, 0), z, w), e, s, h=1e-5)
            worst = max(worst, abs(dz + ds))
    return worst <= 1e-6, f"worst |d_z + d_zeta| {worst:.2e} (tol 1e-06)"


def check_step_order_invariance() -> Tuple[bool, str]:
    d_fwd = mi_decompose(MultiIndex(2, 1))
    d_rev = mi_decompose(MultiIndex(2, 1), reverse=True)
    ok_sum = all(t + e + p == MultiIndex(2, 1)
                 for t, e, p in d_fwd.triples + d_rev.triples)
    p = PotentialProblem(f=gaussian_field(), r=0.8)
    a = potential_deriv(p, 0.2 + 0.1j, MultiIndex(2, 1)).value
    b = potential_deriv(p, 0.2 + 0.1j, MultiIndex(2, 1), step_order="reversed").value
    gap = abs(a - b)
    ok = ok_sum and gap <= 1e-6 * (1.0 + abs(a))
    return ok, f"canonical vs reversed gap {gap:.2e}"


def check_quadrature_determinism() -> Tuple[bool, str]:
    disk = DiskDomain(1.0)
    g = lambda z: np.exp(z.real) * np.cos(z.imag)
    a = disk_integral(g, disk, singular_at=0.1 + 0.2j)
    b = disk_integral(g, disk, singular_at=0.1 + 0.2j)
    c = circle_integral(lambda z: z.real ** 2, 1.0)
    d = circle_integral(lambda z: z.real ** 2, 1.0)
    ok = (a == b) and (c == d)
    return ok, "bit-identical repeated integrals" if ok else "repeat mismatch"


def check_polynomial_exactness() -> Tuple[bool, str]:
    disk = DiskDomain(1.3)
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(3):
        coeffs = {}
        exact = 0.0
        for a1 in range(7):
            for a2 in range(7 - a1):
                c = rng.uniform(-1, 1)
                coeffs[(a1, a2)] = c
                exact += c * _disk_monomial(a1, a2, disk.radius)
        f = polynomial_field(coeffs)
        got = disk_integral(f, disk)
        worst = max(worst, abs(got - exact) / (1.0 + abs(exact)))
    return worst <= 1e-12, f"worst rel error degree<=6: {worst:.2e} (tol 1e-12)"


def _disk_monomial(a1: int, a2: int, R: float) -> float:
    # closed form for the integral of x^a1 y^a2 over the disk of radius R
    if a1 % 2 or a2 % 2:
        return 0.0
    p, q = a1 // 2, a2 // 2
    radial = R ** (a1 + a2 + 2) / (a1 + a2 + 2)
    angular = TWO_PI * math.factorial(a1) * math.factorial(a2) / (
        4.0 ** (p + q) * math.factorial(p) * math.factorial(q) * math.factorial(p + q))
    return radial * angular


def check_singular_convergence() -> Tuple[bool, str]:
    disk = DiskDomain(1.0)
    errs = []
    for n in (8, 16, 32):
        cfg = QuadratureConfig(radial_nodes=n, angular_nodes=64)
        val = disk_integral(lambda z: np.log(np.abs(z)), disk, cfg, singular_at=0.0)
        errs.append(abs(val + math.pi / 2.0))
    ok = errs[0] > errs[1] > errs[2]
    return ok, "errors " + " > ".join(f"{e:.2e}" for e in errs)


def check_laplacian_identity() -> Tuple[bool, str]:
    rng = np.random.default_rng(2024)
    worst = 0.0
    for field in (gaussian_field(), cosine_field()):
        p = PotentialProblem(f=field, r=0.8)
        for z in _interior_points(rng, 10, 0.8):
            trace = potential_hess(p, z, (1, 1)) + potential_hess(p, z, (2, 2))
            fz = float(field(z))
            worst = max(worst, abs(trace - fz) / abs(fz))
    return worst <= 1e-3, f"worst rel defect of Lap(omega)=f: {worst:.2e} (tol 1e-03)"


def check_oracle_agreement() -> Tuple[bool, str]:
    p = PotentialProblem(f=gaussian_field(), r=0.8)
    worst = 0.0
    for j in (MultiIndex(3, 0), MultiIndex(2, 2)):
        for z in (0.2 + 0.1j, -0.15 + 0.22j):
            formula = potential_deriv(p, z, j).value
            oracle = fd_oracle(p, z, j, h=0.02)
            worst = max(worst, abs(formula - oracle) / abs(oracle))
    return worst <= 1e-3, f"worst rel gap to fd oracle: {worst:.2e} (tol 1e-03)"


def check_r_invariance() -> Tuple[bool, str]:
    f = gaussian_field()
    worst = 0.0
    for j in (MultiIndex(3, 0), MultiIndex(2, 1)):
        a = potential_deriv(PotentialProblem(f=f, r=0.8, R=1.2), 0.2 + 0.1j, j).value
        b = potential_deriv(PotentialProblem(f=f, r=0.8, R=1.5), 0.2 + 0.1j, j).value
        worst = max(worst, abs(a - b) / (1.0 + abs(a)))
    return worst <= 1e-6, f"worst R=1.2 vs 1.5 gap: {worst:.2e} (tol 1e-06)"


def check_bookkeeping() -> Tuple[bool, str]:
    p = PotentialProblem(f=gaussian_field(), r=0.8)
    rep = potential_deriv(p, 0.1 - 0.2j, MultiIndex(2, 2))
    defect = abs(rep.value - (rep.area_term - math.fsum(rep.boundary_terms)))
    return defect == 0.0, f"value vs area-boundary defect: {defect:.1e}"


def check_greens_identity() -> Tuple[bool, str]:
    triples = [
        (constant_field(1.0), polynomial_field({(1, 0): 1.0}), 1),
        (polynomial_field({(2, 0): 1.0}), polynomial_field({(0, 1): 1.0}), 1),
        (gaussian_field(), cosine_field(), 2),
        (polynomial_field({(1, 1): 1.0}), polynomial_field({(2, 0): 1.0, (0, 2): -1.0}), 1),
        (cosine_field(), gaussian_field(), 1),
    ]
    worst = 0.0
    for u, v, m in triples:
        res = greens_identity_residual(u, v, m, 1.0)
        scale = 1.0 + circle_integral(
            lambda zeta: np.abs(np.asarray(u(zeta)) * np.asarray(v(zeta))), 1.0)
        worst = max(worst, abs(res) / scale)
    return worst <= 1e-6, f"worst scale-relative residual: {worst:.2e} (tol 1e-06)"


def _exp_x2_density() -> ConformalDensity:
    return ConformalDensity(
        density=lambda z: np.exp(np.asarray(z, dtype=complex).real ** 2),
        domain=DiskDomain(4.0),
        log_laplacian=lambda z: 2.0 * np.ones_like(np.asarray(z, dtype=complex).real),
        label="exp(x^2)")


def check_curvature_equivalence() -> Tuple[bool, str]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for d, radius in ((hyperbolic_disk(), 0.7), (_exp_x2_density(), 1.5)):
        for z in _interior_points(rng, 10, radius):
            gap = abs(curvature_meanvalue(d, z) - curvature_laplace(d, z))
            worst = max(worst, gap)
    return worst <= 1e-3, f"worst |meanvalue - laplace|: {worst:.2e} (tol 1e-03)"


def check_constant_curvature() -> Tuple[bool, str]:
    probes = [0.35 + 0.1j, -0.25 + 0.3j, 0.5, 0.2 - 0.4j]
    worst_cf = 0.0
    worst_mv = 0.0
    for d in (hyperbolic_disk(), hyperbolic_punctured(), maximal_density(0.5),
              maximal_density(1.0)):
        for z in probes:
            worst_cf = max(worst_cf, abs(curvature_laplace(d, z) + 4.0))
            worst_mv = max(worst_mv, abs(curvature_meanvalue(d, z) + 4.0))
    ok = worst_cf <= 1e-6 and worst_mv <= 1e-3
    return ok, f"closed-form defect {worst_cf:.2e} (tol 1e-06), mean-value {worst_mv:.2e} (tol 1e-03)"


def check_pullback_curvature() -> Tuple[bool, str]:
    pb = pullback_density(hyperbolic_disk(), power_map(2))
    numeric = ConformalDensity(density=pb.density, domain=pb.domain)  # drop closed form
    worst = max(abs(curvature_laplace(numeric, z) + 4.0)
                for z in (0.3 + 0.2j, -0.4 + 0.1j, 0.5j))
    return worst <= 1e-3, f"worst pullback curvature defect: {worst:.2e} (tol 1e-03)"


def check_maximality() -> Tuple[bool, str]:
    xs = np.linspace(-0.99, 0.99, 100)
    worst = -math.inf
    for alpha in (0.25, 0.5, 0.9, 1.0):
        ref = maximal_density(alpha)
        grid = (xs[:, None] + 1j * xs[None, :]).ravel()
        grid = grid[(np.abs(grid) > 1e-6) & (np.abs(grid) < 0.995)]
        ref_vals = np.asarray(ref.density(grid), dtype=float)
        members = [scaled_density(ref, c) for c in (0.3, 0.7, 1.0)]
        members += [maximal_density(b) for b in (0.0, 0.25, 0.5, 0.75, 0.9, 1.0) if b <= alpha]
        for member in members:
            worst = max(worst, float((np.asarray(member.density(grid), dtype=float)
                                      - ref_vals).max()))
    return worst <= 1e-12, f"worst sigma - lambda_alpha excess: {worst:.2e} (tol 1e-12)"


def check_alpha_monotonicity() -> Tuple[bool, str]:
    rs = np.linspace(0.05, 0.95, 30)
    alphas = (0.0, 0.25, 0.5, 0.75, 1.0)
    vals = np.stack([np.asarray(maximal_density(a).density(rs), dtype=float)
                     for a in alphas])
    worst = float((vals[:-1] - vals[1:]).max())
    return worst <= 1e-12, f"worst decrease along alpha: {worst:.2e}"


def check_schwarz_pick() -> Tuple[bool, str]:
    hd = hyperbolic_disk()
    xs = np.linspace(-0.9, 0.9, 40)
    grid = (xs[:, None] + 1j * xs[None, :]).ravel()
    grid = grid[np.abs(grid) < 0.9]
    maps = [power_map(2), mobius_map(0.3),
            compose_maps(power_map(2), mobius_map(-0.2))]
    worst = -math.inf
    for m in maps:
        margin = ahlfors_margin(pullback_density(hd, m), hd, grid)
        worst = max(worst, -margin)
    eq_gap = abs(ahlfors_margin(pullback_density(hd, mobius_map(0.3)), hd, grid))
    # automorphisms realize equality, so the margin itself must be ~0
    ok = worst <= 1e-12 and eq_gap <= 1e-12
    return ok, f"worst violation {worst:.2e}, Möbius equality gap {eq_gap:.2e}"


def _crossing_points(lam: ConformalDensity, mu: ConformalDensity):
    """Bisect lambda = mu along a few rays through the origin."""
    points = []
    for angle in (np.pi, 2.5, 4.2):
        direction = np.exp(1j * angle)

        def gap(t: float) -> float:
            z = t * direction
            return float(lam.density(z)) - float(mu.density(z))

        lo, hi = 1e-3, 0.45
        if gap(lo) * gap(hi) > 0:
            continue
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if gap(lo) * gap(mid) <= 0:
                hi = mid
            else:
                lo = mid
        points.append(0.5 * (lo + hi) * direction)
    return points


def check_glue_sk() -> Tuple[bool, str]:
    lam = pullback_density(hyperbolic_disk(), power_map(2))
    mu = pullback_density(hyperbolic_disk(),
                          compose_maps(power_map(2), mobius_map(0.3)))
    sigma = glue(lam, mu, [])
    crossing = _crossing_points(lam, mu)
    if not crossing:
        return False, "no crossing points located"
    off = [0.05 + 0.0j, -0.25 + 0.0j, 0.3 + 0.3j]
    report = sk_verify(sigma, crossing + off, tol=1e-2)
    detail = (f"{len(crossing)} crossing + {len(off)} smooth points, "
              f"worst margin {report.worst_margin:.2e} (tol 1e-02)")
    return report.passed, detail


def check_glue_rejection() -> Tuple[bool, str]:
    lam = maximal_density(0.5, 1.0)
    inner = maximal_density(0.9, 1.0)
    mu = ConformalDensity(density=inner.density,
                          domain=DiskDomain(0.5, punctured=True),
                          log_laplacian=inner.log_laplacian,
                          declared_order=0.9, label="maximal:alpha=0.9 on |z|<1/2")
    probes = [0.5 * np.exp(1j * t) for t in (0.3, 1.7)]
    try:
        glue(lam, mu, probes)
    except GlueConditionError as err:
        ok = abs(err.excess - 0.0275) <= 1e-3 and abs(abs(err.point) - 0.5) <= 1e-9
        return ok, f"rejected at |z|={abs(err.point):.3f} with excess {err.excess:.4f}"
    return False, "gluing condition violation not detected"


def check_submean() -> Tuple[bool, str]:
    # surrogate for the maximality proof: u has the more negative curvature
    # and exceeds v near the puncture, so u - v is subharmonic there
    u_den = scaled_density(maximal_density(0.9), 0.9)
    v_den = maximal_density(0.5)
    worst = math.inf
    for z in (0.01, 0.03 * np.exp(1.1j), 0.08 * np.exp(-2.0j)):
        z = complex(z)
        diff = float(u_den.density(z)) - float(v_den.density(z))
        if diff <= 0:
            return False, f"probe {z:.3g} not in the set u > v"
        g_centre = math.log(float(u_den.density(z))) - math.log(float(v_den.density(z)))
        r = 0.3 * abs(z)
        mean = circle_integral(
            lambda zeta: np.log(np.asarray(u_den.density(z + zeta), dtype=float))
            - np.log(np.asarray(v_den.density(z + zeta), dtype=float)),
            r) / (TWO_PI * r)
        worst = min(worst, mean - g_centre)
    return worst >= -1e-12, f"smallest (mean - centre) gap: {worst:.2e} (needs >= 0)"


def check_order_recovery() -> Tuple[bool, str]:
    worst = 0.0
    worst_quality = 1.0
    for alpha in (0.0, 0.25, 0.5, 0.75):
        est = order_of(log_density_field(maximal_density(alpha)))
        worst = max(worst, abs(est.alpha - alpha))
        worst_quality = min(worst_quality, est.fit_quality)
        if est.cusp_flag:
            return False, f"spurious cusp flag at alpha={alpha}"
    cusp = order_of(log_density_field(maximal_density(1.0)))
    ok = worst <= 0.02 and worst_quality >= 0.999 and cusp.cusp_flag
    return ok, (f"worst |alpha error| {worst:.4f} (tol 0.02), "
                f"min quality {worst_quality:.5f}, cusp flagged: {cusp.cusp_flag}")


def check_asymptotic_slopes() -> Tuple[bool, str]:
    details = []
    ok = True
    for alpha in (0.5, 0.9):
        slope = asymptotic_slope(log_density_field(maximal_density(alpha)), alpha, 3)
        bound = 2.0 - 2.0 * alpha - 3.0
        ok = ok and slope >= bound - 0.15
        details.append(f"alpha={alpha}: slope {slope:.3f} vs bound {bound:.2f}")
    return ok, "; ".join(details)


def check_liouville() -> Tuple[bool, str]:
    worst = 0.0
    for alpha in (0.5, 0.9):
        u = log_density_field(maximal_density(alpha))
        for z in (0.3 + 0.2j, -0.25 + 0.35j, 0.5):
            worst = max(worst, abs(liouville_residual(u, lambda _: -4.0, z)))
    return worst <= 1e-6, f"worst curvature-equation residual: {worst:.2e} (tol 1e-06)"


def check_cli_determinism() -> Tuple[bool, str]:
    import tempfile
    from pathlib import Path

    from .cli import main as cli_main

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        blobs = []
        for tag in ("a", "b"):
            out = tmp / f"{tag}.csv"
            rc = cli_main(["curvature", "--density", "hyperbolic-disk",
                           "--grid=-0.5:0.5:5,-0.5:0.5:5",
                           "--out", str(out)])
            if rc != 0:
                return False, f"curvature run exited {rc}"
            blobs.append((out.read_bytes(), out.with_suffix(".json").read_bytes()))
        ok = blobs[0] == blobs[1]
    return ok, "two curvature runs byte-identical" if ok else "outputs differ between runs"


ALL_CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("taylor-recurrence", check_recurrence),
    ("kernel-harmonicity", check_kernel_harmonicity),
    ("kernel-bound", check_kernel_bound),
    ("kernel-skew-symmetry", check_kernel_skew),
    ("step-order-invariance", check_step_order_invariance),
    ("quadrature-determinism", check_quadrature_determinism),
    ("polynomial-exactness", check_polynomial_exactness),
    ("singular-convergence", check_singular_convergence),
    ("laplacian-identity", check_laplacian_identity),
    ("derivative-oracle-agreement", check_oracle_agreement),
    ("extension-radius-invariance", check_r_invariance),
    ("report-bookkeeping", check_bookkeeping),
    ("greens-identity", check_greens_identity),
    ("curvature-definition-equivalence", check_curvature_equivalence),
    ("constant-curvature-catalog", check_constant_curvature),
    ("pullback-curvature-invariance", check_pullback_curvature),
    ("maximal-density-domination", check_maximality),
    ("alpha-monotonicity", check_alpha_monotonicity),
    ("schwarz-pick-pullbacks", check_schwarz_pick),
    ("glue-preserves-sk", check_glue_sk),
    ("glue-rejects-violation", check_glue_rejection),
    ("subharmonic-submean", check_submean),
    ("order-recovery", check_order_recovery),
    ("asymptotic-slopes", check_asymptotic_slopes),
    ("curvature-equation-residual", check_liouville),
    ("cli-byte-determinism", check_cli_determinism),
]


def run_selfcheck(verbose: bool = True, names: Optional[List[str]] = None) -> List[CheckResult]:
    """Run the invariant suite; returns one result per check."""
    results = []
    for name, fn in ALL_CHECKS:
        if names and name not in names:
            continue
        try:
            passed, detail = fn()
        except SystemExit as exc:  # argparse errors inside CLI-backed checks
            passed, detail = False, f"exited with status {exc.code}"
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name=name, passed=passed, detail=detail))
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return results
