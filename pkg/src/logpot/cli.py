"""Command-line front end: reproducible batch runs with CSV/JSON/PNG output.

Every subcommand is deterministic: identical invocations write byte-identical
files.  Data goes to ``--out`` as CSV with 17-significant-digit floats, a JSON
summary with the same numbers lands next to it, and ``--plot`` adds a rendered
figure with the same stem.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import (DiskDomain, GlueConditionError, MultiIndex, PotentialProblem,
               QuadratureConfig, ahlfors_margin, cosine_field, constant_field,
               curvature_laplace, curvature_meanvalue, fd_oracle, gaussian_field,
               glue, log_density_field, log_potential, maximal_density, order_of,
               parse_density, potential_deriv, sk_verify, asymptotic_slope)
from .densities import ConformalDensity
from .metrics import _domain_gap, _linear_fit
from .quadrature import TWO_PI

FIELDS = {
    "one": lambda: constant_field(1.0),
    "gaussian": gaussian_field,
    "cosine": cosine_field,
}


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_grid(spec: str):
    """'xmin:xmax:nx,ymin:ymax:ny' -> complex points, y-major then x."""
    try:
        xpart, ypart = spec.split(",")
        x0, x1, nx = xpart.split(":")
        y0, y1, ny = ypart.split(":")
        xs = np.linspace(float(x0), float(x1), int(nx))
        ys = np.linspace(float(y0), float(y1), int(ny))
    except ValueError as exc:
        raise SystemExit(f"bad --grid spec {spec!r}: expected xmin:xmax:nx,ymin:ymax:ny") from exc
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def _parse_points(spec: str):
    pts = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        x, y = chunk.split(",")
        pts.append(complex(float(x), float(y)))
    if not pts:
        raise SystemExit("no points given")
    return pts


def _parse_index(spec: str) -> MultiIndex:
    try:
        j1, j2 = spec.split(",")
        return MultiIndex(int(j1), int(j2))
    except (ValueError, TypeError) as exc:
        raise SystemExit(f"bad --index spec {spec!r}: expected j1,j2") from exc


def _config(args) -> QuadratureConfig:
    return QuadratureConfig(radial_nodes=args.radial_nodes,
                            angular_nodes=args.angular_nodes)


def _field(name: str):
    if name not in FIELDS:
        raise SystemExit(f"unknown field {name!r}; choose from {sorted(FIELDS)}")
    return FIELDS[name]()


def _density_points(density: ConformalDensity, grid, min_gap_frac: float = 0.02):
    """Grid points with enough room inside the domain for curvature probes."""
    keep = []
    min_gap = min_gap_frac * density.domain.radius
    for z in grid:
        z = complex(z)
        if _domain_gap(density, z) > min_gap:
            keep.append(z)
    return keep


def _maybe_plot(args, make_figure) -> None:
    if not getattr(args, "plot", False):
        return
    from . import plots

    fig = make_figure(plots)
    plots.save_figure(fig, Path(args.out).with_suffix(".png"))


def cmd_potential(args) -> int:
    field = _field(args.field)
    problem = PotentialProblem(f=field, r=args.r, R=args.R, config=_config(args))
    index = _parse_index(args.index)
    pts = [complex(z) for z in _parse_grid(args.grid) if abs(z) < 0.9 * args.r]
    if not pts:
        raise SystemExit("no grid points inside 0.9 * r")
    n_boundary = max(index.order - 1, 0) if index.order >= 3 else (1 if index.order == 2 else 0)
    header = (["x", "y", "omega", "deriv", "area_term", "boundary_total"]
              + [f"b{t}" for t in range(1, n_boundary + 1)] + ["R_used"])
    rows = []
    for z in pts:
        rep = potential_deriv(problem, z, index)
        omega = log_potential(problem, z)
        rows.append([z.real, z.imag, omega, rep.value, rep.area_term,
                     math.fsum(rep.boundary_terms), *rep.boundary_terms, rep.R_used])
    out = Path(args.out)
    _write_csv(out, header, rows)
    values = [r[3] for r in rows]
    _write_json(out.with_suffix(".json"), {
        "command": "potential", "field": args.field, "index": index.as_tuple(),
        "support_radius": args.r, "extension_radius": problem.extension_radius,
        "points": len(rows), "deriv_min": min(values), "deriv_max": max(values),
    })
    _maybe_plot(args, lambda plots: plots.scatter_figure(
        [r[0] for r in rows], [r[1] for r in rows], values,
        f"d^{index.as_tuple()} potential of {args.field}", "derivative value"))
    return 0


def cmd_check_deriv(args) -> int:
    field = _field(args.field)
    problem = PotentialProblem(f=field, r=args.r, R=args.R, config=_config(args))
    index = _parse_index(args.index)
    pts = _parse_points(args.points) if args.points else \
        [0.2 + 0.1j, -0.15 + 0.22j, 0.3 - 0.05j, -0.1 - 0.18j, 0.05 + 0.3j]
    rows = []
    worst_rel = 0.0
    for z in pts:
        formula = potential_deriv(problem, z, index).value
        oracle = fd_oracle(problem, z, index, h=args.h)
        denom = max(abs(oracle), 1e-12)
        rel = abs(formula - oracle) / denom
        worst_rel = max(worst_rel, rel)
        rows.append([z.real, z.imag, formula, oracle, abs(formula - oracle), rel])
    out = Path(args.out)
    _write_csv(out, ["x", "y", "formula", "oracle", "abs_diff", "rel_diff"], rows)
    _write_json(out.with_suffix(".json"), {
        "command": "check-deriv", "field": args.field, "index": index.as_tuple(),
        "support_radius": args.r, "h": args.h, "points": len(rows),
        "worst_rel_diff": worst_rel,
    })
    _maybe_plot(args, lambda plots: plots.compare_figure(
        [r[3] for r in rows], [r[2] for r in rows],
        f"formula vs finite-difference oracle, j={index.as_tuple()}",
        "oracle", "formula"))
    return 0


def cmd_curvature(args) -> int:
    density = parse_density(args.density)
    pts = _density_points(density, _parse_grid(args.grid))
    if not pts:
        raise SystemExit("no grid points usable inside the density domain")
    cfg = _config(args)
    rows = []
    for z in pts:
        lam = float(density.density(z))
        if lam <= 0.0:
            continue
        rows.append([z.real, z.imag, lam,
                     curvature_laplace(density, z),
                     curvature_meanvalue(density, z, cfg=cfg)])
    if not rows:
        raise SystemExit("density vanishes on every usable grid point")
    out = Path(args.out)
    _write_csv(out, ["x", "y", "lambda", "kappa_laplace", "kappa_meanvalue"], rows)
    kappas = [r[4] for r in rows]
    report = sk_verify(density, [complex(r[0], r[1]) for r in rows],
                       tol=args.tol, cfg=cfg)
    _write_json(out.with_suffix(".json"), {
        "command": "curvature", "density": args.density, "points": len(rows),
        "kappa_meanvalue_min": min(kappas), "kappa_meanvalue_max": max(kappas),
        "sk_tolerance": args.tol, "sk_pass": report.passed,
        "sk_worst_margin": report.worst_margin,
    })
    _maybe_plot(args, lambda plots: plots.scatter_figure(
        [r[0] for r in rows], [r[1] for r in rows], kappas,
        f"mean-value curvature of {args.density}", "kappa"))
    return 0


def cmd_order(args) -> int:
    if args.density:
        density = parse_density(args.density)
    else:
        density = maximal_density(args.alpha, args.R)
    u = log_density_field(density)
    radii = [2.0 ** -k for k in range(args.kmin, args.kmax + 1)]
    est = order_of(u, radii=radii, angular_samples=args.angular_samples)
    ring = np.exp(1j * np.arange(args.angular_samples) * (TWO_PI / args.angular_samples))
    rows = [[r, float(np.max(np.asarray(u(r * ring), dtype=float)))] for r in radii]
    out = Path(args.out)
    _write_csv(out, ["radius", "circle_max"], rows)
    _write_json(out.with_suffix(".json"), {
        "command": "order", "density": args.density or density.label,
        "alpha": est.alpha, "fit_quality": est.fit_quality,
        "cusp_flag": est.cusp_flag, "radii": list(est.radii),
    })

    def figure(plots):
        x = np.log(1.0 / np.asarray(radii))
        y = np.asarray([r[1] for r in rows])
        slope, intercept, _ = _linear_fit(x, y)
        return plots.fit_figure(x, y, slope, intercept,
                                f"order regression: alpha = {est.alpha:.4f}",
                                "log(1/r)", "max of log-density on |z| = r")

    _maybe_plot(args, figure)
    return 0


def cmd_ahlfors(args) -> int:
    sk = parse_density(args.sk)
    reference = parse_density(args.reference)
    pts = [z for z in _parse_grid(args.grid)
           if _domain_gap(sk, complex(z)) > 0 and _domain_gap(reference, complex(z)) > 0]
    if not pts:
        raise SystemExit("no grid points inside both domains")
    rows = []
    for z in pts:
        z = complex(z)
        s = float(sk.density(z))
        rf = float(reference.density(z))
        rows.append([z.real, z.imag, s, rf, rf - s])
    out = Path(args.out)
    _write_csv(out, ["x", "y", "sk", "reference", "margin"], rows)
    margin = ahlfors_margin(sk, reference, pts)
    worst = min(rows, key=lambda r: r[4])
    _write_json(out.with_suffix(".json"), {
        "command": "ahlfors", "sk": args.sk, "reference": args.reference,
        "points": len(rows), "min_margin": margin,
        "argmin": [worst[0], worst[1]],
        "domination_holds": bool(margin >= -1e-12),
    })
    _maybe_plot(args, lambda plots: plots.scatter_figure(
        [r[0] for r in rows], [r[1] for r in rows], [r[4] for r in rows],
        f"margin of {args.reference} over {args.sk}", "reference - sk"))
    return 0


def cmd_glue(args) -> int:
    outer = parse_density(args.outer)
    inner_base = parse_density(args.inner)
    if args.inner_radius is not None:
        inner = ConformalDensity(density=inner_base.density,
                                 domain=DiskDomain(args.inner_radius,
                                                   inner_base.domain.punctured),
                                 log_laplacian=inner_base.log_laplacian,
                                 declared_order=inner_base.declared_order,
                                 label=inner_base.label + f"|r<{args.inner_radius:g}")
    else:
        inner = inner_base
    probes = [inner.domain.radius * complex(math.cos(t), math.sin(t))
              for t in (np.arange(args.probes) * (TWO_PI / args.probes))]
    try:
        sigma = glue(outer, inner, probes, tol=args.tol)
    except GlueConditionError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    pts = _density_points(sigma, _parse_grid(args.grid))
    rows = []
    for z in pts:
        z = complex(z)
        s = float(sigma.density(z))
        o = float(outer.density(z))
        rows.append([z.real, z.imag, s, "inner" if s > o else "outer"])
    out = Path(args.out)
    _write_csv(out, ["x", "y", "sigma", "branch"], rows)
    _write_json(out.with_suffix(".json"), {
        "command": "glue", "outer": args.outer, "inner": args.inner,
        "inner_radius": inner.domain.radius, "probes": args.probes,
        "tolerance": args.tol, "points": len(rows),
        "inner_branch_points": sum(1 for r in rows if r[3] == "inner"),
        "status": "glued",
    })
    _maybe_plot(args, lambda plots: plots.scatter_figure(
        [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows],
        "glued density", "sigma"))
    return 0


def cmd_asymptotics(args) -> int:
    density = maximal_density(args.alpha, args.R)
    u = log_density_field(density)
    radii = [2.0 ** -k for k in range(args.kmin, args.kmax + 1)]
    slope = asymptotic_slope(u, args.alpha, args.n, dyadic_radii=radii)
    bound = 2.0 - 2.0 * args.alpha - args.n
    from .metrics import remainder_field
    from .multiindex import fd_partial

    index = MultiIndex(args.n - 1, 1)
    rows = []
    for r in radii:
        z = r * complex(math.cos(0.37), math.sin(0.37))
        val = fd_partial(lambda w: remainder_field(u, args.alpha, w), index, z, h=r / 64.0)
        rows.append([r, abs(val)])
    out = Path(args.out)
    _write_csv(out, ["radius", "deriv_magnitude"], rows)
    _write_json(out.with_suffix(".json"), {
        "command": "asymptotics", "alpha": args.alpha, "R": args.R, "n": args.n,
        "slope": slope, "bound": bound,
        "consistent": bool(slope >= bound - 0.15),
    })

    def figure(plots):
        x = np.log(np.asarray([r[0] for r in rows]))
        y = np.log(np.asarray([r[1] for r in rows]))
        s, b, _ = _linear_fit(x, y)
        return plots.fit_figure(x, y, s, b,
                                f"remainder derivative decay: slope {slope:.3f}",
                                "log |z|", f"log |d^{args.n} remainder|",
                                extra_slope=bound,
                                extra_label=f"theory bound slope {bound:.2f}")

    _maybe_plot(args, figure)
    return 0


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    names = args.only.split(",") if args.only else None
    results = run_selfcheck(verbose=True, names=names)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logpot",
        description="Logarithmic-potential derivatives and conformal-metric checks "
                    "with deterministic CSV/JSON/PNG reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, needs_out=True):
        sp.add_argument("--radial-nodes", type=int, default=64,
                        help="Gauss-Legendre radial nodes (default 64)")
        sp.add_argument("--angular-nodes", type=int, default=256,
                        help="trapezoid angular nodes (default 256)")
        if needs_out:
            sp.add_argument("--out", required=True,
                            help="output CSV path; a JSON summary with the same "
                                 "numbers is written next to it")
            sp.add_argument("--plot", action="store_true",
                            help="also render a PNG figure next to the CSV")

    sp = sub.add_parser("potential", help="evaluate the potential and one derivative on a grid")
    sp.add_argument("--field", default="gaussian", help=f"field name: {sorted(FIELDS)}")
    sp.add_argument("--r", type=float, default=0.8, help="support radius")
    sp.add_argument("--R", type=float, default=None, help="extension radius (default 1.5*r)")
    sp.add_argument("--index", default="3,0", help="derivative multi-index j1,j2")
    sp.add_argument("--grid", default="-0.3:0.3:5,-0.3:0.3:5",
                    help="xmin:xmax:nx,ymin:ymax:ny; points outside 0.9*r are dropped")
    add_common(sp)
    sp.set_defaults(func=cmd_potential)

    sp = sub.add_parser("check-deriv", help="derivative formula vs finite-difference oracle table")
    sp.add_argument("--field", default="one")
    sp.add_argument("--r", type=float, default=0.8)
    sp.add_argument("--R", type=float, default=None)
    sp.add_argument("--index", default="3,0")
    sp.add_argument("--points", default=None, help="x,y;x,y;... (default: 5 interior points)")
    sp.add_argument("--h", type=float, default=None,
                    help="oracle step (default 1e-3*r; use ~0.02 for order >= 3)")
    add_common(sp)
    sp.set_defaults(func=cmd_check_deriv)

    sp = sub.add_parser("curvature", help="both curvature definitions on a grid")
    sp.add_argument("--density", required=True,
                    help="registry name, e.g. hyperbolic-disk, hyperbolic-punctured, "
                         "maximal:alpha=0.5,R=1, scaled(0.5):hyperbolic-disk, "
                         "pullback:square+mobius(0.3):hyperbolic-disk, csv:path.csv")
    sp.add_argument("--grid", default="-0.6:0.6:9,-0.6:0.6:9")
    sp.add_argument("--tol", type=float, default=1e-2,
                    help="margin for the SK verdict in the JSON summary")
    add_common(sp)
    sp.set_defaults(func=cmd_curvature)

    sp = sub.add_parser("order", help="singularity order of a density at the origin")
    sp.add_argument("--density", default=None, help="registry name (default: maximal)")
    sp.add_argument("--alpha", type=float, default=0.5, help="order of the default maximal density")
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--kmin", type=int, default=4, help="radii 2^-k start")
    sp.add_argument("--kmax", type=int, default=20, help="radii 2^-k end")
    sp.add_argument("--angular-samples", type=int, default=720)
    add_common(sp)
    sp.set_defaults(func=cmd_order)

    sp = sub.add_parser("ahlfors", help="pointwise margin of a reference density over an SK density")
    sp.add_argument("--sk", required=True, help="registry name of the dominated density")
    sp.add_argument("--reference", default="hyperbolic-disk")
    sp.add_argument("--grid", default="-0.9:0.9:21,-0.9:0.9:21")
    add_common(sp)
    sp.set_defaults(func=cmd_ahlfors)

    sp = sub.add_parser("glue", help="verify the gluing condition and emit the glued density")
    sp.add_argument("--outer", required=True)
    sp.add_argument("--inner", required=True)
    sp.add_argument("--inner-radius", type=float, default=None,
                    help="restrict the inner density to this subdisk radius")
    sp.add_argument("--probes", type=int, default=8,
                    help="probe points on the interface circle")
    sp.add_argument("--tol", type=float, default=1e-6, help="gluing condition slack")
    sp.add_argument("--grid", default="-0.9:0.9:21,-0.9:0.9:21")
    add_common(sp)
    sp.set_defaults(func=cmd_glue)

    sp = sub.add_parser("asymptotics", help="decay rate of remainder derivatives near the singularity")
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=3, help="derivative order")
    sp.add_argument("--kmin", type=int, default=4)
    sp.add_argument("--kmax", type=int, default=12)
    add_common(sp)
    sp.set_defaults(func=cmd_asymptotics)

    sp = sub.add_parser("selfcheck", help="run the full invariant suite (exit 1 on failure)")
    sp.add_argument("--only", default=None, help="comma-separated check names")
    sp.set_defaults(func=cmd_selfcheck)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # accept the flag form "--command NAME ..." as an alias for the subcommand
    if argv and argv[0] == "--command" and len(argv) >= 2:
        argv = argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
