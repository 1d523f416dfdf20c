"""Command-line interface.

Exit codes: 0 success, 1 a check or expectation failed, 2 bad configuration.
The output directory is ``--out-dir``, else ``$CANARDPWL_OUT``, else the
config's ``out_dir``.
"""

import argparse
import logging
import sys

import numpy as np

from . import io
from .build import model_transition, transition_rho, window_edge
from .config import ConfigError, load_config, parse_sweep
from .cycles import CycleProblem, cycle_orbit, match_predictions, sweep_breaking
from .errors import CanardError, InvalidParameterError, PreconditionFailed
from .lienard import canard_cycle, sdi, sdi_profile
from .transition import validate_transition
from .verify import run_suite

log = logging.getLogger("canardpwl")


def _common(p):
    p.add_argument("--config", help="TOML or JSON run configuration")
    p.add_argument("--kind", choices=["hopf", "jump"])
    p.add_argument("--seeds", type=lambda s: tuple(float(v) for v in s.split(",")), help="comma-separated seeds")
    p.add_argument("--delta", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--rho", type=float, help="collar start of the transition (default: automatic)")
    p.add_argument("--out-dir", help="output directory")


def _config(args, **extra):
    return load_config(
        args.config,
        kind=args.kind,
        seeds=args.seeds,
        delta=args.delta,
        eta=args.eta,
        rho=args.rho,
        **extra,
    )


def _transition_rows(phi, n):
    xs = np.linspace(-1.2, 1.2, n)
    return xs, phi(xs), phi(xs, 1), phi(xs, 2)


def _plot_transition(path, phi):
    xs, v, _, _ = _transition_rows(phi, 1201)

    def draw(ax):
        ax.plot(xs, v, lw=1.2)
        for c in phi.critical_points:
            ax.plot([c], [phi(c)], "o", ms=4)
        ax.axvline(-phi.rho, ls=":", lw=0.8)
        ax.axvline(phi.rho, ls=":", lw=0.8)
        ax.set_xlabel("x")
        ax.set_ylabel("phi(x)")

    io.write_svg(path, draw, f"{phi.label} transition")


def cmd_construct(args):
    cfg = _config(args)
    out = cfg.output_dir(args.out_dir)
    m = cfg.model()
    problems = m.check()
    rho = cfg.rho if cfg.rho is not None else transition_rho(m, cfg.window_x)
    phi = model_transition(m, rho)
    report = validate_transition(phi)
    model_doc = {
        "kind": m.kind,
        "seeds": list(m.seeds),
        "delta": m.delta,
        "c_plus": m.c_plus,
        "c_minus": m.c_minus,
        "rho": rho,
        "window_x": cfg.window_x if cfg.window_x is not None else window_edge(m),
        "model_checks": problems,
    }
    if m.kind == "hopf":
        model_doc["F_coefficients"] = m.F.coefficients
        model_doc["F_exact"] = str(m.F.exact.as_expr())
    else:
        model_doc.update(
            eta=m.eta,
            Pe_coefficients=m.Pe.coefficients,
            Po_right_coefficients=m.Po.right.coefficients,
            Po_right_exact=str(m.Po.right.exact.as_expr()),
            Ptilde_coefficients=m.Ptilde.coefficients,
        )
    io.write_json(out / "model.json", "model", model_doc)
    io.write_csv(out / "transition.csv", ["x", "phi", "dphi", "d2phi"], zip(*_transition_rows(phi, 2401)))
    io.write_json(out / "validation.json", "transition_validation", report.as_dict())
    if not args.no_plot:
        _plot_transition(out / "transition.svg", phi)
    print(f"{m.kind}: {report.n_critical} critical point(s) at " + ", ".join(f"{round(c, 9) + 0.0:g}" for c in report.critical_points))
    print(f"wrote {out}")
    if problems or not report.ok:
        for line in problems + report.failures:
            print(f"FAIL  {line}")
        return 1
    return 0


def cmd_transition(args):
    cfg = _config(args)
    m = cfg.model()
    rho = cfg.rho if cfg.rho is not None else transition_rho(m, cfg.window_x)
    phi = model_transition(m, rho)
    out = cfg.output_dir(args.out_dir)
    if args.out == "csv":
        path = io.write_csv(out / "transition.csv", ["x", "phi", "dphi", "d2phi"], zip(*_transition_rows(phi, args.n)))
    else:
        path = out / "transition.svg"
        _plot_transition(path, phi)
    print(f"wrote {path}")
    return 0


def cmd_sdi(args):
    cfg = _config(args, sdi_grid=args.n_grid)
    out = cfg.output_dir(args.out_dir)
    m = cfg.model()
    prof = sdi_profile(m, cfg.sdi_interval, cfg.sdi_grid)
    rows = [(z.x, z.slope, z.simple, m.F(z.x)) for z in prof.zeros]
    if args.out == "csv":
        io.write_csv(out / "sdi.csv", ["x", "I"], zip(prof.x, prof.values))
        io.write_csv(out / "sdi_zeros.csv", ["x", "slope", "simple", "height"], rows)
    else:
        io.write_json(out / "sdi.json", "sdi_profile", dict(prof.as_dict(), samples=[list(p) for p in zip(prof.x, prof.values)]))
    if not args.no_plot:

        def draw(ax):
            ax.plot(prof.x, prof.values, lw=1.2)
            ax.axhline(0.0, lw=0.6, color="k")
            for z in prof.zeros:
                ax.plot([z.x], [0.0], "o", ms=4)
            ax.set_xlabel("x")
            ax.set_ylabel("I(x)")

        io.write_svg(out / "sdi.svg", draw, f"{m.kind} slow divergence integral")
    print(f"{m.kind}: {prof.count} zero(s), {prof.simple_count} simple, max|I| = {prof.max_abs:.3e}")
    for x, slope, simple, _ in rows:
        print(f"  x = {x:.10f}  I' = {slope:+.3e}  {'simple' if simple else 'not simple'}")
    if args.expect_seeds and prof.simple_count != len(m.seeds):
        print(f"FAIL  expected {len(m.seeds)} simple zeros")
        return 1
    return 0


def cmd_cycles(args):
    extra = {}
    if args.eps is not None:
        extra["eps"] = tuple(args.eps)
    if args.sweep is not None:
        name, spec = parse_sweep(args.sweep)
        extra["sweep"] = spec.model_dump()
    if args.n_y is not None:
        extra["n_y"] = args.n_y
    cfg = _config(args, **extra)
    if args.sweep is not None and name != ("a" if cfg.kind == "hopf" else "b"):
        raise ConfigError(f"{cfg.kind} sweeps vary {'a' if cfg.kind == 'hopf' else 'b'}, not {name!r}")
    out = cfg.output_dir(args.out_dir)
    m = cfg.model()
    icfg = cfg.integrator.build()
    reports = []
    for eps in cfg.eps:
        problem = CycleProblem(m, eps, cfg.rho, cfg.window_x)
        log.info("sweeping %s at eps = %g", problem.param_name, eps)
        rep = sweep_breaking(problem, (cfg.sweep.lo, cfg.sweep.hi), cfg.sweep.n, icfg, cfg.n_y, cfg.n_coarse)
        doc = rep.as_dict()
        if args.match:
            table = match_predictions(rep, sdi_profile(m, cfg.sdi_interval, cfg.sdi_grid), problem, icfg)
            doc["match"] = table.as_dict()
        reports.append(doc)
        print(f"eps = {eps:g}: {rep.count} fixed point(s) at {rep.param_name} = {rep.param:.12g}")
        for p in rep.fixed_points:
            tag = "hyperbolic" if p.hyperbolic else "near-degenerate"
            print(f"  y* = {p.y:.10f}  multiplier = {p.multiplier:.6f}  {tag}")
        if args.emit_orbits or not args.no_plot:
            system = problem.system(rep.param)
            orbits = [(p.y, cycle_orbit(system, p.y, icfg)) for p in rep.fixed_points]
            if args.emit_orbits:
                rows = [(y, x, v) for y, orb in orbits for x, v in orb]
                io.write_csv(out / f"orbits_eps{eps:g}.csv", ["cycle_y", "x", "y"], rows)
            if not args.no_plot:
                _plot_orbits(out / f"orbits_eps{eps:g}.svg", m, problem, orbits)
    payload = {"reports": reports}
    if args.out == "json":
        io.write_json(out / "cycles.json", "cycle_report", payload)
    else:
        rows = [
            (r["eps"], r["breaking"]["value"], p["y"], p["multiplier"], p["hyperbolic"], p["residual"])
            for r in reports
            for p in r["fixed_points"]
        ]
        io.write_csv(out / "cycles.csv", ["eps", "breaking", "y", "multiplier", "hyperbolic", "residual"], rows)
    print(f"wrote {out}")
    return 0


def _plot_orbits(path, m, problem, orbits):
    xs = np.linspace(-problem.rho, problem.rho, 801)

    def draw(ax):
        ax.plot(xs, m.F(xs), lw=0.8, color="0.5", label="y = F(x)")
        for y, orb in orbits:
            ax.plot(orb[:, 0], orb[:, 1], lw=1.0, label=f"y* = {y:.4f}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(fontsize=7)

    io.write_svg(path, draw, f"{m.kind} limit cycles, eps = {problem.eps:g}")


def cmd_canard(args):
    cfg = _config(args)
    m = cfg.model()
    spec = canard_cycle(m, args.x)
    print(spec.as_dict(), "I =", sdi(m, args.x))
    return 0


def cmd_verify(args):
    cfg = _config(args)
    out = cfg.output_dir(args.out_dir)
    results = run_suite(with_cycles=args.cycles)
    for c in results:
        print(c.line())
    io.write_json(out / "verify.json", "verify", {"checks": [c.as_dict() for c in results]})
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="canardpwl", description="Canard cycles of regularized PWL systems")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build the model and its transition function")
    _common(p)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("transition", help="transition function utilities")
    tsub = p.add_subparsers(dest="action", required=True)
    d = tsub.add_parser("dump", help="sample phi, phi', phi''")
    _common(d)
    d.add_argument("--out", choices=["csv", "svg"], default="csv")
    d.add_argument("--n", type=int, default=2401)
    d.set_defaults(func=cmd_transition)

    p = sub.add_parser("sdi", help="slow divergence integral and its zeros")
    _common(p)
    p.add_argument("--out", choices=["csv", "json"], default="csv")
    p.add_argument("--n-grid", type=int)
    p.add_argument("--expect-seeds", action="store_true", help="fail unless there is one simple zero per seed")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_sdi)

    p = sub.add_parser("cycles", help="limit cycles by breaking-parameter sweep")
    _common(p)
    p.add_argument("--eps", type=float, action="append")
    p.add_argument("--sweep", help="breaking sweep, e.g. a=-1e-3:1e-3:41")
    p.add_argument("--n-y", type=int)
    p.add_argument("--out", choices=["json", "csv"], default="json")
    p.add_argument("--match", action="store_true", help="match cycles against SDI predictions")
    p.add_argument("--emit-orbits", choices=["csv"])
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("canard", help="singular canard cycle through a right endpoint")
    _common(p)
    p.add_argument("x", type=float)
    p.set_defaults(func=cmd_canard)

    p = sub.add_parser("verify", help="run the invariant suite")
    _common(p)
    p.add_argument("--cycles", action="store_true", help="include the (slow) limit-cycle check")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PreconditionFailed as exc:
        print(f"FAIL  {exc}", file=sys.stderr)
        return 1
    except CanardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
