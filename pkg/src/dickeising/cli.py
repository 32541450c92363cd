"""Command-line front end: ``dickeising <subcommand> [options]``.

Every run writes its data files plus ``manifest.json`` into ``--out``.
Options may also come from ``--config FILE`` holding ``key = value`` lines;
explicit flags win over the file.

Exit codes: 0 success, 2 invalid input, 3 convergence failure,
4 verification failure.
"""

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from ._validation import (ConvergenceError, DegenerateDesignError, DomainError, NoSolutionError,
                          OutOfRegionError, ResourceError, TruncationError)
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 2, 3, 4


class InvalidInput(Exception):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


def _float_list(text):
    text = str(text).strip()
    if not text:
        return []
    return [float(v) for v in text.split(",")]


def _pair_list(text):
    """``"b1:w1,b2:w2"`` into ``[(b1, w1), (b2, w2)]``."""
    text = str(text).strip()
    if not text:
        return []
    out = []
    for item in text.split(","):
        b, w = item.split(":")
        out.append((float(b), float(w)))
    return out


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--config", type=Path, help="key = value file merged under the flags")
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    g.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--quad-points", type=int, default=64)
    g.add_argument("--quad-tol", type=float, default=1e-10)
    return p


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="dickeising",
        description="Mean-field thermodynamics of an Ising chain coupled to a cavity mode.",
        epilog="Exit codes: 0 success, 2 invalid input, 3 convergence failure, 4 verification failure.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("observables", parents=[common], help="simplex sweep of mean-field observables")
    p.add_argument("--total", type=float, default=1.0, help="fixed h + J + g")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=100.0)
    p.add_argument("--resolution", type=int, default=60)

    p = sub.add_parser("free-energy", parents=[common], help="reduced free-energy curves")
    p.add_argument("--pairs", default="1:0.25,10:0.25,10:0.32", help="beta_t:omega_t list")
    p.add_argument("--h-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=301)

    p = sub.add_parser("phase-diagram", parents=[common], help="transition lines and the I4 = 0 locus")
    p.add_argument("--omegas", default="0.1,0.2,0.25,0.301,0.32")
    p.add_argument("--inv-beta-min", type=float, default=0.05)
    p.add_argument("--inv-beta-max", type=float, default=1.0)
    p.add_argument("--beta-steps", type=int, default=96)

    p = sub.add_parser("metrology", parents=[common], help="temperature estimator design and scaling")
    p.add_argument("--omega-t", type=float, default=0.301)
    p.add_argument("--inv-beta0", type=float, default=0.77)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--N", default="100,1000,10000,100000", help="comma-separated sizes")
    p.add_argument("--g-over-J", type=float, default=2.0)
    p.add_argument("--rel-temperature", type=float, default=0.01)
    p.add_argument("--mc-trials", type=int, default=0, help="Monte Carlo check (0 disables)")

    p = sub.add_parser("verify", parents=[common], help="run oracle and invariant checks")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiplies every tolerance")
    p.add_argument("--max-sites", type=int, default=10, help="largest dense Ising chain")
    return parser


def _merge_config(parser, argv):
    """Parse once to find ``--config``, install its values as defaults, parse again."""
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        values = io.read_config(args.config)
    except (OSError, ValueError) as exc:
        raise InvalidInput([f"config {args.config}: {exc}"])
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    problems = []
    defaults = {}
    for key, raw in values.items():
        action = known.get(key)
        if action is None or key in ("config", "help"):
            problems.append(f"config key {key!r} is not an option of {args.command}")
            continue
        try:
            defaults[key] = action.type(raw) if action.type else raw
        except (TypeError, ValueError):
            problems.append(f"config key {key!r}: bad value {raw!r}")
            continue
        if action.choices and defaults[key] not in action.choices:
            problems.append(f"config key {key!r}: {raw!r} not in {sorted(action.choices)}")
    if problems:
        raise InvalidInput(problems)
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _validate(args):
    """Collect every parameter violation before any computation starts."""
    bad = []

    def positive(name, v):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            bad.append(f"--{name} must be > 0 (got {v})")

    if args.workers < 1:
        bad.append("--workers must be >= 1")
    if args.quad_points < 16 or args.quad_points % 2:
        bad.append("--quad-points must be an even integer >= 16")
    positive("quad-tol", args.quad_tol)
    cmd = args.command
    if cmd == "observables":
        positive("total", args.total)
        positive("omega", args.omega)
        positive("beta", args.beta)
        if args.resolution < 2:
            bad.append("--resolution must be >= 2")
    elif cmd == "free-energy":
        try:
            for b, w in _pair_list(args.pairs):
                positive("pairs beta_t", b)
                positive("pairs omega_t", w)
        except ValueError:
            bad.append("--pairs must look like beta_t:omega_t,beta_t:omega_t")
        positive("h-max", args.h_max)
        if args.points < 2:
            bad.append("--points must be >= 2")
    elif cmd == "phase-diagram":
        try:
            for w in _float_list(args.omegas):
                positive("omegas", w)
        except ValueError:
            bad.append("--omegas must be a comma-separated list of numbers")
        positive("inv-beta-min", args.inv_beta_min)
        positive("inv-beta-max", args.inv_beta_max)
        if args.inv_beta_max <= args.inv_beta_min:
            bad.append("--inv-beta-max must exceed --inv-beta-min")
        if args.beta_steps < 2:
            bad.append("--beta-steps must be >= 2")
    elif cmd == "metrology":
        positive("omega-t", args.omega_t)
        positive("inv-beta0", args.inv_beta0)
        positive("gamma", args.gamma)
        positive("g-over-J", args.g_over_J)
        positive("rel-temperature", args.rel_temperature)
        try:
            Ns = _float_list(args.N)
            if len(Ns) < 3 or any(n < 1 for n in Ns) or any(np.diff(Ns) <= 0):
                bad.append("--N needs at least three increasing sizes >= 1")
        except ValueError:
            bad.append("--N must be a comma-separated list of numbers")
        if args.mc_trials < 0:
            bad.append("--mc-trials must be >= 0")
    elif cmd == "verify":
        if not (math.isfinite(args.tol_scale) and args.tol_scale >= 0):
            bad.append("--tol-scale must be >= 0")
        if not 6 <= args.max_sites <= 12:
            bad.append("--max-sites must lie in [6, 12]")
    if bad:
        raise InvalidInput(bad)


def _quadrature(args):
    return QuadratureConfig(base_points=args.quad_points, refine_tol=args.quad_tol)


def _config_dict(args):
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}


def cmd_observables(args, manifest):
    from .meanfield import SWEEP_COLUMNS, simplex_sweep

    rows = simplex_sweep(args.total, args.omega, args.beta, args.resolution,
                         _quadrature(args), workers=args.workers)
    path = io.write_table(args.out, "sweep", SWEEP_COLUMNS, rows, args.format)
    manifest.add(path, len(rows))


FREE_ENERGY_COLUMNS = ["beta_t", "omega_t", "h_eff_t", "free_energy", "relative"]


def cmd_free_energy(args, manifest):
    from .meanfield import ReducedParams, reduced_free_energy

    q = _quadrature(args)
    u = np.linspace(0.0, args.h_max, args.points)
    rows = []
    for b, w in _pair_list(args.pairs):
        f = reduced_free_energy(u, ReducedParams(0.0, b, w), q, constrained=False)
        rows.extend({"beta_t": b, "omega_t": w, "h_eff_t": ui, "free_energy": fi, "relative": fi - f[0]}
                    for ui, fi in zip(u, f))
    path = io.write_table(args.out, "free_energy", FREE_ENERGY_COLUMNS, rows, args.format)
    manifest.add(path, len(rows))


def cmd_phase_diagram(args, manifest):
    from .phase_diagram import DIAGRAM_COLUMNS, Order, default_beta_grid, trace_diagram

    grid = default_beta_grid(args.beta_steps, args.inv_beta_min, args.inv_beta_max)
    diagram = trace_diagram(_float_list(args.omegas), grid, _quadrature(args))
    for stem, order in (("phase_diagram", None), ("second_order", Order.SECOND),
                        ("first_order", Order.FIRST)):
        rows = diagram.rows(order)
        manifest.add(io.write_table(args.out, stem, DIAGRAM_COLUMNS, rows, args.format), len(rows))
    i4_rows = [{"beta_t": b, "inv_beta_t": 1.0 / b, "h_t": h} for b, h in diagram.i4_curve]
    path = io.write_table(args.out, "i4_curve", ["beta_t", "inv_beta_t", "h_t"], i4_rows, args.format)
    manifest.add(path, len(i4_rows))


def cmd_metrology(args, manifest):
    from .metrology import (DESIGN_COLUMNS, SCALING_COLUMNS, GridSpec, critical_field_shift,
                            design_for, operating_point, sensitivity_scan, simulate_estimates)

    q = _quadrature(args)
    beta0 = 1.0 / args.inv_beta0
    Ns = _float_list(args.N)
    fields, shifts = critical_field_shift(args.omega_t, beta0, args.rel_temperature, q)
    fit = sensitivity_scan(args.omega_t, beta0, Ns, args.gamma, q, g_over_J=args.g_over_J)
    op = operating_point(args.omega_t, beta0, q)
    design = design_for(op, Ns[0], args.gamma, GridSpec(), args.g_over_J)

    path = io.write_table(args.out, "design", DESIGN_COLUMNS, design.rows(), args.format)
    manifest.add(path, len(design.grid))
    path = io.write_table(args.out, "scaling", SCALING_COLUMNS, fit.rows(), args.format)
    manifest.add(path, len(Ns))
    summary = {
        "omega_t": args.omega_t, "beta0_t": beta0, "gamma": args.gamma,
        "h_c": op.h_c, "h_c_prime": op.h_c_prime, "ordered_side": op.side,
        "h_c_colder": fields[0], "h_c_hotter": fields[2],
        "relative_shift_colder": shifts[0], "relative_shift_hotter": shifts[1],
        "fitted_exponent": fit.fitted_exponent, "exponent_residual": fit.residual,
        "design_N": Ns[0], "design_variance": design.predicted_variance,
    }
    if args.mc_trials > 0:
        rng = np.random.default_rng(args.seed)
        delta = 10.0 * math.sqrt(design.predicted_variance)
        est = simulate_estimates(design, delta, args.mc_trials, rng)
        summary.update(mc_trials=args.mc_trials, mc_delta=delta, mc_mean=float(est.mean()),
                       mc_variance=float(est.var(ddof=1)))
    path = io.write_report(Path(args.out) / "metrology_summary.json", summary)
    manifest.add(path)


def cmd_verify(args, manifest):
    from .verify import run_checks

    report = run_checks(_quadrature(args), tol_scale=args.tol_scale, max_sites=args.max_sites,
                        seed=args.seed)
    path = io.write_report(Path(args.out) / "verify_report.json", report)
    manifest.add(path, len(report["checks"]))
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: residual={c['residual']:.3e} "
              f"tol={c['tolerance']:.3e}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


COMMANDS = {
    "observables": cmd_observables,
    "free-energy": cmd_free_energy,
    "phase-diagram": cmd_phase_diagram,
    "metrology": cmd_metrology,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = _merge_config(parser, argv)
        _validate(args)
    except InvalidInput as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # argparse reports usage errors this way
        return EXIT_INVALID if exc.code else EXIT_OK

    args.out.mkdir(parents=True, exist_ok=True)
    manifest = io.Manifest(args.command, _config_dict(args))
    try:
        code = COMMANDS[args.command](args, manifest) or EXIT_OK
    except (DomainError, OutOfRegionError, NoSolutionError, DegenerateDesignError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        manifest.write(args.out, status=f"invalid input: {exc}")
        return EXIT_INVALID
    except (ConvergenceError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        manifest.write(args.out, status=f"convergence failure: {exc}")
        return EXIT_CONVERGENCE
    manifest.write(args.out, status="ok" if code == EXIT_OK else "verification failed")
    return code


if __name__ == "__main__":
    sys.exit(main())
