"""Command-line front: run, verify, converge, export.

Exit codes: 0 success, 2 config/schema errors, 1 any other failure.
All execution is deterministic and single-threaded; --serial is accepted
for compatibility with driver scripts.
"""

import argparse
import sys

from .errors import ConfigError, SbigaError
from .harness import CaseConfig, run_case, verify_case, export_case


def _add_common(p):
    p.add_argument("config", help="path to a JSON case config")
    p.add_argument("--serial", action="store_true", help="deterministic serial mode (default)")
    p.add_argument("--quad-order", type=int, default=None, help="Gauss points per direction")
    p.add_argument("--tol-null", type=float, default=None, help="null-space cutoff")


def make_parser():
    ap = argparse.ArgumentParser(prog="sbiga")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, hlp in (
        ("run", "run the configured study and write CSV"),
        ("converge", "run with an explicit refinement list"),
        ("verify", "geometry/space verification checks"),
        ("export", "solve and export fields (legacy VTK)"),
    ):
        p = sub.add_parser(name, help=hlp)
        _add_common(p)
        if name == "run":
            p.add_argument("--csv", default=None)
        if name == "converge":
            p.add_argument("--segments", type=int, nargs="+", required=True)
            p.add_argument("--csv", default=None)
        if name == "verify":
            p.add_argument(
                "--checks", default="all",
                help="comma list of asg1,c1-jump,reproduction,all",
            )
        if name == "export":
            p.add_argument("--out", required=True)
    return ap


def _load_config(args):
    cfg = CaseConfig.from_file(args.config)
    if args.tol_null is not None:
        cfg.tol_null = args.tol_null
    return cfg


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command in ("run", "converge"):
            if args.command == "converge":
                cfg.segments = list(args.segments)
            rows, _ = run_case(
                cfg,
                csv_path=args.csv,
                quad_order=args.quad_order,
                progress=lambda row: print(
                    "h=%-10g N6=%-8d center=%r" % (row.h, row.N6, row.center_deflection)
                ),
            )
            from .harness import convergence_table

            for entry in convergence_table(rows):
                if entry["h2_semi"] is not None:
                    print(
                        "h=%-10g H2=%-12.5g (order %s)  L2=%-12.5g (order %s)"
                        % (
                            entry["h"], entry["h2_semi"],
                            "-" if entry["h2_semi_order"] is None else "%.2f" % entry["h2_semi_order"],
                            entry["l2"],
                            "-" if entry["l2_order"] is None else "%.2f" % entry["l2_order"],
                        )
                    )
            return 0
        if args.command == "verify":
            ok, lines = verify_case(cfg, args.checks.split(","))
            for kind, what, val, tol, good in lines:
                print("%-12s %-40s %.3e (tol %.0e) %s" % (kind, what, val, tol, "ok" if good else "FAIL"))
            return 0 if ok else 1
        if args.command == "export":
            paths = export_case(cfg, args.out, quad_order=args.quad_order)
            for p in paths:
                print(p)
            return 0
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except SbigaError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
