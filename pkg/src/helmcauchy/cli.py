"""Command-line entry point: ``helmcauchy <command> [options]``.

Exit codes: 0 success, 2 parameter error, 3 numerical validity or convergence
failure, 4 I/O error.
"""
import argparse
import os
import sys

from . import experiments as ex
from .errors import HelmCauchyError, OutputError
from .illposed import growth_slope

COMMANDS = ("table1", "table2", "table3", "blowup", "figure", "bounds")


def build_parser():
    p = argparse.ArgumentParser(prog="helmcauchy", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    p.add_argument("--delta", nargs="+", type=float, help="noise levels")
    p.add_argument("--z0", nargs="+", type=float, help="evaluation depths")
    p.add_argument("--out", default=".", metavar="DIR", help="output directory (default: .)")
    p.add_argument("--spacing-divisor", type=float, help="grid spacing is R / divisor (default 30)")
    p.add_argument("--quad-order", type=int, help="Gauss-Legendre order in depth (default 5)")
    p.add_argument("--volterra-steps", type=int, help="marching steps M (default 50)")
    p.add_argument("--n", nargs="+", type=int, help="family indices for blowup")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key; repeatable")
    return p


def _overrides(args, command):
    flags = {"deltas": args.delta, "z0s": args.z0, "spacing_divisor": args.spacing_divisor,
             "quad_order": args.quad_order, "volterra_steps": args.volterra_steps, "n_list": args.n}
    allowed = ex.DEFAULTS[command]
    out = {}
    for key, val in flags.items():
        if val is None:
            continue
        if key not in allowed:
            raise ex.ParameterError(f"--{key.replace('_', '-')} does not apply to {command}")
        out[key] = val
    for item in args.set:
        if "=" not in item:
            raise ex.ParameterError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def run(args):
    command = args.command
    file_cfg = ex.read_config_file(args.config) if args.config else {}
    cfg = ex.make_config(command, file_cfg, _overrides(args, command))
    ex.ensure_dir(args.out)
    out = lambda name: os.path.join(args.out, name)
    notes = []
    if command in ("table1", "table2", "table3"):
        runner = {"table1": ex.run_table1, "table2": ex.run_table2, "table3": ex.run_table3}[command]
        report = runner(cfg)
        files = [f"{command}.csv"]
        report.to_csv(out(files[0]))
        text = open(out(files[0])).read()
        print(text, end="")
    elif command == "figure":
        cfg, exact, approx = ex.run_figure(cfg)
        z0 = cfg["z0s"][0]
        files = ["figure_exact.csv", f"figure_{cfg['method']}.csv"]
        ex.emit_figure_data(exact, z0, out(files[0]))
        ex.emit_figure_data(approx, z0, out(files[1]))
        print(f"wrote {len(exact.grid.rho)} modes to {', '.join(files)}")
    elif command == "bounds":
        cfg, rows = ex.run_bounds(cfg)
        files = ["bounds.csv"]
        ex.write_rows_csv(out(files[0]), rows, list(rows[0]))
        print(open(out(files[0])).read(), end="")
    else:
        cfg, rows = ex.run_blowup(cfg)
        files = ["blowup.csv"]
        table = [{"n": r.n, "g_norm2": r.g_norm2, "g_norm2_discrete": r.g_norm2_discrete,
                  "f_norm2": r.f_norm2, "u_norm2": r.u_norm2, "lower_bound": r.lower_bound,
                  "exceeds_bound": bool(r.exceeds_bound)} for r in rows]
        ex.write_rows_csv(out(files[0]), table, list(table[0]))
        if len(rows) > 1:
            notes.append(f"growth_slope = {growth_slope(rows):.8E}")
        print(open(out(files[0])).read(), end="")
        for n in notes:
            print(n)
    ex.write_manifest(out(f"{command}_manifest.txt"), command, cfg, files, notes)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except HelmCauchyError as e:
        print(f"helmcauchy: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"helmcauchy: I/O error: {e}", file=sys.stderr)
        return OutputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
