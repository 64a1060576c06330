"""Command-line interface: configuration-driven experiments and the
verification suites.

    shockwave-lab <riemann|profile|shifts|simulate|verify>
                  [--config PATH] [--out DIR] [--suite NAME]

Exit status 0 on success; 1 on stage errors or failed verification;
2 on usage errors.  Outputs are deterministic for a fixed config and
platform (CSV floats carry 17 significant digits).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import verify as verify_mod
from .composite import CompositeWave, compute_shift_inputs, solve_shifts
from .config import ConfigError, parse_config
from .profile import build_profiles
from .solver import run_simulation

__all__ = ["main"]


def _write_csv(path, names, columns):
    columns = [np.asarray(c) for c in columns]
    with open(path, "w") as f:
        f.write(",".join(names) + "\n")
        for row in zip(*columns):
            f.write(",".join("%.17g" % val for val in row) + "\n")


def _ensure_out(cfg, override):
    out = override or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    return out


def cmd_riemann(cfg, out_dir):
    ts = cfg.riemann.resolve(cfg.gas)
    print(f"v_m = {ts.mid.v:.6f}")
    print(f"u_m = {ts.mid.u:.6f}")
    print(f"s1 = {ts.s1:.6f}")
    print(f"s2 = {ts.s2:.6f}")
    print(f"chi1 = {ts.chi1:.6f}")
    print(f"chi2 = {ts.chi2:.6f}")
    names = ("v_minus", "u_minus", "v_m", "u_m", "v_plus", "u_plus",
             "s1", "s2", "chi1", "chi2")
    vals = (ts.left.v, ts.left.u, ts.mid.v, ts.mid.u, ts.right.v, ts.right.u,
            ts.s1, ts.s2, ts.chi1, ts.chi2)
    _write_csv(os.path.join(out_dir, "riemann.csv"), names,
               [[v] for v in vals])
    return 0


def cmd_profile(cfg, out_dir):
    ts = cfg.riemann.resolve(cfg.gas)
    p1, p2 = build_profiles(cfg.gas, ts)
    for tag, prof in (("1", p1), ("2", p2)):
        xi = prof.xi_table
        V, U, Vx, Ux = prof.evaluate(xi)
        _write_csv(os.path.join(out_dir, f"profile{tag}.csv"),
                   ("xi", "V", "U", "Vx", "Ux"), (xi, V, U, Vx, Ux))
        print(f"wave {tag}: s = {prof.s:.6f}, chi = {prof.chi:.6f}, "
              f"c_minus = {prof.c_minus:.6f}, c_plus = {prof.c_plus:.6f}")
    return 0


def cmd_shifts(cfg, out_dir):
    ts = cfg.riemann.resolve(cfg.gas)
    p1, p2 = build_profiles(cfg.gas, ts)
    cw0 = CompositeWave(p1, p2, cfg.beta)
    grid = cfg.grid.resolve(cfg.gas, ts, cfg.beta, cfg.time.t_final)
    x = grid.x
    V0, U0 = cw0.state_fields(x, 0.0)
    v0, u0 = V0.copy(), U0.copy()
    for pert in cfg.perturbations:
        if pert.target == "v":
            v0 += pert(x)
        else:
            u0 += pert(x)
    si = compute_shift_inputs(v0, u0, cw0, grid)
    b1, b2 = solve_shifts(si, ts)
    print(f"I01 = {si.I01:.12g}")
    print(f"I02 = {si.I02:.12g}")
    print(f"beta1 = {b1:.12g}")
    print(f"beta2 = {b2:.12g}")
    _write_csv(os.path.join(out_dir, "shifts.csv"),
               ("I01", "I02", "beta1", "beta2"),
               ([si.I01], [si.I02], [b1], [b2]))
    return 0


def cmd_simulate(cfg, out_dir):
    result = run_simulation(cfg)
    diag_path = os.path.join(out_dir, "diag.csv")
    result.series.to_csv(diag_path)
    for snap in result.snapshots:
        snap.write_csv(os.path.join(out_dir, f"snap_t{snap.t:g}.csv"))
    last = result.series.records[-1]
    print(f"shifts: beta1 = {result.composite.beta1:.12g}, "
          f"beta2 = {result.composite.beta2:.12g}")
    print(f"final t = {last.t:g}: sup|v-V| = {last.sup_v:.6g}, "
          f"sup|u-U| = {last.sup_u:.6g}, ||W|| = {last.l2_W:.6g}")
    print(f"wrote {diag_path} and {len(result.snapshots)} snapshot(s)")
    return 0


def cmd_verify(suite):
    if suite not in verify_mod.SUITE_NAMES:
        print(f"usage error: unknown suite '{suite}'; "
              f"choose from {', '.join(verify_mod.SUITE_NAMES)}",
              file=sys.stderr)
        return 2
    results, ok = verify_mod.run_suite(suite)
    for r in results:
        print(verify_mod.format_result(r))
    return 0 if ok else 1


_CONFIG_COMMANDS = {
    "riemann": cmd_riemann,
    "profile": cmd_profile,
    "shifts": cmd_shifts,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shockwave-lab",
        description="Two-shock composite-wave laboratory for the 1-D "
                    "isentropic Navier-Stokes system")
    parser.add_argument("command",
                        choices=("riemann", "profile", "shifts", "simulate",
                                 "verify"))
    parser.add_argument("--config", help="experiment configuration file")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--suite", default="all",
                        help="verification suite name (verify command)")
    args = parser.parse_args(argv)

    if args.command == "verify":
        return cmd_verify(args.suite)

    if not args.config:
        parser.error(f"command '{args.command}' requires --config")
    try:
        cfg = parse_config(args.config)
        out_dir = _ensure_out(cfg, args.out)
        return _CONFIG_COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # stage errors surface with the module label
        print(f"{args.command} error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
