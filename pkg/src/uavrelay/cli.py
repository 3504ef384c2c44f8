"""Command-line entry point: uavrelay {single,plan,distributed,oracle,sweep}.

Exit codes: 0 ok, 2 bad scenario file, 3 bad argument, 4 infeasible target,
5 distributed run did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

from . import __version__
from .channel import Scenario, to_db, from_db
from .distributed import CONVERGED, DistributedConfig, run_distributed
from .errors import ConfigError, Infeasible, InfeasibleGamma, InvalidPosition
from .locus import locus_lambda
from .multi import PlanRequest, feasibility_terms, max_gamma_for_n, plan_min_uavs
from .oracles import (GridSpec, grid_argmax_single, msi_blind_baseline, msi_blind_chain,
                      random_placement_baseline)
from .scenario_io import ScenarioFile, digest, load
from .single import PlacementResult, optimal_h_fixed_x, optimal_position_free, optimal_x_fixed_h

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ARGUMENT = 3
EXIT_INFEASIBLE = 4
EXIT_NONCONVERGENCE = 5

OUT_DIR_ENV = "UAVRELAY_OUT_DIR"

SINGLE_MODES = ("fixed-h", "fixed-x", "free")
SWEEP_MODES = SINGLE_MODES + ("oracle", "plan", "max-gamma", "distributed", "locus",
                              "compare-single", "compare-distributed")

DEFAULTS = {"grid_x_m": 0.25, "grid_h_m": 0.25, "trials": 1000, "seed": 0, "step_m": 3.0}


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


# --- formatting -------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ";".join(_fmt(u) for u in v)
    return str(v)


def render_csv(header, rows, provenance: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in header])
    buf.write("# " + " ".join(f"{k}={v}" for k, v in provenance.items()) + "\n")
    return buf.getvalue()


def _db(v):
    return to_db(v) if v and v > 0 and math.isfinite(v) else None


def _destination(out, default_name):
    if out:
        return Path(out)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env) / default_name
    return None


def _write(dest, text) -> None:
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# --- evaluation of one point ------------------------------------------------------

def _require(run: dict, key: str, flag: str):
    if run.get(key) is None:
        raise ArgumentError(f"{flag} is required")
    return run[key]


def _placement_row(res: PlacementResult) -> dict:
    return {"x_m": res.position.x_m, "h_m": res.position.h_m, "sir_hop1": res.sir.sir_hop1,
            "sir_hop2": res.sir.sir_hop2, "sir_system": res.sir.sir_system,
            "sir_system_db": _db(res.sir.sir_system), "case_label": res.case_label}


PLACEMENT_COLS = ["x_m", "h_m", "sir_hop1", "sir_hop2", "sir_system", "sir_system_db", "case_label"]

COLUMNS = {
    "fixed-h": ["altitude_m"] + PLACEMENT_COLS,
    "fixed-x": ["x_hat_m"] + PLACEMENT_COLS,
    "free": PLACEMENT_COLS,
    "oracle": ["grid_x_m", "grid_h_m"] + PLACEMENT_COLS,
    "plan": ["gamma_db", "altitude_m", "n_uavs", "sir_system", "sir_system_db", "uav_x_m"],
    "max-gamma": ["n_uavs", "altitude_m", "gamma", "gamma_db", "n_used", "uav_x_m"],
    "distributed": ["n_uavs", "step_m", "altitude_m", "outcome", "iterations",
                    "final_sir_system", "final_sir_db"],
    "locus": ["x_m", "h_plus_m", "h_minus_m"],
    "compare-single": ["altitude_m", "optimal_x_m", "optimal_sir", "blind_sir",
                       "random_mean_sir", "random_best_sir", "gain_vs_blind_pct",
                       "gain_vs_random_pct"],
    "compare-distributed": ["n_uavs", "outcome", "distributed_sir", "blind_sir",
                            "random_mean_sir", "gain_vs_blind_pct", "gain_vs_random_pct"],
}


def _altitude(sc: Scenario, run: dict) -> float:
    return run.get("altitude_m", sc.h_min)


def _gain(a, b):
    return 100.0 * (a / b - 1.0)


def evaluate(mode: str, sc: Scenario, run: dict) -> dict:
    """Run one evaluation; raises library errors for the caller to map."""
    if mode == "fixed-h":
        h = _require(run, "altitude_m", "--altitude")
        return {"altitude_m": h, **_placement_row(optimal_x_fixed_h(sc, h))}
    if mode == "fixed-x":
        x = _require(run, "x_m", "--x")
        return {"x_hat_m": x, **_placement_row(optimal_h_fixed_x(sc, x))}
    if mode == "free":
        return _placement_row(optimal_position_free(sc))
    if mode == "oracle":
        gx, gh = run["grid_x_m"], run["grid_h_m"]
        return {"grid_x_m": gx, "grid_h_m": gh,
                **_placement_row(grid_argmax_single(sc, GridSpec(gx, gh)))}
    if mode == "plan":
        g_db = _require(run, "gamma_db", "--gamma-db")
        h = _altitude(sc, run)
        plan = plan_min_uavs(PlanRequest(from_db(g_db), h, sc))
        return {"gamma_db": g_db, "altitude_m": h, "n_uavs": plan.n_uavs,
                "sir_system": plan.sir_system, "sir_system_db": _db(plan.sir_system),
                "uav_x_m": plan.uav_x_m, "_plan": plan}
    if mode == "max-gamma":
        n = int(_require(run, "n_uavs", "--n"))
        h = _altitude(sc, run)
        g, plan = max_gamma_for_n(sc, n, h)
        return {"n_uavs": n, "altitude_m": h, "gamma": g, "gamma_db": _db(g),
                "n_used": plan.n_uavs, "uav_x_m": plan.uav_x_m}
    if mode == "distributed":
        n = int(_require(run, "n_uavs", "--n"))
        h = _altitude(sc, run)
        cap = run.get("max_iterations")
        cfg = DistributedConfig(n, run["step_m"], h, sc, None if cap is None else int(cap))
        tr = run_distributed(cfg)
        return {"n_uavs": n, "step_m": cfg.step_m, "altitude_m": h, "outcome": tr.outcome,
                "iterations": tr.iterations, "final_sir_system": tr.final_sir_system,
                "final_sir_db": _db(tr.final_sir_system), "_trace": tr}
    if mode == "locus":
        x = _require(run, "x_m", "--x")
        lp, lm = (float(v) for v in locus_lambda(sc, x))
        root = lambda u: math.sqrt(u) if u >= 0 else None  # noqa: E731
        return {"x_m": x, "h_plus_m": root(lp), "h_minus_m": root(lm)}
    if mode == "compare-single":
        h = _require(run, "altitude_m", "--altitude")
        best = optimal_x_fixed_h(sc, h)
        blind = msi_blind_baseline(sc, h)
        rnd = random_placement_baseline(sc, 1, int(run["trials"]), int(run["seed"]), h)
        t = best.sir.sir_system
        return {"altitude_m": h, "optimal_x_m": best.position.x_m, "optimal_sir": t,
                "blind_sir": blind.sir.sir_system, "random_mean_sir": rnd.mean_sir,
                "random_best_sir": rnd.best_sir,
                "gain_vs_blind_pct": _gain(t, blind.sir.sir_system),
                "gain_vs_random_pct": _gain(t, rnd.mean_sir)}
    if mode == "compare-distributed":
        out = evaluate("distributed", sc, run)
        n, h = out["n_uavs"], out["altitude_m"]
        _, blind = msi_blind_chain(sc, n, h)
        rnd = random_placement_baseline(sc, n, int(run["trials"]), int(run["seed"]), h)
        d = out["final_sir_system"]
        return {"n_uavs": n, "outcome": out["outcome"], "distributed_sir": d, "blind_sir": blind,
                "random_mean_sir": rnd.mean_sir, "gain_vs_blind_pct": _gain(d, blind),
                "gain_vs_random_pct": _gain(d, rnd.mean_sir)}
    raise ArgumentError(f"unknown mode {mode!r}")


# --- commands ---------------------------------------------------------------------

def _run_params(args, sf: ScenarioFile) -> dict:
    run = {**DEFAULTS, **sf.run}
    flags = {"gamma_db": "gamma_db", "altitude_m": "altitude", "x_m": "x", "n_uavs": "n",
             "step_m": "epsilon", "max_iterations": "max_iterations", "grid_x_m": "grid_x",
             "grid_h_m": "grid_h", "trials": "trials", "seed": "seed"}
    for key, attr in flags.items():
        v = getattr(args, attr, None)
        if v is not None:
            run[key] = v
    return run


def _provenance(sf: ScenarioFile, command: str, mode: str | None = None) -> dict:
    p = {"scenario_sha256": digest(sf), "tool": f"uavrelay-{__version__}", "command": command}
    if mode:
        p["mode"] = mode
    return p


def _emit(args, name: str, text: str, out) -> None:
    dest = _destination(args.out, name)
    if dest is not None:
        _write(dest, text)
        print(f"wrote {dest}", file=out)


def _print_placement(row: dict, out) -> None:
    print(f"position: x = {row['x_m']!r} m, h = {row['h_m']!r} m", file=out)
    print(f"SIR_S: {row['sir_system']!r} ({row['sir_system_db']!r} dB); "
          f"SIR_1 = {row['sir_hop1']!r}, SIR_2 = {row['sir_hop2']!r}", file=out)
    print(f"case: {row['case_label']}", file=out)


def cmd_single(args, sf, out) -> int:
    run = _run_params(args, sf)
    row = evaluate(args.mode, sf.scenario, run)
    _print_placement(row, out)
    text = render_csv(COLUMNS[args.mode], [row], _provenance(sf, "single", args.mode))
    _emit(args, f"single-{args.mode}.csv", text, out)
    return EXIT_OK


def cmd_oracle(args, sf, out) -> int:
    run = _run_params(args, sf)
    row = evaluate("oracle", sf.scenario, run)
    _print_placement(row, out)
    _emit(args, "oracle.csv", render_csv(COLUMNS["oracle"], [row], _provenance(sf, "oracle")), out)
    return EXIT_OK


def cmd_plan(args, sf, out) -> int:
    run = _run_params(args, sf)
    res = evaluate("plan", sf.scenario, run)
    plan = res["_plan"]
    print(f"N* = {plan.n_uavs} UAVs at h = {plan.altitude_m!r} m; "
          f"SIR_S = {plan.sir_system!r} ({_db(plan.sir_system)!r} dB)", file=out)
    rows = []
    x = 0.0
    for k, (d, s) in enumerate(zip(plan.hop_distances_m, plan.sir_profile), start=1):
        x += d
        rows.append({"hop": k, "d_m": d, "x_rx_m": min(x, sf.scenario.D), "sir": s, "sir_db": _db(s)})
        print(f"  hop {k}: d = {d!r} m, SIR = {s!r}", file=out)
    text = render_csv(["hop", "d_m", "x_rx_m", "sir", "sir_db"], rows, _provenance(sf, "plan"))
    _emit(args, "plan.csv", text, out)
    return EXIT_OK


def cmd_distributed(args, sf, out) -> int:
    run = _run_params(args, sf)
    res = evaluate("distributed", sf.scenario, run)
    tr = res["_trace"]
    header = ["iteration", "d1_m", "d_last_m", "gamma", "gamma_db", "middle_sir", "messages",
              "anchored", "first_hop_branch", "compacted", "positions_x_m"]
    rows = [{"iteration": r.iteration, "d1_m": r.d1_m, "d_last_m": r.d_last_m, "gamma": r.gamma,
             "gamma_db": _db(r.gamma), "middle_sir": r.middle_sir, "messages": r.messages,
             "anchored": r.anchored, "first_hop_branch": r.first_hop_branch,
             "compacted": r.compacted, "positions_x_m": r.positions_x_m} for r in tr.records]
    _emit(args, "distributed.csv",
          render_csv(header, rows, _provenance(sf, "distributed")), out)
    print(f"outcome: {tr.outcome} after {tr.iterations} iteration(s); "
          f"final SIR_S = {tr.final_sir_system!r} ({_db(tr.final_sir_system)!r} dB)", file=out)
    return EXIT_OK if tr.outcome == CONVERGED else EXIT_NONCONVERGENCE


def cmd_sweep(args, sf, out) -> int:
    mode = args.mode
    base = _run_params(args, sf)
    swept = [b.parameter for b in sf.sweep]
    header = swept + ["status"] + [c for c in COLUMNS[mode] if c not in swept]
    rows = []
    for assign, sc, run in sf.points():
        run = {**base, **{k: v for k, v in run.items() if k in assign}}
        row = dict(assign)
        try:
            row.update({k: v for k, v in evaluate(mode, sc, run).items() if not k.startswith("_")})
            row["status"] = "ok"
        except InfeasibleGamma as exc:
            row["status"] = f"infeasible:{exc.term}"
        except (Infeasible, InvalidPosition) as exc:
            row["status"] = type(exc).__name__
        rows.append(row)
    text = render_csv(header, rows, _provenance(sf, "sweep", mode))
    dest = _destination(args.out, f"sweep-{mode}.csv")
    if dest is None:
        out.write(text)
    else:
        _write(dest, text)
        print(f"wrote {dest} ({len(rows)} rows)", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="uavrelay", description="UAV relay placement under a dominant interferer.")
    p.add_argument("--version", action="version", version=f"uavrelay {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out", help=f"CSV output path (default: ${OUT_DIR_ENV}/<command>.csv if set)")

    sp = sub.add_parser("single", help="optimal position of one relay UAV")
    common(sp)
    sp.add_argument("--mode", choices=SINGLE_MODES, default="free")
    sp.add_argument("--altitude", type=float, help="fixed altitude for --mode fixed-h (m)")
    sp.add_argument("--x", type=float, help="fixed horizontal position for --mode fixed-x (m)")

    sp = sub.add_parser("plan", help="minimum number of UAVs for a target SIR")
    common(sp)
    sp.add_argument("--gamma-db", type=float, help="target system SIR in dB")
    sp.add_argument("--altitude", type=float, help="common UAV altitude (m); default h_min")

    sp = sub.add_parser("distributed", help="simulate the distributed placement protocol")
    common(sp)
    sp.add_argument("--n", type=int, help="number of UAVs (>= 2)")
    sp.add_argument("--epsilon", type=float, help="horizontal step size per iteration (m)")
    sp.add_argument("--altitude", type=float, help="common UAV altitude (m); default h_min")
    sp.add_argument("--max-iterations", type=int)

    sp = sub.add_parser("oracle", help="brute-force grid search for one relay")
    common(sp)
    sp.add_argument("--grid-x", type=float, help="x step (m), default 0.25")
    sp.add_argument("--grid-h", type=float, help="h step (m), default 0.25")

    sp = sub.add_parser("sweep", help="run a mode over the scenario file's sweep blocks")
    common(sp)
    sp.add_argument("--mode", choices=SWEEP_MODES, required=True)
    sp.add_argument("--gamma-db", type=float)
    sp.add_argument("--altitude", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--max-iterations", type=int)
    sp.add_argument("--grid-x", type=float)
    sp.add_argument("--grid-h", type=float)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    return p


COMMANDS = {"single": cmd_single, "plan": cmd_plan, "distributed": cmd_distributed,
            "oracle": cmd_oracle, "sweep": cmd_sweep}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except ArgumentError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ARGUMENT
    try:
        sf = load(args.scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args, sf, out)
    except ArgumentError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ARGUMENT
    except InfeasibleGamma as exc:
        terms = ""
        if args.command == "plan":
            h = getattr(args, "altitude", None) or sf.run.get("altitude_m", sf.scenario.h_min)
            try:
                terms = " (" + ", ".join(f"{k} ceiling {v:.6g}" for k, v in
                                         feasibility_terms(sf.scenario, h).items()) + ")"
            except InvalidPosition:
                pass
        print(f"infeasible: binding term {exc.term}: {exc}{terms}", file=err)
        return EXIT_INFEASIBLE
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=err)
        return EXIT_INFEASIBLE
    except InvalidPosition as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ARGUMENT
    except ConfigError as exc:
        # sweep values come from the file; otherwise a flag was out of range
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG if args.command == "sweep" else EXIT_ARGUMENT


if __name__ == "__main__":
    sys.exit(main())
