"""Command-line front end.

Subcommands:

* ``measure``  -- GGM/LGGM of a named or file-loaded state
* ``campaign`` -- Haar-sampling campaigns with CSV rows + JSON summary
* ``spin``     -- ground-state sweeps of the Ising/XXZ chains with
                  finite-difference derivatives and critical-point reports

Exit codes: 0 success, 2 argument or input parse error, 3 dimension cap
exceeded, 4 Lanczos non-convergence. ``LGGM_THREADS`` caps worker
processes. Numbers are printed with 9 significant digits so identical
invocations produce byte-identical output.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import campaigns, spin
from .ggm import ALL_CUTS, MaxCutSize, ggm
from .localize import OptimizerSettings, global_lggm, lggm
from .qstate import (
    GGHZ,
    GW,
    AppendixDExample,
    Dicke,
    DickeSuperposition,
    DimensionCapError,
    FourQubitClass,
    GHZClass,
    WClass,
    build,
    ghz,
    haar_random,
    load_state_json,
    save_state_json,
    w_state,
)


def _fmt(x: float) -> str:
    return f"{float(x):.9g}"


class _UsageError(Exception):
    pass


def _positions(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise _UsageError(f"bad positions {text!r}: {exc}") from exc


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(","))


def _complexes(text: str) -> tuple:
    return tuple(complex(x) for x in text.split(","))


def _grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise _UsageError(f"grid must be start:stop:step, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise _UsageError(f"empty grid {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def _build_state(args):
    if args.state_file:
        return load_state_json(args.state_file)
    name = args.state
    if name is None:
        raise _UsageError("provide --state or --state-file")
    if name == "ghz":
        return ghz(args.n)
    if name == "gghz":
        if args.a1 is None or args.a2 is None:
            raise _UsageError("gghz needs --a1 and --a2")
        return build(GGHZ(complex(args.a1), complex(args.a2), args.n))
    if name == "w":
        return w_state(args.n)
    if name == "gw":
        if not args.a:
            raise _UsageError("gw needs --a with one amplitude per qubit")
        return build(GW(_complexes(args.a)))
    if name == "dicke":
        if args.k is None:
            raise _UsageError("dicke needs --k")
        return build(Dicke(args.n, args.k))
    if name == "dicke-sup":
        if not args.a:
            raise _UsageError("dicke-sup needs --a with N+1 amplitudes")
        return build(DickeSuperposition(_complexes(args.a)))
    if name == "wclass":
        if not args.a:
            raise _UsageError("wclass needs --a a1,a2,a3,a4")
        return build(WClass(_floats(args.a)))
    if name == "ghz-class":
        if not args.a or len(_floats(args.a)) != 5:
            raise _UsageError("ghz-class needs --a delta,gamma1,gamma2,gamma3,mu")
        d, g1, g2, g3, mu = _floats(args.a)
        return build(GHZClass(d, (g1, g2, g3), mu))
    if name == "fourq":
        if args.class_index is None:
            raise _UsageError("fourq needs --class-index 1..9")
        params = _complexes(args.params) if args.params else ()
        return build(FourQubitClass(args.class_index, params))
    if name == "appendix-d":
        if args.which is None or args.a is None:
            raise _UsageError("appendix-d needs --which 1|2 and --a")
        return build(AppendixDExample(args.which, float(args.a)))
    if name == "haar":
        return haar_random(args.n, args.seed)
    raise _UsageError(f"unknown state family {name!r}")


def _optimizer(args) -> OptimizerSettings:
    return OptimizerSettings(
        grid_points_per_angle=args.grid_points,
        refine_iterations=args.refine_iterations,
        refine_tolerance=args.refine_tolerance,
    )


def _policy(args):
    if args.max_cut_size is None:
        return ALL_CUTS
    return MaxCutSize(args.max_cut_size)


def cmd_measure(args) -> int:
    state = _build_state(args)
    if args.save_state:
        save_state_json(state, args.save_state)
    settings = _optimizer(args)
    policy = _policy(args)
    measures = args.measure.split(",") if args.measure else ["ggm"]
    report = {"n_qubits": state.n_qubits}
    lines = []
    for name in measures:
        if name == "ggm":
            g = ggm(state, policy)
            report["ggm"] = {
                "value": g.value,
                "cut": list(g.argmax_cut),
                "max_schmidt_sq": g.max_schmidt_sq,
            }
            lines.append(f"ggm = {_fmt(g.value)}  "
                         f"(cut {','.join(map(str, g.argmax_cut))})")
        elif name == "lggm":
            positions = _positions(args.positions) if args.positions else (1,)
            r = lggm(state, positions, settings=settings, policy=policy)
            key = ",".join(map(str, positions))
            report[f"lggm[{key}]"] = {
                "value": r.value,
                "angles": [list(p) for p in r.optimal_angles],
                "evaluations": r.evaluations,
            }
            angles = " ".join(
                f"(theta={_fmt(t)}, phi={_fmt(f)})" for t, f in r.optimal_angles
            )
            lines.append(f"lggm[{key}] = {_fmt(r.value)}  {angles}")
        elif name == "global":
            r = global_lggm(state, args.m, settings=settings, policy=policy)
            report["global_lggm"] = {
                "value": r.best.value,
                "positions": list(r.best_positions),
                "per_positions": {
                    ",".join(map(str, k)): v.value
                    for k, v in r.per_positions.items()
                },
            }
            lines.append(
                f"global_lggm[m={args.m}] = {_fmt(r.best.value)}  "
                f"(positions {','.join(map(str, r.best_positions))})"
            )
        else:
            raise _UsageError(f"unknown measure {name!r}")
    if args.json:
        print(json.dumps(report, indent=2, default=float))
    else:
        print("\n".join(lines))
    return 0


def _campaign_columns(spec) -> list:
    if spec.conjecture:
        return ["seed_index", "class", "G", "cut", "EL1", "EL2", "EL3", "holds"]
    return ["seed_index"] + list(spec.measures)


def cmd_campaign(args) -> int:
    measures = tuple(args.measures.split(",")) if args.measures else ("G", "EL1")
    spec = campaigns.CampaignSpec(
        family=args.family,
        n_qubits=args.n,
        n_samples=args.samples,
        seed=args.seed,
        measures=measures,
        equality_tolerance=args.tol,
        conjecture=args.conjecture,
        settings=_optimizer(args),
    )
    rows = campaigns.run_campaign(spec, n_jobs=args.jobs)
    summary = campaigns.summarize(spec, rows)

    if spec.conjecture:
        header = "seed_index,G,cut,EL1,EL2,EL3,holds"
        fmt_row = lambda r: ",".join([
            str(r["seed_index"]), _fmt(r["G"]), r["cut"],
            _fmt(r["EL1"]), _fmt(r["EL2"]), _fmt(r["EL3"]), str(r["holds"]),
        ])
    else:
        cols = list(spec.measures)
        header = ",".join(["seed_index"] + cols)
        fmt_row = lambda r: ",".join(
            [str(r["seed_index"])] + [_fmt(r[c]) for c in cols])
    csv_text = header + "\n" + "\n".join(fmt_row(r) for r in rows) + "\n"
    summary_payload = {
        "family": spec.family,
        "n_qubits": spec.n_qubits,
        "n_samples": summary.n_samples,
        "seed": spec.seed,
        "equality_tolerance": summary.equality_tolerance,
        "comparisons": summary.comparisons,
        "conditional": summary.conditional,
        "conjecture_violations": summary.conjecture_violations,
    }
    if args.out:
        with open(args.out + ".csv", "w") as fh:
            fh.write(csv_text)
        with open(args.out + ".summary.json", "w") as fh:
            json.dump(summary_payload, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}.csv and {args.out}.summary.json")
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(json.dumps(summary_payload, indent=2) + "\n")
    return 0


_SPIN_COLS = ["G", "EL1", "EL12"]


def cmd_spin(args) -> int:
    if (args.lam is None) == (args.delta is None):
        raise _UsageError("provide exactly one of --lambda or --delta")
    measures = tuple(args.measures.split(",")) if args.measures else ("G", "EL1", "EL12")
    if args.model == "ising":
        if args.delta is not None:
            raise _UsageError("--delta applies to the XXZ model")
        model = spin.Ising(args.coupling, args.field if args.field else 1.0)
    elif args.model == "xxz":
        model = spin.XXZ(args.coupling, args.anisotropy,
                         args.field if args.field is not None else 0.0)
    else:
        raise _UsageError(f"unknown model {args.model!r}")
    spec = spin.SpinModelSpec(model, args.n)
    parameter = "lambda" if args.lam is not None else "delta"
    grid = _grid(args.lam if args.lam is not None else args.delta)
    result = spin.sweep(
        spec, parameter, grid, measures=measures,
        cut_policy=MaxCutSize(args.max_cut_size or 2),
        optimizer=OptimizerSettings(
            grid_points_per_angle=args.grid_points,
            refine_iterations=args.refine_iterations,
            refine_tolerance=args.refine_tolerance,
        ),
        lanczos=spin.LanczosSettings(
            max_iterations=args.lanczos_iterations,
            residual_tolerance=args.lanczos_tolerance,
            seed=args.seed,
        ),
        n_jobs=args.jobs,
    )
    lines = ["param,energy,G,EL1,EL12,dG,dEL1,dEL12"]
    npts = grid.size
    for i in range(npts):
        row = [_fmt(grid[i]), _fmt(result.energies[i])]
        for c in _SPIN_COLS:
            row.append(_fmt(result.series[c][i]) if c in result.series else "nan")
        for c in _SPIN_COLS:
            if c in result.derivatives and 1 <= i <= npts - 2:
                row.append(_fmt(result.derivatives[c][i - 1]))
            else:
                row.append("nan")
        lines.append(",".join(row))
    csv_text = "\n".join(lines) + "\n"

    report = {"model": args.model, "n_sites": args.n, "parameter": parameter,
              "extrema": []}
    kinds = ("max",) if args.model == "ising" else ("min", "cusp")
    for name in measures:
        for kind in kinds:
            try:
                where, sharp = spin.locate_extremum(result, name, kind)
            except ValueError:
                continue
            report["extrema"].append({
                "series": name, "kind": kind,
                "parameter": where, "sharpness": sharp,
            })
    if args.out:
        with open(args.out + ".csv", "w") as fh:
            fh.write(csv_text)
        with open(args.out + ".extrema.json", "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}.csv and {args.out}.extrema.json")
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(json.dumps(report, indent=2) + "\n")
    return 0


def _add_optimizer_flags(p):
    p.add_argument("--grid-points", type=int, default=24,
                   help="grid points per angle (default 24)")
    p.add_argument("--refine-iterations", type=int, default=200)
    p.add_argument("--refine-tolerance", type=float, default=1e-7)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lggm",
        description="GGM and localizable GGM of multiqubit pure states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="measures of a single state")
    p.add_argument("--state", help="family: ghz gghz w gw dicke dicke-sup "
                                   "wclass ghz-class fourq appendix-d haar")
    p.add_argument("--state-file", help="JSON state file")
    p.add_argument("--n", type=int, default=3, help="qubit count")
    p.add_argument("--k", type=int, help="Dicke excitation count")
    p.add_argument("--a", help="comma-separated family parameters")
    p.add_argument("--a1", help="gGHZ first amplitude (complex)")
    p.add_argument("--a2", help="gGHZ second amplitude (complex)")
    p.add_argument("--class-index", type=int, help="four-qubit class 1..9")
    p.add_argument("--params", help="four-qubit class parameters (complex)")
    p.add_argument("--which", type=int, help="appendix-d example 1|2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", default="ggm",
                   help="comma list from: ggm lggm global")
    p.add_argument("--positions", help="measured qubits, e.g. 1 or 1,2")
    p.add_argument("--m", type=int, default=1, help="measured count for global")
    p.add_argument("--max-cut-size", type=int, help="restrict cut policy")
    p.add_argument("--json", action="store_true")
    p.add_argument("--save-state", help="write the state as JSON")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("campaign", help="sampling campaign over a family")
    p.add_argument("--family", required=True,
                   help=f"one of: {', '.join(campaigns.FAMILIES)}")
    p.add_argument("--n", type=int, default=3, help="qubit count")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measures", help="comma list from: G EL1 EL12 EGL")
    p.add_argument("--tol", type=float, default=1e-4,
                   help="equality tolerance for comparisons")
    p.add_argument("--conjecture", action="store_true",
                   help="3-qubit conjecture columns and violation count")
    p.add_argument("--out", help="output prefix (.csv, .summary.json)")
    p.add_argument("--jobs", type=int, default=None)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("spin", help="spin-chain ground-state sweep")
    p.add_argument("--model", required=True, choices=("ising", "xxz"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", help="grid start:stop:step for "
                   "J/h (ising) or h'/J' (xxz)")
    p.add_argument("--delta", help="grid start:stop:step for the XXZ anisotropy")
    p.add_argument("--coupling", type=float, default=1.0, help="J or J'")
    p.add_argument("--field", type=float, default=None,
                   help="h (ising, default 1) or h' (xxz, default 0)")
    p.add_argument("--anisotropy", type=float, default=0.5,
                   help="XXZ Delta when sweeping lambda")
    p.add_argument("--measures", help="comma list from: G EL1 EL12")
    p.add_argument("--max-cut-size", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lanczos-iterations", type=int, default=500)
    p.add_argument("--lanczos-tolerance", type=float, default=1e-10)
    p.add_argument("--out", help="output prefix (.csv, .extrema.json)")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--grid-points", type=int, default=8,
                   help="grid points per angle (default 8 for sweeps)")
    p.add_argument("--refine-iterations", type=int, default=200)
    p.add_argument("--refine-tolerance", type=float, default=1e-7)
    p.set_defaults(func=cmd_spin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DimensionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except spin.LanczosConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
