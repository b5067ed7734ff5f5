"""Command-line front end.

Subcommands: compute (classical permanents), quantum (the overlap
protocol end-to-end), resources (circuit accounting table), advantage
(Q(N) CSV, optional ensemble case frequencies), generate (random matrix
files).  Exit codes: 0 ok, 1 input parse failure, 2 dimension cap, 3
invalid time step.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

from . import __version__
from .analysis import (
    advantage_classify,
    advantage_domain_ratio,
    gaussian_norm_statistic,
    resource_table,
    total_error_bound,
)
from .classical import (
    PermanentEstimate,
    permanent_gapp,
    permanent_glynn,
    permanent_glynn_kan,
    permanent_gurvits,
    permanent_naive,
    permanent_ryser,
)
from .decomposition import (
    ProtocolConfig,
    glynn_kan_operator_expectation,
    richardson_extrapolate,
    run_protocol,
    select_dt,
)
from .errors import DimensionTooLargeError, DtOutOfRangeError, InvalidInputError
from .matrices import SquareMatrix, gaussian_ensemble, load_matrix, save_matrix
from .simulator import exact_overlap_evaluator, hoeffding_shots, shot_overlap_evaluator

_EXIT_OK = 0
_EXIT_PARSE = 1
_EXIT_CAP = 2
_EXIT_DT = 3

_METHODS = {
    "naive": permanent_naive,
    "ryser": permanent_ryser,
    "glynn": permanent_glynn,
    "glynn_kan": permanent_glynn_kan,
    "gapp": permanent_gapp,
    "operator": glynn_kan_operator_expectation,
}


def _estimate_payload(est: PermanentEstimate) -> dict:
    return {
        "value": [est.value.real, est.value.imag],
        "method": est.method,
        "error_bound": est.error_bound,
        "samples_used": est.samples_used,
        "wall_terms": est.wall_terms,
    }


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload))
        return
    for key, value in payload.items():
        print(f"{key:24s} {value}")


def _write_manifest(args, outputs: list[str], config: dict | None = None) -> None:
    path = getattr(args, "manifest", None)
    if not path:
        return
    manifest = {
        "command": args.command,
        "argv": sys.argv[1:] if sys.argv[0].endswith(("isingperm", "cli.py")) else None,
        "input_path": getattr(args, "input", None),
        "config": config or {},
        "outputs": outputs,
        "versions": f"isingperm {__version__}",
        "seed": getattr(args, "seed", None),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _cmd_compute(args) -> int:
    matrix = load_matrix(args.input)
    if args.method == "gurvits":
        est = permanent_gurvits(matrix, samples=args.samples, seed=args.seed)
    else:
        est = _METHODS[args.method](matrix)
    payload = _estimate_payload(est)
    if est.extra and args.method in ("gapp", "gurvits"):
        payload["extra"] = {k: v for k, v in est.extra.items()}
    _emit(payload, args.format)
    _write_manifest(args, outputs=[])
    return _EXIT_OK


def _cmd_quantum(args) -> int:
    matrix = load_matrix(args.input)
    selection = select_dt(matrix)
    dt = selection.chosen if args.dt == "auto" else float(args.dt)
    cfg = ProtocolConfig(
        dt=dt,
        mode="hadamard_shots" if args.mode == "shots" else "exact_overlap",
        shots_per_overlap=args.shots,
        richardson_levels=args.richardson,
        seed=args.seed,
        halve_by_time_reversal=not args.no_halve,
        allow_dt_override=args.force,
    )
    if cfg.mode == "hadamard_shots":
        evaluator = shot_overlap_evaluator(cfg.shots_per_overlap, cfg.seed)
        eps_ht = math.sqrt(2.0 * math.log(2.0 / 0.05) / cfg.shots_per_overlap)
    else:
        evaluator = exact_overlap_evaluator()
        eps_ht = 0.0
    if args.richardson > 0:
        est = richardson_extrapolate(matrix, cfg, args.richardson, evaluator)
    else:
        est = run_protocol(matrix, cfg, evaluator)
    try:
        budget = total_error_bound(matrix, dt, eps_ht=eps_ht, eps_fd=1.0)
        budget_payload = {
            "fd_bound": budget.fd_bound,
            "ht_bound": budget.ht_bound,
            "total_bound": budget.total_bound,
            "simplified_bound": budget.simplified_bound,
            "gurvits_bound": budget.gurvits_bound,
            "case_label": budget.case_label,
        }
    except DtOutOfRangeError:
        if not args.force:
            raise
        budget_payload = None  # bounds are not valid outside the window

    payload = {
        "estimate": _estimate_payload(est),
        "dt": dt,
        "windows": {
            "exponential_error": asdict(selection.exp_window),
            "gurvits_beating": asdict(selection.gurvits_window),
        },
        "error_budget": budget_payload,
    }
    if args.verbose:
        overlaps = est.extra.get("overlaps", [])
        payload["overlaps"] = [[complex(o).real, complex(o).imag] for o in overlaps]
        payload["per_level"] = [
            [v.real, v.imag] for v in est.extra.get("per_level", [])
        ]
    _emit(payload, args.format)
    _write_manifest(args, outputs=[], config={
        "dt": dt, "mode": cfg.mode, "shots_per_overlap": cfg.shots_per_overlap,
        "richardson_levels": cfg.richardson_levels, "seed": cfg.seed,
        "halve_by_time_reversal": cfg.halve_by_time_reversal,
    })
    return _EXIT_OK


def _cmd_resources(args) -> int:
    report = resource_table(args.n, is_complex=args.complex)
    if args.format == "json":
        print(json.dumps(asdict(report)))
    elif args.format == "csv":
        fields = ["n", "is_complex", "overlaps", "qubits", "cnots_formula",
                  "depth_formula", "cnots_measured", "depth_measured",
                  "total_samples_order"]
        print(",".join(fields))
        print(",".join(str(getattr(report, f)) for f in fields))
        print(f"# note: {report.discrepancy_note}")
    else:
        for key, value in asdict(report).items():
            print(f"{key:22s} {value}")
    _write_manifest(args, outputs=[])
    return _EXIT_OK


def _cmd_advantage(args) -> int:
    rows = advantage_domain_ratio(args.n_min, args.n_max)
    header = ["N", "Q"]
    freq_rows = None
    if args.ensemble:
        trials, seed = (int(v) for v in args.ensemble)
        labels = ("case1", "case2", "case3", "no_advantage")
        header += [f"frac_{lab}" for lab in labels]
        freq_rows = []
        for n, _ in rows:
            counts = dict.fromkeys(labels, 0)
            for m in gaussian_ensemble(n, trials, seed + n):
                counts[advantage_classify(m)[0]] += 1
            freq_rows.append([counts[lab] / trials for lab in labels])
    print(",".join(header))
    for i, (n, q) in enumerate(rows):
        cells = [str(n), f"{q:.10f}"]
        if freq_rows is not None:
            cells += [f"{f:.6f}" for f in freq_rows[i]]
        print(",".join(cells))
    _write_manifest(args, outputs=[])
    return _EXIT_OK


def _cmd_generate(args) -> int:
    matrix = gaussian_ensemble(args.n, 1, args.seed, kind=args.kind)[0]
    if args.scale != 1.0:
        matrix = SquareMatrix(args.scale * matrix.array)
    save_matrix(matrix, args.output)
    print(args.output)
    _write_manifest(args, outputs=[args.output])
    return _EXIT_OK


def _cmd_norms_report(args) -> int:
    stats = gaussian_norm_statistic(args.n, args.trials, args.seed)
    _emit(asdict(stats), args.format)
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingperm",
        description="Compute and estimate matrix permanents classically and "
                    "via the simulated overlap protocol.",
    )
    parser.add_argument("--version", action="version", version=f"isingperm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--manifest", help="write a reproducibility manifest to this path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap (the current implementation is single-threaded)")

    p = sub.add_parser("compute", help="classical permanent of a matrix file")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--method", required=True, choices=sorted(_METHODS) + ["gurvits"])
    p.add_argument("--samples", type=int, default=100_000, help="gurvits sample count")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("quantum", help="run the overlap protocol end-to-end")
    p.add_argument("--input", required=True)
    p.add_argument("--dt", default="auto", help='time step, or "auto" for the selected window')
    p.add_argument("--mode", choices=("exact", "shots"), default="exact")
    p.add_argument("--shots", type=int, default=hoeffding_shots(0.05, 0.05))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--richardson", type=int, default=0)
    p.add_argument("--no-halve", action="store_true",
                   help="keep all terms instead of time-reversal halving")
    p.add_argument("--force", action="store_true",
                   help="allow dt outside the convergence bound")
    p.add_argument("--verbose", action="store_true", help="include per-term overlaps")
    common(p)
    p.set_defaults(func=_cmd_quantum)

    p = sub.add_parser("resources", help="protocol resource table for dimension N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--complex", action="store_true")
    p.add_argument("--format", choices=("json", "csv", "table"), default="csv")
    p.add_argument("--manifest")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_resources)

    p = sub.add_parser("advantage", help="Q(N) advantage-domain ratio CSV")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--ensemble", nargs=2, metavar=("TRIALS", "SEED"),
                   help="append Gaussian-ensemble case-label frequencies")
    p.add_argument("--manifest")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_advantage)

    p = sub.add_parser("generate", help="write a random Gaussian matrix file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("real-standard-normal", "complex-standard-normal"),
                   default="real-standard-normal")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--output", required=True)
    p.add_argument("--manifest")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("gaussian-stat", help="Monte-Carlo Ising-norm statistic")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_norms_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DtOutOfRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DT
    except DimensionTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CAP
    except (InvalidInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
