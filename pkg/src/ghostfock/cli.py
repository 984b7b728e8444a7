"""
Command-line front end.

    ghostfock state build tmss:s=0.35
    ghostfock moments check --s 0.01 --r 0.01
    ghostfock snr scan|optimize|figure --fig 3
    ghostfock herald verify --s0 0.05 --t1 0.99 --t2 0.8 --detector PD1
    ghostfock mc run --source tmss:s=0.35 --frames 1000000 --seed 7 --mask 0011

Exit codes: 0 success, 2 parse error, 3 degenerate physics (null state,
zero-variance statistics, no transition), 4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import fock, gi_sim, moments, snr, sources, sweep
from .config import RunConfig, load_config, parse_values
from .errors import (BadParams, DegenerateHerald, DegenerateState, DegenerateStatistics, NoTransition,
                     NullStateError, TruncationOverflow)

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_VALIDATION = 0, 2, 3, 4


def _write_text(path: Path, writer) -> Path:
    with open(path, "w", newline="") as fh:
        writer(fh)
    return path


def _write_json(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _meta(cfg: RunConfig, command: str, leaked_norm: float, **extra) -> dict:
    data = {"command": command, "leaked_norm": leaked_norm,
            "config": {f.name: getattr(cfg, f.name) for f in fields(cfg)}}
    data.update(extra)
    return data


def _variant(cfg: RunConfig) -> snr.SnrModelVariant:
    if cfg.snr_variant != snr.DEFAULT_TAG:
        raise BadParams("only the shared_bucket_difference model is available from the command line")
    return snr.SnrModelVariant(cfg.snr_variant)


def cmd_state_build(args, cfg: RunConfig) -> int:
    desc = sources.parse_source(args.descriptor)
    if desc.kind in ("subtract", "add", "coherent"):
        params = sources.CoherentOpParams.from_r({"subtract": 0.0, "add": 1.0}.get(desc.kind, desc.r))
        state, weight = sources.apply_coherent_op(sources.build_tmss(desc.s, cfg.cutoff), params,
                                                  leak_tolerance=cfg.leak_tolerance)
    else:
        state, weight = desc.build(cfg.cutoff), None
    summary = {"source": str(desc), "cutoff": state.cutoff, "norm_sq": state.norm_sq,
               "mean_n_signal": fock.number_expectation(state, 0),
               "mean_n_idler": fock.number_expectation(state, 1),
               "success_weight": weight, "leaked_norm": state.leaked_norm}
    path = Path(args.json) if args.json else cfg.out / "state.json"
    path.write_text(state.to_json() + "\n")
    for key, val in summary.items():
        print(f"{key}: {val}")
    print(f"state written to {path}")
    return EXIT_OK


def cmd_moments_check(args, cfg: RunConfig) -> int:
    s_vals = parse_values(args.s) if args.s else cfg.s_values
    r_vals = parse_values(args.r) if args.r else cfg.r_values
    comps = [moments.compare_moments(s, r, cfg.cutoff) for s in s_vals for r in r_vals]
    print(f"{'s':>8} {'r':>8} {'entry':>5} {'analytic':>22} {'numeric':>22} {'rel_dev':>10}")
    for c in comps:
        ana, num = c.analytic.as_dict(), c.numeric.as_dict()
        for key in moments.MOMENT_ORDERS:
            print(f"{c.s:8.4g} {c.r:8.4g} {key:>5} {ana[key]:22.15g} {num[key]:22.15g} {c.rel_dev[key]:10.2e}")
    worst = max(c.max_rel_dev for c in comps)
    print(f"max relative deviation: {worst:.3e} (threshold {comps[0].threshold:g})")
    rows = [(c.s, c.r, c.analytic, "analytic") for c in comps] + [(c.s, c.r, c.numeric, "numeric") for c in comps]
    _write_text(cfg.out / "moments.csv", lambda fh: moments.write_moments_csv(fh, rows))
    leak = max(moments.operated_tmss(c.s, c.r, cfg.cutoff).leaked_norm for c in comps)
    _write_json(cfg.out / "moments_meta.json", _meta(cfg, "moments check", leak, max_rel_dev=worst))
    return EXIT_OK if all(c.ok for c in comps) else EXIT_VALIDATION


def cmd_snr_scan(args, cfg: RunConfig) -> int:
    variant = _variant(cfg)
    s_vals = parse_values(args.s) if args.s else cfg.s_values
    r_vals = parse_values(args.r) if args.r else cfg.r_values
    rows = []
    for s in s_vals:
        for r in r_vals:
            est = snr.snr_from_moments(moments.analytic_moments(s, r), variant)
            rows.append((s, r, est))
            print(f"s={s:<10.6g} r={r:<10.6g} snr={est.value:.12g}")
    _write_text(cfg.out / "snr_scan.csv", lambda fh: snr.write_snr_csv(fh, rows))
    _write_json(cfg.out / "snr_scan_meta.json", _meta(cfg, "snr scan", 0.0))
    return EXIT_OK


def cmd_snr_optimize(args, cfg: RunConfig) -> int:
    variant = _variant(cfg)
    s_vals = parse_values(args.s) if args.s else cfg.s_values
    branch = sweep.optimum_branch(s_vals, variant, args.tol)
    for rec in branch.records:
        print(f"s={rec.s:<10.6g} r*={rec.r_star:<14.10g} snr*={rec.snr_star:.12g} {rec.boundary_flag}")
    if branch.s_crit is not None:
        print(f"s_crit = {branch.s_crit:.6f} (published estimate ~{sweep.PUBLISHED_S_CRIT})")
    _write_text(cfg.out / "ridge.csv", branch.write_csv)
    _write_json(cfg.out / "ridge_meta.json", _meta(cfg, "snr optimize", 0.0, s_crit=branch.s_crit, tol=args.tol))
    return EXIT_OK


def cmd_snr_figure(args, cfg: RunConfig) -> int:
    variant = _variant(cfg)
    tables = sweep.figure_data(args.fig, variant)
    for name, table in tables.items():
        path = _write_text(cfg.out / f"{name}.csv", table.write_csv)
        print(f"{name}: {len(table.rows)} rows -> {path}")
    leak = sources.build_tmss(0.75, cfg.cutoff).leaked_norm if args.fig == "3" else 0.0
    _write_json(cfg.out / f"fig{args.fig}_meta.json", _meta(cfg, "snr figure", leak, fig=args.fig))
    return EXIT_OK


def cmd_herald_verify(args, cfg: RunConfig) -> int:
    spec = sources.HeraldSpec(args.s0, args.t1, args.t2, args.detector)
    state = sources.parse_source(args.input).build(cfg.cutoff)
    res = sources.simulate_herald_circuit(state, spec, args.ancilla_cutoff, cfg.fock)
    p = res.target_params
    print(f"(t, r) = ({p.t:.5f}, {p.r:.5f})")
    print(f"success probability = {res.success_probability:.10g}")
    print(f"fidelity to target = {res.fidelity_to_target:.10f} (threshold {args.threshold})")
    row = {"s0": args.s0, "t1": args.t1, "t2": args.t2, "detector": spec.detector.value, "input": args.input,
           "t": p.t, "r": p.r, "success_probability": res.success_probability,
           "fidelity": res.fidelity_to_target}

    def write(fh):
        fh.write(",".join(row) + "\n")
        fh.write(",".join(format(v, ".17g") if isinstance(v, float) else str(v) for v in row.values()) + "\n")

    _write_text(cfg.out / "herald.csv", write)
    _write_json(cfg.out / "herald_meta.json",
                _meta(cfg, "herald verify", res.conditional_state.leaked_norm, threshold=args.threshold))
    return EXIT_OK if res.fidelity_to_target >= args.threshold else EXIT_VALIDATION


def cmd_mc_run(args, cfg: RunConfig) -> int:
    mask = gi_sim.ObjectMask.from_pattern(args.mask)
    image = gi_sim.run_ghost_imaging(args.source, mask, cfg.frames, cfg.seed, cfg.cutoff)
    for j, (inside, cov) in enumerate(zip(mask.pixels, image.covariance)):
        print(f"pixel {j} {'in ' if inside else 'out'} cov={cov:.8g}")
    print(f"contrast = {image.contrast:.8g}")
    _write_text(cfg.out / "ghost_image.csv", image.write_csv)
    _write_text(cfg.out / "run_metadata.json", image.write_metadata)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    d = RunConfig()
    fmt = argparse.ArgumentDefaultsHelpFormatter
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value configuration file")
    common.add_argument("--cutoff", type=int, help=f"Fock cutoff per mode (default {d.cutoff})")
    common.add_argument("--buffer", type=int, help=f"extra photons kept while applying unitaries (default {d.buffer})")
    common.add_argument("--leak-tolerance", type=float, dest="leak_tolerance",
                        help=f"maximum probability allowed to leak past the cutoff (default {d.leak_tolerance})")
    common.add_argument("--output-dir", dest="output_dir", help=f"directory for output files (default {d.output_dir})")

    parser = _Parser(prog="ghostfock", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    state = groups.add_parser("state").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = state.add_parser("build", parents=[common], formatter_class=fmt, help="build a source state")
    p.add_argument("descriptor", help="e.g. tmss:s=0.35, coherent:s=0.01,r=0.01, subtract:s=0.2, add:s=0.2, bell")
    p.add_argument("--json", help="path of the serialized state (default OUTPUT_DIR/state.json)")
    p.set_defaults(func=cmd_state_build)

    mom = groups.add_parser("moments").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = mom.add_parser("check", parents=[common], formatter_class=fmt, help="closed-form vs Fock-sum moments")
    p.add_argument("--s", help=f"squeezing values, 'a,b,c' or 'lo:hi:n' (default {d.s_range})")
    p.add_argument("--r", help=f"operation r values (default {d.r_range})")
    p.set_defaults(func=cmd_moments_check)

    snr_grp = groups.add_parser("snr").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = snr_grp.add_parser("scan", parents=[common], formatter_class=fmt, help="SNR on an (s, r) grid")
    p.add_argument("--s", help=f"squeezing values (default {d.s_range})")
    p.add_argument("--r", help=f"r values (default {d.r_range})")
    p.add_argument("--snr-variant", dest="snr_variant", help=f"estimator model (default {d.snr_variant})")
    p.set_defaults(func=cmd_snr_scan)
    p = snr_grp.add_parser("optimize", parents=[common], formatter_class=fmt, help="optimal r for each s")
    p.add_argument("--s", help=f"squeezing values (default {d.s_range})")
    p.add_argument("--tol", type=float, default=1e-10, help="golden-section tolerance on r")
    p.add_argument("--snr-variant", dest="snr_variant", help=f"estimator model (default {d.snr_variant})")
    p.set_defaults(func=cmd_snr_optimize)
    p = snr_grp.add_parser("figure", parents=[common], formatter_class=fmt, help="figure data tables")
    p.add_argument("--fig", required=True, choices=["2a", "2b", "3"])
    p.add_argument("--snr-variant", dest="snr_variant", help=f"estimator model (default {d.snr_variant})")
    p.set_defaults(func=cmd_snr_figure)

    her = groups.add_parser("herald").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = her.add_parser("verify", parents=[common], formatter_class=fmt, help="exact circuit vs target operation")
    p.add_argument("--s0", type=float, required=True, help="squeezing of the heralding amplifier")
    p.add_argument("--t1", type=float, required=True, help="BS1 transmissivity")
    p.add_argument("--t2", type=float, required=True, help="BS2 transmissivity")
    p.add_argument("--detector", choices=["PD1", "PD2"], required=True)
    p.add_argument("--input", default="tmss:s=0.1", help="input source descriptor")
    p.add_argument("--threshold", type=float, default=0.995, help="minimum fidelity for exit code 0")
    p.add_argument("--ancilla-cutoff", type=int, default=8, dest="ancilla_cutoff")
    p.set_defaults(func=cmd_herald_verify)

    mc = groups.add_parser("mc").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = mc.add_parser("run", parents=[common], formatter_class=fmt, help="Monte-Carlo ghost imaging")
    p.add_argument("--source", required=True, help="source descriptor")
    p.add_argument("--frames", type=int, help=f"number of frames (default {d.frames})")
    p.add_argument("--seed", type=int, help=f"random seed (default {d.seed})")
    p.add_argument("--mask", required=True, help="object pattern, e.g. 0011 (1 = transmitting)")
    p.set_defaults(func=cmd_mc_run)
    return parser


_CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"s_range", "r_range"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        flags = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS}
        cfg = load_config(args.config, flags)
        return args.func(args, cfg)
    except BadParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NullStateError, DegenerateState, DegenerateStatistics, DegenerateHerald, NoTransition) as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except TruncationOverflow as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
