"""Command-line entry point: experiments and verification driven by one
JSON config document.

Exit codes: 0 success, 1 failed verification suite, 2 config error,
3 capacity error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import (
    ExperimentConfig,
    apply_cli_overrides,
    load_config,
    parse_mode,
    required_sieve_limit,
    validate_config,
)
from .csvio import config_hash, write_csv
from .errors import CapacityError, ConfigError, PrimlatError
from .lattice import SUM_OF_SQUARES, AVERAGE_CSV_HEADER, grid_average, sweep
from .sieve import build_sieve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primlat",
        description="Averages of completely multiplicative functions over lattice "
        "and primitive lattice points: experiments, limit constants, verification.",
    )
    parser.add_argument("command", nargs="?", default=None, help="override the config command (avg, predict, verify, ergodic, multi, gauss)")
    parser.add_argument("--config", default=None, help="path to the JSON experiment config")
    parser.add_argument("--out", default=None, help="output CSV path (overrides config and PRIMLAT_OUT)")
    parser.add_argument("--threads", type=int, default=None, help="worker count for grid partitioning")
    parser.add_argument("--exact", action="store_true", help="rational/integer accumulation where supported")
    parser.add_argument("--cutoff", type=int, default=None, help="prime and series cutoff for constants")
    parser.add_argument("--seed", type=int, default=None, help="seed override for seeded value rules")
    parser.add_argument("--version", action="version", version=f"primlat {__version__}")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        apply_cli_overrides(cfg, args)
        return _dispatch(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except PrimlatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _resolve_config(args) -> ExperimentConfig:
    if args.config is None:
        if args.command == "verify":
            return validate_config({"command": "verify"})
        raise ConfigError("--config is required (except for the bare 'verify' command)")
    cfg = load_config(args.config)
    if args.command is not None:
        if args.command != cfg.command:
            raw = dict(cfg.raw)
            raw["command"] = args.command
            cfg = validate_config(raw)
    return cfg


def _meta(cfg: ExperimentConfig) -> dict:
    return {
        "tool": f"primlat {__version__}",
        "config_sha256": config_hash(cfg.raw),
        "threads": cfg.threads,
    }


def _dispatch(cfg: ExperimentConfig) -> int:
    if cfg.command == "verify":
        return _run_verify(cfg)
    limit = required_sieve_limit(cfg)
    tables = build_sieve(limit)
    if cfg.command == "avg":
        return _run_avg(cfg, tables)
    if cfg.command == "predict":
        return _run_predict(cfg, tables)
    if cfg.command == "ergodic":
        return _run_ergodic(cfg, tables)
    if cfg.command == "multi":
        return _run_multi(cfg, tables)
    if cfg.command == "gauss":
        return _run_gauss(cfg, tables)
    raise ConfigError(f"unhandled command {cfg.command!r}")


def _out_path(cfg: ExperimentConfig, default: str) -> str:
    return cfg.out or default


def _run_verify(cfg: ExperimentConfig) -> int:
    from .verify import run_suite

    results = run_suite()
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        if not r.passed:
            failed += 1
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def _run_avg(cfg: ExperimentConfig, tables) -> int:
    from .lattice import truncated_primitive_transform

    section = cfg.raw["avg"]
    spec = cfg.specs[section["spec"]]
    form_name = section.get("form", "sum_of_squares")
    form = SUM_OF_SQUARES if form_name == "sum_of_squares" else cfg.forms[form_name]
    mode = parse_mode(section.get("mode"))
    ns = [int(x) for x in section["Ns"]]
    depth = section.get("D")
    reports = sweep(spec, form, ns, mode, tables, threads=cfg.threads, exact=cfg.exact)
    if depth is not None:
        # attach the truncated-transform residual demo at the requested depth
        for rep in reports:
            d_used = min(int(depth), rep.N)
            res = truncated_primitive_transform(
                spec, form, rep.N, d_used, tables, weights="idealized", threads=cfg.threads
            )
            rep.meta["D"] = d_used
            rep.meta["residual_bound"] = res.meta["bound_trunc_term"] + res.meta["bound_grid_term"]
            rep.meta["residual_observed"] = res.residual
    rows = [r.csv_row() for r in reports]
    path = _out_path(cfg, "avg.csv")
    write_csv(path, AVERAGE_CSV_HEADER, rows, {**_meta(cfg), "spec": spec.name, "form": form.label(), "mode": mode.label()})
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def _run_predict(cfg: ExperimentConfig, tables) -> int:
    from . import predict

    section = cfg.raw["predict"]
    names = section.get("specs") or list(cfg.specs)
    ks = [int(k) for k in section.get("k", [1, 2])]
    r = int(section.get("r", 2))
    rows = []
    for name in names:
        spec = cfg.specs[name]
        for k in ks:
            ep = predict.euler_product(spec, k, r, tables, cfg.prime_cutoff)
            ds = predict.dirichlet_series(spec, k, r, tables, cfg.series_cutoff)
            pc = predict.primitive_constant(spec, k, r, tables, cfg.prime_cutoff)
            fc = predict.full_constant(spec, k, r, tables, cfg.series_cutoff)
            rows.append(ep.csv_row(f"{name}.euler_product.k{k}.s{r}"))
            rows.append(ds.csv_row(f"{name}.dirichlet_series.k{k}.s{r}"))
            rows.append(pc.csv_row(f"{name}.primitive_constant.k{k}.r{r}"))
            rows.append(fc.csv_row(f"{name}.full_constant.k{k}.r{r}"))
        if not spec.is_complex:
            rows.append(
                predict.coprime_two_squares_constant(spec, tables, cfg.prime_cutoff).csv_row(
                    f"{name}.coprime_two_squares"
                )
            )
            rows.append(
                predict.full_two_squares_constant(spec, tables, cfg.prime_cutoff).csv_row(
                    f"{name}.full_two_squares"
                )
            )
    path = _out_path(cfg, "predict.csv")
    from .predict import PREDICTION_CSV_HEADER

    write_csv(path, PREDICTION_CSV_HEADER, rows, _meta(cfg))
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def _run_ergodic(cfg: ExperimentConfig, tables) -> int:
    from . import ergodic

    section = cfg.raw["ergodic"]
    sys_block = section["system"]
    if sys_block["kind"] == "circle":
        system = ergodic.CircleRotation(float(sys_block.get("alpha", ergodic.SQRT2_MINUS_1)))
    else:
        system = ergodic.CyclicRotation(int(sys_block["q"]))
    fn_block = section["fn"]
    if "table" in fn_block:
        fn = ergodic.CyclicTable(tuple(fn_block["table"]))
    else:
        coeffs = {int(j): complex(c[0], c[1]) if isinstance(c, list) else complex(c) for j, c in fn_block["coeffs"].items()}
        fn = ergodic.TrigPolynomial.from_dict(coeffs)
    x0 = section.get("x0", 0)
    mode = parse_mode(section.get("mode"))
    rows = []
    for n in section["Ns"]:
        rep = ergodic.omega_orbit_average(system, fn, x0, int(n), mode, tables, threads=cfg.threads)
        rows.append(ergodic.ergodic_csv_row(rep))
    path = _out_path(cfg, "ergodic.csv")
    write_csv(path, ergodic.ERGODIC_CSV_HEADER, rows, _meta(cfg))
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def _run_multi(cfg: ExperimentConfig, tables) -> int:
    from . import multilinear
    from .csvio import format_number

    section = cfg.raw["multi"]
    specs = tuple(cfg.specs[name] for name in section["specs"])
    forms = tuple(cfg.linear_forms[name] for name in section["forms"])
    pairs = tuple(
        (cfg.linear_forms[a], cfg.linear_forms[b]) for a, b in section.get("pairs", [])
    )
    r = int(section.get("r", 2))
    prob = multilinear.MultilinearProblem(specs=specs, forms=forms, r=r, conjugate_pairs=pairs)
    mode = parse_mode(section.get("mode"))
    ns = [int(x) for x in section["Ns"]]
    rows = []
    if section.get("probe", False):
        for n, avg, gap in multilinear.convergence_probe(prob, ns, mode, tables, threads=cfg.threads):
            rows.append([str(n), format_number(avg), format_number(gap)])
        header = ["N", "average", "cauchy_gap"]
    else:
        for n in ns:
            if pairs:
                rep = multilinear.conjugate_paired_average(prob, n, mode, tables, threads=cfg.threads)
            else:
                rep = multilinear.multilinear_average(prob, n, mode, tables, threads=cfg.threads)
            rows.append(rep.csv_row())
        header = AVERAGE_CSV_HEADER
    path = _out_path(cfg, "multi.csv")
    write_csv(path, header, rows, _meta(cfg))
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def _run_gauss(cfg: ExperimentConfig, tables) -> int:
    from . import gaussian, predict

    section = cfg.raw["gauss"]
    gspec = cfg.gaussian_specs[section["spec"]]
    mode = parse_mode(section.get("mode"))
    rows = []
    for n in section["Ns"]:
        n = int(n)
        mask = mode.mask(n, 2)
        grid = gaussian.value_grid(gspec, n, tables, mask)
        rep = grid_average(grid, n, 2, mode, tables, threads=cfg.threads)
        rep.meta["spec"] = gspec.name
        rows.append(rep.csv_row())
    path = _out_path(cfg, "gauss.csv")
    factor = predict.gaussian_coprime_factor(gspec, tables, min(cfg.prime_cutoff, tables.limit))
    meta = {**_meta(cfg), "coprime_conversion_factor": f"{factor.value:.17g}"}
    write_csv(path, AVERAGE_CSV_HEADER, rows, meta)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
