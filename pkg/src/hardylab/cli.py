"""Command-line front end: norm scans, lemma verifications, witness searches,
the density demo, and a reproduce command emitting one CSV per acceptance
criterion.

Exit codes: 0 all pass flags true, 2 at least one Inconclusive verdict,
1 failure/error, 64 usage error, 73 unwritable output path.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import acceptance
from . import experiments as ex
from . import functions as fn
from . import norms
from .geometry import parse_domain

CSV_HEADER = ["experiment_id", "lemma_id", "case_label", "p", "grid_param",
              "value", "stderr", "verdict", "rate", "r2", "passed", "seed"]
CSV_VERSION = "hardylab-csv v1"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_CANTCREAT = 73


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Flat, serializable run configuration; flags override file values."""

    command: str = ""
    domain: str = ""
    function: str = ""
    p: float = None
    q: float = None
    grid: str = ""
    count: int = None
    seed: int = None
    out: str = ""

    def to_text(self):
        lines = []
        for key, val in vars(self).items():
            if val not in (None, ""):
                lines.append(f"{key}={fmt(val) if isinstance(val, float) else val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            kv[key.strip()] = val.strip()
        kwargs = {}
        for key, val in kv.items():
            if key in ("p", "q"):
                kwargs[key] = float(val)
            elif key in ("count", "seed"):
                kwargs[key] = int(val)
            elif key in ("command", "domain", "function", "grid", "out"):
                kwargs[key] = val
        return cls(**kwargs)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    """17 significant digits for every float, or the overflow literal."""
    if isinstance(x, float):
        if np.isnan(x):
            return "nan"
        if np.isinf(x) or abs(x) > 1e300:
            return "overflow"
        return f"{x:.17g}"
    return str(x)


def write_csv(rows, path):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(f"# {CSV_VERSION}\n")
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow([fmt(row.get(col, "")) for col in CSV_HEADER])
    except OSError as exc:
        raise SystemExit(EXIT_CANTCREAT) from exc


def emit_plot_data(sc, verdict, path):
    """Grid parameter, value, stderr plus model-fit columns, plain text."""
    x = sc.grid.ks().astype(float) * np.log(2.0)
    if verdict.klass == "PowerDivergent" and np.isfinite(verdict.rate):
        with np.errstate(invalid="ignore", divide="ignore"):
            logv = np.log(np.maximum(sc.values, 1e-300))
        b = np.nanmean(logv - verdict.rate * x)
        fit = np.exp(verdict.rate * x + b)
        model = "power"
    elif np.isfinite(verdict.rate):
        b = np.nanmean(sc.values - verdict.rate * x)
        fit = verdict.rate * x + b
        model = "log-linear"
    else:
        fit = np.full_like(x, np.nan)
        model = "none"
    try:
        with open(path, "w") as fh:
            fh.write(f"# {sc.describe()}\n")
            fh.write(f"# verdict={verdict.klass} rate={fmt(verdict.rate)} "
                     f"r2={fmt(verdict.r2)} model={model}\n")
            fh.write("# grid_param value stderr model_fit\n")
            for g, v, s, m in zip(sc.grid.values(), sc.values, sc.stderrs, fit):
                fh.write(f"{fmt(float(g))} {fmt(float(v))} {fmt(float(s))} "
                         f"{fmt(float(m))}\n")
    except OSError as exc:
        raise SystemExit(EXIT_CANTCREAT) from exc


def _load_config_file(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def build_parser():
    ap = _Parser(prog="hardylab", description=__doc__)
    ap.add_argument("--config", help="flat key=value config file; flags override")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="CSV output path")
        p.add_argument("--plot-data", default=None, help="plot data output path")
        p.add_argument("--count", type=int, default=None, help="MC node budget")

    p = sub.add_parser("norm", help="Hardy seminorm of a function")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--domain", default="ball:n=2")

    p = sub.add_parser("scan", help="boundary-approach scan plus verdict")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--domain", default="ball:n=2")
    p.add_argument("--surface", choices=["sphere", "level"], default="sphere")
    p.add_argument("--kmin", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("local", help="cap-restricted scan on the ball")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--center", required=True, help="cap center, e.g. 1,0")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--complement", action="store_true")

    p = sub.add_parser("levi-check", help="quadratic lower bound for Re Q")
    common(p)
    p.add_argument("--domain", default="ball:n=2")
    p.add_argument("--beta", type=float, default=None,
                   help="default: min Levi eigenvalue / 3")
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--pairs", type=int, default=10_000)

    p = sub.add_parser("lemma", help="run one lemma verification report")
    common(p)
    p.add_argument("--id", required=True,
                   choices=["2.2", "2.5", "3.1", "4.2", "4.3", "5.1"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=float, default=1.5)
    p.add_argument("--domain", default="ellipsoid:a=1,2")
    p.add_argument("--lam", default="rescaled",
                   choices=["identity", "rescaled", "warped"])

    p = sub.add_parser("witness", help="total-unboundedness witness search")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--targets", type=int, default=4)
    p.add_argument("--bound", type=float, default=1e3)

    p = sub.add_parser("density-demo", help="metric-small, witness-large demo")
    common(p)
    p.add_argument("--q", type=float, default=1.5)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--j", type=int, default=4)
    p.add_argument("--base", default="poly:z1^2+3")

    p = sub.add_parser("metric", help="intersection-space metric of two functions")
    common(p)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--q", type=float, default=1.5)
    p.add_argument("--terms", type=int, default=20)

    p = sub.add_parser("reproduce", help="full acceptance suite, one CSV each")
    common(p)
    p.add_argument("--criteria", default=None,
                   help="comma list, e.g. 1,2,5 (default: all)")
    p.add_argument("--seeds", default=None, help="comma list (default: 7,11,13)")
    return ap


def _seed(args, file_cfg):
    if args.seed is not None:
        return args.seed
    if "seed" in file_cfg:
        return int(file_cfg["seed"])
    return int(os.environ.get("HARDY_LAB_SEED", "7"))


def _quad_config(args, file_cfg):
    cfg = norms.QuadConfig(seed=_seed(args, file_cfg))
    if args.count is not None:
        from dataclasses import replace
        cfg = replace(cfg, mc_count=args.count, level_count=args.count)
    return cfg


def _scan_rows(name, sc, verdict, seed, extra_pass=None):
    rows = []
    passed = (verdict.klass != "Inconclusive") if extra_pass is None else extra_pass
    for x, v, s, flag in zip(sc.grid.values(), sc.values, sc.stderrs, sc.flags):
        rows.append({
            "experiment_id": name, "lemma_id": "", "case_label": flag or "point",
            "p": sc.p, "grid_param": float(x), "value": float(v),
            "stderr": float(s), "verdict": verdict.klass, "rate": verdict.rate,
            "r2": verdict.r2, "passed": passed, "seed": seed,
        })
    return rows


def _report_exit(reports):
    if all(r.passed for r in reports):
        return EXIT_OK
    for r in reports:
        for c in r.cases:
            if c.measured == "Inconclusive" and not c.passed:
                return EXIT_INCONCLUSIVE
    return EXIT_ERROR


def run(argv):
    """Entry point used by both the console script and the tests."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_USAGE
    file_cfg = _load_config_file(args.config) if args.config else {}
    try:
        return _dispatch(args, file_cfg)
    except SystemExit as exc:
        return exc.code
    except (norms.NormError, fn.FunctionError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _dispatch(args, file_cfg):
    cfg = _quad_config(args, file_cfg)
    seed = cfg.seed

    if args.command == "norm":
        fspec = fn.parse_function(args.f)
        try:
            value = norms.hardy_seminorm(fspec, args.p, cfg=cfg)
        except norms.NotInSpaceError as exc:
            print(f"not in H^p: {exc}")
            return EXIT_ERROR
        print(f"||f||_{args.p:g} (grid sup) = {fmt(value)}")
        if args.out:
            write_csv([{"experiment_id": "norm", "case_label": fn.describe(fspec),
                        "p": args.p, "value": value, "passed": True,
                        "seed": seed}], args.out)
        return EXIT_OK

    if args.command == "scan":
        fspec = fn.parse_function(args.f)
        domain = parse_domain(args.domain)
        if args.surface == "level":
            grid = norms.ApproachGrid("level", args.kmin or 0, args.kmax or 12)
            sc = norms.level_scan_domain(fspec, args.p, domain, grid, cfg)
        else:
            surface = norms.SphereSurface(fn.ambient_dim(fspec))
            default = norms._default_grid(fspec, surface, cfg)
            grid = norms.ApproachGrid("radial", args.kmin or default.k_min,
                                      args.kmax or default.k_max)
            sc = norms.scan(fspec, args.p, grid, surface, cfg)
        v = norms.classify(sc)
        print(f"{sc.describe()}: {v.klass} rate={fmt(v.rate)} r2={fmt(v.r2)}")
        if args.out:
            write_csv(_scan_rows("scan", sc, v, seed), args.out)
        if args.plot_data:
            emit_plot_data(sc, v, args.plot_data)
        return EXIT_OK if v.klass != "Inconclusive" else EXIT_INCONCLUSIVE

    if args.command == "local":
        fspec = fn.parse_function(args.f)
        center = tuple(complex(c) for c in args.center.split(","))
        sc = norms.local_scan_ball(fspec, args.p, center, args.radius, cfg=cfg,
                                   complement=args.complement)
        v = norms.classify(sc)
        print(f"{sc.describe()}: {v.klass} rate={fmt(v.rate)} r2={fmt(v.r2)}")
        if args.out:
            write_csv(_scan_rows("local", sc, v, seed), args.out)
        if args.plot_data:
            emit_plot_data(sc, v, args.plot_data)
        return EXIT_OK if v.klass != "Inconclusive" else EXIT_INCONCLUSIVE

    if args.command == "levi-check":
        from .geometry import check_levi_estimate, levi_form_min_eigenvalue
        domain = parse_domain(args.domain)
        beta = args.beta
        if beta is None:
            beta = levi_form_min_eigenvalue(domain, seed=seed) / 3.0
        rep = check_levi_estimate(domain, beta, args.eta, count=args.pairs,
                                  seed=seed)
        status = "no violations" if rep.ok else f"{len(rep.violations)} violations"
        print(f"beta={fmt(beta)} eta={fmt(args.eta)} samples={rep.sample_count}: "
              f"{status}, worst margin {fmt(rep.worst_margin)}")
        if args.out:
            write_csv([{"experiment_id": "levi-check", "case_label": status,
                        "value": rep.worst_margin, "passed": rep.ok,
                        "seed": seed}], args.out)
        return EXIT_OK if rep.ok else EXIT_ERROR

    if args.command == "lemma":
        reports = _run_lemma(args, cfg)
        rows = []
        for rep in reports:
            print("\n".join(rep.summary_lines()))
            rows += acceptance._report_rows(0, rep, seed)
        if args.out:
            write_csv(rows, args.out)
        return _report_exit(reports)

    if args.command == "witness":
        fspec = fn.parse_function(args.f)
        singular = fn.singular_points(fspec)
        if singular:
            targets = [np.asarray(s, dtype=complex) for s in singular][:args.targets]
        else:
            from .geometry import boundary_dense_sequence
            domain = parse_domain(f"ball:n={fn.ambient_dim(fspec)}")
            targets = boundary_dense_sequence(domain, args.targets, seed=seed)
        rep = ex.totally_unbounded_witness(fspec, targets, args.bound)
        print("\n".join(rep.summary_lines()))
        if args.out:
            write_csv([{"experiment_id": "witness", "case_label": "success",
                        "value": e.value, "passed": e.success, "seed": seed}
                       for e in rep.entries], args.out)
        return EXIT_OK if rep.passed else EXIT_ERROR

    if args.command == "density-demo":
        base = fn.parse_function(args.base)
        res = ex.density_demo(base, q=args.q, delta=args.delta, J=args.j, cfg=cfg)
        print("\n".join(res.summary_lines()))
        if args.out:
            rows = [{"experiment_id": "density-demo", "case_label": "metric",
                     "value": res.metric.value, "stderr": res.metric.uncertainty,
                     "passed": res.metric.value < args.delta, "seed": seed}]
            rows += [{"experiment_id": "density-demo", "case_label": "witness",
                      "value": e.value, "passed": e.success, "seed": seed}
                     for e in res.witnesses.entries]
            write_csv(rows, args.out)
        return EXIT_OK if res.passed else EXIT_ERROR

    if args.command == "metric":
        fspec = fn.parse_function(args.f)
        gspec = fn.parse_function(args.g)
        mspec = norms.IntersectionMetricSpec(q=args.q, J=args.terms)
        try:
            res = norms.intersection_metric(fspec, gspec, mspec, cfg=cfg)
        except norms.NotInSpaceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
        print(f"d(f, g) = {fmt(res.value)} (+- {fmt(res.uncertainty)})")
        if args.out:
            write_csv([{"experiment_id": "metric", "case_label": f"p={p:g}",
                        "p": p, "value": nrm, "verdict": kl, "passed": True,
                        "seed": seed} for p, nrm, kl in res.terms], args.out)
        return EXIT_OK

    if args.command == "reproduce":
        seeds = (tuple(int(s) for s in args.seeds.split(","))
                 if args.seeds else acceptance.DEFAULT_SEEDS)
        criteria = (tuple(int(c) for c in args.criteria.split(","))
                    if args.criteria else None)
        outdir = args.out or "acceptance_out"
        os.makedirs(outdir, exist_ok=True)
        results = acceptance.run_all(seeds=seeds, criteria=criteria)
        by_cid = {}
        for res in results:
            by_cid.setdefault(res.cid, []).append(res)
        all_ok = True
        for cid, group in sorted(by_cid.items()):
            rows = [row for res in group for row in res.rows]
            write_csv(rows, os.path.join(outdir, f"criterion_{cid:02d}.csv"))
            ok = all(res.passed for res in group)
            all_ok = all_ok and ok
            print(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'} "
                  f"(seeds {', '.join(str(res.seed) for res in group)})")
        print(f"acceptance suite: {'PASS' if all_ok else 'FAIL'}; "
              f"CSV written to {outdir}/")
        return EXIT_OK if all_ok else EXIT_ERROR

    raise UsageError(f"unknown command {args.command!r}")


def _run_lemma(args, cfg):
    if args.id == "2.2":
        return [ex.verify_lemma_2_2(n=args.n, q=args.q, cfg=cfg)]
    if args.id == "2.5":
        rep = ex.verify_local_bound(n=args.n, cfg=cfg)

        class _Shim:  # LocalBoundReport exposes no .cases; adapt for CSV/exit
            lemma_id = "2.5"
            passed = rep.passed
            cases = [ex.LemmaCase("complement bound", float(args.n), "In",
                                  "In" if rep.passed else "Out",
                                  rep.complement_verdict, rep.passed)]
            summary_lines = rep.summary_lines
        return [_Shim()]
    if args.id == "3.1":
        return [ex.verify_lemma_3_1(lam_kind=args.lam, cfg=cfg)]
    if args.id == "4.2":
        return [ex.verify_lemma_4_2(domain=parse_domain(args.domain), cfg=cfg)]
    if args.id == "4.3":
        return [ex.verify_lemma_4_3(domain=parse_domain(args.domain), q=args.q,
                                    cfg=cfg)]
    if args.id == "5.1":
        return [ex.verify_lemma_5_1(n=max(args.n, 3), cfg=cfg)]
    raise UsageError(f"unknown lemma id {args.id}")


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
