"""Command line entry points.

Subcommands cover the full pipeline: publish the question catalog, run the
survey service, export and analyze collected answers, estimate welfare
parameters per respondent, summarize the estimates, and simulate synthetic
populations for validation runs.
"""

from __future__ import annotations

import argparse
import csv
import sys
import zlib
from pathlib import Path

import numpy as np

from . import records
from .analysis import (
    acceptance_table,
    equality_test,
    load_responses_csv,
    load_sessions_csv,
    pairwise_equality_tests,
    restricted_sample,
    text_acceptance_table,
)
from .fitting import SannConfig, fit_population
from .probit import MODEL_GINI, MODEL_NONPARAM, MODEL_UTIL, respondent_data
from .sessions import SurveyStore
from .simulator import load_population_spec, simulate_population_files
from .summaries import (
    FITS_CSV_COLUMNS,
    GRID_COLUMNS,
    fit_record,
    marginal_weight_table,
    median_weighting_profile,
    summarize,
)
from .transfers import (
    CATALOG_CSV_COLUMNS,
    build_catalog,
    catalog_csv_rows,
    catalog_to_json,
)

_MODELS = (MODEL_UTIL, MODEL_GINI, MODEL_NONPARAM)


def _print_table(headers, rows, out=None):
    out = out or sys.stdout
    cells = [tuple(str(c) for c in row) for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line, file=out)
    print("-" * len(line), file=out)
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)), file=out)


# -- subcommands -------------------------------------------------------------

def cmd_catalog(args) -> int:
    wrote_any = False
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CATALOG_CSV_COLUMNS)
            writer.writerows(catalog_csv_rows())
        print(f"wrote {args.csv}")
        wrote_any = True
    if args.json:
        Path(args.json).write_text(catalog_to_json(), encoding="utf-8")
        print(f"wrote {args.json}")
        wrote_any = True
    if not wrote_any:
        writer = csv.writer(sys.stdout)
        writer.writerow(CATALOG_CSV_COLUMNS)
        writer.writerows(catalog_csv_rows())
    return 0


def _open_store(log_path) -> SurveyStore:
    path = Path(log_path)
    if path.exists():
        return SurveyStore.replay(path)
    store = SurveyStore(log_path=path)
    return store


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = _open_store(args.log)
    app = create_app(store, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _write_csv(path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def cmd_export(args) -> int:
    store = SurveyStore.replay(args.log)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    responses = out_dir / "responses.csv"
    sessions = out_dir / "sessions.csv"
    _write_csv(responses, records.RESPONSES_CSV_COLUMNS,
               store.export_responses_rows())
    _write_csv(sessions, records.SESSIONS_CSV_COLUMNS,
               store.export_sessions_rows())
    print(f"wrote {responses}")
    print(f"wrote {sessions}")
    return 0


def cmd_simulate(args) -> int:
    population = load_population_spec(args.spec)
    responses, sessions = simulate_population_files(
        population, args.out_dir, replicates=args.replicates,
        noise_on_tests=args.noise_on_tests)
    print(f"wrote {responses}")
    print(f"wrote {sessions}")
    return 0


def cmd_analyze(args) -> int:
    responses = load_responses_csv(args.responses)
    sessions = load_sessions_csv(args.sessions) if args.sessions else None
    if args.restricted:
        if sessions is None:
            raise SystemExit("--restricted needs --sessions")
        responses, sessions = restricted_sample(responses, sessions)

    if args.text:
        if sessions is None:
            raise SystemExit("--text needs --sessions")
        table = text_acceptance_table(sessions,
                                      clarity_filter=args.clarity_filter)
        _print_table(
            ("statement", "N", "accepted", "rejected", "neutral"),
            [(r.label, r.n, f"{r.accepted:.1f}", f"{r.rejected:.1f}",
              f"{r.neutral:.1f}") for r in table.rows])
    else:
        table = acceptance_table(responses, sessions,
                                 stratify_by=args.by)
        _print_table(
            ("stratum", "transfers", "N", "accepted", "rejected",
             "neutral"),
            [(r.group, r.label, r.n, f"{r.accepted:.1f}",
              f"{r.rejected:.1f}", f"{r.neutral:.1f}")
             for r in table.rows])
    for warning in table.warnings:
        print(f"note: {warning}")

    if args.chi_square:
        if args.by is None or args.text:
            raise SystemExit("--chi-square needs --by on the numeric table")
        overall = equality_test(responses, args.by, sessions)
        print(f"equality across strata: X2 = {overall.statistic:.4f}, "
              f"df = {overall.df}, p = {overall.p_value:.4g}")
        for pair, res in sorted(
                pairwise_equality_tests(responses, args.by,
                                        sessions).items()):
            print(f"  {pair[0]} vs {pair[1]}: X2 = {res.statistic:.4f}, "
                  f"p = {res.p_value:.4g}")
    return 0


def _session_seed(base: int, session_id: str) -> int:
    token = zlib.crc32(session_id.encode("utf-8"))
    return int(np.random.SeedSequence([base, token])
               .generate_state(1, np.uint64)[0])


def cmd_estimate(args) -> int:
    responses = load_responses_csv(args.responses)
    if args.restricted:
        if not args.sessions:
            raise SystemExit("--restricted needs --sessions")
        responses, _ = restricted_sample(responses,
                                         load_sessions_csv(args.sessions))
    index = {q.id: q for q in build_catalog()}
    grouped = {}
    for row in responses:
        grouped.setdefault(row["session_id"], []).append(row)
    datasets = [respondent_data(sid, rows, index,
                                seed=_session_seed(args.seed, sid))
                for sid, rows in sorted(grouped.items())]
    datasets = [d for d in datasets if not d.degenerate()]
    if not datasets:
        raise SystemExit("no usable sessions in the input")

    models = _MODELS if args.model == "all" else (args.model,)
    optimizers = (("bfgs", "sann") if args.optimizer == "both"
                  else (args.optimizer,))
    sann_config = SannConfig(iterations=args.sann_iterations)
    fits = []
    for model in models:
        for optimizer in optimizers:
            fits.extend(fit_population(
                datasets, model, optimizer=optimizer,
                alpha_free=args.alpha_free, alpha_value=args.alpha,
                sann_config=sann_config))
    fits.sort(key=lambda f: (f.session_id, f.model, f.optimizer))
    _write_csv(args.out, FITS_CSV_COLUMNS, [fit_record(f) for f in fits])
    converged = sum(f.converged for f in fits)
    print(f"wrote {args.out} ({len(fits)} fits, {converged} converged)")
    return 0


def _float_or_none(value: str):
    return float(value) if value not in ("", None) else None


def cmd_report(args) -> int:
    with open(args.fits, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise SystemExit("no fits in the input")

    numeric = ("alpha", "epsilon", "eta") + GRID_COLUMNS \
        + ("tau1", "tau2", "loglik")
    stat_rows = []
    for column in numeric:
        values = [_float_or_none(r[column]) for r in rows]
        values = [v for v in values if v is not None]
        if not values:
            continue
        s = summarize(values)
        stat_rows.append((column, s.n, f"{s.mean:.4f}", f"{s.sd:.4f}",
                          f"{s.median:.4f}", f"{s.q1:.4f}", f"{s.q3:.4f}"))
    _print_table(("parameter", "N", "mean", "sd", "median", "q1", "q3"),
                 stat_rows)

    grids = []
    for r in rows:
        values = [_float_or_none(r[c]) for c in GRID_COLUMNS]
        if all(v is not None for v in values):
            grids.append(values)
    if grids:
        profile = median_weighting_profile(grids)
        print()
        _print_table(
            ("w", "median f(w)", "q1", "q3", "gap to w^2"),
            [(f"{w:.1f}", f"{m:.4f}", f"{q1:.4f}", f"{q3:.4f}",
              f"{g:+.4f}")
             for w, m, q1, q3, g in zip(profile.abscissae, profile.median,
                                        profile.q1, profile.q3,
                                        profile.gini_gap)])
        member = profile.membership
        classes = [name for name, ok in
                   (("URL", member.in_URL), ("UR", member.in_UR),
                    ("UL", member.in_UL), ("PT", member.in_PT)) if ok]
        print("median weighting classes: "
              + (", ".join(classes) if classes else "none"))
        print()
        _print_table(("rank", "median marginal weight", "q1", "q3"),
                     [(r["rank"], f"{r['median']:.4f}", f"{r['q1']:.4f}",
                       f"{r['q3']:.4f}")
                      for r in marginal_weight_table(grids)])

    by_model = {}
    for r in rows:
        key = (r["model"], r["optimizer"])
        ok = r["converged"] == "true"
        n_ok, n_all = by_model.get(key, (0, 0))
        by_model[key] = (n_ok + ok, n_all + 1)
    print()
    _print_table(("model", "optimizer", "converged", "total"),
                 [(m, o, ok, total)
                  for (m, o), (ok, total) in sorted(by_model.items())])
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ineqpref",
        description="Income transfer survey and welfare estimation tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="write the question catalog")
    p.add_argument("--csv", help="catalog CSV output path")
    p.add_argument("--json", help="catalog JSON output path")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("serve", help="run the survey HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--log", default="survey_events.jsonl",
                   help="append-only event log (replayed when it exists)")
    p.add_argument("--static", default=None,
                   help="directory of frontend assets to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="rebuild CSV exports from an event log")
    p.add_argument("--log", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("simulate",
                       help="write synthetic survey files for a population")
    p.add_argument("--spec", required=True,
                   help="population spec JSON")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--noise-on-tests", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="acceptance tables and equality tests")
    p.add_argument("--responses", required=True)
    p.add_argument("--sessions", default=None)
    p.add_argument("--by", default=None,
                   help="stratifier: a profile field or 'block'")
    p.add_argument("--restricted", action="store_true",
                   help="keep only sessions with no test errors")
    p.add_argument("--text", action="store_true",
                   help="summarize the principle statements instead")
    p.add_argument("--clarity-filter", action="store_true")
    p.add_argument("--chi-square", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="fit welfare models per respondent")
    p.add_argument("--responses", required=True)
    p.add_argument("--sessions", default=None)
    p.add_argument("--restricted", action="store_true")
    p.add_argument("--model", choices=_MODELS + ("all",), default="all")
    p.add_argument("--optimizer", choices=("bfgs", "sann", "both"),
                   default="bfgs")
    p.add_argument("--out", required=True, help="fits CSV output path")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="clamped scale value")
    p.add_argument("--alpha-free", action="store_true",
                   help="estimate the scale instead of clamping it")
    p.add_argument("--sann-iterations", type=int,
                   default=SannConfig.iterations)
    p.add_argument("--seed", type=int, default=0,
                   help="base seed for annealing draws")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("report", help="summarize a fits CSV")
    p.add_argument("--fits", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
