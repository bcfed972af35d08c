"""Command-line entry point: ``qlops eval|fit|factory|case-study``.

Exit codes: 0 success, 1 configuration or validation error, 2 infeasible
scenario. Log verbosity comes from the QLOPS_LOG_LEVEL environment variable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import yaml

from qlops.distillation import plans_to_csv
from qlops.error_rates import fit_from_samples, load_samples
from qlops.errors import InfeasibleError, QlopsError, UnreachableError
from qlops.model import load_config
from qlops.report import (
    FORMATS,
    MARKDOWN,
    cross_platform_ratio,
    emit_report,
    packaged_config,
    run_case_studies,
    run_scenarios,
)

log = logging.getLogger("qlops")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


def _write(files: dict[str, str], out: Path | None) -> None:
    if out is None:
        for name, body in files.items():
            if len(files) > 1:
                sys.stdout.write(f"# {name}\n")
            sys.stdout.write(body)
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, body in files.items():
        (out / name).write_text(body, encoding="utf-8")
        log.info("wrote %s", out / name)


def cmd_eval(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    results = run_scenarios(config, args.scenario or None)
    if not results:
        log.warning("configuration has no scenarios")
        return EXIT_OK
    _write(emit_report(results, args.format), args.out)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    fit = fit_from_samples(load_samples(args.samples))
    snippet = {
        "platforms": {
            args.platform: {
                "surface_fit": {
                    "intercept": float(f"{fit.intercept:.6g}"),
                    "slope": float(f"{fit.slope:.6g}"),
                    "d_min": fit.d_min,
                    "d_max": fit.d_max,
                }
            }
        }
    }
    sys.stdout.write(yaml.safe_dump(snippet, sort_keys=False))
    sys.stdout.write("# ln residuals: " + ", ".join(f"{r:.3g}" for r in fit.residuals) + "\n")
    return EXIT_OK


def cmd_factory(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.code not in config.codes:
        raise QlopsError(f"unknown code {args.code!r}")
    direct = {s.name for s in config.scenarios if s.code == args.code}
    names = [s.name for s in config.scenarios if s.name in direct or s.match in direct]
    if not names:
        log.warning("no scenario uses code %s", args.code)
        return EXIT_OK
    results = run_scenarios(config, names, force_factory=True)
    if args.format == MARKDOWN:
        text = emit_report(results, MARKDOWN)["report.md"]
        sys.stdout.write(text[text.index("| Scenario | Protocol"):] if "| Scenario | Protocol" in text else text)
    else:
        sys.stdout.write(plans_to_csv([(r.name, r.factory) for r in results]))
    return EXIT_OK


def cmd_case_study(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    studies = run_case_studies(config)
    by_name = {c.name: c for c in studies}
    lines = [
        "| Case study | QLOPS | Density | Runtime (s) | 10 n_T / Q (s) | Underestimation |",
        "|---|---|---|---|---|---|",
    ]
    for c in studies:
        lines.append(
            f"| {c.name} | {c.study.q:.6g} | {c.scenario.density:.6g} | {c.study.runtime:.6g} | "
            f"{c.lower_bound:.6g} | {c.underestimation:.6g} |"
        )
    for c in studies:
        if c.reported_density is not None:
            lines.append("")
            lines.append(
                f"{c.name}: reported density {c.reported_density:.6g}; computed {c.scenario.density:.6g} "
                f"over {c.scenario.physical_qubits} code-block qubits"
            )
            if c.alt_density is not None:
                lines.append(f"{c.name}: alternative reading ({c.alt_label}, {c.alt_qubits} qubits) gives {c.alt_density:.6g}")
    for a, b in config.comparisons:
        sa, sb = by_name[a].study, by_name[b].study
        lines.append("")
        lines.append(f"{a} / {b}: Q t ratio {cross_platform_ratio(sa, sb):.6g}")
        lines.append(f"{a} / {b}: per-Toffoli ratio {cross_platform_ratio(sa, sb, True):.6g}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlops", description="QLOPS resource estimation")
    sub = parser.add_subparsers(dest="command", required=True)
    default_config = str(packaged_config())

    p = sub.add_parser("eval", help="evaluate scenarios and emit a report")
    p.add_argument("--config", default=default_config)
    p.add_argument("--scenario", action="append", help="scenario name (repeatable)")
    p.add_argument("--format", choices=FORMATS, default=MARKDOWN)
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fit", help="fit ln p0 against distance from memory results")
    p.add_argument("--samples", required=True, type=Path, help="CSV with columns d, p_L, k")
    p.add_argument("--platform", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("factory", help="size distillation factories for one code")
    p.add_argument("--config", default=default_config)
    p.add_argument("--code", required=True)
    p.add_argument("--format", choices=("csv", MARKDOWN), default=MARKDOWN)
    p.set_defaults(func=cmd_factory)

    p = sub.add_parser("case-study", help="application case-study ratios")
    p.add_argument("--config", default=default_config)
    p.set_defaults(func=cmd_case_study)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("QLOPS_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleError, UnreachableError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except QlopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
