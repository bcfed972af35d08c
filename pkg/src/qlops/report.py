"""Scenario orchestration, case-study arithmetic and report rendering."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from qlops.distillation import plan_factory, plans_to_csv
from qlops.error_rates import match_distance, p0_from_pL
from qlops.errors import ConfigError, DomainError, InfeasibleError, QlopsError
from qlops.metric import correlated_cycle, logical_cycle, needs_parallel_decoder, physical_qubits
from qlops.model import (
    GB,
    SUPERCONDUCTING,
    CodeSpec,
    Config,
    DecoderProfile,
    ExtraPatches,
    HardwareParams,
    Scenario,
    ScenarioResult,
    SearchRange,
)
from qlops.sec import atom_surface_sec_length, schedule_gb_sec, surface_sec_length

log = logging.getLogger(__name__)

CSV = "csv"
MARKDOWN = "md"
PLOTDATA = "plotdata"
FORMATS = (CSV, MARKDOWN, PLOTDATA)


def packaged_config() -> Path:
    """Path of the bundled reference configuration."""
    return Path(str(resources.files("qlops") / "data" / "reference.yaml"))


@dataclass(frozen=True)
class ScenarioOptions:
    """Per-evaluation knobs; all optional except the scenario name."""

    name: str = "scenario"
    patches: int = 1
    extra_patches: tuple[ExtraPatches, ...] = ()
    p_logical: float | None = None
    p0: float | None = None
    t_sec: float | None = None
    rounds_per_op: int | None = None
    factory: bool = False
    search_range: SearchRange = SearchRange()
    series: str = ""
    notes: tuple[str, ...] = field(default_factory=tuple)


def default_t_sec(platform: HardwareParams, code: CodeSpec) -> float:
    """SEC length of ``code`` on ``platform`` from the hardware model."""
    if platform.kind == SUPERCONDUCTING:
        if code.family == GB:
            raise DomainError("GB codes need a neutral-atom platform or an explicit t_sec")
        return surface_sec_length(platform)
    if code.family == GB:
        if code.layout is None:
            raise ConfigError(f"code {code.code_id} has no layout; give t_sec explicitly")
        return schedule_gb_sec(code.layout, platform).total
    return atom_surface_sec_length(platform, code.d)


def distillation_t_sec(platform: HardwareParams):
    """SEC length used by the factory's surface-code patches."""
    if platform.kind == SUPERCONDUCTING:
        return surface_sec_length(platform)
    # the factory's patches differ in distance; the largest sets the cycle
    return lambda p: atom_surface_sec_length(platform, max(p.d_X, p.d_Z, p.d_m))


def evaluate_scenario(
    platform: HardwareParams,
    code: CodeSpec,
    decoder: DecoderProfile | None,
    options: ScenarioOptions = ScenarioOptions(),
) -> ScenarioResult:
    """Compute t_SEC, p0, QLOPS, density and optionally a factory plan."""
    try:
        return _evaluate(platform, code, decoder, options)
    except QlopsError as exc:
        raise type(exc)(f"scenario {options.name}: {exc}") from exc


def _evaluate(platform, code, decoder, options):
    notes = list(options.notes)
    t_sec = options.t_sec if options.t_sec is not None else default_t_sec(platform, code)
    k = code.k * options.patches + sum(e.count for e in options.extra_patches)
    if options.rounds_per_op is not None:
        cycle = correlated_cycle(t_sec, options.rounds_per_op)
        t_r = None
        parallel = False
    else:
        if decoder is None:
            raise ConfigError("a decoder is required unless rounds_per_op is set")
        key = code.code_id if code.code_id in decoder.entries else code.d
        t_r = decoder.reaction_time(key)
        cycle = logical_cycle(t_r, t_sec, code.d)
        parallel = needs_parallel_decoder(t_r, code.d, t_sec)
        if isinstance(key, int) and key in decoder.suspect_distances():
            pairs = ", ".join(f"d={a}" for a in decoder.monotonicity_anomalies())
            notes.append(
                f"decoder {decoder.name}: reaction times are not increasing around {pairs}; t_r at d={key} is suspect"
            )
    if cycle.boundary:
        notes.append(
            f"t_r/t_sec is an integer at working precision; alternate uses {cycle.alt_cycles} cycles"
        )
    if options.p0 is not None:
        p0 = options.p0
    elif options.p_logical is not None:
        p0 = p0_from_pL(options.p_logical, code.k, code.d)
    else:
        p0 = None
    n_phys = physical_qubits(code, options.patches, options.extra_patches)
    factory = None
    if options.factory:
        if p0 is None:
            raise ConfigError("a factory needs a target p0 (p_logical, p0 or a match)")
        if platform.surface_fit is None:
            raise InfeasibleError(f"platform {platform.name} has no sub-threshold surface-code fit")
        factory = plan_factory(
            code,
            platform.surface_fit,
            cycle,
            distillation_t_sec(platform),
            p0,
            options.search_range,
            logical_qubits=k,
            p_inject=platform.infid_1q,
        )
    return ScenarioResult(
        name=options.name,
        platform=platform.name,
        code=code.display,
        distance=code.d,
        k=k,
        t_sec=t_sec,
        t_r=t_r,
        p0=p0,
        cycles=cycle.cycles,
        qlops=k / cycle.duration,
        physical_qubits=n_phys,
        boundary=cycle.boundary,
        qlops_alt=None if cycle.alt_duration is None else k / cycle.alt_duration,
        parallel_decoder=parallel,
        factory=factory,
        series=options.series,
        notes=tuple(notes),
    )


def run_scenarios(config: Config, names: Sequence[str] | None = None, force_factory: bool = False) -> list[ScenarioResult]:
    """Evaluate scenarios in configuration order, resolving match references."""
    done: dict[str, ScenarioResult] = {}

    def run(s: Scenario, stack: tuple[str, ...] = ()) -> ScenarioResult:
        if s.name in done:
            return done[s.name]
        if s.name in stack:
            raise ConfigError(f"scenario {s.name}: circular match reference")
        platform = config.platforms[s.platform]
        p0 = s.target_p0
        if s.match is not None:
            ref = run(config.scenario(s.match), stack + (s.name,))
            if ref.p0 is None:
                raise ConfigError(f"scenario {s.name}: matched scenario {s.match} has no p0")
            p0 = ref.p0
        if s.code is not None:
            code = config.codes[s.code]
        else:
            if platform.surface_fit is None:
                raise InfeasibleError(f"scenario {s.name}: platform {platform.name} has no sub-threshold fit")
            fit = platform.surface_fit
            try:
                d = match_distance(fit, p0, (fit.d_min, fit.d_max))
            except QlopsError as exc:
                raise type(exc)(f"scenario {s.name}: {exc}") from exc
            code = CodeSpec.surface(d)
        options = ScenarioOptions(
            name=s.name,
            patches=s.patches,
            extra_patches=s.extra_patches,
            p_logical=s.p_logical if s.code is not None else None,
            p0=None if s.code is not None else p0,
            t_sec=s.t_sec,
            rounds_per_op=s.rounds_per_op,
            factory=s.factory or force_factory,
            search_range=config.distillation_search,
            series=s.series or s.platform,
        )
        decoder = config.decoders[s.decoder] if s.decoder is not None else None
        result = evaluate_scenario(platform, code, decoder, options)
        done[s.name] = result
        return result

    selected = config.scenarios if names is None else [config.scenario(n) for n in names]
    return [run(s) for s in selected]


# ---------------------------------------------------------------------------
# case studies


@dataclass(frozen=True)
class CaseStudy:
    """An application run: device QLOPS, measured runtime and Toffoli count."""

    q: float
    runtime: float
    toffoli_count: float
    clifford_per_toffoli: float = 10

    def __post_init__(self) -> None:
        if not (self.q > 0 and self.runtime > 0 and self.toffoli_count >= 0 and self.clifford_per_toffoli > 0):
            raise DomainError("case-study quantities must be positive")


def runtime_lower_bound(cs: CaseStudy) -> float:
    """Seconds needed if every logical operation slot ran a useful gate."""
    return cs.clifford_per_toffoli * cs.toffoli_count / cs.q


def underestimation_ratio(cs: CaseStudy) -> float:
    return cs.runtime / runtime_lower_bound(cs)


def cross_platform_ratio(a: CaseStudy, b: CaseStudy, normalize_by_toffoli: bool = False) -> float:
    """(Q_a t_a) / (Q_b t_b), optionally per Toffoli gate."""
    ratio = (a.q * a.runtime) / (b.q * b.runtime)
    if normalize_by_toffoli:
        ratio /= a.toffoli_count / b.toffoli_count
    return ratio


@dataclass(frozen=True)
class CaseStudyResult:
    name: str
    study: CaseStudy
    scenario: ScenarioResult
    reported_density: float | None = None
    alt_qubits: int | None = None
    alt_label: str = ""

    @property
    def lower_bound(self) -> float:
        return runtime_lower_bound(self.study)

    @property
    def underestimation(self) -> float:
        return underestimation_ratio(self.study)

    @property
    def alt_density(self) -> float | None:
        return None if self.alt_qubits is None else self.study.q / self.alt_qubits


def run_case_studies(config: Config) -> list[CaseStudyResult]:
    names = sorted({cs.scenario for cs in config.case_studies.values()}, key=[s.name for s in config.scenarios].index)
    results = {r.name: r for r in run_scenarios(config, names)}
    out = []
    for cs in config.case_studies.values():
        res = results[cs.scenario]
        study = CaseStudy(res.qlops, cs.runtime, cs.toffoli_count, cs.clifford_per_toffoli)
        out.append(CaseStudyResult(cs.name, study, res, cs.reported_density, cs.alt_qubits, cs.alt_label))
    return out


# ---------------------------------------------------------------------------
# rendering


def fmt(x: float | None) -> str:
    """Six significant figures; empty for missing values."""
    return "" if x is None else f"{x:.6g}"


CSV_HEADER = [
    "scenario", "code", "p0", "distance", "physical_qubits", "qlops", "density",
    "t_sec", "cycles", "boundary", "qlops_alt",
]


def _csv(results: Sequence[ScenarioResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        writer.writerow([
            r.name, r.code, fmt(r.p0), r.distance, r.physical_qubits, fmt(r.qlops), fmt(r.density),
            fmt(r.t_sec), r.cycles, int(r.boundary), fmt(r.qlops_alt),
        ])
    return buf.getvalue()


def _markdown(results: Sequence[ScenarioResult]) -> str:
    lines = [
        "| Scenario | Code | p0 | Distance | Physical qubits | QLOPS | QLOPS density |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in results:
        q = fmt(r.qlops)
        dens = fmt(r.density)
        if r.qlops_alt is not None:
            q += f" (alt {fmt(r.qlops_alt)})"
            dens += f" (alt {fmt(r.density_alt)})"
        lines.append(f"| {r.name} | {r.code} | {fmt(r.p0)} | {r.distance} | {r.physical_qubits} | {q} | {dens} |")
    plans = [r for r in results if r.factory is not None]
    if plans:
        lines += [
            "",
            "| Scenario | Protocol | p_out | Qubits per unit | Cycles | Units | Total qubits |",
            "|---|---|---|---|---|---|---|",
        ]
        for r in plans:
            f = r.factory
            lines.append(
                f"| {r.name} | {f.protocol.label} | {f.p_out:.5g} | {f.unit_qubits} | "
                f"{f.expected_cycles:.6g} | {f.units} | {f.total_qubits} |"
            )
    noted = [r for r in results if r.notes]
    if noted:
        lines += ["", "Notes:", ""]
        for r in noted:
            for n in r.notes:
                lines.append(f"- {r.name}: {n}")
    return "\n".join(lines) + "\n"


def _plotdata(results: Sequence[ScenarioResult]) -> dict[str, str]:
    series: dict[str, list[ScenarioResult]] = {}
    for r in results:
        if r.p0 is not None:
            series.setdefault(r.series or r.platform, []).append(r)
    files = {}
    for label, rows in series.items():
        rows = sorted(rows, key=lambda r: (r.p0, r.name))
        body = "p0,density,scenario\n" + "".join(f"{fmt(r.p0)},{fmt(r.density)},{r.name}\n" for r in rows)
        files[f"plot_{label}.csv"] = body
    return files


def emit_report(results: Sequence[ScenarioResult], format: str) -> dict[str, str]:
    """Render results; returns a mapping of file name to file content."""
    if not results:
        raise DomainError("no results to report")
    if format == CSV:
        return {"report.csv": _csv(results)}
    if format == MARKDOWN:
        return {"report.md": _markdown(results)}
    if format == PLOTDATA:
        return _plotdata(results)
    raise DomainError(f"unknown format {format!r}; expected one of {FORMATS}")


def read_report_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def factory_table(rows: Sequence[ScenarioResult]) -> str:
    """Factory plans as CSV rows keyed by scenario."""
    return plans_to_csv([(r.name, r.factory) for r in rows if r.factory is not None])
