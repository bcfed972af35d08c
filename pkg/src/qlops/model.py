"""Domain types and validated configuration loading.

Internal units: durations in seconds, lengths in micrometers, rates in hertz.
Configuration files may write durations as strings with a unit suffix
(``"0.86us"``, ``"2.677ms"``, ``"1.5s"``); bare numbers are seconds.
"""

from __future__ import annotations

import json
import math
import re
from decimal import Decimal, InvalidOperation
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Mapping, Sequence

import yaml

from qlops.errors import ConfigError, ValidationError

if TYPE_CHECKING:
    from qlops.distillation import FactoryPlan

SUPERCONDUCTING = "superconducting"
NEUTRAL_ATOM = "neutral_atom"
PLATFORM_KINDS = (SUPERCONDUCTING, NEUTRAL_ATOM)

SURFACE = "surface"
GB = "gb"
CODE_FAMILIES = (SURFACE, GB)

DECODER_MODES = ("Z", "ALL")

# scaled in decimal so "0.86us" and 8.6e-7 give the same float
_DURATION_SCALE = {
    "s": Decimal(1),
    "ms": Decimal("1e-3"),
    "us": Decimal("1e-6"),
    "µs": Decimal("1e-6"),
    "ns": Decimal("1e-9"),
    "min": Decimal(60),
    "h": Decimal(3600),
    "d": Decimal(86400),
}
_DURATION_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-zµ]*)\s*$")

Coord = tuple[int, int]


def parse_duration(value: Any, where: str = "duration") -> float:
    """Convert a number (seconds) or a suffixed string to seconds."""
    if isinstance(value, bool):
        raise ValidationError(f"{where}: expected a duration, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        match = _DURATION_RE.match(value)
        if match:
            number, unit = match.groups()
            unit = unit or "s"
            if unit in _DURATION_SCALE:
                try:
                    return float(Decimal(number) * _DURATION_SCALE[unit])
                except InvalidOperation:
                    pass
    raise ValidationError(f"{where}: cannot parse duration {value!r}")


def _check_probability(value: float, where: str) -> None:
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ValidationError(f"{where}: probability out of range ({value})")


def _check_time(value: float, where: str) -> None:
    if not value >= 0.0:
        raise ValidationError(f"{where}: time must be non-negative ({value})")


@dataclass(frozen=True)
class FitModel:
    """Log-linear model ln p0(d) = intercept + slope * d.

    ``d_min`` and ``d_max`` bound the distances the model is declared valid
    for; ``residuals`` holds the ln-domain residuals of the fit, if any.
    """

    intercept: float
    slope: float
    d_min: int = 1
    d_max: int = 1000
    residuals: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.d_min < 1 or self.d_max < self.d_min:
            raise ValidationError(f"fit range [{self.d_min}, {self.d_max}] is empty")
        for d in (self.d_min, self.d_max):
            if self.intercept + self.slope * d >= 0.0:
                raise ValidationError(
                    f"fit predicts p0 >= 1 at d={d}; p0 must lie in (0, 1)"
                )

    @property
    def sub_threshold(self) -> bool:
        return self.slope < 0.0


@dataclass(frozen=True)
class HardwareParams:
    """Timing and error parameters of one physical platform."""

    name: str
    kind: str
    coherence_time: float
    gate_time_1q: float
    gate_time_2q: float
    infid_1q: float
    infid_2q: float
    readout_time: float
    readout_error: float
    prep_time: float
    prep_error: float
    movement_error: float | None = None
    unintended_error: float | None = None
    movement_accel: float | None = None
    lattice_spacing: float | None = None
    surface_fit: FitModel | None = None
    label: str = ""

    def __post_init__(self) -> None:
        where = f"platforms.{self.name}"
        if self.kind not in PLATFORM_KINDS:
            raise ValidationError(f"{where}.kind: unknown platform kind {self.kind!r}")
        for attr in ("coherence_time", "gate_time_1q", "gate_time_2q", "readout_time", "prep_time"):
            _check_time(getattr(self, attr), f"{where}.{attr}")
        for attr in ("infid_1q", "infid_2q", "readout_error", "prep_error"):
            _check_probability(getattr(self, attr), f"{where}.{attr}")
        atom_only = ("movement_error", "unintended_error", "movement_accel", "lattice_spacing")
        if self.kind == SUPERCONDUCTING:
            present = [a for a in atom_only if getattr(self, a) is not None]
            if present:
                raise ValidationError(
                    f"{where}: neutral-atom-only field(s) {', '.join(present)} "
                    "given for a superconducting platform"
                )
        else:
            missing = [a for a in atom_only if getattr(self, a) is None]
            if missing:
                raise ValidationError(
                    f"{where}: neutral-atom platform is missing {', '.join(missing)}"
                )
            _check_probability(self.movement_error, f"{where}.movement_error")
            _check_probability(self.unintended_error, f"{where}.unintended_error")
            if not self.movement_accel > 0:
                raise ValidationError(f"{where}.movement_accel: must be positive")
            if not self.lattice_spacing >= 0:
                raise ValidationError(f"{where}.lattice_spacing: must be non-negative")


@dataclass(frozen=True)
class AncillaCheck:
    """One stabilizer ancilla: its home site and the ordered data offsets it visits."""

    ancilla_id: str
    home: Coord
    offsets: tuple[Coord, ...]


@dataclass(frozen=True)
class Rect:
    """Inclusive grid rectangle rows [row0, row1] x cols [col0, col1]."""

    row0: int
    col0: int
    row1: int
    col1: int

    def contains(self, pos: Coord) -> bool:
        return self.row0 <= pos[0] <= self.row1 and self.col0 <= pos[1] <= self.col1

    def intersects(self, other: Rect) -> bool:
        return not (
            self.row1 < other.row0
            or other.row1 < self.row0
            or self.col1 < other.col0
            or other.col1 < self.col0
        )


@dataclass(frozen=True)
class GridLayout:
    """Placement of a code on a 2D atom grid.

    With ``periodic`` set, offsets wrap modulo ``grid_dims`` (a torus layout).
    """

    grid_dims: Coord
    data_positions: tuple[Coord, ...]
    x_checks: tuple[AncillaCheck, ...]
    z_checks: tuple[AncillaCheck, ...]
    candidate_parking_regions: tuple[Rect, ...]
    periodic: bool = False

    def __post_init__(self) -> None:
        data = set(self.data_positions)
        if len(data) != len(self.data_positions):
            raise ValidationError("layout: duplicate data positions")
        for name, group in (("x_checks", self.x_checks), ("z_checks", self.z_checks)):
            weights = {len(c.offsets) for c in group}
            if len(weights) > 1:
                raise ValidationError(f"layout.{name}: checks in one group must share a weight")
            for check in group:
                for off in check.offsets:
                    target = self.target(check.home, off)
                    if target not in data:
                        raise ValidationError(
                            f"layout.{name}.{check.ancilla_id}: offset {off} from "
                            f"{check.home} does not land on a data position"
                        )
        box = self.data_region
        for i, rect in enumerate(self.candidate_parking_regions):
            if rect.intersects(box):
                raise ValidationError(
                    f"layout.candidate_parking_regions[{i}]: overlaps the data region"
                )

    @property
    def data_region(self) -> Rect:
        rows = [p[0] for p in self.data_positions]
        cols = [p[1] for p in self.data_positions]
        return Rect(min(rows), min(cols), max(rows), max(cols))

    def target(self, home: Coord, offset: Coord) -> Coord:
        r, c = home[0] + offset[0], home[1] + offset[1]
        if self.periodic:
            r %= self.grid_dims[0]
            c %= self.grid_dims[1]
        return (r, c)


@dataclass(frozen=True)
class CodeSpec:
    """An [[n, k, d]] code block."""

    code_id: str
    n: int
    k: int
    d: int
    family: str
    layout: GridLayout | None = None
    label: str = ""

    def __post_init__(self) -> None:
        where = f"codes.{self.code_id}"
        if self.family not in CODE_FAMILIES:
            raise ValidationError(f"{where}.family: unknown family {self.family!r}")
        if not (self.n >= self.k >= 1):
            raise ValidationError(f"{where}: requires n >= k >= 1")
        if self.d < 1:
            raise ValidationError(f"{where}: requires d >= 1")
        if self.family == SURFACE and self.n != self.d * self.d:
            raise ValidationError(f"{where}: surface patch requires n = d^2")
        if self.family == SURFACE and self.layout is not None:
            raise ValidationError(f"{where}: layouts are only supported for gb codes")

    @property
    def qubits_per_block(self) -> int:
        if self.family == SURFACE:
            return 2 * self.d * self.d - 1
        return 2 * self.n

    @property
    def display(self) -> str:
        return self.label or f"[[{self.n},{self.k},{self.d}]]"

    @classmethod
    def surface(cls, d: int, code_id: str | None = None) -> CodeSpec:
        return cls(code_id or f"surface-d{d}", d * d, 1, d, SURFACE)


@dataclass(frozen=True)
class DecoderProfile:
    """Reaction times keyed by code id (str) or distance (int)."""

    name: str
    mode: str
    entries: Mapping[str | int, float]

    def __post_init__(self) -> None:
        where = f"decoders.{self.name}"
        if self.mode not in DECODER_MODES:
            raise ValidationError(f"{where}.mode: expected one of {DECODER_MODES}")
        for key, t_r in self.entries.items():
            if not t_r > 0:
                raise ValidationError(f"{where}.entries.{key}: reaction time must be > 0")

    def reaction_time(self, key: str | int) -> float:
        if key not in self.entries:
            raise ConfigError(f"decoders.{self.name}: no reaction time for {key!r}")
        return self.entries[key]

    def monotonicity_anomalies(self) -> list[int]:
        """Distances whose reaction time exceeds that of the next larger distance."""
        dists = sorted(k for k in self.entries if isinstance(k, int))
        return [a for a, b in zip(dists, dists[1:]) if self.entries[a] > self.entries[b]]

    def suspect_distances(self) -> list[int]:
        """Both ends of every inverted pair; either entry may be the wrong one."""
        dists = sorted(k for k in self.entries if isinstance(k, int))
        bad = set()
        for a, b in zip(dists, dists[1:]):
            if self.entries[a] > self.entries[b]:
                bad.update((a, b))
        return sorted(bad)


@dataclass(frozen=True)
class ExtraPatches:
    """Additional patches with a fixed per-patch qubit count (e.g. storage)."""

    count: int
    qubits_per_patch: int


@dataclass(frozen=True)
class Scenario:
    """One (platform, code, decoder) evaluation request.

    ``patches`` blocks of ``code`` hold the logical qubits. Without a code,
    the blocks are surface patches whose distance is matched to
    ``target_p0`` or to the p0 of the scenario named by ``match``.
    ``extra_patches`` add one logical qubit per patch at a fixed size.
    """

    name: str
    platform: str
    code: str | None = None
    decoder: str | None = None
    p_logical: float | None = None
    t_sec: float | None = None
    patches: int = 1
    match: str | None = None
    target_p0: float | None = None
    rounds_per_op: int | None = None
    extra_patches: tuple[ExtraPatches, ...] = ()
    factory: bool = False
    series: str = ""

    def __post_init__(self) -> None:
        where = f"scenarios.{self.name}"
        if self.patches < 1:
            raise ValidationError(f"{where}.patches: must be >= 1")
        if self.code is None and (self.match is None) == (self.target_p0 is None):
            raise ValidationError(f"{where}: without a code, give exactly one of match or target_p0")
        if self.code is not None and (self.match is not None or self.target_p0 is not None):
            raise ValidationError(f"{where}: match and target_p0 apply only to matched surface patches")
        if self.p_logical is not None:
            _check_probability(self.p_logical, f"{where}.p_logical")
        if self.t_sec is not None and not self.t_sec > 0:
            raise ValidationError(f"{where}.t_sec: must be > 0")
        if self.rounds_per_op is None and self.decoder is None:
            raise ValidationError(f"{where}: a decoder is required unless rounds_per_op is set")
        if self.rounds_per_op is not None and self.rounds_per_op < 1:
            raise ValidationError(f"{where}.rounds_per_op: must be >= 1")


@dataclass(frozen=True)
class SearchRange:
    d_min: int = 3
    d_max: int = 41

    def __post_init__(self) -> None:
        if self.d_min < 1 or self.d_max < self.d_min:
            raise ValidationError("distillation_search: empty distance range")


@dataclass(frozen=True)
class CaseStudyDef:
    """Case-study inputs; QLOPS is taken from the named scenario."""

    name: str
    scenario: str
    runtime: float
    toffoli_count: float
    clifford_per_toffoli: float = 10
    reported_density: float | None = None
    alt_qubits: int | None = None
    alt_label: str = ""


@dataclass(frozen=True)
class Config:
    platforms: Mapping[str, HardwareParams] = field(default_factory=dict)
    codes: Mapping[str, CodeSpec] = field(default_factory=dict)
    decoders: Mapping[str, DecoderProfile] = field(default_factory=dict)
    scenarios: tuple[Scenario, ...] = ()
    distillation_search: SearchRange = SearchRange()
    case_studies: Mapping[str, CaseStudyDef] = field(default_factory=dict)
    comparisons: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        names = [s.name for s in self.scenarios]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValidationError(f"scenarios: duplicate names {sorted(dupes)}")
        known = set(names)
        for s in self.scenarios:
            where = f"scenarios.{s.name}"
            if s.platform not in self.platforms:
                raise ConfigError(f"{where}.platform: unknown platform {s.platform!r}")
            if s.code is not None and s.code not in self.codes:
                raise ConfigError(f"{where}.code: unknown code {s.code!r}")
            if s.decoder is not None and s.decoder not in self.decoders:
                raise ConfigError(f"{where}.decoder: unknown decoder {s.decoder!r}")
            if s.match is not None and s.match not in known:
                raise ConfigError(f"{where}.match: unknown scenario {s.match!r}")
        for cs in self.case_studies.values():
            if cs.scenario not in known:
                raise ConfigError(f"case_studies.{cs.name}.scenario: unknown scenario {cs.scenario!r}")
        for a, b in self.comparisons:
            for ref in (a, b):
                if ref not in self.case_studies:
                    raise ConfigError(f"comparisons: unknown case study {ref!r}")

    def scenario(self, name: str) -> Scenario:
        for s in self.scenarios:
            if s.name == name:
                return s
        raise ConfigError(f"unknown scenario {name!r}")


@dataclass(frozen=True)
class ScenarioResult:
    """Computed figures of merit for one scenario."""

    name: str
    platform: str
    code: str
    distance: int
    k: int
    t_sec: float
    t_r: float | None
    p0: float | None
    cycles: int
    qlops: float
    physical_qubits: int
    boundary: bool = False
    qlops_alt: float | None = None
    parallel_decoder: bool = False
    factory: FactoryPlan | None = None
    series: str = ""
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.qlops > 0:
            raise ValidationError(f"scenario {self.name}: QLOPS must be positive")
        if self.physical_qubits < 1:
            raise ValidationError(f"scenario {self.name}: physical qubit count must be >= 1")

    @property
    def density(self) -> float:
        return self.qlops / self.physical_qubits

    @property
    def density_alt(self) -> float | None:
        return None if self.qlops_alt is None else self.qlops_alt / self.physical_qubits


# ---------------------------------------------------------------------------
# parsing


def _require(mapping: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(mapping, Mapping):
        raise ValidationError(f"{where}: expected a mapping")
    if key not in mapping:
        raise ValidationError(f"{where}.{key}: required field missing")
    return mapping[key]


def _number(value: Any, where: str) -> float:
    # YAML 1.1 reads exponents without a sign or dot (6.5e9) as strings
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _reject_unknown(raw: Mapping[str, Any], allowed: Sequence[str], where: str) -> None:
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ValidationError(f"{where}: unknown field(s) {', '.join(map(str, unknown))}")


def _parse_fit(raw: Any, where: str) -> FitModel:
    _reject_unknown(raw, ("intercept", "slope", "d_min", "d_max", "residuals"), where)
    return FitModel(
        intercept=_number(_require(raw, "intercept", where), f"{where}.intercept"),
        slope=_number(_require(raw, "slope", where), f"{where}.slope"),
        d_min=_integer(raw.get("d_min", 1), f"{where}.d_min"),
        d_max=_integer(raw.get("d_max", 1000), f"{where}.d_max"),
        residuals=tuple(_number(r, f"{where}.residuals") for r in raw.get("residuals", ())),
    )


_TIME_FIELDS = ("coherence_time", "gate_time_1q", "gate_time_2q", "readout_time", "prep_time")
_PROB_FIELDS = ("infid_1q", "infid_2q", "readout_error", "prep_error")
_ATOM_PROB_FIELDS = ("movement_error", "unintended_error")
_ATOM_NUM_FIELDS = ("movement_accel", "lattice_spacing")


def _parse_platform(name: str, raw: Any) -> HardwareParams:
    where = f"platforms.{name}"
    allowed = ("kind", "label", "surface_fit") + _TIME_FIELDS + _PROB_FIELDS + _ATOM_PROB_FIELDS + _ATOM_NUM_FIELDS
    _reject_unknown(raw, allowed, where)
    kind = _require(raw, "kind", where)
    values: dict[str, Any] = {}
    for f in _TIME_FIELDS:
        if f == "prep_time" and f not in raw:
            values[f] = 0.0
            continue
        values[f] = parse_duration(_require(raw, f, where), f"{where}.{f}")
    for f in _PROB_FIELDS + _ATOM_PROB_FIELDS + _ATOM_NUM_FIELDS:
        if f in _PROB_FIELDS or f in raw:
            values[f] = _number(_require(raw, f, where), f"{where}.{f}")
    fit = _parse_fit(raw["surface_fit"], f"{where}.surface_fit") if raw.get("surface_fit") else None
    return HardwareParams(name=name, kind=kind, surface_fit=fit, label=raw.get("label", ""), **values)


def _coord(value: Any, where: str) -> Coord:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError(f"{where}: expected [row, col]")
    return (_integer(value[0], where), _integer(value[1], where))


def _parse_checks(raw: Any, where: str) -> tuple[AncillaCheck, ...]:
    checks = []
    for i, item in enumerate(raw or ()):
        w = f"{where}[{i}]"
        offsets = tuple(_coord(o, f"{w}.offsets") for o in _require(item, "offsets", w))
        if "homes" in item:
            # compact form: one offset list shared by many ancillas
            prefix = item.get("id", f"a{i}")
            for j, home in enumerate(item["homes"]):
                checks.append(AncillaCheck(f"{prefix}.{j}", _coord(home, f"{w}.homes"), offsets))
        else:
            checks.append(AncillaCheck(str(item.get("id", f"a{i}")), _coord(_require(item, "home", w), w), offsets))
    return tuple(checks)


def parse_layout(raw: Any, where: str = "layout") -> GridLayout:
    _reject_unknown(raw, ("grid_dims", "data_positions", "x_checks", "z_checks", "parking", "periodic"), where)
    parking = []
    for i, r in enumerate(_require(raw, "parking", where)):
        if not isinstance(r, (list, tuple)) or len(r) != 4:
            raise ValidationError(f"{where}.parking[{i}]: expected [row0, col0, row1, col1]")
        parking.append(Rect(*(_integer(v, f"{where}.parking[{i}]") for v in r)))
    return GridLayout(
        grid_dims=_coord(_require(raw, "grid_dims", where), f"{where}.grid_dims"),
        data_positions=tuple(_coord(p, f"{where}.data_positions") for p in _require(raw, "data_positions", where)),
        x_checks=_parse_checks(raw.get("x_checks"), f"{where}.x_checks"),
        z_checks=_parse_checks(raw.get("z_checks"), f"{where}.z_checks"),
        candidate_parking_regions=tuple(parking),
        periodic=bool(raw.get("periodic", False)),
    )


def _parse_code(code_id: str, raw: Any, base: Path | None) -> CodeSpec:
    where = f"codes.{code_id}"
    _reject_unknown(raw, ("family", "n", "k", "d", "layout", "label"), where)
    family = _require(raw, "family", where)
    d = _integer(_require(raw, "d", where), f"{where}.d")
    if family == SURFACE:
        n = _integer(raw.get("n", d * d), f"{where}.n")
        k = _integer(raw.get("k", 1), f"{where}.k")
    else:
        n = _integer(_require(raw, "n", where), f"{where}.n")
        k = _integer(_require(raw, "k", where), f"{where}.k")
    layout = None
    if raw.get("layout") is not None:
        spec = raw["layout"]
        if isinstance(spec, str):
            path = Path(spec)
            if not path.is_absolute() and base is not None:
                path = base / path
            layout = parse_layout(_read_document(path), f"{where}.layout")
        else:
            layout = parse_layout(spec, f"{where}.layout")
    return CodeSpec(code_id, n, k, d, family, layout, raw.get("label", ""))


def _parse_decoder(name: str, raw: Any) -> DecoderProfile:
    where = f"decoders.{name}"
    _reject_unknown(raw, ("mode", "entries"), where)
    entries: dict[str | int, float] = {}
    for key, value in _require(raw, "entries", where).items():
        if isinstance(key, str) and key.isdigit():
            key = int(key)
        entries[key] = parse_duration(value, f"{where}.entries.{key}")
    return DecoderProfile(name, str(_require(raw, "mode", where)), entries)


_SCENARIO_FIELDS = (
    "name", "platform", "code", "decoder", "p_logical", "t_sec", "patches",
    "match", "target_p0", "rounds_per_op", "extra_patches", "factory", "series",
)


def _parse_scenario(i: int, raw: Any) -> Scenario:
    where = f"scenarios[{i}]"
    _reject_unknown(raw, _SCENARIO_FIELDS, where)
    name = str(_require(raw, "name", where))
    where = f"scenarios.{name}"
    extras = tuple(
        ExtraPatches(
            _integer(_require(e, "count", f"{where}.extra_patches"), f"{where}.extra_patches.count"),
            _integer(_require(e, "qubits_per_patch", f"{where}.extra_patches"), f"{where}.extra_patches.qubits_per_patch"),
        )
        for e in raw.get("extra_patches", ())
    )
    opt_num = lambda key: None if raw.get(key) is None else _number(raw[key], f"{where}.{key}")  # noqa: E731
    opt_int = lambda key: None if raw.get(key) is None else _integer(raw[key], f"{where}.{key}")  # noqa: E731
    return Scenario(
        name=name,
        platform=str(_require(raw, "platform", where)),
        code=raw.get("code"),
        decoder=raw.get("decoder"),
        p_logical=opt_num("p_logical"),
        t_sec=None if raw.get("t_sec") is None else parse_duration(raw["t_sec"], f"{where}.t_sec"),
        patches=_integer(raw.get("patches", 1), f"{where}.patches"),
        match=raw.get("match"),
        target_p0=opt_num("target_p0"),
        rounds_per_op=opt_int("rounds_per_op"),
        extra_patches=extras,
        factory=bool(raw.get("factory", False)),
        series=str(raw.get("series", "")),
    )


def _parse_case_study(name: str, raw: Any) -> CaseStudyDef:
    where = f"case_studies.{name}"
    allowed = ("scenario", "runtime", "toffoli_count", "clifford_per_toffoli", "reported_density", "alt_qubits", "alt_label")
    _reject_unknown(raw, allowed, where)
    cs = CaseStudyDef(
        name=name,
        scenario=str(_require(raw, "scenario", where)),
        runtime=parse_duration(_require(raw, "runtime", where), f"{where}.runtime"),
        toffoli_count=_number(_require(raw, "toffoli_count", where), f"{where}.toffoli_count"),
        clifford_per_toffoli=_number(raw.get("clifford_per_toffoli", 10), f"{where}.clifford_per_toffoli"),
        reported_density=None if raw.get("reported_density") is None else _number(raw["reported_density"], where),
        alt_qubits=None if raw.get("alt_qubits") is None else _integer(raw["alt_qubits"], where),
        alt_label=str(raw.get("alt_label", "")),
    )
    if not (cs.runtime > 0 and cs.toffoli_count > 0 and cs.clifford_per_toffoli > 0):
        raise ValidationError(f"{where}: runtime, toffoli_count and clifford_per_toffoli must be positive")
    return cs


def parse_config(raw: Any, base: Path | None = None) -> Config:
    """Build a validated Config from an already-decoded document."""
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ValidationError("configuration root must be a mapping")
    allowed = ("platforms", "codes", "decoders", "scenarios", "distillation_search", "case_studies", "comparisons")
    _reject_unknown(raw, allowed, "config")
    search_raw = raw.get("distillation_search") or {}
    _reject_unknown(search_raw, ("d_min", "d_max"), "distillation_search")
    comparisons = []
    for i, c in enumerate(raw.get("comparisons") or ()):
        comparisons.append((str(_require(c, "a", f"comparisons[{i}]")), str(_require(c, "b", f"comparisons[{i}]"))))
    return Config(
        platforms={n: _parse_platform(n, p) for n, p in (raw.get("platforms") or {}).items()},
        codes={n: _parse_code(n, c, base) for n, c in (raw.get("codes") or {}).items()},
        decoders={n: _parse_decoder(n, d) for n, d in (raw.get("decoders") or {}).items()},
        scenarios=tuple(_parse_scenario(i, s) for i, s in enumerate(raw.get("scenarios") or ())),
        distillation_search=SearchRange(
            _integer(search_raw.get("d_min", 3), "distillation_search.d_min"),
            _integer(search_raw.get("d_max", 41), "distillation_search.d_max"),
        ),
        case_studies={n: _parse_case_study(n, c) for n, c in (raw.get("case_studies") or {}).items()},
        comparisons=tuple(comparisons),
    )


def _read_document(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f":{mark.line + 1}:{mark.column + 1}" if mark is not None else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{path}{loc}: {problem}") from exc


def load_config(path: str | Path) -> Config:
    """Load and validate a YAML or JSON configuration file."""
    path = Path(path)
    return parse_config(_read_document(path), path.parent)


# ---------------------------------------------------------------------------
# serialization


def _fit_to_dict(fit: FitModel) -> dict[str, Any]:
    out: dict[str, Any] = {"intercept": fit.intercept, "slope": fit.slope, "d_min": fit.d_min, "d_max": fit.d_max}
    if fit.residuals:
        out["residuals"] = list(fit.residuals)
    return out


def _layout_to_dict(layout: GridLayout) -> dict[str, Any]:
    check = lambda c: {"id": c.ancilla_id, "home": list(c.home), "offsets": [list(o) for o in c.offsets]}  # noqa: E731
    return {
        "grid_dims": list(layout.grid_dims),
        "periodic": layout.periodic,
        "data_positions": [list(p) for p in layout.data_positions],
        "x_checks": [check(c) for c in layout.x_checks],
        "z_checks": [check(c) for c in layout.z_checks],
        "parking": [[r.row0, r.col0, r.row1, r.col1] for r in layout.candidate_parking_regions],
    }


def config_to_dict(config: Config) -> dict[str, Any]:
    """Render a Config as plain data; durations are written in seconds."""
    platforms = {}
    for name, hw in config.platforms.items():
        entry: dict[str, Any] = {"kind": hw.kind}
        if hw.label:
            entry["label"] = hw.label
        for f in _TIME_FIELDS + _PROB_FIELDS + _ATOM_PROB_FIELDS + _ATOM_NUM_FIELDS:
            if getattr(hw, f) is not None:
                entry[f] = getattr(hw, f)
        if hw.surface_fit is not None:
            entry["surface_fit"] = _fit_to_dict(hw.surface_fit)
        platforms[name] = entry
    codes = {}
    for cid, code in config.codes.items():
        entry = {"family": code.family, "n": code.n, "k": code.k, "d": code.d}
        if code.label:
            entry["label"] = code.label
        if code.layout is not None:
            entry["layout"] = _layout_to_dict(code.layout)
        codes[cid] = entry
    decoders = {
        name: {"mode": dec.mode, "entries": {k: v for k, v in dec.entries.items()}}
        for name, dec in config.decoders.items()
    }
    scenarios = []
    for s in config.scenarios:
        entry = {"name": s.name, "platform": s.platform}
        for f in ("code", "decoder", "p_logical", "t_sec", "match", "target_p0", "rounds_per_op"):
            if getattr(s, f) is not None:
                entry[f] = getattr(s, f)
        if s.patches != 1:
            entry["patches"] = s.patches
        if s.extra_patches:
            entry["extra_patches"] = [{"count": e.count, "qubits_per_patch": e.qubits_per_patch} for e in s.extra_patches]
        if s.factory:
            entry["factory"] = True
        if s.series:
            entry["series"] = s.series
        scenarios.append(entry)
    case_studies = {}
    for name, cs in config.case_studies.items():
        entry = {
            "scenario": cs.scenario,
            "runtime": cs.runtime,
            "toffoli_count": cs.toffoli_count,
            "clifford_per_toffoli": cs.clifford_per_toffoli,
        }
        for f in ("reported_density", "alt_qubits"):
            if getattr(cs, f) is not None:
                entry[f] = getattr(cs, f)
        if cs.alt_label:
            entry["alt_label"] = cs.alt_label
        case_studies[name] = entry
    return {
        "platforms": platforms,
        "codes": codes,
        "decoders": decoders,
        "scenarios": scenarios,
        "distillation_search": {"d_min": config.distillation_search.d_min, "d_max": config.distillation_search.d_max},
        "case_studies": case_studies,
        "comparisons": [{"a": a, "b": b} for a, b in config.comparisons],
    }


def save_config(config: Config, path: str | Path) -> None:
    """Write a Config as YAML, or JSON when the suffix is ``.json``."""
    path = Path(path)
    data = config_to_dict(config)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    else:
        path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
