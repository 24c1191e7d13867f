"""End-to-end time stepping with a QUBO solve per step, plus parameter sweeps."""

from __future__ import annotations

import csv
import dataclasses
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import CenterDistribution, ErrorSeries, center_csv, center_histogram, center_index, errors_csv, error_series
from .channel_flow import FlowParams, SolutionProfile, assemble_system, classical_solve, classical_trajectory, initial_profile
from .exceptions import CapacityError, ConfigurationError
from .fixed_point import FixedPointFormat, expand_matrix
from .qubo import DEFAULT_EMBEDDING_BUDGET, Qubo, build_qubo, embeddable_hint, logical_problem_size
from .samplers import EXHAUSTIVE_CAP, SampleSet, SamplerConfig, sample_annealing, sample_exhaustive
from .selection import Strategy, parse_strategies, select

__all__ = [
    "RunConfig",
    "StepRecord",
    "RunResult",
    "step_seed",
    "run_experiment",
    "SweepEntry",
    "sweep",
    "parse_config_text",
]

SAMPLERS = ("exhaustive", "annealing")
FEEDS = ("quantum", "classical")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run. Field names double as config-file keys."""

    grid_points: int = 5
    precision: int = 4
    radix_position: int = 1
    n_steps: int = 10
    num_reads: int = 10000
    sampler: str = "annealing"
    strategy: str = "all"
    seed: int = 0
    alpha: float = 0.4
    density: float = 0.5
    viscosity: float = 0.6
    pressure_gradient: float = -2.0
    height: float = 1.0
    body_force: float = 0.4
    feed: str = "quantum"
    sweeps: int = 1000
    t0: float | None = None
    t1: float | None = None
    dump_limit: int = 10000

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ConfigurationError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if self.feed not in FEEDS:
            raise ConfigurationError(f"feed must be one of {FEEDS}, got {self.feed!r}")
        try:
            parse_strategies(self.strategy)
        except ValueError as exc:
            raise ConfigurationError(f"bad strategy {self.strategy!r}") from exc
        if self.dump_limit < 0:
            raise ConfigurationError("dump_limit must be non-negative")
        # constructing these validates the remaining fields
        self.params
        self.fmt
        self.sampler_config(0)
        size = logical_problem_size(self.grid_points, self.precision)
        if self.sampler == "exhaustive" and size > EXHAUSTIVE_CAP:
            raise CapacityError(
                f"{size} binary variables exceed the exhaustive cap of {EXHAUSTIVE_CAP}; "
                "use --sampler annealing"
            )

    @property
    def params(self) -> FlowParams:
        return FlowParams(
            height=self.height,
            density=self.density,
            viscosity=self.viscosity,
            pressure_gradient=self.pressure_gradient,
            body_force=self.body_force,
            alpha=self.alpha,
            n_steps=self.n_steps,
            grid_points=self.grid_points,
        )

    @property
    def fmt(self) -> FixedPointFormat:
        return FixedPointFormat(self.precision, self.radix_position)

    @property
    def strategies(self) -> tuple[Strategy, ...]:
        return parse_strategies(self.strategy)

    @property
    def size(self) -> int:
        return logical_problem_size(self.grid_points, self.precision)

    def sampler_config(self, seed: int) -> SamplerConfig:
        return SamplerConfig(num_reads=self.num_reads, seed=seed, t0=self.t0, t1=self.t1, sweeps=self.sweeps)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name}={_format_value(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, values: dict[str, str], base: "RunConfig | None" = None) -> "RunConfig":
        """Config with string ``values`` (as read from a file) applied over ``base``."""
        base = cls() if base is None else base
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        changes = {}
        for key, raw in values.items():
            name = key.strip().replace("-", "_")
            if name not in types:
                raise ConfigurationError(f"unknown config key {key!r}")
            changes[name] = _parse_value(getattr(base, name), types[name], raw.strip(), name)
        return dataclasses.replace(base, **changes)


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(default, annotation, raw: str, name: str):
    try:
        if raw.lower() == "none" and "None" in str(annotation):
            return None
        if "float" in str(annotation):
            return float(raw)
        if "int" in str(annotation):
            return int(raw)
        return raw
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse {name}={raw!r}") from exc


def parse_config_text(text: str) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are ignored."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def step_seed(seed: int, step: int) -> int:
    """Sampler seed for one time step, shared by all strategies of that step."""
    return int(np.random.SeedSequence([seed, step]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class StepRecord:
    """What the sampler returned for one strategy at one time step."""

    step: int
    strategy: Strategy
    qubo: Qubo
    lowest_energy: float
    lowest_state: np.ndarray
    distinct_states: int
    num_reads: int
    rhs: np.ndarray
    target: np.ndarray


@dataclass
class RunResult:
    config: RunConfig
    y: np.ndarray
    classical: list[np.ndarray]
    profiles: dict[Strategy, list[np.ndarray]]
    errors: list[ErrorSeries]
    centers: dict[Strategy, CenterDistribution]
    records: list[StepRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _sample(cfg: RunConfig, qubo: Qubo, seed: int) -> SampleSet:
    if cfg.sampler == "exhaustive":
        return sample_exhaustive(qubo)
    return sample_annealing(qubo, cfg.sampler_config(seed))


def run_experiment(cfg: RunConfig, out: str | Path | None = None) -> RunResult:
    """Advance the flow ``cfg.n_steps`` times, solving each step as a QUBO.

    Every strategy carries its own trajectory: the profile it selects at one
    step builds the right-hand side of the next (``feed='quantum'``). With
    ``feed='classical'`` each step starts from the classical profile instead,
    which isolates the per-step error from its accumulation. The classical
    trajectory is computed alongside and does not depend on sampler settings.

    When ``out`` is given, CSV artifacts and a manifest are written there.
    """
    params, fmt = cfg.params, cfg.fmt
    strategies = cfg.strategies
    classical = [p.values for p in classical_trajectory(params)]
    current = {s: initial_profile(params) for s in strategies}
    profiles = {s: [current[s].values] for s in strategies}
    hists: dict[Strategy, list] = {s: [] for s in strategies}
    records: list[StepRecord] = []
    notes: list[str] = []
    top = fmt.max_value
    samples_dir = None
    if out is not None:
        samples_dir = Path(out) / "samples"
        samples_dir.mkdir(parents=True, exist_ok=True)

    for step in range(1, cfg.n_steps + 1):
        seed = step_seed(cfg.seed, step)
        cache: dict[bytes, SampleSet] = {}
        for s in strategies:
            prev = SolutionProfile(classical[step - 1], step - 1) if cfg.feed == "classical" else current[s]
            system = assemble_system(params, prev)
            target = classical_solve(system)
            if np.max(target) > top or np.min(target) < 0.0:
                notes.append(
                    f"range: step {step} {s.value}: step solution spans [{np.min(target)!r}, {np.max(target)!r}], "
                    f"representable range is [0, {top!r}]"
                )
            qubo = build_qubo(expand_matrix(system.A, fmt), system.b)
            samples = cache.get(qubo.fingerprint)
            if samples is None:
                samples = cache[qubo.fingerprint] = _sample(cfg, qubo, seed)
            interior = select(samples, s, fmt, params.interior_points)
            clipped = np.clip(interior, 0.0, top)
            if not np.array_equal(clipped, interior):
                notes.append(f"clamp: step {step} {s.value}: selected values clamped to [0, {top!r}]")
            current[s] = SolutionProfile.from_interior(clipped, step)
            profiles[s].append(current[s].values)
            hists[s].append(tuple(center_histogram(samples, fmt, params)))
            records.append(
                StepRecord(
                    step, s, qubo, samples.lowest_energy, samples.state(0), len(samples), samples.num_reads,
                    system.b, target,
                )
            )
            if samples_dir is not None:
                name = samples_dir / f"step{step:03d}_{s.value}.csv"
                samples.to_csv(name, limit=cfg.dump_limit)
                if len(samples) > cfg.dump_limit:
                    notes.append(f"dump: {name.name} holds the {cfg.dump_limit} lowest of {len(samples)} states")
        del cache

    grid_index, exact = center_index(params.grid_points)
    if not exact:
        notes.append(f"center: even grid, using lower-middle grid index {grid_index}")
    steps = tuple(range(1, cfg.n_steps + 1))
    centers = {s: CenterDistribution(grid_index, exact, steps, tuple(hists[s])) for s in strategies}
    errors = [
        error_series(profiles[s][1:], classical[1:], s, cfg.precision, cfg.grid_points) for s in strategies
    ]
    result = RunResult(cfg, params.y, classical, profiles, errors, centers, records, notes)
    if out is not None:
        write_artifacts(result, out)
    return result


def profiles_csv(result: RunResult, path=None) -> str:
    """``step, i, y, <strategy>..., classical`` for every step including 0."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    strategies = list(result.profiles)
    writer.writerow(["step", "i", "y"] + [s.value for s in strategies] + ["classical"])
    for step, c in enumerate(result.classical):
        for i, y in enumerate(result.y):
            row = [step, i, repr(float(y))]
            row += [repr(float(result.profiles[s][step][i])) for s in strategies]
            row.append(repr(float(c[i])))
            writer.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def write_artifacts(result: RunResult, out: str | Path) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    profiles_csv(result, out / "profiles.csv")
    errors_csv(result.errors, out / "errors.csv")
    center_csv(result.centers, out / "center_dist.csv")
    header = "# run manifest: key=value, usable as --config\n"
    comments = "".join(f"# {note}\n" for note in result.notes)
    (out / "manifest.txt").write_text(header + result.config.to_text() + comments)


@dataclass(frozen=True)
class SweepEntry:
    grid_points: int
    precision: int
    size: int
    status: str
    reason: str = ""
    result: RunResult | None = field(default=None, compare=False, repr=False)


def sweep(
    base: RunConfig,
    grid_points: Sequence[int],
    precisions: Sequence[int],
    out: str | Path | None = None,
    budget: int = DEFAULT_EMBEDDING_BUDGET,
) -> list[SweepEntry]:
    """``run_experiment`` over every (Ngp, n) pair that passes the size checks.

    Pairs whose logical size exceeds the embedding ``budget`` are skipped, as
    are pairs too large for the exhaustive sampler when it is selected. Each
    run writes to its own ``ngp{Ngp}_n{n}`` subdirectory and the index goes
    to ``sweep_index.csv``.
    """
    entries = []
    for ngp in grid_points:
        for n in precisions:
            size = logical_problem_size(ngp, n)
            if not embeddable_hint(size, budget):
                entries.append(SweepEntry(ngp, n, size, "skipped", f"size {size} exceeds budget"))
                continue
            if base.sampler == "exhaustive" and size > EXHAUSTIVE_CAP:
                entries.append(SweepEntry(ngp, n, size, "skipped", f"size {size} exceeds exhaustive cap"))
                continue
            cfg = base.replace(grid_points=ngp, precision=n)
            run_out = None if out is None else Path(out) / f"ngp{ngp}_n{n}"
            entries.append(SweepEntry(ngp, n, size, "completed", "", run_experiment(cfg, run_out)))
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["grid_points", "precision", "size", "status", "reason", "directory"])
        for e in entries:
            directory = f"ngp{e.grid_points}_n{e.precision}" if e.status == "completed" else ""
            writer.writerow([e.grid_points, e.precision, e.size, e.status, e.reason, directory])
        (Path(out) / "sweep_index.csv").write_text(buf.getvalue())
    return entries
