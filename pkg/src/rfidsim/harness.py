"""Metrics, seeded experiment runs and report files."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from statistics import fmean

import numpy as np

from .baselines import (
    FsaConfig,
    run_binary_splitting,
    run_framed_slotted_aloha,
    run_query_tree,
)
from .core import Distribution, PopulationSpec, generate_population
from .protocol_p import run_protocol_p
from .results import BitAccounting, RunResult

PROTOCOLS = ("P", "QT", "FSA", "BS")
CSV_COLUMNS = ("protocol", "N", "K", "seed", "queries", "efficiency", "identified", "elapsed_ms")


class UndefinedMetricError(ValueError):
    """Efficiency has no value for a run that identified nothing."""


class ExportError(OSError):
    pass


def system_efficiency(result: RunResult) -> float:
    """Tags identified per query issued (or slot used)."""
    if result.query_count < 1 or result.identified_count < 1:
        raise UndefinedMetricError(
            f"efficiency undefined for {result.identified_count} tag(s) "
            f"over {result.query_count} query(ies)"
        )
    return result.identified_count / result.query_count


def bits_transmitted(result: RunResult) -> BitAccounting:
    """Reader and tag bit totals.

    Tree protocols send one ternary mask per query at two bits per
    position; slotted protocols send two bits of slot feedback per slot.
    Tags send their full signal (ID, plus the prefix symbol for protocol P)
    each time they reply.
    """
    return result.bits


def child_seed(master_seed: int, *path: int) -> int:
    """Deterministic 64-bit seed for a repetition (and optional sub-stream).

    Mixes ``(master_seed, *path)`` through numpy's SeedSequence hash, so
    neighbouring indices give unrelated streams.
    """
    ss = np.random.SeedSequence([master_seed, *path])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ExperimentSpec:
    protocols: tuple[str, ...] = ("P",)
    population_spec: PopulationSpec = field(default_factory=lambda: PopulationSpec(100))
    repetitions: int = 1
    prefix_enabled: bool = True
    fsa_config: FsaConfig | None = None
    output: str = "csv"
    output_path: str | None = None
    master_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        protocols = tuple(p.upper() for p in self.protocols)
        unknown = set(protocols) - set(PROTOCOLS)
        if unknown:
            raise ValueError(f"unknown protocol(s) {sorted(unknown)}; pick from {PROTOCOLS}")
        if not protocols:
            raise ValueError("at least one protocol is required")
        object.__setattr__(self, "protocols", protocols)
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.output not in ("csv", "json"):
            raise ValueError("output must be 'csv' or 'json'")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        """Build from the JSON spec-file layout (see README)."""
        data = dict(data)
        protocols = data.pop("protocols", ["P"])
        if isinstance(protocols, str):
            protocols = protocols.split(",")
        pop = PopulationSpec(
            n=int(data.pop("n", 100)),
            k=int(data.pop("k", 96)),
            distribution=Distribution(data.pop("dist", "uniform")),
            shared_prefix=int(data.pop("shared_prefix", 8)),
        )
        fsa = data.pop("fsa", None)
        spec = cls(
            protocols=tuple(protocols),
            population_spec=pop,
            repetitions=int(data.pop("reps", 1)),
            prefix_enabled=bool(data.pop("prefix", True)),
            fsa_config=FsaConfig(**fsa) if fsa is not None else None,
            output=data.pop("format", "csv"),
            output_path=data.pop("out", None),
            master_seed=int(data.pop("seed", 0)),
            jobs=int(data.pop("jobs", 1)),
        )
        if data:
            raise ValueError(f"unknown spec key(s): {sorted(data)}")
        return spec


@dataclass
class Row:
    protocol: str
    n: int
    k: int
    seed: int
    queries: int | None
    efficiency: float | None
    identified: int | None
    elapsed_ms: float
    error: str | None = None


@dataclass
class ExperimentReport:
    rows: list[Row]
    aggregates: dict[str, dict]

    @classmethod
    def from_rows(cls, rows: list[Row]) -> ExperimentReport:
        return cls(rows, aggregate(rows))


def aggregate(rows: list[Row]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for proto in dict.fromkeys(r.protocol for r in rows):
        mine = [r for r in rows if r.protocol == proto]
        effs = [r.efficiency for r in mine if r.efficiency is not None]
        queries = [r.queries for r in mine if r.queries is not None]
        out[proto] = {
            "runs": len(mine),
            "errors": sum(r.error is not None for r in mine),
            "mean_efficiency": fmean(effs) if effs else None,
            "min_efficiency": min(effs) if effs else None,
            "max_efficiency": max(effs) if effs else None,
            "mean_queries": fmean(queries) if queries else None,
        }
    return out


def _run_one(protocol: str, population, spec: ExperimentSpec, rep: int) -> RunResult:
    stream = child_seed(spec.master_seed, rep, PROTOCOLS.index(protocol) + 1)
    if protocol == "P":
        return run_protocol_p(population, spec.prefix_enabled, keep_trace=False)
    if protocol == "QT":
        return run_query_tree(population)
    if protocol == "FSA":
        return run_framed_slotted_aloha(
            population, replace(spec.fsa_config or FsaConfig(), seed=stream)
        )
    return run_binary_splitting(population, stream)


def _run_repetition(spec: ExperimentSpec, rep: int) -> list[Row]:
    seed = child_seed(spec.master_seed, rep)
    pop_spec = replace(spec.population_spec, seed=seed)
    population = generate_population(pop_spec)
    rows = []
    for protocol in spec.protocols:
        start = time.perf_counter()
        try:
            result = _run_one(protocol, population, spec, rep)
        except Exception as exc:  # recorded per row; the experiment carries on
            rows.append(
                Row(protocol, pop_spec.n, pop_spec.k, seed, None, None, None,
                    (time.perf_counter() - start) * 1e3, type(exc).__name__)
            )
            continue
        elapsed = (time.perf_counter() - start) * 1e3
        try:
            eff = system_efficiency(result)
        except UndefinedMetricError:
            eff = None
        rows.append(
            Row(protocol, pop_spec.n, pop_spec.k, seed, result.query_count, eff,
                result.identified_count, elapsed)
        )
    return rows


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Run every protocol on a fresh population per repetition.

    Rows come back in repetition order whatever ``jobs`` is, so the report
    content (timings aside) depends only on the spec.
    """
    reps = range(spec.repetitions)
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            chunks = list(pool.map(_run_repetition, [spec] * len(reps), reps))
    else:
        chunks = [_run_repetition(spec, rep) for rep in reps]
    return ExperimentReport.from_rows([row for chunk in chunks for row in chunk])


def _csv_cells(row: Row) -> list[str]:
    if row.error is not None:
        eff = f"error:{row.error}"
    elif row.efficiency is None:
        eff = "undefined"
    else:
        eff = f"{row.efficiency:.6f}"
    return [
        row.protocol,
        str(row.n),
        str(row.k),
        str(row.seed),
        "" if row.queries is None else str(row.queries),
        eff,
        "" if row.identified is None else str(row.identified),
        f"{row.elapsed_ms:.3f}",
    ]


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow(_csv_cells(row))
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    payload = {"rows": [asdict(r) for r in report.rows], "aggregates": report.aggregates}
    return json.dumps(payload, indent=2) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    payload = json.loads(text)
    return ExperimentReport([Row(**r) for r in payload["rows"]], payload["aggregates"])


def export_report(report: ExperimentReport, fmt: str, path: str | Path) -> Path:
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ExportError(f"cannot write report to {path}: {exc}") from exc
    return path
