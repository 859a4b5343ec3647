import csv
import io
import json

import pytest

from rfidsim.core import Population, PopulationSpec
from rfidsim.harness import (
    CSV_COLUMNS,
    ExperimentReport,
    ExperimentSpec,
    ExportError,
    Row,
    UndefinedMetricError,
    aggregate,
    bits_transmitted,
    child_seed,
    export_report,
    report_from_json,
    report_to_csv,
    run_experiment,
    system_efficiency,
)
from rfidsim.baselines import run_query_tree
from rfidsim.protocol_p import run_protocol_p
from rfidsim.core import generate_population


def test_efficiency_protocol_p_is_exactly_one():
    result = run_protocol_p(generate_population(PopulationSpec(250, seed=1)))
    assert system_efficiency(result) == 1.0


def test_efficiency_qt_saturated():
    result = run_query_tree(Population.from_strings(["00", "01", "10", "11"]))
    assert system_efficiency(result) == pytest.approx(0.571, abs=5e-4)


def test_efficiency_single_query():
    assert system_efficiency(run_protocol_p(Population.from_strings(["1"]))) == 1.0


def test_efficiency_undefined_for_empty():
    with pytest.raises(UndefinedMetricError):
        system_efficiency(run_protocol_p(Population((), k=4)))


def test_bits_transmitted():
    one = bits_transmitted(run_protocol_p(Population.from_strings(["010011"])))
    assert (one.reader_bits, one.tag_bits) == (14, 7)
    pop = generate_population(PopulationSpec(40, k=30, seed=3))
    assert bits_transmitted(run_protocol_p(pop)).reader_bits == 40 * 2 * 31
    assert bits_transmitted(run_protocol_p(Population((), k=4))).tag_bits == 0


def test_child_seed_is_stable_and_spread():
    assert child_seed(1, 0) == child_seed(1, 0)
    seeds = {child_seed(1, r) for r in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 2**64 for s in seeds)


def small_spec(**kw):
    base = dict(protocols=("P", "QT"), population_spec=PopulationSpec(30, k=32),
                repetitions=3, master_seed=42)
    base.update(kw)
    return ExperimentSpec(**base)


def test_protocol_p_rows_all_exact():
    report = run_experiment(ExperimentSpec(("P",), PopulationSpec(100), repetitions=50,
                                           master_seed=1))
    assert len(report.rows) == 50
    assert all(r.efficiency == 1.0 and r.queries == 100 for r in report.rows)
    assert report.aggregates["P"]["mean_efficiency"] == 1.0


def test_shared_population_per_repetition():
    report = run_experiment(small_spec(repetitions=1))
    assert [r.protocol for r in report.rows] == ["P", "QT"]
    assert report.rows[0].seed == report.rows[1].seed
    assert report.rows[0].identified == report.rows[1].identified == 30


def strip_elapsed(text):
    return [row[:-1] for row in csv.reader(io.StringIO(text))]


def test_report_is_reproducible():
    a = report_to_csv(run_experiment(small_spec(protocols=("P", "QT", "FSA", "BS"))))
    b = report_to_csv(run_experiment(small_spec(protocols=("P", "QT", "FSA", "BS"))))
    assert strip_elapsed(a) == strip_elapsed(b)
    c = report_to_csv(run_experiment(small_spec(master_seed=43)))
    assert strip_elapsed(a) != strip_elapsed(c)


def test_parallel_matches_serial():
    serial = run_experiment(small_spec(repetitions=4))
    parallel = run_experiment(small_spec(repetitions=4, jobs=2))
    assert strip_elapsed(report_to_csv(serial)) == strip_elapsed(report_to_csv(parallel))


def test_aggregates_recompute_from_rows():
    report = run_experiment(small_spec(repetitions=6))
    qt = [r.efficiency for r in report.rows if r.protocol == "QT"]
    assert report.aggregates["QT"]["mean_efficiency"] == pytest.approx(sum(qt) / 6, abs=1e-9)
    assert report.aggregates["QT"]["min_efficiency"] == min(qt)
    assert aggregate(report.rows) == report.aggregates


def test_errors_become_row_markers():
    spec = ExperimentSpec(("P", "QT"), PopulationSpec(2, k=2), repetitions=5,
                          prefix_enabled=False, master_seed=0)
    report = run_experiment(spec)
    assert len(report.rows) == 10
    failed = [r for r in report.rows if r.error]
    # with the prefix off, complementary pairs such as {01, 10} cancel to zero
    assert failed and all(r.protocol == "P" for r in failed)
    assert all(r.error == "ProtocolAssumptionError" for r in failed)
    text = report_to_csv(report)
    assert "error:ProtocolAssumptionError" in text


def test_empty_population_rows():
    report = run_experiment(ExperimentSpec(("P",), PopulationSpec(0, k=8), repetitions=2))
    assert all(r.efficiency is None and r.queries == 1 for r in report.rows)
    assert ",undefined," in report_to_csv(report)


def test_export_csv(tmp_path):
    path = tmp_path / "empty.csv"
    export_report(ExperimentReport.from_rows([]), "csv", path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"

    row = Row("P", 4, 6, 9, 4, 1.0, 4, 0.5)
    export_report(ExperimentReport.from_rows([row]), "csv", path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1] == "P,4,6,9,4,1.000000,4,0.500"


def test_export_json_round_trip(tmp_path):
    report = run_experiment(small_spec())
    path = export_report(report, "json", tmp_path / "r.json")
    back = report_from_json(path.read_text())
    assert back.rows == report.rows
    assert back.aggregates == json.loads(json.dumps(report.aggregates))


def test_export_error(tmp_path):
    with pytest.raises(ExportError):
        export_report(ExperimentReport.from_rows([]), "csv", tmp_path / "nope" / "r.csv")


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(("XX",))
    with pytest.raises(ValueError):
        ExperimentSpec(repetitions=0)
    with pytest.raises(ValueError):
        ExperimentSpec.from_dict({"bogus": 1})
    spec = ExperimentSpec.from_dict({"protocols": "p,qt", "n": 5, "k": 8, "reps": 2})
    assert spec.protocols == ("P", "QT")
    assert spec.population_spec.n == 5
