import subprocess
import sys

import pytest

from rfidsim.cli import main
from rfidsim.core import PopulationSpec, generate_population, save_population


@pytest.fixture
def popfile(tmp_path):
    path = tmp_path / "pop.txt"
    save_population(generate_population(PopulationSpec(25, k=16, seed=1)), path)
    return path


@pytest.mark.parametrize("protocol", ["p", "qt", "fsa", "bs"])
def test_identify(popfile, capsys, protocol):
    assert main(["identify", "--population", str(popfile), "--protocol", protocol]) == 0
    out = capsys.readouterr().out
    assert "queries:" in out
    lines = out.splitlines()
    ids = [l for l in lines if set(l) <= {"0", "1"} and len(l) == 16]
    assert len(ids) == 25


def test_identify_p_reports_full_efficiency_and_trace(popfile, tmp_path, capsys):
    trace = tmp_path / "trace.txt"
    assert main(["identify", "--population", str(popfile), "--trace", str(trace)]) == 0
    out = capsys.readouterr().out
    assert "queries: 25" in out and "efficiency: 1.000000" in out
    assert len(trace.read_text().splitlines()) == 49


def test_verify(popfile, capsys):
    assert main(["verify", "--population", str(popfile)]) == 0
    assert "nodes: 49 leaves: 25" in capsys.readouterr().out


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0101\n01x1\n")
    assert main(["identify", "--population", str(bad)]) == 2
    bad.write_text("0101\n0101\n")
    assert main(["verify", "--population", str(bad)]) == 2
    assert main(["identify", "--population", str(tmp_path / "missing.txt")]) == 2


def test_prefix_off_anomaly_is_invariant_failure(tmp_path):
    path = tmp_path / "pair.txt"
    path.write_text("0110\n1001\n")
    assert main(["identify", "--population", str(path), "--no-prefix"]) == 1


def test_fsa_starvation_exit_code(tmp_path):
    path = tmp_path / "pair.txt"
    path.write_text("01\n10\n")
    args = ["identify", "--population", str(path), "--protocol", "fsa",
            "--frame-size", "1", "--max-cycles", "20"]
    assert main(args) == 1


def test_demo_false_positive(capsys):
    assert main(["demo-false-positive"]) == 0
    out = capsys.readouterr().out
    assert "decoded as a single tag: 001000" in out
    assert "phantom in population: False" in out
    assert "with prefix: 3 queries" in out


def test_experiment_flags_and_spec_file(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    flags = ["--protocols", "p,qt,bs", "--n", "20", "--k", "24", "--reps", "3", "--seed", "5"]
    assert main(["experiment", *flags, "--out", str(out1)]) == 0
    spec = tmp_path / "spec.json"
    spec.write_text(
        '{"protocols": ["p", "qt", "bs"], "n": 20, "k": 24, "reps": 3, "seed": 5, '
        f'"out": "{out2}"}}'
    )
    assert main(["experiment", "--spec", str(spec)]) == 0
    strip = lambda p: [l.rsplit(",", 1)[0] for l in p.read_text().splitlines()]
    assert strip(out1) == strip(out2)
    assert len(out1.read_text().splitlines()) == 10


def test_generate(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["generate", "--n", "12", "--k", "10", "--out", str(out)]) == 0
    assert len([l for l in out.read_text().splitlines() if not l.startswith("#")]) == 12


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rfidsim", "demo-false-positive"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "001000" in proc.stdout
