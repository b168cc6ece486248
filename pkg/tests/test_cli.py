"""Command-line front end: exit codes, formats, determinism and test mode."""
import json

import pytest

from h4algebra.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, build_parser, main


@pytest.fixture(scope="module")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("cli-cache"))


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_group_default(capsys, cache_dir):
    code, out = run(capsys, "group", "--cache", cache_dir)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "order=14400, orbits=[120,600,720,1200]"


def test_group_warm_cache_is_identical(capsys, cache_dir):
    _, cold = run(capsys, "group", "--cache", cache_dir, "--format", "json")
    _, warm = run(capsys, "group", "--cache", cache_dir, "--format", "json")
    assert cold == warm


def test_group_corrupted_root_fails(capsys):
    code, _ = run(capsys, "group", "--no-cache", "--corrupt-root")
    assert code != EXIT_OK
    assert code == EXIT_ERROR


def test_spectrum_level_six(capsys, cache_dir):
    code, out = run(capsys, "spectrum", "--level", "6", "--format", "json", "--cache", cache_dir)
    data = json.loads(out)
    assert code == EXIT_OK and data["match"] is True and data["kind"] == "spectrum"
    level6 = next(r for r in data["rows"] if r["level"] == 6)
    assert level6["multiplicity"] == 2 and level6["eigenvalue"] == "12"


def test_spectrum_level_zero(capsys, cache_dir):
    code, out = run(capsys, "spectrum", "--level", "0", "--format", "json", "--cache", cache_dir)
    rows = json.loads(out)["rows"]
    assert code == EXIT_OK and rows == [{"level": 0, "eigenvalue": "0", "multiplicity": 1,
                                         "predicted_multiplicity": 1, "degeneracy": 1, "match": True}]


def test_spectrum_symbolic_omega(capsys, cache_dir):
    code, out = run(capsys, "spectrum", "--level", "6", "--omega", "symbolic", "--format", "json",
                    "--cache", cache_dir)
    data = json.loads(out)
    assert code == EXIT_OK and data["inputs"]["omega"] == "symbolic"
    assert {r["eigenvalue"] for r in data["rows"]} >= {"0", "2*omega", "12*omega"}


def test_json_round_trips_byte_identically(capsys, cache_dir):
    _, out = run(capsys, "derive", "hamiltonian", "--format", "json", "--cache", cache_dir)
    assert json.dumps(json.loads(out), sort_keys=True, indent=2, ensure_ascii=False) + "\n" == out


def test_derive_hamiltonian_reports_empty_diff(capsys, cache_dir):
    code, out = run(capsys, "derive", "hamiltonian", "--format", "json", "--cache", cache_dir)
    rows = json.loads(out)["rows"]
    assert code == EXIT_OK and len(rows) == 14
    assert all(r["difference"] == "0" for r in rows)


def test_derive_integral_reports_vanishing_first_row(capsys, cache_dir):
    code, out = run(capsys, "derive", "integral", "--format", "json", "--cache", cache_dir)
    rows = {r["entry"]: r for r in json.loads(out)["rows"]}
    assert code == EXIT_OK
    assert rows["G1"]["derived"] == "0" and rows["gamma0"]["match"] is True


def test_eigenfunctions_flags_printed_defects(capsys, cache_dir):
    code, out = run(capsys, "eigenfunctions", "--format", "json", "--cache", cache_dir)
    rows = json.loads(out)["rows"]
    assert code == EXIT_MISMATCH
    repaired = [r for r in rows if r["form"] == "corrected"]
    assert repaired and all(r.get("holds", r.get("solver_match")) for r in repaired)


@pytest.mark.parametrize("argv", [["group", "--nu", "1/2"], ["group", "--omega", "-1"], ["group", "--nu", "x"]])
def test_invalid_parameters_rejected(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv + ["--no-cache"])
    assert exc.value.code == 2


def test_parser_lists_every_subcommand():
    sub = next(a for a in build_parser()._actions if a.dest == "command")
    assert set(sub.choices) == {"group", "tau", "derive", "spectrum", "eigenfunctions", "boundary", "verify-all"}
