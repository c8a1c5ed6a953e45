from __future__ import annotations

import json
import subprocess
import sys

import pytest

from cycsrg.cli import main


@pytest.fixture
def run(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CYCSRG_CACHE", str(tmp_path / "cache"))

    def _run(*argv):
        code = main(list(argv))
        out = capsys.readouterr().out
        return code, json.loads(out) if out.strip() else None, out

    return _run


def test_periods(run):
    code, data, _ = run("periods", "--q", "7", "--m", "3", "--N", "19")
    assert code == 0
    assert sorted(set(data["values"])) == [-3, 4, 11]
    code, data, _ = run("periods", "--q", "7", "--m", "1", "--N", "1")
    assert code == 0 and data["values"] == [-1]


def test_cache_env_is_used(run, tmp_path):
    run("field", "--p", "7", "--f", "3")
    assert any((tmp_path / "cache").iterdir())


def test_construct_refusal_and_budget(run):
    code, data, _ = run("construct", "--q", "13", "--M", "3")
    assert code == 2 and data["error"] == "PreconditionError"
    code, data, _ = run("search", "--q", "7", "--m", "3", "--N", "19", "--search-budget", "0")
    assert code == 2 and data["error"] == "BudgetExceeded"
    code, data, _ = run("periods", "--q", "7", "--m", "2", "--N", "16")
    assert code == 2 and data["error"] == "NotRational"


def test_search_returns_example_partition(run):
    code, data, _ = run("search", "--q", "7", "--m", "3", "--N", "19")
    assert code == 0
    assert {"S1": [8, 12, 18], "S2": [10, 13, 15]}.items() <= data["hits"][0].items()


def test_construct_export_verify(run, tmp_path):
    export = tmp_path / "y.txt"
    code, data, text = run("construct", "--q", "7", "--M", "3", "--export", str(export))
    assert code == 0
    assert data["srg"]["restricted_values"] == [72, -271]
    assert data["prediction_matches"]
    code2, _, text2 = run("construct", "--q", "7", "--M", "3", "--export", str(export))
    assert text == text2
    code, data, _ = run("verify", str(export))
    assert code == 0 and data["srg"]["k"] == 24768


def test_verify_negative_verdict(run, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 6 52\n0 1\n")
    code, data, _ = run("verify", str(path))
    assert code == 1 and not data["srg"]["is_srg"]


def test_conic_and_quotient(run):
    code, data, _ = run("conic", "--q", "7")
    assert code == 0 and len(data["W_Q"]) == 8
    code, data, _ = run("quotient", "--q", "7", "--M", "3")
    assert code == 0 and data["pure"] is True
    assert set(data["g_values"].values()) == {-1}
    assert data["g_values"] == data["g_closed_form"]


def test_export_with_adjacency(run, tmp_path):
    code, data, _ = run("export", "--q", "3", "--M", "1", "--out", str(tmp_path / "e"),
                        "--adjacency", str(tmp_path / "a"))
    assert code == 0 and data["edges"] == 729 * 112 // 2
    code, data, _ = run("export", "--q", "7", "--M", "3", "--out", str(tmp_path / "e"),
                        "--adjacency", str(tmp_path / "a"))
    assert code == 2


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "cycsrg.cli", "singer", "--q", "7", "--no-cache"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["S"] == [8, 15, 19, 38, 48, 50, 51, 56]
