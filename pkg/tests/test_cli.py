import json
import subprocess
import sys

import pytest

from lowergap.cli import EXIT_FAILED, EXIT_MALFORMED, EXIT_OK, EXIT_REJECTED, main

K3 = {"kind": "cayley", "group": {"family": "cyclic", "n": 3}, "connection_set": [1, 2]}
C5 = {"kind": "cayley", "group": {"family": "cyclic", "n": 5}, "connection_set": [1, 4]}
C4 = {"kind": "cayley", "group": {"family": "cyclic", "n": 4}, "connection_set": [1, 3]}
DIRECTED = {"kind": "cayley", "group": {"family": "cyclic", "n": 5}, "connection_set": [1]}
NOT_INVARIANT = {"kind": "vertex_transitive", "n": 5, "rho": [[1, 0, 2, 3, 4]],
                 "action": {"generators": [[1, 2, 3, 4, 0]]}}
TRIANGLE_SCAN = {"kind": "cayley", "family": "cyclic", "n_range": [3, 3], "degree_max": 2}


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)
    return _write


def test_analyze_pass(write, capsys):
    assert main(["analyze", write("k3.json", K3)]) == EXIT_OK
    out, err = capsys.readouterr()
    assert json.loads(out)["overall"] == "pass"
    assert err.startswith("cayley(C3;S=[1, 2]): 12 pass, 0 fail")


def test_analyze_failed_check(write, capsys):
    assert main(["analyze", write("c5.json", C5)]) == EXIT_FAILED
    assert json.loads(capsys.readouterr().out)["overall"] == "fail"


@pytest.mark.parametrize("data, reason", [(C4, "bipartite"), (DIRECTED, "directed"), (NOT_INVARIANT, "invariant")])
def test_rejections(write, capsys, data, reason):
    assert main(["analyze", write("x.json", data)]) == EXIT_REJECTED
    assert reason in capsys.readouterr().err


@pytest.mark.parametrize("text", ["{bad", json.dumps({"kind": "cayley"}), json.dumps([1, 2])])
def test_malformed(write, capsys, text):
    assert main(["analyze", write("bad.json", text)]) == EXIT_MALFORMED
    assert "malformed" in capsys.readouterr().err


@pytest.mark.parametrize("args", [["--xi", "1.5"], ["--xi", "abc"], ["--tolerance", "-1"], ["--format", "xml"]])
def test_bad_flags_exit_3(write, args):
    with pytest.raises(SystemExit) as err:
        main(["analyze", write("k3.json", K3), *args])
    assert err.value.code == EXIT_MALFORMED


def test_missing_command_exits_3():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == EXIT_MALFORMED


def test_group_order_cap(write, capsys):
    assert main(["analyze", write("k3.json", K3), "--max-group-order", "2"]) == EXIT_MALFORMED


def test_csv_and_output_file(write, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["analyze", write("k3.json", K3), "--format", "csv", "--output", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("instance,id,title") and len(lines) == 16


def test_scan(write, capsys):
    assert main(["scan", write("fam.json", TRIANGLE_SCAN)]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["summary"]["certified"] == 1


def test_scan_cap(write, capsys):
    spec = {"kind": "cayley", "family": "cyclic", "n_range": [3, 15], "degree_max": 6}
    assert main(["scan", write("fam.json", spec), "--max-instances", "5"]) == EXIT_MALFORMED


def test_show_spectrum(write, capsys):
    assert main(["show-spectrum", write("k3.json", K3)]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["eigenvalues"] == pytest.approx([2, -1, -1])
    assert body["mu"] == pytest.approx(-0.5) and body["kappa"] == pytest.approx(1 / 3)
    # bipartite graphs still have a spectrum
    assert main(["show-spectrum", write("c4.json", C4)]) == EXIT_OK


def test_repeated_analyze_is_byte_identical(write):
    path = write("k3.json", K3)
    runs = [subprocess.run([sys.executable, "-m", "lowergap.cli", "analyze", path], capture_output=True)
            for _ in range(2)]
    assert runs[0].returncode == 0 and runs[0].stdout == runs[1].stdout


def test_console_script_exit_code(write):
    proc = subprocess.run([sys.executable, "-m", "lowergap.cli", "analyze", write("c4.json", C4)],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_REJECTED and "bipartite" in proc.stderr
