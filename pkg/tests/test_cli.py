import json
import subprocess
import sys

import pytest

from negasm.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


@pytest.fixture(scope="module")
def osc(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "osc.json"
    assert main(["compile", "graph", "oscillator", "-o", str(path)]) == EXIT_OK
    return path


def test_compile_tm_builtin_json(tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["compile", "tm", "unary_increment:2", "-o", str(out), "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["counts"]["symbol_state_sets"] == 6
    assert json.loads(out.read_text())["meta"]["kind"] == "tm"


def test_compile_text_graph(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("start: a\na -> b\nb -> a\n")
    assert main(["compile", "graph", str(g)]) == EXIT_OK
    assert "vertex_sets: 2" in capsys.readouterr().out


def test_run_projects_the_cycle(osc, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    assert main(["run", str(osc), "--steps", "5", "--seed", "3", "--trace", str(trace), "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["projection"][:6] == ["0", "1", "2", "3", "0", "1"]
    assert payload["fuel"]["constant"] == 10
    assert len(trace.read_text().splitlines()) == payload["events"] + 1


def test_render_ascii_and_svg(osc, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    main(["run", str(osc), "--steps", "1", "--trace", str(trace)])
    capsys.readouterr()
    assert main(["render", str(trace)]) == EXIT_OK
    assert "." in capsys.readouterr().out
    frames = tmp_path / "frames"
    assert main(["render", str(trace), "--format", "svg", "-o", str(frames)]) == EXIT_OK
    assert len(list(frames.glob("frame_*.svg"))) == len(trace.read_text().splitlines())


def test_verify_passes(osc, capsys):
    assert main(["verify", str(osc), "--depth", "12"]) == EXIT_OK
    assert "milestones" in capsys.readouterr().out


def test_verify_against_other_graph_fails(osc, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("start: 0\n0 -> 2\n2 -> 0\n")
    assert main(["verify", str(osc), str(g), "--depth", "8"]) == EXIT_FAIL


def test_verify_tm(tmp_path):
    out = tmp_path / "m.json"
    main(["compile", "tm", "unary_increment:2", "-o", str(out)])
    assert main(["verify", str(out), "--depth", "10"]) == EXIT_OK


def test_stats(osc, capsys):
    assert main(["stats", str(osc), "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "graph" and payload["labels"]


@pytest.mark.parametrize("argv", [
    ["compile", "graph", "/nonexistent/graph.txt"],
    ["compile", "tm", "unary_increment:x"],
    ["run", "/nonexistent.json"],
    ["stats", "BADJSON"],
    ["run", "OSC", "--format", "svg"],
    ["run", "OSC", "--focus-label", "nothing"],
    ["render", "BADJSON", "--format", "png"],
])
def test_input_errors_exit_two(argv, osc, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"initial": [\n')
    argv = [str(bad) if a == "BADJSON" else str(osc) if a == "OSC" else a for a in argv]
    if "png" in argv:
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_INPUT
    else:
        assert main(argv) == EXIT_INPUT


def test_bad_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"initial": [\n')
    main(["stats", str(bad)])
    assert f"{bad}:2:" in capsys.readouterr().err


def test_console_script_entry_point(osc):
    r = subprocess.run([sys.executable, "-m", "negasm.cli", "stats", str(osc)], capture_output=True, text=True)
    assert r.returncode == 0 and "assemblies" in r.stdout
