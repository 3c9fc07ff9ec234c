"""Exit codes, artifacts and determinism of the homflow command line runner."""

import json
import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("HOMFLOW_CLI")
ROOT = pathlib.Path(__file__).resolve().parents[2]

pytestmark = pytest.mark.skipif(not CLI, reason="HOMFLOW_CLI not set")


def run(tmp_path, kind, text, *extra, env=None):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    out = tmp_path / "out"
    proc = subprocess.run(
        [CLI, kind, "--config", str(cfg), "--out", str(out), *extra],
        capture_output=True,
        text=True,
        env={**os.environ, **(env or {})},
    )
    return proc, out


def test_trees(tmp_path):
    proc, out = run(tmp_path, "trees", "version = 1\nexperiment = trees\nmax_order = 6\n")
    assert proc.returncode == 0, proc.stderr
    lines = (out / "trees.csv").read_text().splitlines()
    assert lines[0] == "order,count"
    assert [int(float(l.split(",")[1])) for l in lines[1:]] == [1, 1, 2, 5, 14, 42, 132]
    report = json.loads((out / "trees.json").read_text())
    for key in ("experiment", "method", "field", "slopes", "checks", "pass"):
        assert key in report
    assert report["pass"] is True


def test_constant_field_local_order(tmp_path):
    text = (
        "version = 1\nexperiment = local-order\nfield = a\nmethods = rkmk4\n"
        "h_ladder = 2^-1..2^-7\n"
    )
    proc, out = run(tmp_path, "local-order", text)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = (out / "local-order.csv").read_text().splitlines()
    assert lines[0].startswith("h,err_metric,err_testfn_max")
    assert len(lines) == 8
    for row in lines[1:]:
        assert float(row.split(",")[1]) <= 1e-12
    report = json.loads((out / "local-order.json").read_text())
    assert "exact on constant fields" in report["notes"]
    assert report["pass"] is True


@pytest.mark.parametrize(
    "text",
    [
        "version = 1\nexperiment = local-order\nfield = b\nmethods = rkmk4\n",  # missing ladder
        "version = 2\nexperiment = trees\n",
        "experiment = trees\n",
        "version = 1\nexperiment = trees\ncolour = blue\n",
        "version = 1\nexperiment = local-order\nmethods = rk45\nh_ladder = 2^-4..2^-8\n",
        "version = 1\nexperiment = local-order\nh_ladder = 2^-4..2^-6\n",
        "version = 1\nexperiment = local-order\nfield = b\nspace = group:3\nh_ladder = 2^-4..2^-8\n",
        "version = 1\nexperiment = gronwall\nfield = c\npairs = many\n",
        "version = 1\nexperiment = local-order\n",
    ],
)
def test_config_errors_exit_2_without_artifacts(tmp_path, text):
    kind = "local-order" if "local-order" in text else ("gronwall" if "gronwall" in text else "trees")
    proc, out = run(tmp_path, kind, text)
    assert proc.returncode == 2, proc.stdout + proc.stderr
    assert "config error" in proc.stderr
    assert not out.exists()


def test_subcommand_mismatch_exit_2(tmp_path):
    proc, out = run(tmp_path, "gronwall", "version = 1\nexperiment = trees\n")
    assert proc.returncode == 2
    assert not out.exists()


def test_usage_errors_exit_2(tmp_path):
    assert subprocess.run([CLI], capture_output=True).returncode == 2
    assert subprocess.run([CLI, "trees"], capture_output=True).returncode == 2
    assert subprocess.run([CLI, "warp", "--config", "x"], capture_output=True).returncode == 2


def test_failed_check_exit_1(tmp_path):
    # Steps far outside the asymptotic range give the wrong slope.
    text = "version = 1\nexperiment = local-order\nfield = b\nmethods = rkmk4\nh_ladder = 1, 0.9, 0.8, 0.7\n"
    proc, out = run(tmp_path, "local-order", text)
    assert proc.returncode == 1
    assert json.loads((out / "local-order.json").read_text())["pass"] is False


def test_runtime_failure_exit_1(tmp_path):
    text = "version = 1\nexperiment = mechanism\nfield = b\nmethods = lie-euler\nh = 2\nh_ladder = 2^-4..2^-5\n"
    proc, _ = run(tmp_path, "mechanism", text)
    assert proc.returncode == 1
    assert "smaller h" in proc.stderr


def test_reruns_are_byte_identical(tmp_path):
    text = (
        "version = 1\nexperiment = local-order\nfield = c\nmethods = lie-euler, cf4\n"
        "h_ladder = 2^-4..2^-8\n"
    )
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first, out1 = run(tmp_path / "a", "local-order", text, env={"HOMFLOW_THREADS": "1"})
    second, out2 = run(tmp_path / "b", "local-order", text, env={"HOMFLOW_THREADS": "4"})
    assert first.returncode == 0 and second.returncode == 0
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out2.iterdir())
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_seed_override(tmp_path):
    text = "version = 1\nexperiment = global-order\nfield = b\nmethods = lie-euler\nn_ladder = 2^4..2^7\n"
    a, out_a = run(tmp_path, "global-order", text, "--seed", "3", "--format", "csv")
    assert a.returncode == 0
    assert not (out_a / "global-order.json").exists()
    first = (out_a / "global-order.csv").read_text()
    b, out_b = run(tmp_path, "global-order", text, "--seed", "4", "--format", "csv")
    assert b.returncode == 0
    assert (out_b / "global-order.csv").read_text() != first


@pytest.mark.parametrize("cfg", sorted((ROOT / "configs").glob("*.cfg")), ids=lambda p: p.stem)
def test_shipped_configs_parse(cfg, tmp_path):
    # Only validation: a wrong subcommand must be reported as a config mismatch, not a schema error.
    text = cfg.read_text()
    kind = next(l.split("=")[1].strip() for l in text.splitlines() if l.startswith("experiment"))
    other = "trees" if kind != "trees" else "gronwall"
    proc = subprocess.run([CLI, other, "--config", str(cfg), "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 2
    assert f"describes experiment '{kind}'" in proc.stderr
