"""Command line contract: exit codes, output lines, manifest, determinism."""

import json
import math

import numpy as np
import pytest

from adiavac._version import __version__
from adiavac.cli import main
from adiavac.reporting import sha256_of

from conftest import CONFIGS

TINY = """
[run]
label = "cli-tiny"
seed = 5
outdir = "{out}"

[background]
kind = "exponential"
hubble = 1.0
mass = 0.0

[frequencies]
orders = [0, 1]
k_values = [1, 2, 10]

[invariants]
samples = 40
"""


def write_tiny(tmp_path, **kw):
    out = tmp_path / "out"
    cfg = tmp_path / "tiny.toml"
    cfg.write_text(TINY.format(out=out, **kw))
    return cfg, out


def test_validate_ok(capsys):
    rc = main(["validate", "--config", str(CONFIGS / "reference.toml")])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("config OK:")
    assert "frequencies" in out and "detector" in out


def test_validate_rejects_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('[background]\nkind = "constant"\nmass = -1.0\n')
    rc = main(["validate", "--config", str(bad)])
    assert rc == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:")
    assert "mass" in err


def test_missing_config_file(capsys):
    assert main(["validate", "--config", "/nonexistent.toml"]) == 2
    assert main(["run", "--config", "/nonexistent.toml"]) == 2


def test_run_all_writes_manifest_and_passes(tmp_path, capsys):
    cfg, out = write_tiny(tmp_path)
    rc = main(["run", "--config", str(cfg)])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    pass_lines = [l for l in lines if l.startswith("[PASS]")]
    assert any(l.startswith("[PASS] frequencies:") for l in pass_lines)
    assert any(l.startswith("[PASS] invariants:") for l in pass_lines)
    assert not any(l.startswith("[FAIL]") for l in lines)
    assert lines[-1].startswith("all assertions passed")

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["package"] == "adiavac"
    assert manifest["version"] == __version__
    assert manifest["label"] == "cli-tiny"
    assert manifest["seed"] == 5
    assert manifest["threads"] == 1
    assert manifest["suites_run"] == ["frequencies", "invariants"]
    assert manifest["all_passed"] is True
    assert manifest["config"]["background"]["hubble"] == 1.0
    for name, entry in manifest["suites"].items():
        assert entry["passed"] is True
        for fname, digest in entry["files"].items():
            assert sha256_of(str(out / fname)) == digest


def test_run_single_suite_and_out_override(tmp_path, capsys):
    cfg, _ = write_tiny(tmp_path)
    alt = tmp_path / "alt"
    rc = main(["run", "--config", str(cfg), "--suite", "invariants", "--out", str(alt)])
    assert rc == 0
    capsys.readouterr()
    manifest = json.loads((alt / "manifest.json").read_text())
    assert manifest["suites_run"] == ["invariants"]
    assert (alt / "invariants.csv").exists()


def test_unknown_suite_rejected(tmp_path, capsys):
    cfg, _ = write_tiny(tmp_path)
    rc = main(["run", "--config", str(cfg), "--suite", "spectra"])
    assert rc == 2
    assert "unknown suite" in capsys.readouterr().err


def test_suite_without_section_rejected(tmp_path, capsys):
    cfg, _ = write_tiny(tmp_path)
    rc = main(["run", "--config", str(cfg), "--suite", "modes"])
    assert rc == 1  # runs, but the missing section surfaces as a failure
    out = capsys.readouterr().out
    assert "[FAIL] modes: completed" in out


def test_failing_assertion_sets_exit_code(tmp_path, capsys):
    cfg = tmp_path / "fail.toml"
    cfg.write_text(
        "[background]\n"
        'kind = "exponential"\nhubble = 2.0\nmass = 1.0\n'
        "[frequencies]\norders = [1]\nk_values = [0]\n"
        f'[run]\noutdir = "{tmp_path / "failout"}"\n'
    )
    rc = main(["run", "--config", str(cfg)])
    assert rc == 1
    out = capsys.readouterr().out
    assert "[FAIL] frequencies:" in out
    assert "assertion(s) failed" in out.splitlines()[-1]


def test_massless_first_order_closed_form(tmp_path, capsys):
    # a massless field on the unit-rate exponential background: the first
    # order squared frequency must equal omega^2 - 2 at every k
    cfg = tmp_path / "ds.toml"
    out = tmp_path / "ds-out"
    cfg.write_text(
        f'[run]\noutdir = "{out}"\n'
        "[background]\n"
        'kind = "exponential"\nhubble = 1.0\nmass = 0.0\n'
        "[frequencies]\norders = [1]\nk_values = [1, 2, 5, 20, 100]\n"
    )
    assert main(["run", "--config", str(cfg)]) == 0
    capsys.readouterr()
    rows = (out / "frequencies.csv").read_text().splitlines()
    assert rows[0] == "k,n,omega0,Omega_n,log_rate,r,clamped"
    for line in rows[1:]:
        k, n, om0, Om, *_ = line.split(",")
        got = float(Om) ** 2
        want = float(om0) ** 2 - 2.0
        assert math.isclose(got, want, rel_tol=1e-12)


def test_determinism_bit_identical_outputs(tmp_path, capsys):
    cfg, _ = write_tiny(tmp_path)
    a, b = tmp_path / "r1", tmp_path / "r2"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b)]) == 0
    capsys.readouterr()
    for name in ("frequencies.csv", "invariants.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_threads_env(tmp_path, capsys, monkeypatch):
    cfg, _ = write_tiny(tmp_path)
    monkeypatch.setenv("ADIAVAC_THREADS", "3")
    a = tmp_path / "t3"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    capsys.readouterr()
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["threads"] == 3
    monkeypatch.setenv("ADIAVAC_THREADS", "one")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "ADIAVAC_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("ADIAVAC_THREADS", "0")
    assert main(["run", "--config", str(cfg)]) == 2


def test_thread_count_does_not_change_results(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "m.toml"
    cfg.write_text(
        f'[run]\noutdir = "{tmp_path / "unused"}"\n'
        "[background]\n"
        'kind = "exponential"\nhubble = 0.5\nmass = 1.0\n'
        "[modes]\nk_values = [0, 1, 2, 3, 4, 5, 6, 7]\nt1 = 1.0\n"
        "tol = 1e-8\nsamples = 17\n"
    )
    outs = []
    for threads, sub in [("1", "w1"), ("4", "w4")]:
        monkeypatch.setenv("ADIAVAC_THREADS", threads)
        out = tmp_path / sub
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append((out / "modes_trajectories.csv").read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
