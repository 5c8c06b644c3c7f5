import json
import os
import subprocess

import numpy as np
import pytest

import homotopy

CLI = os.environ.get("HOMOTOPY_CLI")


def test_procrustes_and_dj_direction():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((30, 3))
    h = g.copy()
    h[:, 1:] = 0.0
    rotation, residual = homotopy.procrustes(g, g)
    assert residual < 1e-10
    assert np.allclose(rotation, np.eye(3))
    assert homotopy.estimate_dj(h, g)["score"] < 1e-6
    assert homotopy.estimate_dj(g, h)["score"] > 0.1
    assert homotopy.preorder_verdict(h, g)[0] == "maps_to"


def test_scores_and_rank():
    rng = np.random.default_rng(1)
    h = rng.standard_normal((40, 4))
    g = h + 0.5 * rng.standard_normal((40, 4))
    assert 0.0 <= homotopy.linear_cka(h, g) <= 1.0
    assert 0.0 <= homotopy.cca(h, g)["r2_cca"] <= 1.0
    assert 0.0 <= homotopy.linreg_r2(h, g) <= 1.0
    assert homotopy.rank_to_precision(homotopy.svd_truncate_rank(h, 2)) == 2
    lin, trans = homotopy.sample_classifier(h, 3, 0)
    assert lin.shape == (3, 4) and trans.shape == (3,)
    assert homotopy.estimate_extrinsic(h, h, lin, trans)["score"] < 1e-9


def test_errors_map_to_python_exceptions():
    with pytest.raises(homotopy.ValidationError):
        homotopy.estimate_dj(np.ones((5, 2)), np.ones((5, 3)))
    with pytest.raises(homotopy.HomotopyError):
        homotopy.correlate([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_repr1_round_trip(tmp_path):
    data = np.arange(6.0).reshape(3, 2)
    path = tmp_path / "x.repr1"
    homotopy.save(str(path), data, ["a", "b", "c"], {"model": "toy"})
    ids, back, meta = homotopy.load(str(path))
    assert ids == ["a", "b", "c"]
    assert np.array_equal(back, data)
    assert meta == {"model": "toy"}


def test_synth_is_deterministic():
    spec = json.dumps({"kind": "gaussian", "n": 8, "d": 3, "seed": 5})
    assert np.array_equal(homotopy.synth(spec), homotopy.synth(spec))


def run_cli(*args, cwd):
    return subprocess.run([CLI, *args], cwd=cwd, capture_output=True, text=True)


@pytest.mark.skipif(not CLI, reason="HOMOTOPY_CLI not set")
def test_cli_exit_codes(tmp_path):
    homotopy.save(str(tmp_path / "a.csv"), np.random.default_rng(2).standard_normal((10, 3)))
    homotopy.save(str(tmp_path / "b.csv"), np.random.default_rng(3).standard_normal((10, 2)))

    ok = run_cli("align", "procrustes", "a.csv", "a.csv", cwd=tmp_path)
    assert ok.returncode == 0, ok.stderr
    assert abs(json.loads(ok.stdout)["scores"]["residual_frobenius"]) < 1e-10

    assert run_cli("align", "dj", "a.csv", "b.csv", cwd=tmp_path).returncode == 2
    assert run_cli("experiment", "no_such_experiment", cwd=tmp_path).returncode == 2
    assert run_cli("align", "procrustes", "a.csv", "missing.csv", cwd=tmp_path).returncode == 2


@pytest.mark.skipif(not CLI, reason="HOMOTOPY_CLI not set")
def test_cli_experiment_sidecar_feeds_correlate(tmp_path):
    run = run_cli("--out-dir", "ie", "experiment", "intrinsic_extrinsic", cwd=tmp_path)
    assert run.returncode == 0, run.stderr
    scores = json.loads((tmp_path / "ie" / "scores.json").read_text())
    corr = run_cli("correlate", "ie/pairs.csv", "--header", "--x-col", "2", "--y-col", "3", cwd=tmp_path)
    assert corr.returncode == 0, corr.stderr
    rho = json.loads(corr.stdout)["scores"]["correlation"]["spearman_rho"]
    assert rho == pytest.approx(scores["correlation"]["spearman_rho"], abs=1e-12)
