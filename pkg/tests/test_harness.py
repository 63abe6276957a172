import os

import numpy as np
import pytest

from vdsopt.harness import (ExperimentSpec, emit_outputs,
                            gen_mri_like_supports, ingest_coefficient_dataset,
                            ingest_support_dataset, mri_like_support_weights,
                            powerlaw_profile, run_phase_transition,
                            spec_from_file, spec_to_manifest, wilson_interval)
from vdsopt.sampling import RngSeed


def small_spec(**kw):
    base = dict(n=32, s=3, m_grid=(12.0, 20.0), trials=5,
                arms=("uniform", "optimized_B"), seed=5, outdir="out")
    base.update(kw)
    return ExperimentSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(m_grid=(20.0, 12.0))
    with pytest.raises(ValueError):
        small_spec(arms=("nope",))
    with pytest.raises(ValueError):
        small_spec(trials=0)
    small_spec(arms=("powerlaw:2", "uniform"))   # parametrized arm accepted


def test_wilson_interval_brackets_phat():
    lo, hi = wilson_interval(8, 10)
    assert lo < 0.8 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo0, hi0 = wilson_interval(0, 20)
    assert lo0 == 0.0 and hi0 > 0


def test_support_dataset_ingestion(tmp_path):
    path = tmp_path / "supports.txt"
    path.write_text("# comment\n0 3 5\n1,2,7\n\n")
    ds = ingest_support_dataset(path, n=8)
    assert ds.s == 3 and len(ds.supports) == 2
    assert np.array_equal(ds.supports[1], [1, 2, 7])
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2 3 4\n")
    with pytest.raises(ValueError):
        ingest_support_dataset(bad)
    oob = tmp_path / "oob.txt"
    oob.write_text("0 9\n")
    with pytest.raises(IndexError):
        ingest_support_dataset(oob, n=8)


def test_coefficient_dataset_thresholding(tmp_path):
    path = tmp_path / "coeffs.txt"
    path.write_text("0.1 -3.0 0.0 2.0\n1.0 0.2 -0.1 0.05\n")
    ds = ingest_coefficient_dataset(path, s=2, n=4)
    assert np.array_equal(ds.supports[0], [1, 3])
    assert np.array_equal(ds.supports[1], [0, 1])


def test_mri_like_weights_coarse_heavy():
    w = mri_like_support_weights(32, 0.5)
    assert abs(w.sum() - 1.0) <= 1e-12
    assert w[0] == w.max()                     # scaling coefficient dominates
    assert w[1] > w[16]                        # coarse band beats finest band


def test_gen_mri_like_supports_shape():
    ds = gen_mri_like_supports(64, 6, 20, 0.5, RngSeed(0))
    assert len(ds.supports) == 20
    assert all(len(sup) == 6 for sup in ds.supports)


def test_powerlaw_profile_decays_from_dc():
    prof = powerlaw_profile(64, 16.0, 2.0)
    assert abs(prof.p.sum() - 16.0) <= 1e-6
    assert prof.p[0] >= prof.p[10] >= prof.p[32] - 1e-12


def test_run_phase_transition_and_outputs(tmp_path):
    spec = small_spec(outdir=str(tmp_path / "out"))
    curves, profiles, traces = run_phase_transition(spec)
    assert set(curves) == {"uniform", "optimized_B"}
    for curve in curves.values():
        assert curve.m == [12.0, 20.0]
        assert all(0.0 <= e <= 1.0 for e in curve.eps)
    emit_outputs(spec, curves, profiles, traces)
    assert os.path.exists(os.path.join(spec.outdir, "curve_uniform.csv"))
    assert os.path.exists(os.path.join(spec.outdir, "manifest.txt"))


def test_manifest_round_trip(tmp_path):
    spec = small_spec()
    path = tmp_path / "manifest.txt"
    spec_to_manifest(spec, path)
    again = spec_from_file(path)
    assert again == spec


def test_seed_env_override(tmp_path, monkeypatch):
    spec = small_spec()
    path = tmp_path / "manifest.txt"
    spec_to_manifest(spec, path)
    monkeypatch.setenv("VDSOPT_SEED", "99")
    assert spec_from_file(path).seed == 99


def test_worker_count_does_not_change_results():
    spec1 = small_spec(trials=4, m_grid=(16.0,), arms=("uniform",))
    spec2 = small_spec(trials=4, m_grid=(16.0,), arms=("uniform",), workers=2)
    c1, _, _ = run_phase_transition(spec1)
    c2, _, _ = run_phase_transition(spec2)
    assert c1["uniform"].eps == c2["uniform"].eps


def test_optimized_C_requires_dataset():
    spec = small_spec(arms=("optimized_C",))
    with pytest.raises(ValueError):
        run_phase_transition(spec)
