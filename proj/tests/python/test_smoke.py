import json
import math
import os
import subprocess

import pytest

import spinbath as sb


def equal(n):
    return sb.EnvironmentAmplitudes.from_weights([0.5] * n)


def test_decoherence_factor_closed_form():
    g = sb.CouplingSet([1.0] * 4)
    assert sb.decoherence_factor(g, equal(4), 0.0) == 1.0
    r = sb.decoherence_factor(g, equal(4), math.pi / 3)
    assert abs(r - 1 / 16) < 1e-12


def test_trace_and_overlap():
    g = sb.CouplingSet([0.3, 1.1, 2.0])
    amps = sb.EnvironmentAmplitudes([(0.6, 0.8j), (1.0, 0.0), (0.8, -0.6)])
    trace = sb.decoherence_trace(g, amps, sb.TimeGrid(0.0, 2.0, 5))
    assert len(trace.values) == 5
    e0 = sb.evolve_environment_branch(g, amps, 1.3, 0)
    e1 = sb.evolve_environment_branch(g, amps, 1.3, 1)
    assert abs(sb.overlap(e1, e0) - sb.decoherence_factor(g, amps, 1.3)) < 1e-12
    with pytest.raises(sb.ValidationError):
        sb.evolve_environment_branch(g, amps, 1.3, 2)


def test_spectrum_and_limit_laws():
    g = sb.CouplingSet([1.0] * 6)
    walks = sb.enumerate_walks(g, equal(6))
    merged = sb.merge_degenerate(walks, sb.default_merge_epsilon(g))
    weights = [w for _, w in merged.entries]
    assert weights == pytest.approx([math.comb(6, l) / 64 for l in range(7)], abs=1e-14)
    hist = sb.ldos(walks)
    assert sum(hist.masses) == pytest.approx(1.0)
    s = sb.summarize(g, equal(6))
    assert s.variance == pytest.approx(6.0)
    assert sb.long_time_average_sq(equal(20)) == 2.0**-20
    assert sb.laplace_demoivre_weight(100, 50, 0.5) == pytest.approx(0.0798, abs=1e-4)


def test_errors_map_to_exceptions():
    with pytest.raises(sb.CapacityError):
        sb.enumerate_walks(sb.CouplingSet([1.0] * 25), equal(25))
    with pytest.raises(sb.DimensionError):
        sb.decoherence_factor(sb.CouplingSet([1.0, 2.0]), equal(3), 0.1)
    with pytest.raises(sb.SpinbathError):
        sb.CouplingSet([])


def test_ensemble_and_echo():
    spec = sb.EnsembleSpec(sb.GaussianCoupling(0.0, 1.0), sb.EqualAmplitudes(), 5, 10, 42)
    res = sb.ensemble_average_trace(spec, sb.TimeGrid(0.0, 1.0, 11))
    assert res.mean.values[0] == 1.0
    assert len(res.stderr_re) == 11
    g = sb.sample_couplings(sb.LorentzianCoupling(0.0, 1.0), 7, 3)
    h1 = sb.DiagonalBranchHamiltonian.from_couplings(g)
    amps = equal(7)
    assert abs(sb.echo_amplitude(h1.negated(), h1, amps, 0.7) - sb.decoherence_factor(g, amps, 0.7)) < 1e-12


def test_run_writes_manifest(tmp_path):
    paths, manifest = sb.run("kind = trace\n[model]\nspins = 3\n", {"run.out_dir": str(tmp_path)})
    assert paths == ["trace.csv"]
    doc = json.loads(open(manifest).read())
    assert doc["outputs"][0]["rows"] == 201
    with pytest.raises(sb.ConfigError):
        sb.run("[model]\nspins = 0\n", {"run.out_dir": str(tmp_path)})


@pytest.mark.skipif("SPINBATH_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["SPINBATH_CLI"]
    ok = subprocess.run([cli, "--quiet", "--out-dir", str(tmp_path / "a"), "spectrum", "--spins", "3"])
    assert ok.returncode == 0
    big = subprocess.run([cli, "--quiet", "--out-dir", str(tmp_path / "b"), "spectrum", "--spins", "30"],
                         capture_output=True, text=True)
    assert big.returncode == 3
    assert "capacity_error" in big.stderr
