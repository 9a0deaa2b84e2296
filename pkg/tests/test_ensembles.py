import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permpoly._sampling import BLOCK_SIZE, MCEstimate, block_rng, combined_z, resolve_seed, run_blocks, z_score
from permpoly.ensembles import (
    EnsembleSpec,
    Potential,
    sample,
    sample_cue,
    sample_ginibre,
    sample_goe,
    sample_gue,
    sample_unitary_invariant,
    unitary_invariant_matrices,
)

M = 40000


def _mean_z(values, target):
    est = MCEstimate.from_samples(np.asarray(values), 0)
    return est.z_score(target)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_gue_structure_and_variances(n):
    h = sample_gue(n, np.random.default_rng(1), M)
    assert np.array_equal(h, np.swapaxes(h, -1, -2).conj())
    assert _mean_z(n * h[:, 0, 0].real ** 2, 1.0) < 4
    if n > 1:
        assert _mean_z(n * np.abs(h[:, 0, 1]) ** 2, 1.0) < 4
        assert _mean_z(n * h[:, 0, 1] ** 2, 0.0) < 4


@pytest.mark.parametrize("n", [2, 5])
def test_goe_structure_and_variances(n):
    h = sample_goe(n, np.random.default_rng(2), M)
    assert h.dtype == np.float64 and np.array_equal(h, np.swapaxes(h, -1, -2))
    assert _mean_z(n * h[:, 0, 0] ** 2, 1.0) < 4
    assert _mean_z(n * h[:, 0, 1] ** 2, 0.5) < 4


@pytest.mark.parametrize("n", [1, 4])
def test_ginibre_variance(n):
    z = sample_ginibre(n, np.random.default_rng(3), M)
    assert _mean_z(n * np.abs(z[:, -1, 0]) ** 2, 1.0) < 4
    assert _mean_z(z[:, 0, 0] ** 2, 0.0) < 4


@pytest.mark.parametrize("n", [1, 2, 5])
def test_cue_is_unitary_and_haar(n):
    u = sample_cue(n, np.random.default_rng(4), M)
    eye = np.broadcast_to(np.eye(n), u.shape)
    assert np.max(np.abs(u @ np.swapaxes(u, -1, -2).conj() - eye)) < 1e-12
    tr = np.trace(u, axis1=-2, axis2=-1)
    # Haar moments: E tr U = 0, E |tr U|^2 = 1, E |U_11|^2 = 1/n
    assert _mean_z(tr, 0.0) < 4
    assert _mean_z(np.abs(tr) ** 2, 1.0) < 4
    assert _mean_z(np.abs(u[:, 0, 0]) ** 2, 1.0 / n) < 4


def test_cue_phase_fix_makes_eigenphases_uniform():
    u = sample_cue(3, np.random.default_rng(5), 20000)
    ph = np.angle(np.linalg.eigvals(u)).ravel()
    counts, _ = np.histogram(ph, bins=8, range=(-math.pi, math.pi))
    expected = ph.size / 8
    assert np.max(np.abs(counts - expected)) < 5 * math.sqrt(expected)


def test_sample_dispatch_and_spec_roundtrip():
    rng = np.random.default_rng(0)
    for kind in ("GUE", "GOE", "CUE", "Ginibre"):
        spec = EnsembleSpec(kind.lower(), 3)
        assert spec.kind == kind
        assert EnsembleSpec.from_dict(spec.to_dict()) == spec
        assert sample(spec, rng).shape == (3, 3)
        assert sample(spec, rng, 5).shape == (5, 3, 3)
    spec = EnsembleSpec("UnitaryInvariant", 2, Potential((0, 0, 0.5, 0, 0.1)))
    assert EnsembleSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize(
    "args",
    [("GUE", 0), ("Wishart", 3), ("UnitaryInvariant", 3), ("GUE", 3, Potential.gaussian())],
)
def test_spec_validation(args):
    with pytest.raises(ValueError):
        EnsembleSpec(*args)


def test_metropolis_chain_matches_gue_moments():
    # V = x^2/2 makes the chain a GUE eigenvalue sampler: E tr H^2 = n
    rng = np.random.default_rng(6)
    chain = sample_unitary_invariant(Potential.gaussian(), 3, rng, n_samples=4000, burn_in=500, thin=5)
    assert 0.2 < chain.acceptance_rate < 0.9
    tr2 = np.sum(chain.samples ** 2, axis=1)
    # thinned chain: allow for residual autocorrelation
    est = MCEstimate.from_samples(tr2, 0)
    assert abs(est.mean - 3.0) < 8 * est.stderr.real


def test_unitary_invariant_matrices_are_hermitian_with_chain_spectrum():
    rng = np.random.default_rng(7)
    mats = unitary_invariant_matrices(Potential((0, 0, 0.5, 0, 0.2)), 3, rng, 5, burn_in=50)
    assert np.max(np.abs(mats - np.swapaxes(mats, -1, -2).conj())) < 1e-12


def test_metropolis_size_cap():
    with pytest.raises(ValueError):
        sample_unitary_invariant(Potential.gaussian(), 9, np.random.default_rng(0))


# ------------------------------------------------------------ sampling core


def _draw(rng, count):
    return rng.standard_normal(count)


@given(st.integers(1, 3 * BLOCK_SIZE + 5), st.integers(0, 2 ** 32 - 1))
def test_block_stream_prefix_is_stable(m, seed):
    full = run_blocks(_draw, 3 * BLOCK_SIZE + 5, seed)
    part = run_blocks(_draw, m, seed)
    assert len(part) == m
    assert np.array_equal(part, full[:m])


@pytest.mark.parametrize("workers", [2, 3])
def test_workers_do_not_change_the_stream(workers):
    a = run_blocks(_draw, 5 * BLOCK_SIZE + 17, 11, workers=1)
    b = run_blocks(_draw, 5 * BLOCK_SIZE + 17, 11, workers=workers)
    assert np.array_equal(a, b)


def test_blocks_are_independent_streams():
    a = block_rng(0, 0).standard_normal(4)
    b = block_rng(0, 1).standard_normal(4)
    assert not np.array_equal(a, b)


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("PERMPOLY_SEED", raising=False)
    assert resolve_seed(None) == 0
    monkeypatch.setenv("PERMPOLY_SEED", "42")
    assert resolve_seed(None) == 42
    assert resolve_seed(5) == 5


@pytest.mark.parametrize(
    "mean,se,ref,expected",
    [
        (1.0, 0.5, 0.0, 2.0),
        (1 + 2j, 0.5 + 1j, 0.0, 2.0),
        (1.0 + 1e-16j, 0.1, 1.0, 0.0),
        (1.0, 0.0, 2.0, math.inf),
    ],
)
def test_z_score_cases(mean, se, ref, expected):
    assert z_score(mean, se, ref) == pytest.approx(expected)


def test_combined_z_is_symmetric():
    a = MCEstimate(1.0 + 0j, 0.3 + 0j, 10, 0)
    b = MCEstimate(0.5 + 0j, 0.4 + 0j, 10, 0)
    assert combined_z(a, b) == pytest.approx(1.0)
    assert combined_z(b, a) == pytest.approx(1.0)


def test_estimate_needs_two_samples():
    with pytest.raises(ValueError):
        MCEstimate.from_samples(np.ones(1), 0)
