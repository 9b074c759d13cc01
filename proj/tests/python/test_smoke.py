import math

import numpy as np
import pytest

import sphrec


def test_wigner_and_gaunt():
    assert sphrec.wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3))
    assert sphrec.gaunt(1, 0, 1, 0, 2, 0) == pytest.approx(1 / math.sqrt(5 * math.pi))
    assert sphrec.gaunt(1, 0, 1, 0, 1, 0) == 0.0


def test_round_trip():
    L = 12
    a = sphrec.sample_field(sphrec.paper_spectrum(L), seed=3)
    assert a.shape == ((L + 1) * (L + 2) // 2,)
    grid = sphrec.make_grid(2 * L)
    f = sphrec.synthesize(a, grid)
    assert f.shape == (grid.n_theta, grid.n_phi)
    assert np.max(np.abs(sphrec.analyze(grid, f, L) - a)) < 1e-12


def test_mask_and_block():
    w = sphrec.mask_coeffs(K=32)
    assert len(w) == 33
    assert all(abs(x) == 0.0 for x in w[1::2])
    vmin, vmax = sphrec.mask_extrema(w)
    E = sphrec.axial_block(2, w, 8, 40)
    assert E.shape == (39, 7)
    assert np.linalg.svd(E, compute_uv=False)[0] <= max(abs(vmin), vmax) + 1e-8


def test_noiseless_reconstruction():
    L, K, J = 10, 30, 40
    C = sphrec.paper_spectrum(L)
    w = sphrec.mask_coeffs(K=K)
    a = sphrec.sample_field(C, seed=1)
    d = sphrec.masked_data(a, np.zeros_like(a), w, J)
    a_hat = sphrec.reconstruct(w, d, L, C, tau=0.0)
    assert sphrec.coeff_l2_error(a_hat, a) < 1e-18


def test_errors_are_python_exceptions(tmp_path):
    with pytest.raises(ValueError):
        sphrec.synthesize(np.zeros(4, dtype=complex), sphrec.make_grid(4))
    with pytest.raises(sphrec.ConfigError):
        sphrec.run_experiment(L=8, K=16, J=40, out=str(tmp_path))


def test_run_experiment(tmp_path):
    rows = sphrec.run_experiment(L=8, K=24, J=32, tau=[0, 1e-2], seed=2, out=str(tmp_path))
    assert [r["tau"] for r in rows] == [0.0, 0.01]
    assert rows[0]["relative_err1"] < 1e-8
    assert (tmp_path / "report.csv").exists()
