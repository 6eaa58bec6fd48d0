import numpy as np
import pytest

import lswasp


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4))
    s = a @ a.T + np.eye(4)
    r = lswasp.psd_sqrt(s)
    np.testing.assert_allclose(r @ r, s, atol=1e-10)
    np.testing.assert_allclose(r, r.T)


def test_bures_of_commuting_diagonals():
    a = np.diag([1.0, 4.0])
    b = np.diag([9.0, 16.0])
    # sqrt(sum (sqrt a_i - sqrt b_i)^2) = sqrt(4 + 4)
    assert lswasp.bures_distance(a, b) == pytest.approx(np.sqrt(8.0), abs=1e-12)
    assert lswasp.gaussian_w2(np.zeros(2), a, np.array([3.0, 4.0]), a) == pytest.approx(5.0)


def test_barycenter_of_diagonals_is_squared_mean_root():
    covs = [np.diag([1.0, 4.0]), np.diag([9.0, 16.0])]
    cov, converged, iters = lswasp.barycenter_cov(covs)
    assert converged and iters >= 1
    np.testing.assert_allclose(cov, np.diag([4.0, 9.0]), atol=1e-8)


def test_partition_covers_rows():
    blocks = lswasp.partition(103, 10, seed=7)
    assert len(blocks) == 10
    allrows = np.sort(np.concatenate(blocks))
    np.testing.assert_array_equal(allrows, np.arange(103))
    assert sorted(len(b) for b in blocks) == [10] * 7 + [11] * 3


def test_dnc_pipeline_linear():
    data = lswasp.simulate("linear", n=2000, p=3, seed=11)
    full, names, acc = lswasp.sample_posterior(
        data["X"], data["y"], "linear", total_iters=1200, burn_in=200, thin=1, seed=5)
    assert full.shape == (1000, 3)
    assert names == ["beta_1", "beta_2", "beta_3"]
    assert acc is None
    subsets, clocks = lswasp.fit_subsets(
        data["X"], data["y"], "linear", k=4, total_iters=1200, burn_in=200, thin=1)
    assert len(subsets) == 4 and len(clocks) == 4
    wasp = lswasp.combine(subsets, "wasp")
    assert wasp["converged"]
    assert wasp["draws"].shape == (4000, 3)
    dpmc = lswasp.combine(subsets, "dpmc")
    assert "converged" not in dpmc
    assert lswasp.approximation_error(full, wasp["draws"]) < 0.05
    ess = lswasp.effective_sample_size(full)
    assert ess.shape == (3,) and np.all(ess > 500)


def test_logistic_sampler_is_seeded():
    data = lswasp.simulate("logistic", n=300, p=2, seed=2)
    a, _, _ = lswasp.sample_posterior(data["X"], data["y"], "logistic", trials=data["trials"],
                                      total_iters=60, burn_in=10, thin=5, seed=9)
    b, _, _ = lswasp.sample_posterior(data["X"], data["y"], "logistic", trials=data["trials"],
                                      total_iters=60, burn_in=10, thin=5, seed=9)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (10, 2)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        lswasp.combine([np.zeros((5, 2))], "nope")
    with pytest.raises(ValueError):
        lswasp.partition(5, 10)
    with pytest.raises(ArithmeticError):
        lswasp.psd_sqrt(np.diag([1.0, -1.0]))


def test_run_experiment(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[experiment]\nfamily = linear\nn = 600\np = 2\nk = 3\nreplications = 1\n"
        "seed = 4\ncombine_methods = wasp,dpmc\n"
        "[chain]\ntotal_iters = 300\nburn_in = 100\nthin = 2\n")
    rows = lswasp.run_experiment(cfg, {"experiment.output_dir": str(tmp_path / "out")})
    assert [r["method"] for r in rows] == ["wasp", "dpmc"]
    assert (tmp_path / "out" / "report.csv").exists()
