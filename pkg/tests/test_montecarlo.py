import numpy as np
import pytest

from oracles import wilson
from toric_rg import _backend
from toric_rg.adversarial import fractal_error
from toric_rg.lattice import TorusLevel, faces
from toric_rg.montecarlo import (
    TrialConfig,
    TrialResult,
    crossing_estimates,
    results_from_csv,
    results_to_csv,
    run_experiment,
    run_trial,
    sample_bitflip,
    trial_seed,
    wilson_interval,
)


def test_channel_extremes():
    L = TorusLevel(3)
    assert sample_bitflip(L, 0.0, 1).weight == 0
    assert sample_bitflip(L, 1.0, 1).weight == L.n
    with pytest.raises(ValueError):
        sample_bitflip(L, 1.5, 1)


def test_channel_mean_weight():
    L = TorusLevel(5)
    w = [sample_bitflip(L, 0.1, trial_seed(0, 5, 0, t)).weight for t in range(400)]
    # mean 204.8, standard error about 0.5
    assert abs(np.mean(w) - 0.1 * L.n) < 3


def test_trial_seed_streams_differ():
    a = np.random.default_rng(trial_seed(1, 4, 0, 0)).random()
    assert a == np.random.default_rng(trial_seed(1, 4, 0, 0)).random()
    assert a != np.random.default_rng(trial_seed(1, 4, 0, 1)).random()
    assert a != np.random.default_rng(trial_seed(1, 4, 1, 0)).random()
    assert a != np.random.default_rng(trial_seed(2, 4, 0, 0)).random()


def test_trial_outcomes_on_known_errors(backend):
    kern = _backend.kernels
    for k in range(1, 8):
        m = 1 << k
        assert kern.trial_fails(fractal_error(k).bits, m, k)
    L = TorusLevel(3)
    for f in list(faces(L))[:10]:
        assert not kern.trial_fails(f.bits, L.m, 3)
    assert not run_trial(L, 0.0, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(4, -0.1, 10)
    with pytest.raises(ValueError):
        TrialConfig(4, 0.1, 0)
    with pytest.raises(ValueError):
        TrialConfig(0, 0.1, 10)
    with pytest.raises(ValueError):
        run_experiment([])


def test_rates_at_extremes():
    res = run_experiment([(4, 0.0, 50), (4, 0.5, 400)], master_seed=3)
    assert res[0].failures == 0
    # at p=1/2 the residual class is uniform over four classes
    assert abs(res[1].rate - 0.75) < 0.08


def test_threads_do_not_change_results():
    grid = [(3, 0.05, 300), (4, 0.05, 300), (4, 0.1, 250)]
    a = run_experiment(grid, master_seed=7, threads=1, chunk=64)
    b = run_experiment(grid, master_seed=7, threads=2, chunk=64)
    c = run_experiment(grid, master_seed=7, threads=1, chunk=1000)
    assert a == b == c


def test_wilson_matches_closed_form():
    for x, n in [(0, 10), (3, 10), (50, 100), (100, 100), (7, 2000)]:
        lo, hi = wilson_interval(x, n)
        olo, ohi = wilson(x, n)
        assert lo == pytest.approx(olo, abs=1e-9)
        assert hi == pytest.approx(ohi, abs=1e-9)


def test_csv_round_trip():
    res = run_experiment([(3, 0.04, 100), (3, 0.06, 100)], master_seed=1)
    text = results_to_csv(res, comments=["command: x"])
    assert text.startswith("# command: x\nk,p,trials")
    back = results_from_csv(text)
    assert [(r.k, r.p, r.trials, r.failures) for r in back] == [(r.k, r.p, r.trials, r.failures) for r in res]


def _rows(k, rates):
    return [TrialResult(k, p, 100, 0, r, 0, 0, 0) for p, r in rates]


def test_crossing_interpolation():
    res = _rows(4, [(0.03, 0.1), (0.05, 0.3)]) + _rows(5, [(0.03, 0.05), (0.05, 0.35)])
    (p,) = crossing_estimates(res)[(4, 5)]
    assert p == pytest.approx(0.03 + 0.02 * 0.5)
    res = _rows(4, [(0.03, 0.1), (0.05, 0.3)]) + _rows(5, [(0.03, 0.2), (0.05, 0.4)])
    assert crossing_estimates(res)[(4, 5)] == []
