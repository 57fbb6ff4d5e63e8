"""
Tests for the Monte Carlo harness, phase-transition sweeps, multiple measurement vectors
and the random-activity outage experiment
"""

import numpy as np
import pytest

from suprec.experiments.harness import (
    estimate_error_prob,
    run_trial,
    summarize,
    sweep_phase_transition,
)
from suprec.experiments.mmv import mmv_trial, run_mmv_trial
from suprec.experiments.outage import measurements_for_rate, run_outage_experiment
from suprec.models.config_models import (
    ActivityModel,
    DecoderParams,
    ModelConfig,
    NoiseModel,
    SweepSpec,
    TrialConfig,
)
from suprec.models.result_models import DecodeResult, ErrorEstimate, SWEEP_COLUMNS, TrialOutcome
from suprec.utils.errors import InvalidConfigError, UnboundedActivityError


def config(m, n, k=1, w=None, sigma_z2=1.0, decoder="ml", seed=20100301, **params):
    return TrialConfig(
        model=ModelConfig(m=m, n=n, k=k, noise=NoiseModel(sigma_z2=sigma_z2)),
        w=w if w is not None else [1.0] * k,
        decoder=decoder,
        params=DecoderParams(**params),
        seed=seed,
    )


def oracle_decoder(y, A, cfg):
    """Finds the column equal to y, which is exact for noiseless unit-value k = 1 trials"""
    matches = np.flatnonzero(np.all(A == y[:, None], axis=0))
    return DecodeResult(decoder="oracle", support=[int(matches[0])])


def failing_decoder(y, A, cfg):
    return DecodeResult(decoder="never", support=None, status="failure")


##### Single trials #####

def test_run_trial_is_deterministic():
    cfg = config(32, 10, k=2)
    assert run_trial(cfg, 3) == run_trial(cfg, 3)
    assert run_trial(cfg, 3) == run_trial(cfg.model_copy(), 3)


def test_run_trial_near_noiseless_ml():
    cfg = config(64, 16, k=2, sigma_z2=1e-12)
    outcomes = [run_trial(cfg, i) for i in range(100)]
    assert sum(o.status == "success" for o in outcomes) >= 99


def test_trial_config_rejects_bad_shapes():
    with pytest.raises(ValueError):
        config(32, 0)
    with pytest.raises(ValueError):
        config(32, 10, k=2, w=[1.0])
    with pytest.raises(ValueError):
        config(32, 10, k=2, decoder="distance_k1")


##### Error estimates #####

def test_oracle_and_failing_decoders():
    cfg = config(16, 6, sigma_z2=0.0)
    perfect = estimate_error_prob(cfg, 50, decoder=oracle_decoder)
    print(perfect)
    assert perfect.pe == 0.0 and perfect.ci_lo == 0.0
    hopeless = estimate_error_prob(cfg, 50, decoder=failing_decoder)
    assert hopeless.pe == 1.0 and hopeless.ci_hi == 1.0


def test_refusals_are_not_failures():
    """A work cap below C(m, k) refuses every trial and leaves no estimate"""
    cfg = config(4, 6, k=2, work_cap=1)
    estimate = estimate_error_prob(cfg, 10)
    assert estimate.refusals == 10
    assert estimate.no_data
    assert estimate.pe is None


def test_summarize_accounting():
    outcomes = [
        TrialOutcome(trial_index=0, status="success", planted=[1]),
        TrialOutcome(trial_index=1, status="failure", planted=[1], recovered=[2]),
        TrialOutcome(trial_index=2, status="refused", planted=[1]),
        TrialOutcome(trial_index=3, status="success", planted=[1]),
    ]
    estimate = summarize(outcomes)
    assert (estimate.successes, estimate.failures, estimate.refusals) == (2, 1, 1)
    assert estimate.pe == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        ErrorEstimate(trials=5, successes=2, failures=1, refusals=1)


def test_distance_k1_well_below_threshold():
    """Rate 0.05 is far below c(1) = 0.5"""
    cfg = config(1024, 200, decoder="distance_k1", epsilon=0.5)
    estimate = estimate_error_prob(cfg, 200)
    print(estimate)
    assert estimate.pe < 0.1


def test_estimate_independent_of_jobs():
    cfg = config(32, 8, k=2, sigma_z2=0.5)
    assert estimate_error_prob(cfg, 40, jobs=1) == estimate_error_prob(cfg, 40, jobs=3)


def test_omp_close_to_ml_at_high_snr():
    ml_cfg = config(256, 40, k=2, sigma_z2=0.01)
    omp_cfg = ml_cfg.model_copy(update={"decoder": "omp"})
    ml = estimate_error_prob(ml_cfg, 200)
    omp = estimate_error_prob(omp_cfg, 200)
    print(ml, omp)
    assert abs(ml.pe - omp.pe) <= 0.1


@pytest.mark.parametrize(
    "m, n, k, decoder, params",
    [
        (64, 12, 1, "ml", {}),
        (64, 12, 1, "omp", {}),
        (64, 200, 1, "distance_k1", {"epsilon": 0.5}),
        (8, 40, 2, "distance", {"epsilon": 0.5}),
    ],
)
def test_less_noise_never_raises_error(m, n, k, decoder, params):
    """Dividing sigma_z2 by 100 keeps P_e within the noisier point's interval"""
    noisy = estimate_error_prob(config(m, n, k=k, decoder=decoder, **params), 100)
    quiet = estimate_error_prob(config(m, n, k=k, sigma_z2=0.01, decoder=decoder, **params), 100)
    print(noisy, quiet)
    assert quiet.pe <= noisy.ci_hi


def test_estimate_needs_trials():
    with pytest.raises(ValueError):
        estimate_error_prob(config(8, 4), 0)


##### Sweeps #####

def sweep_spec(**overrides):
    base = dict(points=[{"m": 16, "n": 12}], k=1, w=[1.0], noise={"sigma_z2": 0.01}, trials=1, seed=7)
    base.update(overrides)
    return SweepSpec.model_validate(base)


def test_single_point_sweep():
    result = sweep_phase_transition(sweep_spec())
    assert len(result.rows) == 1
    row = result.rows[0]
    assert row.pe in (0.0, 1.0)
    assert row.rate_bits == pytest.approx(4.0 / 12.0)
    assert row.c_w_bits == pytest.approx(0.5 * np.log2(101.0))


def test_sweep_csv_layout():
    csv = sweep_phase_transition(sweep_spec()).to_csv()
    lines = csv.splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 2


def test_sweep_grid_from_rates():
    spec = sweep_spec(points=None, m_values=[64, 256], rates=[0.5, 0.25])
    assert spec.grid() == [(64, 12), (256, 16), (64, 24), (256, 32)]


def test_sweep_spec_needs_one_grid():
    with pytest.raises(ValueError):
        sweep_spec(m_values=[64], rates=[0.5])
    with pytest.raises(ValueError):
        sweep_spec(points=None)


def test_sweep_reproducible_and_independent_of_jobs():
    spec = sweep_spec(points=[{"m": 16, "n": 6}, {"m": 32, "n": 6}], trials=30)
    reference = sweep_phase_transition(spec, jobs=1).to_csv()
    assert sweep_phase_transition(spec, jobs=1).to_csv() == reference
    assert sweep_phase_transition(spec, jobs=2).to_csv() == reference


def test_sweep_points_get_distinct_seeds():
    spec = sweep_spec(points=[{"m": 16, "n": 6}, {"m": 16, "n": 6}], trials=5)
    rows = sweep_phase_transition(spec).rows
    assert rows[0].seed != rows[1].seed


def test_rate_above_threshold_keeps_failing():
    """At rate 0.8 > c(1) = 0.5 the error stays large for every m"""
    spec = sweep_spec(points=None, m_values=[64, 256, 1024], rates=[0.8], noise={"sigma_z2": 1.0}, trials=100)
    for row in sweep_phase_transition(spec).rows:
        assert row.pe >= 0.3


##### Multiple measurement vectors #####

def test_single_vector_mmv_reproduces_single_trial():
    cfg = config(24, 8, k=2, sigma_z2=0.5)
    for i in range(10):
        assert mmv_trial(cfg, i, t=1) == run_trial(cfg, i)
    assert run_mmv_trial(1, cfg, 40) == estimate_error_prob(cfg, 40)


def test_more_vectors_do_not_hurt():
    cfg = config(32, 8, k=2, sigma_z2=1.0)
    one = run_mmv_trial(1, cfg, 200)
    four = run_mmv_trial(4, cfg, 200)
    print(one, four)
    assert four.pe <= one.pe + 0.1


def test_mmv_noiseless_recovery():
    cfg = TrialConfig(
        model=ModelConfig(m=10, n=4, k=2, noise=NoiseModel(sigma_z2=0.0)),
        activity=ActivityModel(kind="uniform", k=2, low=0.5, high=1.5, random_sign=True),
        seed=3,
    )
    estimate = run_mmv_trial(2, cfg, 20)
    assert estimate.pe == 0.0


def test_mmv_requires_ml():
    with pytest.raises(InvalidConfigError):
        run_mmv_trial(2, config(8, 4, k=2, decoder="omp"), 5)
    with pytest.raises(InvalidConfigError):
        run_mmv_trial(0, config(8, 4, k=2), 5)


##### Outage experiment #####

def test_measurements_for_rate():
    assert measurements_for_rate(4096, 0.45) == 27
    assert measurements_for_rate(1024, 0.5) == 20


def test_outage_experiment_deterministic_activity():
    activity = ActivityModel(kind="deterministic", k=1, values=[1.0])
    template = ModelConfig(m=64, n=1, k=1, noise=NoiseModel(sigma_z2=1.0))
    report = run_outage_experiment(activity, template, 0.4, 20, 1)
    print(report)
    assert report.n == 15
    assert report.outage.estimate == 0.0
    assert report.outage_exact == 0.0
    assert report.failure.trials == 20
    assert report.gap == pytest.approx(report.failure.pe)


def test_outage_experiment_rate_above_every_threshold():
    activity = ActivityModel(kind="uniform", k=1, low=0.5, high=1.5)
    template = ModelConfig(m=64, n=1, k=1, noise=NoiseModel(sigma_z2=1.0))
    report = run_outage_experiment(activity, template, 0.9, 20, 2, decoder="ml")
    assert report.outage_exact == 1.0
    assert report.outage.estimate == 1.0


def test_outage_experiment_refuses_unbounded_activity():
    activity = ActivityModel(kind="gaussian", k=1)
    template = ModelConfig(m=64, n=1, k=1)
    with pytest.raises(UnboundedActivityError):
        run_outage_experiment(activity, template, 0.3, 10, 1)
