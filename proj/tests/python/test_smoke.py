import json
import math

import pytest

import rwdlib as rwd


def test_black76_round_trip():
    price = rwd.black76_call(100.0, 105.0, 0.25, 28.0 / 360.0, 0.02)
    iv = rwd.black76_implied_vol(price, 100.0, 105.0, 28.0 / 360.0, 0.02)
    assert iv == pytest.approx(0.25, rel=1e-8)
    with pytest.raises(rwd.NumericalError):
        rwd.black76_implied_vol(101.0, 100.0, 95.0, 0.25, 0.0)


def test_model_density_basics():
    tau = 28.0 / 360.0
    grid = rwd.density_from_model(rwd.LnParams(0.2), tau, 100.0)
    m = rwd.moments(grid)
    assert m.mean == pytest.approx(1.0, abs=1e-6)
    s = 0.2 * math.sqrt(tau)
    assert m.variance == pytest.approx(math.exp(s * s) - 1.0, rel=1e-3)
    assert rwd.cdf_at(grid, rwd.quantile(grid, 0.3)) == pytest.approx(0.3, abs=1e-6)


def test_risk_and_behavioral_transforms():
    grid = rwd.density_from_model(rwd.LnParams(0.2), 28.0 / 360.0, 100.0)
    tilted = rwd.crra_adjust(grid, 2.0)
    assert rwd.moments(tilted).mean > rwd.moments(grid).mean

    shifted, warned = rwd.mean_variance_shift(grid, 0.01, 1.2)
    assert not warned
    assert rwd.moments(shifted).mean == pytest.approx(
        rwd.moments(grid).mean + 0.01, abs=1e-5
    )

    state = rwd.SentimentState()
    state.theta1, state.mean_active = 0.01, True
    rw = rwd.real_world_density(tilted, state)
    psi = rwd.sentiment_function(tilted, rw)
    assert len(psi) == len(grid)


def test_martingale_identity():
    psi = rwd.characteristic_function(
        rwd.HestonParams(0.04, 0.05, 1.5, 0.5, -0.6), -1j, 0.5, 100.0
    )
    assert psi.real == pytest.approx(100.0, rel=1e-10)
    assert psi.imag == pytest.approx(0.0, abs=1e-8)


def test_full_study_from_python(tmp_path):
    market = tmp_path / "market"
    spec = rwd.SyntheticMarketSpec()
    spec.true_model = rwd.LnParams(0.2)
    spec.n_dates = 35
    spec.half_spread = 0.001
    rwd.simulate_market(spec, 42, str(market))

    config_path = tmp_path / "study.json"
    config_path.write_text(
        json.dumps(
            {
                "data": {
                    "chain": str(market / "chain.csv"),
                    "settlements": str(market / "settlements.csv"),
                },
                "models": ["LN"],
                "risks": ["RN"],
                "profiles": ["none"],
                "out_dir": str(tmp_path / "out"),
            }
        )
    )
    config = rwd.StudyConfig.from_json_file(str(config_path))
    result = rwd.run_study(config)
    assert result.n_dates == 35
    assert len(result.summaries) == 1
    assert result.summaries[0].model_id == "LN-RN"
    assert (tmp_path / "out" / "scores.csv").exists()

    report = rwd.render_report(str(tmp_path / "out" / "scores.csv"))
    assert "LN-RN" in report


def test_config_errors_surface_as_exceptions(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"data": {}, "models": ["GARCH"]}))
    with pytest.raises(rwd.ConfigError):
        rwd.StudyConfig.from_json_file(str(bad))
