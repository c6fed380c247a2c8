import pytest

from udmec.config import (
    BITS_PER_MB, ConfigError, ScenarioConfig, SlopeParams, TaskRanges,
    dbm_to_watt, load_config_file, scenario_config_from_mapping,
)


def test_defaults_validate():
    cfg = ScenarioConfig().validate()
    assert (cfg.N, cfg.K, cfg.M, cfg.L) == (30, 20, 3, 6)
    assert cfg.W == 20e6 and cfg.f_mmax == 20e9


def test_dbm_conversion():
    assert dbm_to_watt(30.0) == pytest.approx(1.0)
    assert ScenarioConfig().p_max_w == pytest.approx(0.19952623149688797)
    # -174 dBm/Hz over 2 MHz
    assert ScenarioConfig().noise_power_w == pytest.approx(10 ** (-17.4) / 1000 * 2e6)


def test_mb_is_binary():
    assert BITS_PER_MB == 8 * 1048576


@pytest.mark.parametrize("changes, field", [
    (dict(N=0), "N"),
    (dict(Q=31), "Q"),
    (dict(W=1e6), "W"),
    (dict(f_lmax_range=(2e9, 1e9)), "f_lmax_range"),
    (dict(los_mode="bogus"), "los_mode"),
    (dict(L=7), "enc_cycles"),
    (dict(task_ranges=TaskRanges(rho=(3.5, 6))), "task_ranges.rho"),
    (dict(slope_params=SlopeParams(gamma_ls=(1.5, 2.09))), "slope_params.gamma_ls"),
    (dict(slope_params=SlopeParams(thresholds=(300.0,))), "slope_params.h_ls_ref"),
    (dict(seed=-1), "seed"),
])
def test_invalid_config_names_field(changes, field):
    with pytest.raises(ConfigError) as err:
        ScenarioConfig(**changes).validate()
    assert err.value.field == field


def test_mapping_rejects_unknown_keys():
    with pytest.raises(ConfigError) as err:
        scenario_config_from_mapping({"nonsense": 1})
    assert err.value.field == "nonsense"
    with pytest.raises(ConfigError):
        scenario_config_from_mapping({"task_ranges": {"dd": [1, 2]}})


def test_mapping_merges_task_ranges():
    cfg = scenario_config_from_mapping({"K": 4, "task_ranges": {"rho": [1, 2]}})
    assert cfg.K == 4 and cfg.task_ranges.rho == (1, 2)
    assert cfg.task_ranges.d_mb == TaskRanges().d_mb


def test_load_config_file(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('N = 5\nQ = 2\n[solver]\nI = 10\n[experiment]\nseeds = [1, 2]\n')
    scen, solver, exp = load_config_file(path)
    assert scen == {"N": 5, "Q": 2}
    assert solver == {"I": 10}
    assert exp == {"seeds": [1, 2]}
