import math

import pytest
from hypothesis import given, strategies as st

from aerial_na.errors import ConfigError
from aerial_na.harness.cache import digest
from aerial_na.harness.config import SCHEMA, default_config, load_scenario, parse_text


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("")
    cfg = load_scenario(path)
    r = cfg.scenario.radio
    assert r.frame == 1e-4 and r.subcarrier_spacing == 15e3 and r.carrier == 2e9
    assert r.sampling_time == 66.66e-6 and r.coherence_bandwidth == 0.5e6
    assert 10 * math.log10(r.noise_psd * 1e3) == pytest.approx(-174)
    assert 10 * math.log10(r.tx_power * 1e3) == pytest.approx(5)
    assert (cfg.scenario.ls.packet_bits, cfg.scenario.ms.packet_bits) == (1000, 160)
    assert (cfg.scenario.ues, cfg.scenario.faps) == (1000, 15)
    assert cfg.eta == 0.98 and cfg.estimator.trials == 10**6


def test_round_trip_fixpoint():
    text = default_config().serialize()
    again = parse_text(text)
    assert again.serialize() == text
    assert again.scenario == default_config().scenario


@given(st.floats(0.01, 0.99), st.integers(100, 5000), st.sampled_from(["S1", "S2", "S3", "S4"]),
       st.integers(0, 2**63))
def test_round_trip_property(theta, ues, source, seed):
    text = (f"[radio]\nfronthaul_loss = {theta!r}\n[population]\nues = {ues}\n"
            f"[heterogeneity]\nsource = {source}\n[estimator]\nseed = {seed}\n")
    cfg = parse_text(text)
    assert parse_text(cfg.serialize()).values == cfg.values


def test_fronthaul_rejected_with_line():
    with pytest.raises(ConfigError) as exc:
        parse_text("# header\n[radio]\nfronthaul_loss = 1.5\n")
    assert exc.value.line == 3 and exc.value.key == "fronthaul_loss"
    assert "fronthaul_loss must lie in (0,1)" in str(exc.value)


@pytest.mark.parametrize("text, line, key", [
    ("[radio]\nbogus = 1\n", 2, "bogus"),
    ("[population]\nues = many\n", 2, "ues"),
    ("[population]\nues = 1.5\n", 2, "ues"),
    ("[estimator]\n\ncsi = psychic\n", 3, "csi"),
    ("[fading]\nmu = 3\nmu = 4\n", 3, "mu"),
    ("[classes.1]\ntag = MS\nvelocity = -3\n", 3, "velocity"),
    ("[classes.2]\ntag = LS\ndelay_bound = 0.00005\n", 3, "delay_bound"),
])
def test_diagnostics(text, line, key):
    with pytest.raises(ConfigError) as exc:
        parse_text(text)
    assert exc.value.line == line and exc.value.key == key


@pytest.mark.parametrize("text", ["[nowhere]\n", "x = 1\n", "[radio]\njunk\n", "[radio\n",
                                  "[classes.0]\n"])
def test_structural_errors(text):
    with pytest.raises(ConfigError) as exc:
        parse_text(text)
    assert exc.value.line is not None


def test_classes_need_both_tags():
    with pytest.raises(ConfigError):
        parse_text("[classes.1]\ntag = MS\n[classes.2]\ntag = MS\n")
    with pytest.raises(ConfigError):
        parse_text("[classes.1]\ntag = LS\n")


def test_custom_source():
    cfg = parse_text("[heterogeneity]\nsource = custom\ncustom_delays_ms = 10:10:30\n"
                     "custom_velocities = 5\n")
    assert cfg.custom == ("10:10:30", "5")
    with pytest.raises(ConfigError):
        parse_text("[heterogeneity]\nsource = custom\n")


def test_overrides_change_digest():
    cfg = default_config()
    other = cfg.with_overrides({("estimator", "seed"): 2})
    assert other.estimator.seed == 2
    assert digest(cfg, "x") != digest(other, "x")
    assert digest(cfg, "x") != digest(cfg, "y")
    assert digest(cfg, "x") != digest(cfg, "x", version="9.9")


def test_every_field_participates_in_digest():
    base = default_config()
    for section, keys in SCHEMA.items():
        for key, (conv, default) in keys.items():
            if isinstance(default, str):
                continue
            if isinstance(default, int):
                bumped = default + 1
            elif math.isfinite(default) and default != 0:
                bumped = default * 1.01
            else:
                bumped = 0.5
            try:
                cfg = base.with_overrides({(section, key): bumped})
            except ConfigError:
                continue
            assert digest(cfg, "c") != digest(base, "c"), (section, key)
