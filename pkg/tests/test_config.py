"""Strict config parsing: happy paths, defaults, and every error family."""

from pathlib import Path

import pytest

from ehcrn.configio import load_config, load_scenario
from ehcrn.errors import ConfigError

REPO = Path(__file__).resolve().parents[1]

VALID = """
[spectrum]
q_i = 0.5
q_o = 0.7
[energy]
p_on = 0.7
p_off = 0.5
[detector]
sensing_duration = 0.002
sampling_rate = 1e6
noise_power = 1.0
primary_snr_db = -15.0
target_pf = 0.01
[battery]
levels = 100
[sim]
slot_duration = 0.1
slots = 5000
replications = 2
seed = 9
"""


def write(tmp_path, text, name="t.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestBundledConfigs:
    def test_case1(self):
        scenario, sim = load_scenario(str(REPO / "configs" / "case1.cfg"))
        assert scenario.battery_levels == 100
        assert scenario.slot_duration == 0.1
        assert scenario.detector.sensing_duration == 0.002
        assert scenario.detector.sampling_rate == 1e6
        assert scenario.detector.sample_count == 2000
        assert scenario.spectrum.stay_b == 0.7  # occupied self-transition
        assert scenario.spectrum.stay_a == 0.5  # idle self-transition
        assert sim.slots == 1_000_000 and sim.replications == 4
        bundle = load_config(str(REPO / "configs" / "case1.cfg"))
        assert bundle.target_pf == 0.01

    def test_case2(self):
        bundle = load_config(str(REPO / "configs" / "case2.cfg"))
        assert bundle.target_pf is None
        assert bundle.scenario.detector.normalized_threshold == pytest.approx(1.05)
        assert bundle.scenario.energy.stay_a == 0.5
        assert bundle.scenario.energy.stay_b == 0.7


class TestHappyPath:
    def test_full_round_trip(self, tmp_path):
        bundle = load_config(write(tmp_path, VALID))
        assert bundle.scenario.pi_idle == pytest.approx(0.375)
        assert bundle.scenario.e_on == pytest.approx(0.625)
        assert bundle.sim.slots == 5000
        assert bundle.sim.seed == 9
        assert bundle.sweep is None

    def test_sim_defaults(self, tmp_path):
        text = VALID.replace("slots = 5000\n", "").replace(
            "replications = 2\n", "").replace("seed = 9\n", "")
        bundle = load_config(write(tmp_path, text))
        assert bundle.sim.slots == 1_000_000
        assert bundle.sim.replications == 4
        assert bundle.sim.seed == 42
        assert bundle.sim.sensing_mode == "event"
        assert bundle.sim.initial_battery == "full"
        assert bundle.sim.num_pu_channels == 1

    def test_threshold_variants(self, tmp_path):
        text = VALID.replace("target_pf = 0.01", "normalized_threshold = 1.05")
        bundle = load_config(write(tmp_path, text))
        assert bundle.scenario.detector.threshold == pytest.approx(1.05)
        text = VALID.replace("target_pf = 0.01", "threshold = 1.03")
        bundle = load_config(write(tmp_path, text))
        assert bundle.scenario.detector.threshold == 1.03

    def test_inline_comments(self, tmp_path):
        text = VALID.replace("q_i = 0.5", "q_i = 0.5  ; idle stay probability")
        assert load_config(write(tmp_path, text)).scenario.spectrum.stay_a == 0.5

    def test_sweep_section(self, tmp_path):
        text = VALID + """
[sweep]
variable = normalized_threshold
grid = 1.0, 1.02, 1.04
variant_1 = a: q_o=0.7 q_i=0.5
variant_2 = b: q_o=0.3 q_i=0.5
"""
        bundle = load_config(write(tmp_path, text))
        assert bundle.sweep.variable == "normalized_threshold"
        assert bundle.sweep.grid == (1.0, 1.02, 1.04)
        assert bundle.sweep.variants[0] == ("a", {"q_o": 0.7, "q_i": 0.5})


class TestErrors:
    def test_missing_file(self):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config("/nonexistent/path.cfg")

    def test_empty_file_names_first_missing_field(self, tmp_path):
        with pytest.raises(ConfigError, match=r"spectrum\.q_i"):
            load_config(write(tmp_path, ""))

    def test_missing_required_key(self, tmp_path):
        with pytest.raises(ConfigError, match=r"battery\.levels"):
            load_config(write(tmp_path, VALID.replace("levels = 100", "")))

    def test_unknown_section(self, tmp_path):
        with pytest.raises(ConfigError, match=r"unknown section \[detectors\]"):
            load_config(write(tmp_path, VALID + "\n[detectors]\nx = 1\n"))

    def test_unknown_key_strict(self, tmp_path):
        text = VALID.replace("q_i = 0.5", "q_i = 0.5\nq_x = 0.2")
        with pytest.raises(ConfigError, match=r"spectrum\.q_x"):
            load_config(write(tmp_path, text))

    def test_bad_number(self, tmp_path):
        with pytest.raises(ConfigError, match=r"spectrum\.q_i"):
            load_config(write(tmp_path, VALID.replace("q_i = 0.5", "q_i = fast")))

    def test_degenerate_chain_cites_stationary_law(self, tmp_path):
        text = VALID.replace("q_i = 0.5", "q_i = 1.0").replace("q_o = 0.7", "q_o = 1.0")
        with pytest.raises(ConfigError, match="stationary"):
            load_config(write(tmp_path, text))

    def test_both_threshold_keys(self, tmp_path):
        text = VALID.replace("target_pf = 0.01", "target_pf = 0.01\nnormalized_threshold = 1.0")
        with pytest.raises(ConfigError, match="exactly one"):
            load_config(write(tmp_path, text))

    def test_no_threshold_key(self, tmp_path):
        with pytest.raises(ConfigError, match="exactly one"):
            load_config(write(tmp_path, VALID.replace("target_pf = 0.01", "")))

    def test_sensing_longer_than_slot(self, tmp_path):
        text = VALID.replace("slot_duration = 0.1", "slot_duration = 0.001")
        with pytest.raises(ConfigError, match="slot"):
            load_config(write(tmp_path, text))

    def test_invalid_sim_value(self, tmp_path):
        with pytest.raises(ConfigError, match="sim"):
            load_config(write(tmp_path, VALID.replace("slots = 5000", "slots = 0")))

    def test_duplicate_key_reports_line(self, tmp_path):
        text = VALID.replace("q_i = 0.5", "q_i = 0.5\nq_i = 0.6")
        with pytest.raises(ConfigError, match="line"):
            load_config(write(tmp_path, text))

    def test_sweep_bad_variable(self, tmp_path):
        text = VALID + "\n[sweep]\nvariable = snr\ngrid = 1, 2\nvariant_1 = a: q_i=0.5\n"
        with pytest.raises(ConfigError, match="variable"):
            load_config(write(tmp_path, text))

    def test_sweep_variant_needs_label(self, tmp_path):
        text = VALID + "\n[sweep]\nvariable = primary_snr_db\ngrid = -20, -10\nvariant_1 = p_on=0.7\n"
        with pytest.raises(ConfigError, match="label"):
            load_config(write(tmp_path, text))

    def test_sweep_unknown_override(self, tmp_path):
        text = VALID + "\n[sweep]\nvariable = primary_snr_db\ngrid = -20, -10\nvariant_1 = a: snr=3\n"
        with pytest.raises(ConfigError, match="unknown override"):
            load_config(write(tmp_path, text))
