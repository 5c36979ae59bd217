"""Configuration schema, defaults, and hashing tests."""

import math

import pytest

from pumpsim import config
from pumpsim.errors import ConfigError, NotCalibratedError


@pytest.fixture
def default_rc():
    return config.RunConfig(config.default_config())


class TestSchema:
    def test_defaults_validate(self, default_rc):
        assert default_rc.data["meta"]["schema"] == "1"

    def test_missing_schema_rejected(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[stack]\nspan_mm = 12\n")
        with pytest.raises(ConfigError, match="schema"):
            config.load_config(path)

    def test_wrong_schema_version_rejected(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[meta]\nschema = 2\n")
        with pytest.raises(ConfigError, match="schema"):
            config.load_config(path)

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[meta]\nschema = 1\n\n[typo]\nx = 1\n")
        with pytest.raises(ConfigError, match="typo"):
            config.load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[meta]\nschema = 1\n\n[stack]\nspam_mm = 12\n")
        with pytest.raises(ConfigError, match="spam_mm"):
            config.load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            config.load_config(tmp_path / "nope.ini")


class TestMergeAndOverride:
    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[meta]\nschema = 1\n\n[schedule]\nvpp = 120\n")
        cfg = config.load_config(path)
        assert cfg["schedule"]["vpp"] == "120"
        assert cfg["schedule"]["frequency_hz"] == "60"  # default retained

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[meta]\nschema = 1\n\n[schedule]\nvpp = 120\n")
        cfg = config.apply_overrides(config.load_config(path),
                                     {("schedule", "vpp"): "80"})
        assert config.RunConfig(cfg).schedule().vpp == 80.0


class TestHash:
    def test_stable(self, default_rc):
        assert default_rc.hash == config.RunConfig(config.default_config()).hash

    def test_changes_with_content(self):
        cfg = config.default_config()
        h0 = config.config_hash(cfg)
        cfg["schedule"]["vpp"] = "120"
        assert config.config_hash(cfg) != h0

    def test_save_load_round_trip(self, tmp_path):
        path = tmp_path / "cfg.ini"
        cfg = config.default_config()
        config.save_config(cfg, path)
        again = config.load_config(path)
        assert config.config_hash(again) == config.config_hash(cfg)


class TestDomainViews:
    def test_stack_uses_table_materials(self, default_rc):
        stack = default_rc.stack()
        assert stack.thickness == pytest.approx(0.38e-3, rel=1e-12)
        pzt = stack.plies[stack.pzt_index]
        assert pzt.d31 == pytest.approx(-320e-12, rel=1e-12)
        assert pzt.e1 == pytest.approx(62e9, rel=1e-12)
        carbon = stack.plies[2]
        assert carbon.e1 == pytest.approx(231.2e9, rel=1e-12)
        assert carbon.alpha2 == pytest.approx(32.2e-6, rel=1e-12)

    def test_schedule_offsets_in_radians(self, default_rc):
        schedule = default_rc.schedule()
        assert schedule.offsets[1] == pytest.approx(-2 * math.pi / 3, rel=1e-12)

    def test_anchors_converted_to_si(self, default_rc):
        anchors = default_rc.flow_anchors()
        assert anchors.flow[3] == pytest.approx(1.5e-8, rel=1e-12)
        assert anchors.backpressure[2] == pytest.approx(1800.0, rel=1e-12)
        (vpp, f), watts = default_rc.power_anchor()
        assert (vpp, f) == (160.0, 60.0)
        assert watts == pytest.approx(0.045, rel=1e-12)

    def test_uncalibrated_pump_raises(self, default_rc):
        assert not default_rc.is_pump_calibrated()
        with pytest.raises(NotCalibratedError, match="calibrate"):
            default_rc.pump_params()

    def test_uncalibrated_load_raises(self, default_rc):
        with pytest.raises(NotCalibratedError):
            default_rc.load_model()

    def test_unknown_material_in_layup(self):
        cfg = config.default_config()
        cfg["stack"]["plies"] = "unobtanium:0.1"
        with pytest.raises(ConfigError, match="unobtanium"):
            config.RunConfig(cfg).stack()

    def test_bad_numeric_value(self):
        cfg = config.default_config()
        cfg["schedule"]["vpp"] = "fast"
        with pytest.raises(ConfigError, match="vpp"):
            config.RunConfig(cfg).schedule()


class TestGrids:
    def test_parse_grid(self):
        grid = config.parse_grid("10:160:151")
        assert grid[0] == 10.0 and grid[-1] == 160.0 and len(grid) == 151
        assert grid[1] - grid[0] == pytest.approx(1.0, rel=1e-12)

    def test_bad_grid_spec(self):
        with pytest.raises(ConfigError):
            config.parse_grid("10:160")
        with pytest.raises(ConfigError):
            config.parse_grid("a:b:c")
        with pytest.raises(ConfigError):
            config.parse_grid("0:1:0")
