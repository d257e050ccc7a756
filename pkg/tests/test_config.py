"""Config file parsing: defaults, strictness, and field-path errors."""

import json

import pytest

from tunnelwell.config import (
    OUTPUT_NAMES,
    default_config,
    load_config,
)
from tunnelwell.errors import ConfigError


def write(tmp_path, text):
    path = tmp_path / "exp.ini"
    path.write_text(text)
    return path


class TestDefaults:
    def test_empty_file_is_the_reference_setup(self, tmp_path):
        cfg = load_config(write(tmp_path, ""))
        assert cfg == default_config()

    def test_reference_values(self):
        cfg = default_config()
        g = cfg.geometry
        assert (g.total_length, g.barrier_left, g.barrier_width) == (73.0, 35.0, 3.0)
        assert g.barrier_height == 360.0
        assert (cfg.packet.center, cfg.packet.width, cfg.packet.momentum) == (
            11.0,
            3.0,
            0.0,
        )
        assert cfg.n_levels == 30
        assert cfg.preset == "natural"
        assert cfg.constants.hbar == 1.0
        assert cfg.rhs_region is None
        assert cfg.sweep is None
        assert cfg.outputs == ("rhs_prob", "entropy", "variance")

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        cfg = load_config(
            write(tmp_path, "# top comment\n\n[geometry]\n; inline\nbarrier_width = 1\n")
        )
        assert cfg.geometry.barrier_width == 1.0

    def test_mapping_is_json_ready(self):
        text = json.dumps(default_config().as_mapping(), sort_keys=True)
        for section in ("constants", "geometry", "packet", "evolution", "outputs"):
            assert section in text


class TestStrictNames:
    def test_unknown_key_suggests_spelling(self, tmp_path):
        with pytest.raises(ConfigError, match=r"barier_height.*barrier_height"):
            load_config(write(tmp_path, "[geometry]\nbarier_height = 10\n"))

    def test_unknown_section_suggests_spelling(self, tmp_path):
        with pytest.raises(ConfigError, match=r"geomtry.*geometry"):
            load_config(write(tmp_path, "[geomtry]\nbarrier_height = 10\n"))

    def test_unknown_output_suggests_spelling(self, tmp_path):
        with pytest.raises(ConfigError, match=r"entrpy.*entropy"):
            load_config(write(tmp_path, "[outputs]\nseries = entrpy\n"))

    def test_unrelated_name_gets_no_suggestion(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown key 'zzzz'"):
            load_config(write(tmp_path, "[geometry]\nzzzz = 10\n"))

    def test_malformed_ini_reports_parse_failure(self, tmp_path):
        with pytest.raises(ConfigError, match="malformed"):
            load_config(write(tmp_path, "no section header\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.ini")


class TestValidation:
    def test_barrier_must_fit_names_field(self, tmp_path):
        text = "[geometry]\nbarrier_left = 70\nbarrier_width = 3\n"
        with pytest.raises(ConfigError, match=r"geometry\.barrier_left"):
            load_config(write(tmp_path, text))

    def test_non_numeric_value_names_field(self, tmp_path):
        with pytest.raises(ConfigError, match=r"geometry\.barrier_height.*float"):
            load_config(write(tmp_path, "[geometry]\nbarrier_height = tall\n"))

    def test_packet_width_positive(self, tmp_path):
        with pytest.raises(ConfigError, match=r"packet\.width"):
            load_config(write(tmp_path, "[packet]\nwidth = 0\n"))

    def test_packet_center_inside_box(self, tmp_path):
        with pytest.raises(ConfigError, match=r"packet\.center"):
            load_config(write(tmp_path, "[packet]\ncenter = 80\n"))

    def test_window_ordering(self, tmp_path):
        text = "[evolution]\nt_start = 5\nt_end = 5\n"
        with pytest.raises(ConfigError, match=r"evolution\.t_end"):
            load_config(write(tmp_path, text))

    def test_sample_floor(self, tmp_path):
        with pytest.raises(ConfigError, match=r"evolution\.samples"):
            load_config(write(tmp_path, "[evolution]\nsamples = 1\n"))

    def test_levels_floor(self, tmp_path):
        with pytest.raises(ConfigError, match=r"evolution\.levels"):
            load_config(write(tmp_path, "[evolution]\nlevels = 0\n"))

    def test_integer_field_rejects_decimal(self, tmp_path):
        with pytest.raises(ConfigError, match=r"evolution\.levels.*int"):
            load_config(write(tmp_path, "[evolution]\nlevels = 12.5\n"))

    def test_unknown_preset(self, tmp_path):
        with pytest.raises(ConfigError, match=r"constants\.preset"):
            load_config(write(tmp_path, "[constants]\npreset = bogus\n"))

    def test_paper_preset_scales(self, tmp_path):
        cfg = load_config(write(tmp_path, "[constants]\npreset = paper\n"))
        assert cfg.constants.hbar == pytest.approx(6.5821220e-16)


class TestRhsRegion:
    def test_auto_keyword(self, tmp_path):
        cfg = load_config(write(tmp_path, "[evolution]\nrhs_region = auto\n"))
        assert cfg.rhs_region is None

    def test_explicit_pair(self, tmp_path):
        cfg = load_config(write(tmp_path, "[evolution]\nrhs_region = 38, 73\n"))
        assert cfg.rhs_region == (38.0, 73.0)

    def test_reversed_pair_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"evolution\.rhs_region"):
            load_config(write(tmp_path, "[evolution]\nrhs_region = 70, 40\n"))

    def test_wrong_arity_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"evolution\.rhs_region"):
            load_config(write(tmp_path, "[evolution]\nrhs_region = 38\n"))


class TestSweep:
    def test_values_parse_with_commas_or_spaces(self, tmp_path):
        cfg = load_config(
            write(tmp_path, "[sweep]\naxis = barrier_height\nvalues = 7, 360 5760\n")
        )
        assert cfg.sweep.axis == "barrier_height"
        assert cfg.sweep.values == (7.0, 360.0, 5760.0)

    def test_axis_typo_suggestion(self, tmp_path):
        text = "[sweep]\naxis = barrier_hieght\nvalues = 1\n"
        with pytest.raises(ConfigError, match=r"sweep\.axis.*barrier_height"):
            load_config(write(tmp_path, text))

    def test_values_required(self, tmp_path):
        with pytest.raises(ConfigError, match=r"sweep\.values"):
            load_config(write(tmp_path, "[sweep]\naxis = barrier_height\n"))

    def test_position_must_fit_in_box(self, tmp_path):
        text = "[sweep]\naxis = barrier_position\nvalues = 35, 71\n"
        with pytest.raises(ConfigError, match=r"sweep\.values"):
            load_config(write(tmp_path, text))

    def test_negative_height_rejected(self, tmp_path):
        text = "[sweep]\naxis = barrier_height\nvalues = -3\n"
        with pytest.raises(ConfigError, match=r"sweep\.values"):
            load_config(write(tmp_path, text))


class TestOutputs:
    def test_canonical_order_and_dedupe(self, tmp_path):
        text = "[outputs]\nseries = variance rhs_prob variance entropy\n"
        cfg = load_config(write(tmp_path, text))
        assert cfg.outputs == ("rhs_prob", "entropy", "variance")

    def test_all_names_accepted(self, tmp_path):
        text = "[outputs]\nseries = " + " ".join(OUTPUT_NAMES) + "\n"
        cfg = load_config(write(tmp_path, text))
        assert cfg.outputs == OUTPUT_NAMES


class TestDivergenceSettings:
    def test_defaults(self):
        d = default_config().divergence
        assert d.threshold == pytest.approx(125.58)
        assert d.metric == "variance"
        assert d.mode == "two-term"

    def test_bad_metric_suggestion(self, tmp_path):
        with pytest.raises(ConfigError, match=r"divergence\.metric.*rms"):
            load_config(write(tmp_path, "[divergence]\nmetric = rsm\n"))

    def test_threshold_positive(self, tmp_path):
        with pytest.raises(ConfigError, match=r"divergence\.threshold"):
            load_config(write(tmp_path, "[divergence]\nthreshold = 0\n"))
