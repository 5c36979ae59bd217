"""Oscilloscope CSV wire-format tests."""

import numpy as np
import pytest

from pumpsim.errors import DataFormatError
from pumpsim.oscilloscope import HEADER, read_channels, write_channels
from pumpsim.power import LoadModel, synthesize_channel, total_power


def make_fixture(path, tan_delta=0.05, samples_per_period=200, f=60.0):
    model = LoadModel(c_eff=100e-9, tan_delta=tan_delta)
    offsets = (0.0, -2 * np.pi / 3, -4 * np.pi / 3)
    pairs = [synthesize_channel(model, 160.0, f, phase=o,
                                samples_per_period=samples_per_period)
             for o in offsets]
    write_channels(path, pairs, sample_rate=samples_per_period * f)
    return model, pairs


class TestRoundTrip:
    def test_write_then_read_preserves_power(self, tmp_path):
        path = tmp_path / "rec.csv"
        model, pairs = make_fixture(path)
        direct = total_power(pairs, model.r_e, 1.0 / 60.0)
        read_pairs, sample_rate = read_channels(path)
        assert sample_rate == pytest.approx(200 * 60.0, rel=1e-6)
        replayed = total_power(read_pairs, model.r_e, 1.0 / 60.0)
        assert replayed.total == pytest.approx(direct.total, rel=1e-6)

    def test_channels_keep_order(self, tmp_path):
        path = tmp_path / "rec.csv"
        _, pairs = make_fixture(path)
        read_pairs, _ = read_channels(path)
        for (v_l, v_e), (r_l, r_e_) in zip(pairs, read_pairs):
            assert np.allclose(r_l.samples, v_l.samples, atol=1e-6)
            assert np.allclose(r_e_.samples, v_e.samples, atol=1e-9)


class TestRejection:
    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,volts\n0,1\n1,2\n")
        with pytest.raises(DataFormatError) as err:
            read_channels(path)
        assert err.value.line == 1

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(HEADER + "\n0,1,2,3,4,5,6\n0.001,1,2,3\n")
        with pytest.raises(DataFormatError) as err:
            read_channels(path)
        assert err.value.line == 3

    def test_unparseable_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(HEADER + "\n0,1,2,3,4,5,6\n0.001,1,x,3,4,5,6\n")
        with pytest.raises(DataFormatError) as err:
            read_channels(path)
        assert err.value.line == 3

    def test_jitter_rejected_with_line_number(self, tmp_path):
        path = tmp_path / "rec.csv"
        make_fixture(path, samples_per_period=50)
        lines = path.read_text().splitlines()
        # perturb one timestamp by 1% of the step (limit is 0.1%)
        bad_index = 20
        fields = lines[bad_index].split(",")
        t = float(fields[0])
        fields[0] = f"{t + 0.01 / (50 * 60.0):.9g}"
        lines[bad_index] = ",".join(fields)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataFormatError) as err:
            read_channels(path)
        assert err.value.line in (bad_index + 1, bad_index + 2)  # edited row
        assert "jitter" in str(err.value)

    def test_too_few_rows(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(HEADER + "\n0,1,2,3,4,5,6\n")
        with pytest.raises(DataFormatError):
            read_channels(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("")
        with pytest.raises(DataFormatError) as err:
            read_channels(path)
        assert err.value.line == 1

    def test_non_increasing_time(self, tmp_path):
        path = tmp_path / "bad.csv"
        rows = [HEADER]
        for t in (0.0, 1.0, 0.5, 1.5):
            rows.append(",".join([str(t)] + ["0"] * 6))
        path.write_text("\n".join(rows) + "\n")
        with pytest.raises(DataFormatError):
            read_channels(path)
