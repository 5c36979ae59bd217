"""CLI contract tests: subcommands, exit codes, file formats."""

import numpy as np
import pytest

from pumpsim import config
from pumpsim.cli import main
from pumpsim.oscilloscope import write_channels
from pumpsim.power import LoadModel, synthesize_channel


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "pump.ini"
    config.save_config(config.default_config(), path)
    return str(path)


@pytest.fixture
def calibrated_cfg(cfg_path):
    assert main(["calibrate", "--config", cfg_path]) == 0
    return cfg_path


def read_csv(path):
    comments, header, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    return comments, header, rows


class TestCalibrate:
    def test_writes_fitted_sections(self, calibrated_cfg):
        cfg = config.load_config(calibrated_cfg)
        assert "q_cal_ul_min" in cfg["pump"]
        assert float(cfg["pump"]["f_c_hz"]) == pytest.approx(78.9644, rel=1e-4)
        assert "tan_delta" in cfg["load"]

    def test_needs_config_path(self, capsys):
        assert main(["calibrate"]) == 2

    def test_unreachable_power_anchor_exits_6(self, tmp_path, capsys):
        cfg = config.default_config()
        cfg["anchors"]["power_mw"] = "1000000"
        path = tmp_path / "bad.ini"
        config.save_config(cfg, path)
        assert main(["calibrate", "--config", str(path)]) == 6
        assert "calibration failed" in capsys.readouterr().err


class TestExitCodes:
    def test_uncalibrated_is_3_and_mentions_calibrate(self, cfg_path, capsys):
        assert main(["freq-sweep", "--config", cfg_path]) == 3
        assert "calibrate" in capsys.readouterr().err

    def test_bad_schema_is_2(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[meta]\nschema = 9\n")
        assert main(["freq-sweep", "--config", str(path)]) == 2
        assert "schema" in capsys.readouterr().err

    def test_malformed_csv_is_4_with_line_number(self, tmp_path, calibrated_cfg,
                                                 capsys):
        rec = tmp_path / "rec.csv"
        rec.write_text("t_s,vl1_V\n0,1\n")
        assert main(["power-csv", str(rec), "--config", calibrated_cfg]) == 4
        assert "line 1" in capsys.readouterr().err

    def test_protocol_violation_is_5_with_timestamp(self, calibrated_cfg,
                                                    capsys):
        code = main(["simulate", "--config", calibrated_cfg,
                     "--offsets", "0,0,0"])
        assert code == 5
        err = capsys.readouterr().err
        assert "t = " in err


class TestSweeps:
    def test_freq_sweep_peak_row(self, tmp_path, calibrated_cfg):
        out = tmp_path / "freq.csv"
        assert main(["freq-sweep", "--config", calibrated_cfg,
                     "--grid", "10:160:151", "--out", str(out)]) == 0
        comments, header, rows = read_csv(out)
        assert header == ["vpp_V", "freq_Hz", "dp_Pa", "flow_ul_min"]
        assert any(c.startswith("# config_hash:") for c in comments)
        flows = {row[1]: row[3] for row in rows}
        assert max(flows, key=flows.get) == 60.0
        assert flows[60.0] == pytest.approx(900.0, rel=1e-6)

    def test_freq_sweep_below_dead_zone_all_zero(self, tmp_path, calibrated_cfg):
        out = tmp_path / "freq30.csv"
        assert main(["freq-sweep", "--config", calibrated_cfg, "--vpp", "30",
                     "--grid", "10:160:16", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        assert all(row[3] == 0.0 for row in rows)

    def test_single_point_grid(self, tmp_path, calibrated_cfg):
        out = tmp_path / "one.csv"
        assert main(["freq-sweep", "--config", calibrated_cfg,
                     "--grid", "60:60:1", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        assert len(rows) == 1

    def test_pq_endpoints(self, tmp_path, calibrated_cfg):
        out = tmp_path / "pq.csv"
        assert main(["pq", "--config", calibrated_cfg, "--points", "7",
                     "--out", str(out)]) == 0
        _, header, rows = read_csv(out)
        assert header == ["vpp_V", "freq_Hz", "dp_Pa", "flow_ul_min"]
        assert rows[0][2] == 0.0
        assert rows[0][3] == pytest.approx(900.0, rel=1e-6)
        assert rows[-1][2] == pytest.approx(1800.0, rel=1e-6)
        assert rows[-1][3] == 0.0

    def test_volt_sweep_monotone(self, tmp_path, calibrated_cfg):
        out = tmp_path / "volt.csv"
        assert main(["volt-sweep", "--config", calibrated_cfg,
                     "--grid", "0:160:17", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        flows = [row[3] for row in rows]
        assert all(a <= b for a, b in zip(flows, flows[1:]))

    def test_deflection_monotone_with_zero_first_row(self, tmp_path, cfg_path):
        out = tmp_path / "defl.csv"
        assert main(["deflection", "--config", cfg_path,
                     "--grid", "0:160:9", "--out", str(out)]) == 0
        _, header, rows = read_csv(out)
        assert header == ["vpp_V", "deflection_um"]
        assert rows[0] == [0.0, 0.0]
        defl = [row[1] for row in rows]
        assert all(a <= b for a, b in zip(defl, defl[1:]))
        # linear model ratio test on the grid (9-digit CSV quantization)
        assert rows[4][1] == pytest.approx(2.0 * rows[2][1], rel=1e-7)

    def test_deflection_beta_dominates_linear(self, tmp_path, cfg_path):
        out_lin = tmp_path / "lin.csv"
        out_soft = tmp_path / "soft.csv"
        main(["deflection", "--config", cfg_path, "--grid", "20:160:8",
              "--out", str(out_lin)])
        main(["deflection", "--config", cfg_path, "--grid", "20:160:8",
              "--beta", "2e-7", "--out", str(out_soft)])
        _, _, lin = read_csv(out_lin)
        _, _, soft = read_csv(out_soft)
        assert all(s[1] > l[1] for s, l in zip(soft, lin))


class TestPower:
    def test_power_sweep_monotone_in_vpp(self, tmp_path, calibrated_cfg):
        out = tmp_path / "power.csv"
        assert main(["power", "--config", calibrated_cfg,
                     "--vpp-grid", "20:160:8", "--freq-grid", "60:60:1",
                     "--out", str(out)]) == 0
        _, header, rows = read_csv(out)
        assert header == ["vpp_V", "freq_Hz", "power_mW"]
        assert len(rows) == 8
        powers = [row[2] for row in rows]
        assert all(a < b for a, b in zip(powers, powers[1:]))
        assert powers[-1] == pytest.approx(45.0, rel=1e-3)

    def test_power_csv_resistive_fixture(self, tmp_path, calibrated_cfg):
        # v_e = v_l: each channel dissipates V_rms^2 / R in the "load"
        f, spp = 60.0, 500
        t = np.arange(spp + 1) / (spp * f)
        from pumpsim.power import Waveform
        pairs = []
        for amp in (10.0, 20.0, 30.0):
            s = amp * np.sin(2 * np.pi * f * t)
            pairs.append((Waveform(sample_rate=spp * f, samples=s),
                          Waveform(sample_rate=spp * f, samples=s)))
        rec = tmp_path / "resistive.csv"
        write_channels(rec, pairs, sample_rate=spp * f)
        out = tmp_path / "power.csv"
        assert main(["power-csv", str(rec), "--config", calibrated_cfg,
                     "--freq", "60", "--out", str(out)]) == 0
        _, header, rows = read_csv(out)
        assert header == ["p1_W", "p2_W", "p3_W", "total_W"]
        p1, p2, p3, total = rows[0]
        assert p1 == pytest.approx(10.0 ** 2 / 2000.0, rel=1e-4)
        assert p2 == pytest.approx(20.0 ** 2 / 2000.0, rel=1e-4)
        assert p3 == pytest.approx(30.0 ** 2 / 2000.0, rel=1e-4)
        assert total == pytest.approx(p1 + p2 + p3, rel=1e-9)

    def test_power_csv_ideal_capacitor_fixture(self, tmp_path, calibrated_cfg):
        model = LoadModel(c_eff=100e-9, tan_delta=0.0)
        pairs = [synthesize_channel(model, 160.0, 60.0, phase=o,
                                    samples_per_period=400)
                 for o in (0.0, -2 * np.pi / 3, -4 * np.pi / 3)]
        rec = tmp_path / "cap.csv"
        write_channels(rec, pairs, sample_rate=400 * 60.0)
        out = tmp_path / "power.csv"
        assert main(["power-csv", str(rec), "--config", calibrated_cfg,
                     "--freq", "60", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        assert abs(rows[0][3]) < 1e-5

    def test_record_shorter_than_period_is_4(self, tmp_path, calibrated_cfg):
        model = LoadModel(c_eff=100e-9, tan_delta=0.0)
        pairs = [synthesize_channel(model, 160.0, 60.0, phase=o,
                                    samples_per_period=400)
                 for o in (0.0, -2 * np.pi / 3, -4 * np.pi / 3)]
        rec = tmp_path / "cap.csv"
        write_channels(rec, pairs, sample_rate=400 * 60.0)
        assert main(["power-csv", str(rec), "--config", calibrated_cfg,
                     "--freq", "30"]) == 4


class TestSimulate:
    def test_trace_and_verdict(self, tmp_path, calibrated_cfg, capsys):
        out = tmp_path / "trace.csv"
        assert main(["simulate", "--config", calibrated_cfg, "--steps", "200",
                     "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        assert "sealing check: PASS" in stdout
        comments, header, rows = read_csv(out)
        assert header == ["t_s", "vol0_ul", "vol1_ul", "vol2_ul"]
        assert len(rows) == 201
        assert any("sealing: PASS" in c for c in comments)

    def _net_from(self, path):
        comments, _, _ = read_csv(path)
        for c in comments:
            if "net_displaced_ul_per_cycle" in c:
                return float(c.split(":")[1])
        raise AssertionError("net volume comment missing")

    def test_reverse_negates_net(self, tmp_path, calibrated_cfg):
        fwd = tmp_path / "fwd.csv"
        rev = tmp_path / "rev.csv"
        main(["simulate", "--config", calibrated_cfg, "--steps", "400",
              "--out", str(fwd)])
        main(["simulate", "--config", calibrated_cfg, "--steps", "400",
              "--reverse", "--out", str(rev)])
        assert self._net_from(rev) == -self._net_from(fwd)
        assert self._net_from(fwd) > 0.0

    def test_deflection_override(self, tmp_path, calibrated_cfg):
        out = tmp_path / "trace.csv"
        assert main(["simulate", "--config", calibrated_cfg, "--steps", "2000",
                     "--deflection-um", "50", "--out", str(out)]) == 0
        # net = 0.75 * shape_factor * area * stroke = 0.6 ul at 50 um
        assert self._net_from(out) == pytest.approx(0.6, rel=5e-3)


class TestDeterminismAndSvg:
    def test_byte_identical_reruns(self, tmp_path, calibrated_cfg):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            assert main(["freq-sweep", "--config", calibrated_cfg,
                         "--grid", "10:160:51", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_hash_tracks_config(self, tmp_path, calibrated_cfg, cfg_path):
        out1 = tmp_path / "h1.csv"
        main(["freq-sweep", "--config", calibrated_cfg, "--grid", "60:60:1",
              "--out", str(out1)])
        out2 = tmp_path / "h2.csv"
        main(["freq-sweep", "--config", calibrated_cfg, "--vpp", "120",
              "--grid", "60:60:1", "--out", str(out2)])
        h1 = [c for c in read_csv(out1)[0] if "config_hash" in c]
        h2 = [c for c in read_csv(out2)[0] if "config_hash" in c]
        assert h1 != h2

    def test_svg_rendered(self, tmp_path, calibrated_cfg):
        out = tmp_path / "freq.csv"
        assert main(["freq-sweep", "--config", calibrated_cfg,
                     "--grid", "10:160:16", "--svg", "--out", str(out)]) == 0
        svg = tmp_path / "freq.svg"
        text = svg.read_text()
        assert text.startswith("<svg")
        assert "polyline" in text

    def test_svg_needs_out_file(self, calibrated_cfg, capsys):
        assert main(["freq-sweep", "--config", calibrated_cfg,
                     "--grid", "10:160:4", "--svg"]) == 2


class TestEnvFallback:
    def test_pumpsim_config_env(self, tmp_path, calibrated_cfg, monkeypatch):
        monkeypatch.setenv("PUMPSIM_CONFIG", calibrated_cfg)
        out = tmp_path / "env.csv"
        assert main(["freq-sweep", "--grid", "60:60:1", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        assert rows[0][3] == pytest.approx(900.0, rel=1e-6)
