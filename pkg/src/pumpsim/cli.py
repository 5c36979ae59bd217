"""Command-line front end.

Subcommands: deflection, freq-sweep, volt-sweep, pq, power, power-csv,
simulate, calibrate. Every command reads one configuration file
(--config, falling back to $PUMPSIM_CONFIG, then built-in defaults),
applies flag overrides, and emits CSV with an embedded provenance block;
--svg additionally renders a line chart next to the CSV.

Exit codes (stable contract): 0 success, 2 configuration problem,
3 parameters not calibrated, 4 bad input data file, 5 driving-protocol
violation, 6 calibration failure.
"""

import argparse
import contextlib
import os
import sys

from . import __version__, config, drive, laminate, oscilloscope, output, power, pump, units
from .errors import (
    CalibrationError,
    ConfigError,
    DataFormatError,
    NotCalibratedError,
    ProtocolViolationError,
    ValidationError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCALIBRATED = 3
EXIT_DATA = 4
EXIT_PROTOCOL = 5
EXIT_CALIBRATION = 6


def _resolve_config(args):
    path = args.config or os.environ.get("PUMPSIM_CONFIG") or None
    cfg = config.load_config(path)
    overrides = {}
    for section, key, attr, conv in (
        ("schedule", "vpp", "vpp", str),
        ("schedule", "frequency_hz", "freq", str),
        ("schedule", "shape", "shape", str),
        ("schedule", "offsets_deg", "offsets", str),
        ("actuator", "beta_m_per_v", "beta", str),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[(section, key)] = conv(value)
    cfg = config.apply_overrides(cfg, overrides)
    return config.RunConfig(cfg), path


def _provenance(rc, command):
    return {
        "tool": "pumpsim",
        "version": __version__,
        "command": command,
        "config_hash": rc.hash,
    }


@contextlib.contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _emit(args, sweep, chart_series, x_label, y_label, trailer=()):
    with _open_out(args.out) as fh:
        output.write_sweep_csv(fh, sweep, trailer=trailer)
    if args.svg:
        if args.out == "-":
            raise ConfigError("--svg needs --out <file> to name the chart")
        svg_path = os.path.splitext(args.out)[0] + ".svg"
        with open(svg_path, "w", encoding="utf-8", newline="\n") as fh:
            output.render_line_chart(
                fh, chart_series, x_label, y_label,
                title=f"pumpsim {sweep.provenance['command']}",
                provenance=sweep.provenance,
            )


def _grid_override(args, default_grid):
    if getattr(args, "grid", None) is not None:
        return config.parse_grid(args.grid, "--grid")
    return default_grid


def cmd_deflection(args):
    rc, _ = _resolve_config(args)
    stack = rc.stack()
    beta = rc.beta()
    grid = _grid_override(args, rc.vpp_grid())
    rows = []
    for vpp in grid:
        w = laminate.actuation_deflection(
            stack, float(vpp), beta=beta, envelope_vpp=rc.envelope_vpp(),
        )
        rows.append((float(vpp), units.um_from_m(w)))
    sweep = output.SweepResult(
        columns=("vpp_V", "deflection_um"),
        rows=rows,
        axes={"vpp_V": list(grid)},
        provenance=_provenance(rc, "deflection"),
    )
    _emit(args, sweep, [("deflection", [r[0] for r in rows], [r[1] for r in rows])],
          "drive (Vp-p)", "deflection (um)")
    return EXIT_OK


def cmd_freq_sweep(args):
    rc, _ = _resolve_config(args)
    params = rc.pump_params()
    vpp = rc.schedule().vpp
    grid = _grid_override(args, rc.freq_grid())
    rows = [
        (vpp, float(f), 0.0,
         units.ul_min_from_m3s(pump.flow_rate(params, vpp, float(f), 0.0)))
        for f in grid
    ]
    sweep = output.SweepResult(
        columns=("vpp_V", "freq_Hz", "dp_Pa", "flow_ul_min"),
        rows=rows,
        axes={"freq_Hz": list(grid)},
        provenance=_provenance(rc, "freq-sweep"),
    )
    _emit(args, sweep, [("flow", [r[1] for r in rows], [r[3] for r in rows])],
          "frequency (Hz)", "flow (ul/min)")
    return EXIT_OK


def cmd_volt_sweep(args):
    rc, _ = _resolve_config(args)
    params = rc.pump_params()
    f = rc.schedule().frequency
    grid = _grid_override(args, rc.vpp_grid())
    rows = [
        (float(vpp), f, 0.0,
         units.ul_min_from_m3s(pump.flow_rate(params, float(vpp), f, 0.0)))
        for vpp in grid
    ]
    sweep = output.SweepResult(
        columns=("vpp_V", "freq_Hz", "dp_Pa", "flow_ul_min"),
        rows=rows,
        axes={"vpp_V": list(grid)},
        provenance=_provenance(rc, "volt-sweep"),
    )
    _emit(args, sweep, [("flow", [r[0] for r in rows], [r[3] for r in rows])],
          "drive (Vp-p)", "flow (ul/min)")
    return EXIT_OK


def cmd_pq(args):
    rc, _ = _resolve_config(args)
    params = rc.pump_params()
    schedule = rc.schedule()
    n_points = args.points if args.points is not None else rc.dp_points()
    curve = pump.pq_curve(params, schedule.vpp, schedule.frequency, n_points)
    rows = [
        (schedule.vpp, schedule.frequency, dp, units.ul_min_from_m3s(q))
        for dp, q in curve
    ]
    sweep = output.SweepResult(
        columns=("vpp_V", "freq_Hz", "dp_Pa", "flow_ul_min"),
        rows=rows,
        axes={"dp_Pa": [dp for dp, _ in curve]},
        provenance=_provenance(rc, "pq"),
    )
    _emit(args, sweep, [("flow", [r[2] for r in rows], [r[3] for r in rows])],
          "backpressure (Pa)", "flow (ul/min)")
    return EXIT_OK


def cmd_power(args):
    rc, _ = _resolve_config(args)
    load = rc.load_model()
    vpp_grid = (config.parse_grid(args.vpp_grid, "--vpp-grid")
                if args.vpp_grid is not None else rc.vpp_grid())
    freq_grid = (config.parse_grid(args.freq_grid, "--freq-grid")
                 if args.freq_grid is not None else rc.freq_grid())
    spp = rc.samples_per_period()
    rows = []
    for vpp in vpp_grid:
        for f in freq_grid:
            result = power.synthesized_total_power(
                load, float(vpp), float(f), samples_per_period=spp,
            )
            rows.append((float(vpp), float(f), units.mw_from_w(result.total)))
    sweep = output.SweepResult(
        columns=("vpp_V", "freq_Hz", "power_mW"),
        rows=rows,
        axes={"vpp_V": list(vpp_grid), "freq_Hz": list(freq_grid)},
        provenance=_provenance(rc, "power"),
    )
    nf = len(freq_grid)
    series = [
        (f"{vpp:g} Vp-p", [r[1] for r in rows[i * nf:(i + 1) * nf]],
         [r[2] for r in rows[i * nf:(i + 1) * nf]])
        for i, vpp in enumerate(vpp_grid)
    ]
    _emit(args, sweep, series, "frequency (Hz)", "power (mW)")
    return EXIT_OK


def cmd_power_csv(args):
    rc, _ = _resolve_config(args)
    pairs, _ = oscilloscope.read_channels(args.file)
    if args.freq_value is not None:
        if args.freq_value <= 0.0:
            raise ConfigError("--freq must be > 0")
        frequency = args.freq_value
    else:
        frequency = rc.schedule().frequency
    r_e = float(rc.data["load"]["r_e_ohm"])
    try:
        result = power.total_power(pairs, r_e, 1.0 / float(frequency))
    except ValidationError as exc:
        # Record does not support the requested averaging window.
        raise DataFormatError(str(exc))
    rows = [tuple(result.per_actuator) + (result.total,)]
    sweep = output.SweepResult(
        columns=("p1_W", "p2_W", "p3_W", "total_W"),
        rows=rows,
        axes={},
        provenance=_provenance(rc, "power-csv"),
    )
    with _open_out(args.out) as fh:
        output.write_sweep_csv(fh, sweep)
    return EXIT_OK


def cmd_simulate(args):
    rc, _ = _resolve_config(args)
    schedule = rc.schedule()
    if args.reverse:
        schedule = drive.reverse(schedule)
    if args.deflection_um is not None:
        deflection = units.m_from_um(float(args.deflection_um))
    else:
        deflection = laminate.actuation_deflection(
            rc.stack(), schedule.vpp, beta=rc.beta(),
            envelope_vpp=rc.envelope_vpp(),
        )
    params = pump.PumpParams(
        chamber_area=units.m2_from_mm2(float(rc.data["pump"]["chamber_area_mm2"])),
        shape_factor=float(rc.data["pump"]["shape_factor"]),
    )
    trace = pump.simulate_cycle(
        schedule, params, deflection, steps=args.steps,
        seal_threshold=rc.seal_threshold(),
    )
    rows = [
        (trace.times[i],
         units.ul_from_m3(trace.volumes[0, i]),
         units.ul_from_m3(trace.volumes[1, i]),
         units.ul_from_m3(trace.volumes[2, i]))
        for i in range(trace.times.size)
    ]
    trailer = (
        "sealing: PASS",
        f"net_displaced_ul_per_cycle: {output.fmt(units.ul_from_m3(trace.net_volume))}",
        f"inlet_ul_per_cycle: {output.fmt(units.ul_from_m3(trace.inlet_volume))}",
        f"outlet_ul_per_cycle: {output.fmt(units.ul_from_m3(trace.outlet_volume))}",
    )
    sweep = output.SweepResult(
        columns=("t_s", "vol0_ul", "vol1_ul", "vol2_ul"),
        rows=rows,
        axes={"t_s": list(trace.times)},
        provenance=_provenance(rc, "simulate"),
    )
    _emit(args, sweep,
          [(f"chamber {k}", [r[0] for r in rows], [r[1 + k] for r in rows])
           for k in range(3)],
          "time (s)", "chamber volume (ul)", trailer=trailer)
    if args.out != "-":
        print("sealing check: PASS")
        print(
            "net displaced volume: "
            f"{units.ul_from_m3(trace.net_volume):.6g} ul/cycle"
        )
    return EXIT_OK


def cmd_calibrate(args):
    rc, path = _resolve_config(args)
    target = args.out if args.out != "-" else (args.config or path)
    if target is None:
        raise ConfigError(
            "calibrate needs a config file to update: pass --config <file> "
            "(or --out <file> for a fresh one)"
        )
    try:
        params = pump.calibrate(
            rc.flow_anchors(),
            chamber_area=units.m2_from_mm2(
                float(rc.data["pump"]["chamber_area_mm2"])),
            shape_factor=float(rc.data["pump"]["shape_factor"]),
            n_roll=float(rc.data["pump"]["n_roll"]),
        )
        anchor, watts = rc.power_anchor()
        load = power.calibrate_load(
            [(anchor, watts)],
            c_eff=units.f_from_nf(float(rc.data["load"]["c_eff_nf"])),
            r_e=float(rc.data["load"]["r_e_ohm"]),
        )
    except ValidationError as exc:
        # Unusable anchors are a calibration failure from the CLI's view.
        raise CalibrationError(f"anchor set is unusable: {exc}")

    cfg = {s: dict(kv) for s, kv in rc.data.items()}
    cfg["pump"].update({
        "v_threshold_vpp": f"{params.v_threshold:.12g}",
        "q_cal_ul_min": f"{units.ul_min_from_m3s(params.q_cal):.12g}",
        "p_max_cal_kpa": f"{units.kpa_from_pa(params.p_max_cal):.12g}",
        "f_c_hz": f"{params.f_c:.12g}",
        "anchor_vpp": f"{params.v_anchor:.12g}",
        "anchor_freq_hz": f"{params.f_anchor:.12g}",
    })
    cfg["load"].update({
        "c_eff_nf": f"{units.nf_from_f(load.c_eff):.12g}",
        "tan_delta": f"{load.tan_delta:.12g}",
    })
    config.save_config(cfg, target)
    print(f"calibrated parameters written to {target}")
    print(f"  f_c = {params.f_c:.6g} Hz, q_cal = "
          f"{units.ul_min_from_m3s(params.q_cal):.6g} ul/min, "
          f"p_max = {units.kpa_from_pa(params.p_max_cal):.6g} kPa")
    print(f"  c_eff = {units.nf_from_f(load.c_eff):.6g} nF, "
          f"tan_delta = {load.tan_delta:.6g}")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file "
                        "(default: $PUMPSIM_CONFIG, then built-in defaults)")
    common.add_argument("--out", default="-",
                        help="output path ('-' for stdout)")
    common.add_argument("--svg", action="store_true",
                        help="also render an SVG chart next to the CSV")

    parser = argparse.ArgumentParser(
        prog="pumpsim",
        description="Peristaltic micropump simulation and analysis",
    )
    parser.add_argument("--version", action="version",
                        version=f"pumpsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deflection", parents=[common],
                       help="actuator deflection versus drive voltage")
    p.add_argument("--grid", help="vpp grid as start:stop:count")
    p.add_argument("--beta", dest="beta", help="d31 field-nonlinearity factor (m/V)")
    p.set_defaults(func=cmd_deflection)

    p = sub.add_parser("freq-sweep", parents=[common],
                       help="flow rate versus driving frequency")
    p.add_argument("--vpp", help="drive amplitude (Vp-p)")
    p.add_argument("--grid", help="frequency grid as start:stop:count")
    p.set_defaults(func=cmd_freq_sweep)

    p = sub.add_parser("volt-sweep", parents=[common],
                       help="flow rate versus drive voltage")
    p.add_argument("--freq", help="driving frequency (Hz)")
    p.add_argument("--grid", help="vpp grid as start:stop:count")
    p.set_defaults(func=cmd_volt_sweep)

    p = sub.add_parser("pq", parents=[common],
                       help="flow rate versus backpressure load line")
    p.add_argument("--vpp", help="drive amplitude (Vp-p)")
    p.add_argument("--freq", help="driving frequency (Hz)")
    p.add_argument("--points", type=int, help="number of load-line points")
    p.set_defaults(func=cmd_pq)

    p = sub.add_parser("power", parents=[common],
                       help="synthesized drive power over vpp x frequency")
    p.add_argument("--vpp-grid", help="vpp grid as start:stop:count")
    p.add_argument("--freq-grid", help="frequency grid as start:stop:count")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("power-csv", parents=[common],
                       help="mean power from a recorded oscilloscope CSV")
    p.add_argument("file", help="oscilloscope CSV "
                   "(t_s,vl1_V,ve1_V,vl2_V,ve2_V,vl3_V,ve3_V)")
    p.add_argument("--freq", dest="freq_value", type=float,
                   help="driving frequency of the record (Hz); defaults to "
                        "the configured schedule frequency")
    p.set_defaults(func=cmd_power_csv)

    p = sub.add_parser("simulate", parents=[common],
                       help="one quasi-static pumping cycle with seal checks")
    p.add_argument("--vpp", help="drive amplitude (Vp-p)")
    p.add_argument("--freq", help="driving frequency (Hz)")
    p.add_argument("--shape", choices=drive.SHAPES, help="waveform shape")
    p.add_argument("--offsets", help="per-actuator phase offsets in degrees, "
                                     "comma separated")
    p.add_argument("--reverse", action="store_true",
                   help="swap the outer phases to reverse the flow")
    p.add_argument("--steps", type=int, default=1000,
                   help="time steps per period (default 1000)")
    p.add_argument("--deflection-um", type=float, dest="deflection_um",
                   help="override the actuator stroke instead of computing "
                        "it from the stack")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", parents=[common],
                       help="fit pump and load parameters to the [anchors] "
                            "section and write them back")
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"pumpsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotCalibratedError as exc:
        print(f"pumpsim: {exc}", file=sys.stderr)
        return EXIT_UNCALIBRATED
    except DataFormatError as exc:
        print(f"pumpsim: bad input data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProtocolViolationError as exc:
        print(f"pumpsim: protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except CalibrationError as exc:
        print(f"pumpsim: calibration failed: {exc}", file=sys.stderr)
        for label, (target, achieved) in exc.residuals.items():
            print(f"  {label}: target {target:.6g}, achieved {achieved:.6g}",
                  file=sys.stderr)
        return EXIT_CALIBRATION


if __name__ == "__main__":
    sys.exit(main())
