"""Command-line front end.

Exit codes: 0 success, 2 invalid arguments, 3 domain errors raised by the
math, 4 numeric divergence during simulation.  Machine output (csv/json)
carries 17 significant digits; the human tables round for reading.
Frequencies on the command line are plain Hz; the -wc/-wn controller
constants are angular (rad/s), matching how such controllers are quoted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import analysis, controllers, sim, transforms, tuning
from .errors import NumericOverflow, ParamError, SbtkitError

DEFAULTS = {
    "kr": 59.1,
    "wc": 17.907,
    "wn": 5969.0,
    "fs": 20000.0,
    "kp": 2.955,
    "tau_i": 8.594e-4,
    "kr_inv": 44.325,
}

GRID_ENV = "SBT_DEFAULT_GRID"

FMT = ".17g"


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParamError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParamError("config file must hold a JSON object")
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise ParamError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _constants(args) -> dict:
    merged = dict(DEFAULTS)
    merged.update(_load_config(getattr(args, "config", None)))
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _qr(args, kr_key: str = "kr") -> tuple[controllers.QrParams, float]:
    c = _constants(args)
    return controllers.QrParams(c[kr_key], c["wc"], c["wn"]), 1.0 / c["fs"]


def _resolve_method(name: str, p: controllers.QrParams, T: float, args):
    alpha = getattr(args, "alpha", None)
    beta = getattr(args, "beta", None)
    if name == "euler":
        return transforms.Euler()
    if name == "tustin":
        return transforms.Tustin()
    if name == "sota":
        return transforms.TustinPrewarp()
    if name == "sbt":
        if alpha is None and beta is None:
            return transforms.Sbt(controllers.sbt_params_straightforward(p, T))
        a = 0.5 if alpha is None else alpha
        b = transforms.prewarp_factor(p.omega_n, T) if beta is None else beta
        return transforms.Sbt(transforms.SbtParams(a, b))
    raise ParamError(f"unknown method {name!r}")


def _method_list(spec: str, p, T, args, allow_exact: bool = False, allow_pi: bool = False):
    out = []
    for name in spec.split(","):
        name = name.strip().lower()
        if not name:
            continue
        if name == "exact" and allow_exact:
            out.append("exact")
        elif name == "pi" and allow_pi:
            out.append("pi")
        else:
            out.append(_resolve_method(name, p, T, args))
    if not out:
        raise ParamError("no methods requested")
    return out


def _grid_from_args(args, fallback) -> analysis.FrequencyGrid:
    if getattr(args, "grid_file", None):
        return analysis.load_grid_file(args.grid_file)
    if getattr(args, "grid", None):
        lo, hi, n, kind = _parse_grid_spec(args.grid)
        if kind == "log":
            return analysis.FrequencyGrid.logarithmic(lo, hi, n)
        return analysis.FrequencyGrid.linear(lo, hi, n)
    env = os.environ.get(GRID_ENV)
    if env:
        return analysis.load_grid_file(env)
    return fallback()


def _parse_grid_spec(spec: str):
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ParamError("grid spec must be lo:hi:n or lo:hi:n:log")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    kind = parts[3] if len(parts) == 4 else "linear"
    if kind not in ("linear", "log"):
        raise ParamError(f"grid kind must be linear or log, got {kind!r}")
    return lo, hi, n, kind


def _fmt_row(values) -> str:
    return ",".join(format(v, FMT) for v in values)


def cmd_discretize(args) -> int:
    p, T = _qr(args)
    methods = _method_list(args.method, p, T, args)
    rows = []
    for m in methods:
        biq = controllers.qr_discretize(p, m, T)
        row = {
            "method": transforms.method_label(m),
            "a2": biq.a2, "a1": biq.a1, "a0": biq.a0,
            "b2": biq.b2, "b1": biq.b1, "b0": biq.b0,
        }
        if args.diffeq:
            d = controllers.diff_eq_coeffs(biq)
            row.update(kin0=d.kin0, kin1=d.kin1, kin2=d.kin2, kout1=d.kout1, kout2=d.kout2)
        rows.append(row)
    keys = [k for k in rows[0] if k != "method"]
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif args.format == "csv":
        lines = ["method," + ",".join(keys)]
        for r in rows:
            lines.append(r["method"] + "," + _fmt_row(r[k] for k in keys))
        text = "\n".join(lines) + "\n"
    else:
        lines = []
        for r in rows:
            lines.append(r["method"])
            for k in keys:
                lines.append(f"  {k} = {r[k]:.12g}")
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_bode(args) -> int:
    p, T = _qr(args)
    grid = _grid_from_args(args, analysis.default_bode_grid)
    name = args.method.strip().lower()
    if name == "analog":
        tf = controllers.qr_continuous(p)
    else:
        m = _resolve_method(name, p, T, args)
        tf = controllers.qr_discretize(p, m, T).to_transfer(T)
    pts = analysis.freq_response(tf, grid)
    if args.format == "json":
        text = json.dumps(
            [{"f_hz": q.f_hz, "mag_db": q.mag_db, "phase_deg": q.phase_deg} for q in pts],
            indent=2,
        ) + "\n"
    else:
        lines = ["f_hz,mag_db,phase_deg"]
        lines += [_fmt_row((q.f_hz, q.mag_db, q.phase_deg)) for q in pts]
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_error(args) -> int:
    p, T = _qr(args)
    grid = _grid_from_args(args, analysis.default_bode_grid)
    m = _resolve_method(args.method, p, T, args)
    disc = controllers.qr_discretize(p, m, T).to_transfer(T)
    curve = analysis.magnitude_error_curve(controllers.qr_continuous(p), disc, grid)
    if args.format == "json":
        text = json.dumps([{"f_hz": f, "err_db": e} for f, e in curve], indent=2) + "\n"
    else:
        lines = ["f_hz,err_db"] + [_fmt_row(row) for row in curve]
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_rmse(args) -> int:
    p, T = _qr(args)
    grid = _grid_from_args(args, analysis.default_rmse_grid)
    methods = _method_list(args.method, p, T, args)
    analog = controllers.qr_continuous(p)
    values = {}
    for m in methods:
        disc = controllers.qr_discretize(p, m, T).to_transfer(T)
        values[transforms.method_label(m)] = analysis.rmse(
            analysis.magnitude_error_curve(analog, disc, grid)
        )
    ratio = None
    if "sbt" in values and "sota" in values:
        ratio = values["sbt"] / values["sota"]
    if args.format == "json":
        text = json.dumps({"rmse_db": values, "ratio_sbt_over_sota": ratio}, indent=2) + "\n"
    elif args.format == "csv":
        lines = ["method,rmse_db"]
        lines += [f"{k},{format(v, FMT)}" for k, v in values.items()]
        if ratio is not None:
            lines.append(f"ratio_sbt_over_sota,{format(ratio, FMT)}")
        text = "\n".join(lines) + "\n"
    else:
        lines = [f"{k:8s} rmse = {v:.6f} dB" for k, v in values.items()]
        if ratio is not None:
            lines.append(f"ratio sbt/sota = {ratio:.4f}")
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_pole_map(args) -> int:
    p, T = _qr(args)
    requested = _method_list(args.method, p, T, args, allow_exact=True)
    methods = [m for m in requested if m != "exact"]
    records = analysis.pole_map_table(p, T, methods)
    if "exact" not in requested:
        records = [r for r in records if r.label != "exact"]
    if args.format == "json":
        text = json.dumps(
            [
                {
                    "method": r.label,
                    "z_re": r.mapped_z.real, "z_im": r.mapped_z.imag,
                    "sigma": r.equivalent_s.real, "omega": r.equivalent_s.imag,
                }
                for r in records
            ],
            indent=2,
        ) + "\n"
    elif args.format == "csv":
        lines = ["method,z_re,z_im,sigma,omega"]
        for r in records:
            lines.append(
                r.label + "," + _fmt_row(
                    (r.mapped_z.real, r.mapped_z.imag, r.equivalent_s.real, r.equivalent_s.imag)
                )
            )
        text = "\n".join(lines) + "\n"
    else:
        lines = ["method   mapped z               equivalent s"]
        for r in records:
            lines.append(
                f"{r.label:8s} ({r.mapped_z.real:.5f}, {r.mapped_z.imag:.5f})    "
                f"({r.equivalent_s.real:.3f}, {r.equivalent_s.imag:.0f})"
            )
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_simulate(args) -> int:
    if args.scenario == "board":
        return _simulate_board(args)
    return _simulate_inverter(args)


def _simulate_board(args) -> int:
    p, T = _qr(args)
    fs = 1.0 / T
    methods = _method_list(args.method, p, T, args)
    rows = []
    for m in methods:
        biq = controllers.qr_discretize(p, m, T)
        coeffs = controllers.diff_eq_coeffs(biq)
        res = sim.sine_steady_state(
            coeffs, args.f, fs, amp=args.amp,
            settle_cycles=args.settle_cycles, measure_cycles=args.measure_cycles,
        )
        predicted = abs(biq.to_transfer(T)(complex(math.cos(2 * math.pi * args.f * T),
                                                   math.sin(2 * math.pi * args.f * T)))) * args.amp
        rows.append(
            {
                "method": transforms.method_label(m),
                "amplitude": res.amplitude,
                "phase_deg": res.phase_deg,
                "residual": res.residual,
                "predicted": predicted,
                "mismatch": abs(res.amplitude - predicted) / predicted if predicted else 0.0,
            }
        )
        if args.trace_dir:
            os.makedirs(args.trace_dir, exist_ok=True)
            _write_board_trace(
                coeffs, args.f, fs, args.amp,
                os.path.join(args.trace_dir, f"board_{transforms.method_label(m)}.csv"),
            )
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif args.format == "csv":
        keys = ["amplitude", "phase_deg", "residual", "predicted", "mismatch"]
        lines = ["method," + ",".join(keys)]
        lines += [r["method"] + "," + _fmt_row(r[k] for k in keys) for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        lines = [
            f"{r['method']:8s} amp = {r['amplitude']:.4f}  phase = {r['phase_deg']:8.3f} deg  "
            f"predicted = {r['predicted']:.4f}  mismatch = {100 * r['mismatch']:.4f}%"
            for r in rows
        ]
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def _write_board_trace(coeffs, f: float, fs: float, amp: float, path: str,
                       cycles: int = 20) -> None:
    n = int(round(cycles * fs / f))
    idx = list(range(n))
    x = [amp * math.sin(2 * math.pi * f * k / fs) for k in idx]
    y = sim.run_difference_equation(coeffs, x)
    lines = ["t,x,y"]
    lines += [_fmt_row((k / fs, x[k], y[k])) for k in idx]
    _write_output("\n".join(lines) + "\n", path)


def _simulate_inverter(args) -> int:
    c = _constants(args)
    cfg = sim.InverterConfig(
        fs_ctrl=args.fs_ctrl,
        harmonic_amp=args.harmonic_amp,
        harmonic_freq=args.harmonic_freq,
        i_ref_amplitude=args.i_ref,
        delay_samples=args.delay_samples,
        duration=args.duration,
    )
    T = 1.0 / cfg.fs_ctrl
    p = controllers.QrParams(c["kr_inv"], c["wc"], c["wn"])
    pi = controllers.PiParams(c["kp"], c["tau_i"])
    names = [n.strip().lower() for n in args.method.split(",") if n.strip()]
    rows = []
    for name in names:
        if name == "pi":
            legs = (controllers.pi_discretize(pi, T),)
        else:
            m = _resolve_method(name, p, T, args)
            legs = controllers.pir_discretize(pi, p, m, T)
        try:
            trace = sim.inverter_closed_loop(cfg, legs)
        except NumericOverflow as exc:
            raise NumericOverflow(f"method {name}: {exc}") from exc
        value = sim.trace_thd(trace, cfg, periods=args.periods)
        rows.append({"method": name, "thd_pct": value})
        if args.trace_dir:
            os.makedirs(args.trace_dir, exist_ok=True)
            sim.write_trace_csv(trace, os.path.join(args.trace_dir, f"inverter_{name}.csv"))
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif args.format == "csv":
        lines = ["method,thd_pct"] + [f"{r['method']},{format(r['thd_pct'], FMT)}" for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        lines = [f"{r['method']:8s} THDi = {r['thd_pct']:.4f} %" for r in rows]
        text = "\n".join(lines) + "\n"
    _write_output(text, args.output)
    return 0


def cmd_optimize(args) -> int:
    p, T = _qr(args)
    grid = _grid_from_args(args, analysis.default_rmse_grid)
    loss_cfg = tuning.LossConfig(grid=grid, loss_kind=args.loss.replace("-", "_"))
    search = tuning.SearchConfig(
        alpha_range=_parse_range(args.alpha_range),
        beta_range=_parse_range(args.beta_range),
        coarse_points=args.coarse,
        refine_iters=args.iters,
    )
    res = tuning.optimize_alpha_beta(p, T, loss_cfg, search)
    if args.trace:
        lines = ["stage,alpha,beta,loss,best_loss"]
        lines += [
            e.stage + "," + _fmt_row((e.alpha, e.beta, e.loss, e.best_loss))
            for e in res.trace
        ]
        _write_output("\n".join(lines) + "\n", args.trace)
    summary = {
        "alpha": res.alpha,
        "beta": res.beta,
        "loss_value": res.loss_value,
        "straightforward_alpha": res.straightforward.alpha,
        "straightforward_beta": res.straightforward.beta,
        "straightforward_loss": res.straightforward_loss,
        "evaluations": len(res.trace),
    }
    if args.format == "json":
        text = json.dumps(summary, indent=2) + "\n"
    else:
        text = (
            f"alpha = {res.alpha:.10f}\nbeta = {res.beta:.10f}\n"
            f"loss = {res.loss_value:.10g}\n"
            f"straightforward (0.5, {res.straightforward.beta:.10f}) "
            f"loss = {res.straightforward_loss!r}\n"
            f"evaluations = {len(res.trace)}\n"
        )
    _write_output(text, args.output)
    return 0


def _parse_range(spec: str) -> tuple[float, float]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise ParamError(f"range must be lo:hi, got {spec!r}")
    return float(parts[0]), float(parts[1])


def _add_common(sp, with_grid: bool = False) -> None:
    sp.add_argument("--kr", type=float, default=None, help="resonant gain")
    sp.add_argument("--wc", type=float, default=None, help="bandwidth, rad/s")
    sp.add_argument("--wn", type=float, default=None, help="resonant frequency, rad/s")
    sp.add_argument("--fs", type=float, default=None, help="sample rate, Hz")
    sp.add_argument("--alpha", type=float, default=None, help="shape factor for sbt")
    sp.add_argument("--beta", type=float, default=None, help="time factor for sbt")
    sp.add_argument("--config", default=None, help="JSON file with constants")
    sp.add_argument("--format", choices=("table", "csv", "json"), default="table")
    sp.add_argument("--output", default=None, help="write here instead of stdout")
    if with_grid:
        sp.add_argument("--grid", default=None, help="lo:hi:n or lo:hi:n:log, Hz")
        sp.add_argument(
            "--grid-file", default=None,
            help=f"explicit grid file, one Hz per line (or set ${GRID_ENV})",
        )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sbtkit",
        description="Discretize, compare and simulate resonant current controllers.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("discretize", help="closed-form biquad coefficients")
    _add_common(sp)
    sp.add_argument("--method", "--methods", default="euler,tustin,sota,sbt")
    sp.add_argument("--diffeq", action="store_true", help="also print normalized update coefficients")
    sp.set_defaults(func=cmd_discretize)

    sp = sub.add_parser("bode", help="magnitude and phase over a grid")
    _add_common(sp, with_grid=True)
    sp.add_argument("--method", default="analog", help="analog, euler, tustin, sota or sbt")
    sp.set_defaults(func=cmd_bode)

    sp = sub.add_parser("error", help="analog minus discrete magnitude error")
    _add_common(sp, with_grid=True)
    sp.add_argument("--method", default="sbt")
    sp.set_defaults(func=cmd_error)

    sp = sub.add_parser("rmse", help="magnitude error RMSE per method")
    _add_common(sp, with_grid=True)
    sp.add_argument("--method", "--methods", default="euler,tustin,sota,sbt")
    sp.set_defaults(func=cmd_rmse)

    sp = sub.add_parser("pole-map", help="pole landing table")
    _add_common(sp)
    sp.add_argument("--method", "--methods", default="exact,euler,tustin,sota,sbt")
    sp.set_defaults(func=cmd_pole_map)

    sp = sub.add_parser("simulate", help="steady-state sine test or inverter loop")
    _add_common(sp)
    sp.add_argument("scenario", choices=("board", "inverter"))
    sp.add_argument("--method", "--methods", default="euler,tustin,sota,sbt",
                    help="inverter also accepts pi")
    sp.add_argument("--f", type=float, default=950.0, help="board drive frequency, Hz")
    sp.add_argument("--amp", type=float, default=1.0, help="board drive amplitude")
    sp.add_argument("--settle-cycles", type=int, default=1200,
                    help="high-Q discrete resonators ring for hundreds of cycles")
    sp.add_argument("--measure-cycles", type=int, default=50)
    sp.add_argument("--fs-ctrl", type=float, default=40000.0, help="inverter control rate, Hz")
    sp.add_argument("--harmonic-amp", type=float, default=100.0)
    sp.add_argument("--harmonic-freq", type=float, default=950.0)
    sp.add_argument("--i-ref", type=float, default=30.0, help="reference amplitude, A")
    sp.add_argument("--delay-samples", type=int, default=1)
    sp.add_argument("--duration", type=float, default=1.0, help="seconds")
    sp.add_argument("--periods", type=int, default=10, help="grid periods measured for THD")
    sp.add_argument("--trace-dir", default=None, help="write per-method trace CSVs here")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("optimize", help="search (alpha, beta) minimizing a loss")
    _add_common(sp, with_grid=True)
    sp.add_argument("--loss", choices=("mag-rmse-db", "mag-rmse-linear", "pole-distance"),
                    default="mag-rmse-db")
    sp.add_argument("--alpha-range", default="0.5:1.0")
    sp.add_argument("--beta-range", default="0.9:1.1")
    sp.add_argument("--coarse", type=int, default=41)
    sp.add_argument("--iters", type=int, default=40)
    sp.add_argument("--trace", default=None, help="write the evaluation trace CSV here")
    sp.set_defaults(func=cmd_optimize)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SbtkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
