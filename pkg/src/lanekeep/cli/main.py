"""Single command-line entry point for the whole pipeline.

Subcommands: roads gen|import, collect, prune, train, eval, drive, saliency,
serve. Exit codes: 0 success, 1 usage error, 2 runtime failure. All
randomness is controlled by --seed flags; outputs are byte-reproducible except
for timestamps, which only appear under the report "meta" key.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from ..camera.pngio import load_gray_png
from ..camera.render import CameraConfig
from ..dataset import PruneConfig, TrainConfig, load_manifest, prune, save_manifest, split, train_policy
from ..dataset.training import evaluate_mse
from ..errors import ConfigError, LanekeepError
from ..expert import ExpertParams
from ..geometry import (
    load_road,
    make_circle,
    make_clothoid,
    make_straight,
    make_wavy,
    resample_centerline,
    save_road,
)
from ..harness import ExpertDriver, FaultEvent, OptimalDriver, PolicyDriver, Scenario, collect, run_closed_loop
from ..harness.loop import initial_state
from ..metrics import ComfortConfig, PenaltyConfig, evaluate
from ..nn.modelio import load_network, save_network
from ..policy import SmootherState, save_saliency_png, vbp_saliency
from ..vehicle import VehicleParams
from .config import load_config, merged


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this artifact reserves 2 for runtime."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cfg(args) -> dict:
    return load_config(args.config) if getattr(args, "config", None) else {}


def _vehicle(args, cfg) -> VehicleParams:
    d = VehicleParams()
    return VehicleParams(
        wheelbase=merged(getattr(args, "wheelbase", None), cfg, "vehicle", "wheelbase_m", d.wheelbase),
        steering_ratio=merged(getattr(args, "steering_ratio", None), cfg, "vehicle", "steering_ratio", d.steering_ratio),
        max_swa=merged(None, cfg, "vehicle", "max_swa_rad", d.max_swa),
        width=merged(getattr(args, "vehicle_width", None), cfg, "vehicle", "width_m", d.width),
        max_alpha=merged(None, cfg, "vehicle", "max_alpha_rad", d.max_alpha),
    )


def _camera(args, cfg) -> CameraConfig:
    d = CameraConfig()
    return CameraConfig(
        image_width=merged(getattr(args, "cam_width", None), cfg, "camera", "image_width", d.image_width),
        image_height=merged(getattr(args, "cam_height", None), cfg, "camera", "image_height", d.image_height),
        height_above_road=merged(None, cfg, "camera", "height_above_road_m", d.height_above_road),
        pitch=merged(None, cfg, "camera", "pitch_rad", d.pitch),
        horizontal_fov=merged(None, cfg, "camera", "horizontal_fov_rad", d.horizontal_fov),
        mount_forward=merged(None, cfg, "camera", "mount_forward_m", d.mount_forward),
        noise_sigma=merged(getattr(args, "noise_sigma", None), cfg, "camera", "noise_sigma", d.noise_sigma),
    )


def _expert(args, cfg) -> ExpertParams:
    d = ExpertParams()
    return ExpertParams(
        lookahead=merged(getattr(args, "lookahead", None), cfg, "expert", "lookahead_m", d.lookahead),
        k_y=merged(getattr(args, "k_y", None), cfg, "expert", "k_y", d.k_y),
        k_psi=merged(getattr(args, "k_psi", None), cfg, "expert", "k_psi", d.k_psi),
        noise_std=merged(getattr(args, "noise_std", None), cfg, "expert", "noise_std", d.noise_std),
        seed=merged(None, cfg, "expert", "seed", d.seed),
    )


def _scenario(args, cfg, name: str) -> Scenario:
    road_path = merged(getattr(args, "road", None), cfg, "scenario", "road", None)
    if road_path is None:
        raise ConfigError("no road given (flag --road or [scenario] road in the config)")
    road = load_road(road_path)
    return Scenario(
        road=road,
        lane_index=merged(getattr(args, "lane", None), cfg, "scenario", "lane_index", 0),
        speed=merged(getattr(args, "speed", None), cfg, "scenario", "speed_mps", 19.44),
        duration=merged(getattr(args, "duration", None), cfg, "scenario", "duration_s", 60.0),
        tick_dt=merged(getattr(args, "tick_dt", None), cfg, "scenario", "tick_dt_s", 0.05),
        seed=merged(getattr(args, "seed", None), cfg, "scenario", "seed", 0),
        name=name,
        start_s=getattr(args, "start_s", None) or 0.0,
        start_y_off=getattr(args, "start_y", None) or 0.0,
        start_psi_err=getattr(args, "start_psi", None) or 0.0,
    )


def _driver(args, sc, vehicle, cfg):
    kind = getattr(args, "driver", "policy")
    if kind == "policy":
        if not getattr(args, "model", None):
            raise ConfigError("--model is required with the policy driver")
        return PolicyDriver(load_network(args.model))
    if kind == "expert":
        return ExpertDriver(_expert(args, cfg), vehicle)
    if kind == "optimal":
        return OptimalDriver()
    raise ConfigError(f"unknown driver {kind!r}")


def _parse_fault(text: str) -> FaultEvent:
    try:
        t0, dur, swa = (float(part) for part in text.split(":"))
    except ValueError:
        raise ConfigError(f"bad fault spec {text!r}; want t_start:duration:swa") from None
    return FaultEvent(t_start=t0, duration=dur, swa_override=swa)


# ---------------------------------------------------------------- subcommands


def cmd_roads_gen(args) -> int:
    common = dict(ds=args.ds, lane_count=args.lanes, lane_width=args.lane_width)
    if args.kind == "straight":
        road = make_straight(args.length, **common)
    elif args.kind == "circle":
        if args.radius is None:
            raise ConfigError("--radius is required for circle roads")
        road = make_circle(args.radius, arc=args.length, **common)
    elif args.kind == "clothoid":
        road = make_clothoid(args.length, args.kappa0, args.kappa1, **common)
    else:
        road = make_wavy(
            args.length, kind=args.kind, seed=args.seed,
            amplitude=args.amplitude, wavelength=args.wavelength, **common,
        )
    save_road(road, args.out)
    print(f"wrote {args.out}: {args.kind}, {road.total_length:.0f} m, {road.lane_count} lanes")
    return 0


def cmd_roads_import(args) -> int:
    road = load_road(args.input)
    road = resample_centerline(road, args.ds)
    save_road(road, args.out)
    print(f"wrote {args.out}: imported {road.total_length:.0f} m at ds={args.ds} m")
    return 0


def cmd_collect(args) -> int:
    cfg = _cfg(args)
    sc = _scenario(args, cfg, name=args.name)
    vehicle = _vehicle(args, cfg)
    data = collect(
        sc, _expert(args, cfg), args.out,
        vehicle=vehicle, camera=_camera(args, cfg), expedition_id=args.expedition,
    )
    print(f"collected {len(data)} samples into {args.out} (expedition {data.samples[0].expedition_id})")
    return 0


def cmd_prune(args) -> int:
    data = load_manifest(args.manifest)
    cfg = PruneConfig(bins=args.bins, swa_range=args.range, cap=args.cap, seed=args.seed)
    pruned = save_manifest(prune(data, cfg), args.out)
    print(f"pruned {len(data)} -> {len(pruned)} samples; wrote {args.out}")
    return 0


def cmd_train(args) -> int:
    cfgfile = _cfg(args)
    data = load_manifest(args.manifest)
    val = None
    if args.holdout_frac > 0:
        data, val = split(data, 1.0 - args.holdout_frac, seed=args.seed or 0)
    tc = TrainConfig(
        batches=merged(args.batches, cfgfile, "train", "batches", 5000),
        batch=merged(args.batch, cfgfile, "train", "batch", 64),
        lr=merged(args.lr, cfgfile, "train", "lr", 1e-4),
        seed=merged(args.seed, cfgfile, "train", "seed", 0),
        keep_prob=merged(args.keep_prob, cfgfile, "train", "keep_prob", 0.5),
        vehicle=_vehicle(args, cfgfile),
        cache_frames=not args.no_cache,
    )
    if args.progress:
        tc.on_batch = lambda i, loss: (
            print(f"batch {i + 1}/{tc.batches}: mse {loss:.6g}", flush=True)
            if (i + 1) % args.progress == 0
            else None
        )
    net, loss_log = train_policy(data, tc)
    save_network(net, args.out)
    print(f"trained {tc.batches} batches on {len(data)} samples -> {args.out}")
    if loss_log:
        print(f"final training mse (last 100 batches): {np.mean(loss_log[-100:]):.6g}")
    if args.loss_log:
        Path(args.loss_log).write_text(
            "batch,mse\n" + "\n".join(f"{i},{v:.9g}" for i, v in enumerate(loss_log)) + "\n"
        )
    if val is not None and len(val):
        print(f"holdout mse ({len(val)} samples): {evaluate_mse(net, val, tc.vehicle):.6g}")
    return 0


def cmd_drive(args) -> int:
    cfg = _cfg(args)
    sc = _scenario(args, cfg, name="drive")
    vehicle = _vehicle(args, cfg)
    smoother = SmootherState(gamma=args.smooth_gamma) if args.smooth_gamma else None
    faults = tuple(_parse_fault(f) for f in args.fault or ())
    log = run_closed_loop(
        sc, _driver(args, sc, vehicle, cfg), faults=faults, smoother=smoother,
        vehicle=vehicle, camera=_camera(args, cfg),
    )
    log.to_csv(args.out)
    print(f"{len(log)} ticks ({log.termination_reason}); wrote {args.out}")
    return 0


def cmd_eval(args) -> int:
    cfg = _cfg(args)
    if args.distance_km is not None and args.speed:
        args.duration = args.distance_km * 1000.0 / args.speed
    elif args.distance_km is not None:
        args.duration = args.distance_km * 1000.0 / 19.44
    sc = _scenario(args, cfg, name="eval")
    vehicle = _vehicle(args, cfg)
    smoother = SmootherState(gamma=args.smooth_gamma) if args.smooth_gamma else None
    log = run_closed_loop(
        sc, _driver(args, sc, vehicle, cfg), smoother=smoother,
        vehicle=vehicle, camera=_camera(args, cfg),
    )
    opt_log = None
    if not args.no_baseline:
        opt_log = run_closed_loop(sc, OptimalDriver(), vehicle=vehicle)
        if len(opt_log) != len(log):  # policy terminated early; compare the overlap
            n = min(len(opt_log), len(log))
            opt_log = _truncate(opt_log, n)
            log_cmp = _truncate(log, n)
        else:
            log_cmp = log
    else:
        log_cmp = log
    pcfg = PenaltyConfig(w=merged(args.w, cfg, "penalty", "w_m", 0.4),
                         beta=merged(args.beta, cfg, "penalty", "beta", 0.5))
    ccfg = ComfortConfig(g=merged(args.g, cfg, "comfort", "g", 1.8))
    report = evaluate(log_cmp, opt_log, pcfg, ccfg, jerk_window=args.jerk_window)

    print(f"ticks: {report.n_ticks} ({log.termination_reason})")
    print(f"good_position_fraction: {report.good_position_fraction:.4f}")
    print(f"mean/max lane penalty: {report.mean_lane_penalty:.4g} / {report.max_lane_penalty:.4g}")
    print(f"mean discomfort accel/jerk: {report.mean_accel_discomfort:.4g} / {report.mean_jerk_discomfort:.4g}")
    if report.accel_discomfort_ratio is not None:
        print(f"discomfort ratio vs optimal (accel, jerk): "
              f"{report.accel_discomfort_ratio:.3f}, {report.jerk_discomfort_ratio:.3f}")
    print(f"within 0.5 m of a marking: {report.near_marking_fraction:.4f} of ticks")
    if args.traj:
        log.to_csv(args.traj)
    if args.report:
        doc = {
            "report": report.as_dict(),
            "termination": log.termination_reason,
            "meta": {"created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat()},
        }
        Path(args.report).write_text(json.dumps(doc, indent=2, sort_keys=True))
        print(f"wrote {args.report}")
    return 0


def _truncate(log, n: int):
    import dataclasses

    fields = {f.name: getattr(log, f.name) for f in dataclasses.fields(log)}
    for key, value in fields.items():
        if isinstance(value, np.ndarray):
            fields[key] = value[:n]
    return type(log)(**fields)


def cmd_saliency(args) -> int:
    net = load_network(args.model)
    if args.frame:
        frame = load_gray_png(args.frame)
    else:
        cfg = _cfg(args)
        if not args.road:
            raise ConfigError("saliency needs --frame or --road")
        road = load_road(args.road)
        sc = Scenario(road=road, lane_index=args.lane or 0, speed=19.44, duration=1.0,
                      start_s=args.s or 0.0, start_y_off=args.y_off or 0.0)
        from ..camera.render import render

        frame = render(road, initial_state(sc), sc.lane_index, _camera(args, cfg), seed=args.seed or 0)
    mask = vbp_saliency(net, frame)
    save_saliency_png(mask, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    from ..harness.server import serve

    cfg = _cfg(args)
    sc = _scenario(args, cfg, name=args.name)
    model = load_network(args.model) if args.model else None
    if args.ui is not None:
        args.ui = Path(args.ui).resolve()
        if not args.ui.is_dir():
            raise ConfigError(f"--ui directory not found: {args.ui}")
    serve(
        port=args.port,
        sc=sc,
        model=model,
        vehicle=_vehicle(args, cfg),
        camera=_camera(args, cfg),
        expert=_expert(args, cfg),
        out_dir=args.out,
        ui_dir=args.ui,
        host=args.host,
    )
    return 0


# ------------------------------------------------------------------- parser


def _add_config_flag(p):
    p.add_argument("--config", help="run-config INI file; flags override its values")


def _add_scenario_flags(p, duration_default=None):
    p.add_argument("--road", help="road JSON file")
    p.add_argument("--speed", type=float, help="vehicle speed, m/s")
    p.add_argument("--duration", type=float, default=duration_default, help="run duration, s")
    p.add_argument("--lane", type=int, help="lane index (0 = leftmost)")
    p.add_argument("--seed", type=int, help="scenario seed")
    p.add_argument("--tick-dt", type=float, help="tick period, s (default 0.05)")
    p.add_argument("--start-s", type=float, help="initial arc length, m")
    p.add_argument("--start-y", type=float, help="initial lateral offset, m")
    p.add_argument("--start-psi", type=float, help="initial heading error, rad")


def _add_camera_flags(p):
    p.add_argument("--cam-width", type=int, help="rendered image width, px")
    p.add_argument("--cam-height", type=int, help="rendered image height, px")
    p.add_argument("--noise-sigma", type=float, help="road texture noise, gray levels")


def _add_expert_flags(p):
    p.add_argument("--noise-std", type=float, help="expert curvature noise, 1/m")
    p.add_argument("--lookahead", type=float, help="expert lookahead, m")
    p.add_argument("--k-y", type=float, help="expert lateral gain, 1/m per m")
    p.add_argument("--k-psi", type=float, help="expert heading gain, 1/m per rad")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lanekeep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    roads = sub.add_parser("roads", help="generate or import road geometry")
    roads_sub = roads.add_subparsers(dest="roads_command", required=True)
    g = roads_sub.add_parser("gen", help="generate a synthetic road")
    g.add_argument("--kind", required=True, choices=["straight", "circle", "clothoid", "highway", "country"])
    g.add_argument("--length", type=float, default=2000.0, help="road length (circle: arc), m")
    g.add_argument("--radius", type=float, help="circle radius, m")
    g.add_argument("--kappa0", type=float, default=0.0, help="clothoid start curvature, 1/m")
    g.add_argument("--kappa1", type=float, default=0.005, help="clothoid end curvature, 1/m")
    g.add_argument("--amplitude", type=float, help="curvature amplitude override, 1/m")
    g.add_argument("--wavelength", type=float, help="curvature wavelength override, m")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--lanes", type=int, default=2)
    g.add_argument("--lane-width", type=float, default=3.75)
    g.add_argument("--ds", type=float, default=1.0, help="resampling step, m")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_roads_gen)
    imp = roads_sub.add_parser("import", help="import lat/lon waypoints to a local xy road")
    imp.add_argument("--in", dest="input", required=True, help="road JSON with lat/lon points")
    imp.add_argument("--ds", type=float, default=1.0)
    imp.add_argument("--out", required=True)
    imp.set_defaults(func=cmd_roads_import)

    c = sub.add_parser("collect", help="record expert demonstrations")
    _add_config_flag(c)
    _add_scenario_flags(c)
    _add_camera_flags(c)
    _add_expert_flags(c)
    c.add_argument("--out", required=True, help="dataset directory (manifest.csv + frames/)")
    c.add_argument("--name", default="collect", help="scenario name used in expedition ids")
    c.add_argument("--expedition", help="explicit expedition id")
    c.set_defaults(func=cmd_collect)

    p = sub.add_parser("prune", help="histogram-prune a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output manifest path")
    p.add_argument("--bins", type=int, default=18000)
    p.add_argument("--range", type=float, default=9.0, help="histogram half-range, rad")
    p.add_argument("--cap", type=int, default=10000, help="max samples per bin")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_prune)

    t = sub.add_parser("train", help="train the steering policy")
    _add_config_flag(t)
    t.add_argument("--manifest", required=True)
    t.add_argument("--out", required=True, help="model file to write")
    t.add_argument("--batches", type=int)
    t.add_argument("--batch", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--seed", type=int)
    t.add_argument("--keep-prob", type=float)
    t.add_argument("--holdout-frac", type=float, default=0.0, help="expedition fraction held out")
    t.add_argument("--loss-log", help="write per-batch MSE CSV here")
    t.add_argument("--no-cache", action="store_true", help="do not cache decoded frames in RAM")
    t.add_argument("--progress", type=int, default=0, metavar="N", help="print loss every N batches")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="closed-loop evaluation with metrics report")
    _add_config_flag(e)
    _add_scenario_flags(e)
    _add_camera_flags(e)
    _add_expert_flags(e)
    e.add_argument("--driver", choices=["policy", "expert", "optimal"], default="policy")
    e.add_argument("--model", help="model file (policy driver)")
    e.add_argument("--distance-km", type=float, help="evaluate this many km (overrides --duration)")
    e.add_argument("--w", type=float, help="lane penalty region width, m")
    e.add_argument("--beta", type=float, help="lane penalty shape")
    e.add_argument("--g", type=float, help="comfort threshold")
    e.add_argument("--jerk-window", type=int, default=5, help="jerk pre-filter window (odd)")
    e.add_argument("--smooth-gamma", type=float, default=0.0, help="action smoothing gamma (0 = off)")
    e.add_argument("--no-baseline", action="store_true", help="skip the optimal-driver baseline")
    e.add_argument("--report", help="write JSON report here")
    e.add_argument("--traj", help="write trajectory CSV here")
    e.set_defaults(func=cmd_eval)

    d = sub.add_parser("drive", help="run a closed loop and dump the trajectory")
    _add_config_flag(d)
    _add_scenario_flags(d)
    _add_camera_flags(d)
    _add_expert_flags(d)
    d.add_argument("--driver", choices=["policy", "expert", "optimal"], default="expert")
    d.add_argument("--model", help="model file (policy driver)")
    d.add_argument("--smooth-gamma", type=float, default=0.0)
    d.add_argument("--fault", action="append", metavar="T0:DUR:SWA",
                   help="inject a steering fault (repeatable)")
    d.add_argument("--out", required=True, help="trajectory CSV to write")
    d.set_defaults(func=cmd_drive)

    s = sub.add_parser("saliency", help="visual-backprop saliency mask PNG")
    _add_config_flag(s)
    s.add_argument("--model", required=True)
    s.add_argument("--frame", help="input frame PNG")
    s.add_argument("--road", help="render a frame from this road instead")
    s.add_argument("--s", type=float, help="arc length of the rendered pose")
    s.add_argument("--y-off", type=float, help="lateral offset of the rendered pose")
    s.add_argument("--lane", type=int)
    s.add_argument("--seed", type=int)
    _add_camera_flags(s)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_saliency)

    srv = sub.add_parser("serve", help="run the live websocket bridge + UI")
    _add_config_flag(srv)
    _add_scenario_flags(srv, duration_default=1e9)
    _add_camera_flags(srv)
    _add_expert_flags(srv)
    srv.add_argument("--port", type=int, default=8700)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--model", help="model file enabling policy-drive mode")
    srv.add_argument("--out", help="dataset directory for recordings")
    srv.add_argument("--ui", help="static directory with the browser client")
    srv.add_argument("--name", default="serve")
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LanekeepError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
