"""Acceptance suite: every primary criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. The desk-scale learning pipeline (collect ~73k frames, prune,
train 12000 batches, evaluate closed loop) is built once as a session fixture
and dominates the runtime (about an hour on two cores; well under the two-hour
budget on a desktop CPU). Set LANEKEEP_DESK_DIR to reuse a previously built
corpus/model while developing; leave it unset for a clean verification run.
"""

import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from lanekeep import deskscale
from lanekeep.camera.preprocess import crop, downsample_bilinear, FEATURE_HEIGHT, FEATURE_WIDTH
from lanekeep.camera.render import render_with_mask
from lanekeep.dataset import Dataset, PruneConfig, Sample, TrainConfig, histogram, prune, train_policy
from lanekeep.geometry import make_circle, make_straight, make_wavy
from lanekeep.harness import OptimalDriver, PolicyDriver, Scenario, run_closed_loop
from lanekeep.harness.loop import initial_state
from lanekeep.metrics import ComfortConfig, PenaltyConfig, discomfort, evaluate, lane_penalty
from lanekeep.nn.modelio import load_network, save_network
from lanekeep.policy import FLATTEN_SIZE, PARAM_COUNT, SmootherState, build_network
from lanekeep.policy.vbp import vbp_saliency_features
from lanekeep.vehicle import VehicleParams, VehicleState, curvature_to_swa, step, swa_to_curvature

DESK_BATCHES = int(os.environ.get("LANEKEEP_DESK_BATCHES", "12000"))

PCFG = PenaltyConfig(w=0.4, beta=0.5)
CCFG = ComfortConfig(g=1.8)


def note(name: str, detail: str = ""):
    print(f"\nACCEPTANCE {name}: PASS {detail}".rstrip())


# ---------------------------------------------------------------- fast criteria


def test_architecture_exactness():
    net = build_network(0)
    assert net.param_count() == PARAM_COUNT == 264_343
    x = np.zeros((1, 1, 68, 183))
    flat = None
    for layer in net.layers:
        x = layer.forward(x)
        if layer.spec.kind == "flatten":
            flat = x.shape[1]
            break
    assert flat == FLATTEN_SIZE == 1216
    note("architecture-exactness", f"(params=264343, flatten=1216)")


def test_shape_chain():
    net = build_network(0)
    x = np.zeros((1, 1, 68, 183))
    chain = [(68, 183)]
    for layer in net.layers:
        x = layer.forward(x)
        if layer.spec.kind == "conv":
            chain.append(x.shape[2:])
    assert chain == [(68, 183), (32, 90), (14, 43), (5, 20), (3, 18), (1, 16)]
    note("shape-chain", "(68x183 -> 32x90 -> 14x43 -> 5x20 -> 3x18 -> 1x16)")


def test_gradient_correctness():
    # Composed-network check on an 8x12-input variant of every layer type.
    from test_nn_grad import fd_gradients, rel_err, tiny_network
    from lanekeep.nn.network import loss_and_grads

    start = time.time()
    rng = np.random.default_rng(1)
    net = tiny_network(keep_prob=0.7, seed=2)
    x = rng.standard_normal((2, 1, 8, 12))
    targets = np.array([0.25, -0.4])
    _, grads, _ = loss_and_grads(net, x, targets, np.random.default_rng(5))
    fd = fd_gradients(net, x, targets, h=1e-3, rng_seed=5)
    worst = max(rel_err(g, f) for g, f in zip(grads, fd))
    assert worst < 1e-4
    note("gradient-correctness", f"(worst rel err {worst:.2e}, {time.time() - start:.0f}s)")


def test_metric_closed_forms():
    # 1e3-point grids hit both branch boundaries exactly.
    for beta, w in [(0.25, 0.1), (0.5, 0.4), (0.75, 0.875)]:
        cfg = PenaltyConfig(w=w, beta=beta)
        d = np.concatenate([np.linspace(-0.5, 1.5, 1000), [0.0, w]])
        got = lane_penalty(d, cfg)
        want = np.where(
            d < 0, 1.0, np.where(d > w, 0.0, (beta * w) ** (np.clip(d, 0, w) / w) - beta * np.clip(d, 0, w))
        )
        assert np.abs(got - want).max() < 1e-12
        assert lane_penalty(w, cfg) == pytest.approx(0.0, abs=1e-12)
    x = np.concatenate([np.linspace(0.0, 6.0, 1000), [1.8]])
    got = discomfort(x, CCFG)
    want = np.where(x < 1.8, (x / 1.8) ** 2, (5.0 / 6.0 + x**2 / (6 * 1.8**2)) ** 6)
    assert np.abs(got - want).max() < 1e-12
    assert discomfort(1.8, CCFG) == pytest.approx(1.0, abs=1e-12)
    assert discomfort(1.8 - 1e-12, CCFG) == pytest.approx(1.0, abs=1e-9)
    note("metric-closed-forms", "(e_beta and e_g match at 1e-12, boundaries included)")


def test_bicycle_roundtrip_and_circle_closure():
    p = VehicleParams()
    swas = np.linspace(-9.0, 9.0, 1801)
    worst = max(abs(curvature_to_swa(swa_to_curvature(s, p), p) - s) for s in swas)
    assert worst < 1e-9

    state = VehicleState(v=10.0)
    n = int(round(2 * math.pi * 20.0 / 10.0 / 0.01))
    for _ in range(n):
        state = step(state, 0.05, 0.01, p)
    closure = math.hypot(state.x, state.y)
    assert closure < 0.05
    note("bicycle-roundtrip-circle", f"(roundtrip err {worst:.1e}, closure {closure:.4f} m)")


def test_pruning_invariant():
    start = time.time()
    rng = np.random.default_rng(8)
    # skewed: a huge straight-driving spike plus broad driving
    swas = np.concatenate([
        rng.normal(0.0, 0.004, 60_000),
        rng.normal(0.0, 0.6, 40_000),
    ])
    swas = np.clip(swas, -9, 9)
    exps = [f"exp{i % 9}" for i in range(len(swas))]
    d = Dataset(
        samples=tuple(
            Sample(frame_path=f"frames/{i}.png", swa=float(s), speed=20.0, timestamp=float(i),
                   expedition_id=e)
            for i, (s, e) in enumerate(zip(swas, exps))
        )
    )
    cap = 200
    cfg = PruneConfig(bins=18000, swa_range=9.0, cap=cap, seed=3)
    before = histogram(swas, 18000, 9.0)
    out = prune(d, cfg)
    after = histogram([s.swa for s in out.samples], 18000, 9.0)
    overflow = int(np.maximum(before - cap, 0).sum())
    assert after.max() <= cap
    assert len(d) - len(out) == overflow
    out2 = prune(d, cfg)
    assert out.samples == out2.samples
    elapsed = time.time() - start
    assert elapsed < 10.0
    note("pruning-invariant", f"(removed {overflow} of {len(d)}, {elapsed:.1f}s)")


# ---------------------------------------------------- desk-scale learned policy


@pytest.fixture(scope="session")
def desk(tmp_path_factory):
    """Collect, prune, and train the desk-scale policy once per session."""
    t0 = time.time()
    reuse = os.environ.get("LANEKEEP_DESK_DIR")
    base = Path(reuse) if reuse else tmp_path_factory.mktemp("desk")
    data_dir = base / "data"
    model_path = base / "model.lkn"
    losses_path = base / "losses.npy"

    if model_path.exists() and losses_path.exists():
        return {
            "net": load_network(model_path),
            "losses": np.load(losses_path).tolist(),
            "elapsed_s": 0.0,
        }

    if (data_dir / "manifest.csv").exists():
        from lanekeep.dataset import load_manifest

        data = load_manifest(data_dir / "manifest.csv")
    else:
        data = deskscale.collect_corpus(
            data_dir,
            progress=lambda i, n, name: print(f"  collected leg {i}/{n} ({name})", flush=True),
        )
    assert len(data) >= 60_000
    cap = deskscale.desk_prune_cap(len(data))
    pruned = prune(data, PruneConfig(cap=cap, seed=0))
    print(f"  pruned with cap {cap}: {len(data)} -> {len(pruned)}", flush=True)

    hook = lambda i, loss: (
        print(f"  batch {i + 1}/{DESK_BATCHES}", flush=True) if (i + 1) % 1000 == 0 else None
    )
    net, losses = train_policy(pruned, TrainConfig(batches=DESK_BATCHES, seed=0, on_batch=hook))
    save_network(net, model_path)
    np.save(losses_path, np.array(losses))
    return {"net": net, "losses": losses, "elapsed_s": time.time() - t0}


def test_desk_scale_closed_loop_learning(desk):
    sc = deskscale.eval_scenario()
    log = run_closed_loop(sc, PolicyDriver(desk["net"]), camera=deskscale.DESK_CAMERA)
    assert log.termination_reason == "completed"
    report = evaluate(log, None, PCFG, CCFG)
    crossings = int(np.sum((log.d_l < 0) | (log.d_r < 0)))
    assert crossings == 0
    assert report.good_position_fraction >= 0.90

    # training-loss smoke property: mean loss per disjoint 100-batch window is
    # non-increasing, with at most 5% of window steps violating
    losses = np.asarray(desk["losses"])
    windows = losses[: len(losses) // 100 * 100].reshape(-1, 100).mean(axis=1)
    violations = float(np.mean(np.diff(windows) > 0))
    assert violations <= 0.05

    note(
        "desk-scale-learning",
        f"(good={report.good_position_fraction:.4f}, crossings=0, "
        f"max|y_off|={np.abs(log.y_off).max():.2f} m, pipeline {desk['elapsed_s'] / 60:.0f} min)",
    )


def test_recovery_from_fault(desk):
    successes = 0
    details = []
    for trial in range(5):
        rt = deskscale.recovery_trial(trial)
        log = run_closed_loop(
            rt.scenario, PolicyDriver(desk["net"]), faults=(rt.fault,), camera=deskscale.DESK_CAMERA
        )
        y = np.abs(log.y_off)
        after = log.t >= rt.fault.t_start
        dist = (log.t[after] - rt.fault.t_start) * rt.scenario.speed
        y_after = y[after]
        peak = int(y_after.argmax())
        rec_rel = peak + int(np.argmax(y_after[peak:] < 0.2))
        ok = (
            log.termination_reason == "completed"
            and y_after.max() > 0.2
            and y_after[rec_rel] < 0.2
            and dist[rec_rel] <= 150.0
            and np.all(y_after[rec_rel:] < 0.45)
        )
        successes += ok
        details.append(f"t{trial}:{'ok' if ok else 'fail'}@{dist[min(rec_rel, len(dist)-1)]:.0f}m")
    assert successes >= 4
    note("recovery", f"({successes}/5 trials: {', '.join(details)})")


def test_smoothing_effect(desk):
    sc = deskscale.eval_scenario()
    raw = run_closed_loop(sc, PolicyDriver(desk["net"]), camera=deskscale.DESK_CAMERA)
    smoothed = run_closed_loop(
        sc, PolicyDriver(desk["net"]), smoother=SmootherState(gamma=0.1), camera=deskscale.DESK_CAMERA
    )
    optimal = run_closed_loop(sc, OptimalDriver())
    n = min(len(raw), len(smoothed), len(optimal))
    assert n > 1000

    def cut(log):
        import dataclasses

        return type(log)(**{
            f.name: (getattr(log, f.name)[:n] if isinstance(getattr(log, f.name), np.ndarray)
                     else getattr(log, f.name))
            for f in dataclasses.fields(log)
        })

    raw_rep = evaluate(cut(raw), cut(optimal), PCFG, CCFG)
    smooth_rep = evaluate(cut(smoothed), cut(optimal), PCFG, CCFG)
    assert smooth_rep.mean_jerk_discomfort <= raw_rep.mean_jerk_discomfort
    # comfort ratios vs the optimal driver are reported, not asserted
    note(
        "smoothing-effect",
        f"(jerk e_g {raw_rep.mean_jerk_discomfort:.3g} -> {smooth_rep.mean_jerk_discomfort:.3g}; "
        f"accel ratio vs optimal raw {raw_rep.accel_discomfort_ratio:.2f}, "
        f"smoothed {smooth_rep.accel_discomfort_ratio:.2f}; "
        f"jerk ratio raw {raw_rep.jerk_discomfort_ratio:.1f}, "
        f"smoothed {smooth_rep.jerk_discomfort_ratio:.1f})",
    )


def test_optimal_driver_baseline():
    roads = {
        "straight": (make_straight(2000.0), 27.78),
        "circle": (make_circle(250.0, arc=2000.0), 19.44),
        "country": (deskscale.eval_scenario().road, 19.44),
        "highway": (make_wavy(3000.0, "highway", seed=21), 27.78),
    }
    for name, (road, speed) in roads.items():
        sc = Scenario(road=road, speed=speed, duration=min(60.0, road.total_length / speed - 5))
        log = run_closed_loop(sc, OptimalDriver())
        report = evaluate(log, log, PCFG, CCFG)
        assert report.good_position_fraction == 1.0, name
        assert report.accel_discomfort_ratio == pytest.approx(1.0, abs=1e-12)
        assert report.jerk_discomfort_ratio == pytest.approx(1.0, abs=1e-12)
    note("optimal-baseline", f"(good=1.0 and self-ratios=1.0 on {len(roads)} roads)")


def test_vbp_sanity(desk):
    sc = deskscale.eval_scenario()
    vehicle = VehicleParams()
    marking_means = []
    other_means = []
    for i, s in enumerate(np.linspace(200.0, sc.road.total_length - 400.0, 20)):
        probe = Scenario(road=sc.road, lane_index=0, speed=sc.speed, duration=1.0,
                         seed=i, start_s=float(s))
        state = initial_state(probe)
        frame, mask = render_with_mask(sc.road, state, 0, deskscale.DESK_CAMERA, seed=i)
        mask_small = downsample_bilinear(
            crop(mask.astype(np.uint8) * 255), FEATURE_HEIGHT, FEATURE_WIDTH
        ) > 127
        from lanekeep.camera.preprocess import preprocess

        sal = vbp_saliency_features(desk["net"], preprocess(frame))
        if mask_small.any():
            marking_means.append(sal[mask_small].mean())
            other_means.append(sal[~mask_small].mean())
    ratio = float(np.mean(marking_means) / np.mean(other_means))
    assert ratio > 1.5
    note("vbp-sanity", f"(marking/non-marking saliency ratio {ratio:.2f} over 20 frames)")
