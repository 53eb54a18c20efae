import numpy as np
import pytest

from eyeguide.calibration import GazeSample
from eyeguide.dwell import (
    HOVER,
    IDLE_STATE,
    REFRACTORY,
    DwellConfig,
    TargetRegion,
    replay,
    step,
    validate_layout,
    write_click_csv,
)
from eyeguide.errors import LayoutError
from oracles import dwell_clicks_oracle, prefix_consistency_check

CFG = DwellConfig(dwell_time=1000, jitter_radius=60.0, refractory=500)
BUTTON = TargetRegion(id="btn", rect=(100.0, 100.0, 80.0, 60.0))
OTHER = TargetRegion(id="other", rect=(300.0, 100.0, 80.0, 60.0))
LAYOUT = [BUTTON, OTHER]


def gs(t, x, y, valid=True, held=False):
    return GazeSample(screen=(float(x), float(y)), valid=valid, timestamp=int(t), held=held)


def hold_at(x, y, n, dt=33, t0=0):
    return [gs(t0 + i * dt, x, y) for i in range(n)]


def clicks_of(samples, layout=LAYOUT, cfg=CFG):
    return replay(samples, layout, cfg)[0]


def test_hold_emits_exactly_one_click_at_threshold():
    samples = hold_at(140, 130, 45)  # 0..1452 ms at 30 Hz
    clicks = clicks_of(samples)
    assert len(clicks) == 1
    c = clicks[0]
    assert c.target_id == "btn"
    # first sample with elapsed >= 1000 ms: t=1023 (31st sample)
    assert c.at == 1023
    assert c.gaze_anchor == pytest.approx((140.0, 130.0))


def test_short_hover_never_clicks():
    samples = hold_at(140, 130, 28)  # 0..891 ms < dwell_time
    samples += hold_at(500, 500, 10, t0=28 * 33)  # leaves the region
    assert clicks_of(samples) == []


def test_oscillation_two_clicks_with_refractory():
    # +-jitter/2 oscillation held for two full dwell+refractory cycles
    samples = []
    for i in range(79):  # 0..2574 ms: dwell + refractory + dwell + slack
        dx = (CFG.jitter_radius / 2.0) * (1 if i % 2 == 0 else -1)
        samples.append(gs(i * 33, 140 + dx * 0.35, 130, valid=True))
    clicks = clicks_of(samples)
    assert len(clicks) == 2
    assert clicks[1].at - clicks[0].at >= CFG.dwell_time + CFG.refractory
    oracle = dwell_clicks_oracle(samples, LAYOUT, CFG)
    assert [(c.target_id, c.at) for c in clicks] == [(t, a) for t, a, _ in oracle]
    prefix_consistency_check(lambda s: clicks_of(s), samples)


def test_leaving_region_resets():
    samples = hold_at(140, 130, 20) + [gs(20 * 33, 50, 50)] + hold_at(
        140, 130, 25, t0=21 * 33
    )
    # neither stretch reaches 1000 ms on its own
    assert clicks_of(samples) == []


def test_invalid_sample_resets_unless_held():
    base = hold_at(140, 130, 45)
    broken = list(base)
    broken[15] = gs(15 * 33, 140, 130, valid=False)
    assert clicks_of(broken) == []
    held = list(base)
    held[15] = gs(15 * 33, 140, 130, valid=True, held=True)
    clicks = clicks_of(held)
    assert len(clicks) == 1 and clicks[0].at == 1023


def test_click_only_for_region_under_current_sample():
    samples = hold_at(140, 130, 40)
    clicks, trace = replay(samples, LAYOUT, CFG)
    for c in clicks:
        s = samples[[s.timestamp for s in samples].index(c.at)]
        assert BUTTON.contains(*s.screen)


def test_no_click_in_refractory_until_elapsed():
    samples = hold_at(140, 130, 200)
    clicks = clicks_of(samples)
    assert len(clicks) >= 2
    for a, b in zip(clicks, clicks[1:]):
        assert b.at - a.at >= CFG.dwell_time + CFG.refractory


def test_layout_validation():
    with pytest.raises(LayoutError):
        validate_layout([BUTTON, TargetRegion(id="x", rect=(150.0, 120.0, 50.0, 50.0))])
    with pytest.raises(LayoutError):
        validate_layout([BUTTON, TargetRegion(id="btn", rect=(0.0, 0.0, 10.0, 10.0))])
    with pytest.raises(LayoutError):
        validate_layout([TargetRegion(id="z", rect=(0.0, 0.0, 0.0, 10.0))])
    validate_layout(LAYOUT)  # touching edges are fine
    validate_layout([BUTTON, TargetRegion(id="touch", rect=(180.0, 100.0, 40.0, 60.0))])


def test_state_machine_phases():
    s0 = IDLE_STATE
    s1, c = step(s0, gs(0, 140, 130), LAYOUT, CFG)
    assert s1.phase == HOVER and c is None
    s2, c = step(s1, gs(1050, 141, 130), LAYOUT, CFG)
    assert s2.phase == REFRACTORY and c is not None
    s3, c = step(s2, gs(1100, 140, 130), LAYOUT, CFG)
    assert s3.phase == REFRACTORY and c is None
    s4, c = step(s3, gs(1600, 140, 130), LAYOUT, CFG)
    assert s4.phase == HOVER and s4.entered_at == 1600


def random_replay_case(rng, max_len=48):
    regions = [
        TargetRegion(id="a", rect=(0.0, 0.0, 120.0, 120.0)),
        TargetRegion(id="b", rect=(200.0, 0.0, 120.0, 120.0)),
        TargetRegion(id="c", rect=(0.0, 200.0, 120.0, 120.0)),
    ]
    cfg = DwellConfig(
        dwell_time=int(rng.choice([150, 300, 500])),
        jitter_radius=float(rng.choice([25.0, 55.0, 90.0])),
        refractory=int(rng.choice([0, 100, 400])),
    )
    n = int(rng.integers(2, max_len))
    t = 0
    samples = []
    anchors = [(60.0, 60.0), (260.0, 60.0), (60.0, 260.0), (400.0, 400.0)]
    current = anchors[int(rng.integers(0, 4))]
    for _ in range(n):
        t += int(rng.choice([20, 33, 50]))
        if rng.random() < 0.15:
            current = anchors[int(rng.integers(0, 4))]
        x = current[0] + float(rng.normal(0, 18))
        y = current[1] + float(rng.normal(0, 18))
        samples.append(gs(t, x, y, valid=rng.random() > 0.08))
    return samples, regions, cfg


def test_randomized_replays_match_oracle():
    rng = np.random.default_rng(1717)
    for _ in range(600):
        samples, regions, cfg = random_replay_case(rng)
        clicks, _ = replay(samples, regions, cfg)
        oracle = dwell_clicks_oracle(samples, regions, cfg)
        assert [(c.target_id, c.at) for c in clicks] == [(t, a) for t, a, _ in oracle]
        for c, (_, _, anchor) in zip(clicks, oracle):
            assert c.gaze_anchor == pytest.approx(anchor, abs=1e-9)


def test_at_most_one_click_per_hover_episode():
    rng = np.random.default_rng(404)
    for _ in range(200):
        samples, regions, cfg = random_replay_case(rng)
        clicks, trace = replay(samples, regions, cfg)
        # an episode is identified by its (target, entered_at) pair
        seen = {}
        state_before = IDLE_STATE
        for s in samples:
            state_after, click = step(state_before, s, regions, cfg)
            if click is not None:
                key = (state_before.target_id, state_before.entered_at)
                assert key not in seen, "second click inside one hover episode"
                seen[key] = click
            state_before = state_after


def test_dwell_time_monotonicity():
    rng = np.random.default_rng(909)
    for _ in range(200):
        samples, regions, cfg = random_replay_case(rng)
        shorter = DwellConfig(
            dwell_time=max(1, cfg.dwell_time // 2),
            jitter_radius=cfg.jitter_radius,
            refractory=cfg.refractory,
        )
        n_long = len(replay(samples, regions, cfg)[0])
        n_short = len(replay(samples, regions, shorter)[0])
        assert n_short >= n_long


def test_blink_splice_continuity():
    rng = np.random.default_rng(620)
    for _ in range(100):
        cfg = DwellConfig(dwell_time=600, jitter_radius=50.0, refractory=300)
        samples = hold_at(140, 130, 30)
        base_clicks = clicks_of(samples, LAYOUT, cfg)
        assert len(base_clicks) == 1
        cut = int(rng.integers(2, 25))
        spliced = []
        for i, s in enumerate(samples):
            spliced.append(s)
            if i == cut:
                for g in range(int(rng.integers(1, 4))):
                    # held samples as produced by hold_through_blinks
                    spliced.append(gs(s.timestamp + 8 * (g + 1), 140, 130, held=True))
        clicks = clicks_of(spliced, LAYOUT, cfg)
        assert len(clicks) == 1
        assert clicks[0].target_id == base_clicks[0].target_id


def test_click_csv(tmp_path):
    samples = hold_at(140, 130, 40)
    clicks = clicks_of(samples)
    path = tmp_path / "clicks.csv"
    write_click_csv(clicks, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "timestamp,target_id,x,y"
    assert lines[1].startswith("1023,btn,")


def test_config_invariants():
    with pytest.raises(ValueError):
        DwellConfig(dwell_time=0)
    with pytest.raises(ValueError):
        DwellConfig(jitter_radius=-1.0)
    with pytest.raises(ValueError):
        DwellConfig(refractory=-1)
