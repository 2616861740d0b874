import math

import pytest

import rudder

FULL_FORWARD = "0 0 5 0 1\n"


def test_rest_and_deadzone_give_zero_twist():
    assert rudder.map_to_twist(0.0, 0.0, 0.0) == (0.0, 0.0, 0.0)
    assert rudder.map_to_twist(0.02, -0.025, 0.04) == (0.0, 0.0, 0.0)


def test_full_forward_tilt_is_pure_forward():
    cfg = rudder.day_profile("day2")
    vx, vy, wz = rudder.map_to_twist(0.0, cfg.stop_rp, 0.0, cfg)
    assert (vx, vy, wz) == (cfg.v_max_x, 0.0, 0.0)


def test_normalize_axis_midpoint():
    assert rudder.normalize_axis(0.15, 0.05, 0.25) == pytest.approx(0.5, abs=1e-12)


def test_mapper_slews():
    cfg = rudder.MappingConfig()
    cfg.a_max_lin = 1.5
    cfg.v_max_x = 2.0
    cfg.smoothing_alpha = 1.0
    mapper = rudder.Mapper(cfg)
    vx, vy, wz, seq = mapper.step((2.0, 0.0, 0.0), 0.02)
    assert vx == pytest.approx(0.03, abs=1e-15)
    assert seq == 1


def test_unknown_profile_raises():
    with pytest.raises(ValueError, match="day1"):
        rudder.day_profile("day3")


def test_half_circle():
    x, y, h = rudder.integrate((0.0, 0.0, 0.0), (1.0, 0.0, 1.0), math.pi)
    assert abs(x) < 1e-9 and abs(y - 2.0) < 1e-9
    assert abs(math.remainder(h - math.pi, 2 * math.pi)) < 1e-9


def test_rig_settles():
    assert rudder.settle_time((0.25, -0.25, 0.5)) <= 2.0
    angles, _ = rudder.rig_advance((0, 0, 0), (0, 0, 0), (0.1, 0, 0), 30.0)
    assert angles[0] == pytest.approx(0.1 / 3.0, abs=1e-4)


def test_protocol_round_trip_and_reject():
    line = rudder.format_effort(7, 1.5, 0.0, 0.2, -0.1, True)
    msg = rudder.parse_message(line)
    assert msg["type"] == "EFFORT" and msg["seq"] == 7 and msg["engaged"] is True
    assert rudder.parse_message("EFFORT seq=1 t=0 roll=nan pitch=0 yaw=0 engaged=1")["reason"] == "non-finite"
    assert rudder.parse_message("HELLO")["reason"] == "unknown-type"


def test_drive_replay_analyze():
    log, csv, lines = rudder.drive(FULL_FORWARD, profile="day2", duration=30.0)
    assert csv.splitlines()[0].startswith("t,vx,vy,wz")
    assert any(l.startswith("CMD ") for l in lines)
    assert rudder.replay(log) == log
    metrics = rudder.analyze(log)
    assert metrics["completion_time"] == pytest.approx(20.42, rel=0.05)
    assert metrics["reversals"] == [0, 0, 0]
    again, _, _ = rudder.drive(FULL_FORWARD, profile="day2", duration=30.0)
    assert again == log


def test_arenas_and_hash():
    assert {"corridor_40m", "obstacle_field"} <= set(rudder.arena_names())
    assert "goal" in rudder.arena_text("corridor_40m")
    assert rudder.config_hash("day1") != rudder.config_hash("day2")
    assert len(rudder.config_hash()) == 16
