import json
import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from qubithammer.attack import AttackSpec, ScenarioSpec
from qubithammer.device import CrosstalkMatrix
from qubithammer.engine import OutcomeDistribution, SimParams, sample_counts
from qubithammer.metrics import BANDS, classify_impact, flip_probabilities, run_scenario, tv_distance


def test_tv_examples():
    p = {"0": 0.3, "1": 0.7}
    assert tv_distance(p, p) == 0.0
    assert tv_distance({"0": 1.0}, {"1": 1.0}) == 1.0
    assert tv_distance({"0": 1.0}, {"0": 0.391, "1": 0.609}) == pytest.approx(0.609, abs=1e-15)


def test_tv_uses_counts():
    a = OutcomeDistribution({"0": 0.5, "1": 0.5}, {"0": 30, "1": 70}, 100)
    assert tv_distance(a, {"0": 0.5, "1": 0.5}) == pytest.approx(0.2)


def test_tv_rejects_unnormalized():
    with pytest.raises(ValueError):
        tv_distance({"0": 0.5}, {"0": 1.0})


def test_bands():
    assert classify_impact(0.17) == "minimal"
    assert classify_impact(0.609) == "very_high"
    assert classify_impact(0.4) == "significant"
    assert classify_impact(0.2) == "mild"
    assert classify_impact(0.6) == "very_high"
    with pytest.raises(ValueError):
        classify_impact(1.5)


def _dist(n_bits):
    keys = [format(i, f"0{n_bits}b") for i in range(2**n_bits)]
    return st.lists(st.floats(0, 1), min_size=len(keys), max_size=len(keys)).filter(lambda w: sum(w) > 1e-3).map(
        lambda w: {k: v / math.fsum(w) for k, v in zip(keys, w)})


@settings(max_examples=200, deadline=None)
@given(_dist(2), _dist(2), _dist(2))
def test_tv_properties(p, q, r):
    brute = 0.5 * sum(abs(p[k] - q[k]) for k in p)
    assert abs(tv_distance(p, q) - brute) < 1e-12
    assert tv_distance(p, q) == pytest.approx(tv_distance(q, p), abs=1e-15)
    assert 0.0 <= tv_distance(p, q) <= 1.0 + 1e-12
    assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12


@settings(max_examples=100, deadline=None)
@given(_dist(1), st.sampled_from("01"))
def test_flip_is_tv_to_delta_on_one_qubit(p, bit):
    assert flip_probabilities(p, bit)[0] == pytest.approx(tv_distance(p, {bit: 1.0}), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(_dist(3), st.text("01", min_size=3, max_size=3))
def test_flip_marginals(p, bits):
    f = flip_probabilities(p, bits)
    for j in range(3):
        assert f[j] == pytest.approx(sum(v for k, v in p.items() if k[j] != bits[j]), abs=1e-12)


def test_zero_coupling_null(eagle):
    cfg = replace(eagle, crosstalk=CrosstalkMatrix())
    s = ScenarioSpec((0, 1), tuple(range(71, 127)), AttackSpec(method="repeated", n_pulses=5), "S2_BAI")
    r = run_scenario(cfg, s, "grover2", params=SimParams(shots=4096, seed=3))
    assert r.tv_distance <= 0.05
    # even with independent shot streams the gap stays inside the multinomial bound
    other = sample_counts(r.attacked, 4096, 99)
    assert tv_distance(r.baseline, other) <= 0.05


def test_s1_bai_idle_flip(eagle):
    s = ScenarioSpec((0,), tuple(range(1, 127)), AttackSpec(), "S1_BAI")
    r = run_scenario(eagle, s, "idle", params=SimParams(shots=4096, seed=1))
    assert r.flip_prob[0] > 0.5
    assert BANDS.index(r.impact_band) >= BANDS.index("significant")
    assert r.success and r.tv_distance > 0.2


def test_report_byte_identical(eagle):
    s = ScenarioSpec((0, 1), tuple(range(71, 127)), AttackSpec(method="repeated", n_pulses=2), "S2_BAI")
    a = run_scenario(eagle, s, "grover2", params=SimParams(shots=1024, seed=7)).to_json()
    b = run_scenario(eagle, s, "grover2", params=SimParams(shots=1024, seed=7)).to_json()
    assert a == b
    d = json.loads(a)
    assert "runtime_ms" not in d and set(d["flip_prob"]) == {"0", "1"}
    assert d["success"] == (d["tv_distance"] > 0.2)
