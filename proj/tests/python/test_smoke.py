import math

import numpy as np
import pytest

import fwflow


def test_certificate_values():
    cert = fwflow.certificate("rk44", 2.0, 1)
    assert np.allclose(cert["z"], [0.2449, 0.5986, 0.5714, 0.3333], atol=5e-5)
    assert cert["feasible"]
    assert not fwflow.certificate("midpoint", 2.0, 1)["feasible"]


def test_averaging_weights_sum_to_one():
    for k in (1, 10, 1000):
        assert math.isclose(sum(fwflow.averaging_weights(2.0, 1.0, k)), 1.0, abs_tol=1e-12)
    assert np.allclose(fwflow.averaging_weights(2.0, 1.0, 3), [0.1, 0.2, 0.3, 0.4])


def test_run_case_study(tmp_path):
    trace = fwflow.run(
        {
            "problem": {"generator": "case-study", "params": {"case": 2}},
            "solver": "fw",
            "budget": 200,
            "outputs": ["csv"],
            "out_dir": str(tmp_path),
        }
    )
    assert trace["solver_id"] == "fw"
    assert trace["grad_calls"][-1] <= 200
    assert len(trace["files"]) == 1 and (tmp_path / trace["files"][0].split("/")[-1]).exists()
    gap = trace["gap"]
    assert gap[-1] < gap[0]
    slope, _, r2 = fwflow.fit_power_law(trace["k"][100:], gap[100:])
    assert -1.25 <= slope <= -0.75 and r2 > 0.9


def test_zigzag_and_bound():
    straight = np.outer(np.arange(10.0), [1.0, 0.0])
    assert fwflow.zigzag_energy(straight, 5) == pytest.approx(0.0, abs=1e-12)
    assert fwflow.flow_bound(1.0, 2.0, 0.0) == pytest.approx(1.0)
    assert fwflow.flow_bound(1.0, 2.0, 2.0) == pytest.approx(0.25)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        fwflow.run({"solver": "nope", "outputs": []})
    assert "avgfw" in fwflow.solvers
