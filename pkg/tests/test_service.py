import numpy as np
import pytest
from starlette.testclient import TestClient

from bbdqc1 import __version__
from bbdqc1.service.app import app

client = TestClient(app, raise_server_exceptions=False)


def matrix_payload(m: np.ndarray) -> dict:
    return {
        "dim": m.shape[0],
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


class TestHealth:
    def test_health(self):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["version"] == __version__


class TestTrace:
    def test_identity_both_protocols(self):
        resp = client.post(
            "/trace",
            json={
                "unitary": {"builtin": "identity", "dim": 4},
                "protocol": "both",
                "shots": 2000,
                "seed": 3,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["standard"]["exact_re"] == pytest.approx(1.0)
        assert body["standard"]["exact_im"] == pytest.approx(0.0)
        assert body["bb"]["exact"] == pytest.approx(1.0)
        assert body["seed"] == 3
        assert body["version"] == __version__
        assert len(body["config_hash"]) == 16

    def test_explicit_matrix(self):
        m = np.diag([1.0, 1j])
        resp = client.post(
            "/trace",
            json={
                "unitary": {"matrix": matrix_payload(m)},
                "protocol": "standard",
                "shots": 1000,
                "seed": 0,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["standard"]["exact_re"] == pytest.approx(0.5)
        assert body["standard"]["exact_im"] == pytest.approx(0.5)
        assert body["bb"] is None

    def test_modmul_builtin(self):
        resp = client.post(
            "/trace",
            json={
                "unitary": {"builtin": "modmul", "a": 2, "N": 15},
                "protocol": "bb",
                "shots": 1000,
                "seed": 0,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        # tr U_2 mod 15 = number of fixed points = 1, so |tr|^2 / N^2 = 1/225
        assert body["bb"]["exact"] == pytest.approx(1 / 225)

    def test_nonunitary_matrix_rejected(self):
        m = np.ones((2, 2))
        resp = client.post(
            "/trace",
            json={"unitary": {"matrix": matrix_payload(m)}, "shots": 10, "seed": 0},
        )
        assert resp.status_code == 400
        assert resp.json()["detail"]["kind"] == "input"

    def test_builtin_and_matrix_both_given(self):
        m = np.eye(2)
        resp = client.post(
            "/trace",
            json={
                "unitary": {"builtin": "identity", "dim": 2, "matrix": matrix_payload(m)},
                "shots": 10,
            },
        )
        assert resp.status_code == 422

    def test_reproducible(self):
        req = {
            "unitary": {"builtin": "identity", "dim": 2},
            "protocol": "both",
            "shots": 500,
            "seed": 11,
        }
        a = client.post("/trace", json=req)
        b = client.post("/trace", json=req)
        assert a.content == b.content


class TestFactor:
    def test_factor_15(self):
        resp = client.post("/factor", json={"N": 15, "seed": 7})
        assert resp.status_code == 200
        body = resp.json()
        assert body["factors"] == [3, 5]
        assert body["trivial_gcd"] in (True, False)
        assert body["records"] is not None
        assert body["version"] == __version__

    def test_pinned_base_includes_bound(self):
        resp = client.post("/factor", json={"N": 15, "a": 2, "seed": 2})
        assert resp.status_code == 200
        body = resp.json()
        assert body["factors"] == [3, 5]
        assert body["success_bound"] == pytest.approx(0.10807, abs=5e-5)
        assert all(rec["a"] == 2 for rec in body["records"])

    def test_no_records(self):
        resp = client.post("/factor", json={"N": 21, "seed": 1, "include_records": False})
        assert resp.status_code == 200
        assert resp.json()["records"] is None

    def test_even_rejected(self):
        resp = client.post("/factor", json={"N": 14})
        assert resp.status_code == 422
        assert resp.json()["detail"]["kind"] == "precondition"

    def test_prime_power_rejected(self):
        resp = client.post("/factor", json={"N": 9})
        assert resp.status_code == 422
        assert resp.json()["detail"]["kind"] == "precondition"

    def test_prime_rejected(self):
        resp = client.post("/factor", json={"N": 13})
        assert resp.status_code == 422

    def test_bad_t_rejected(self):
        resp = client.post("/factor", json={"N": 15, "t": 128})
        assert resp.status_code == 422

    def test_reproducible(self):
        a = client.post("/factor", json={"N": 33, "seed": 5})
        b = client.post("/factor", json={"N": 33, "seed": 5})
        assert a.content == b.content


class TestAnalyze:
    def test_analyze_15_2(self):
        resp = client.post("/analyze", json={"N": 15, "a": 2})
        assert resp.status_code == 200
        body = resp.json()
        assert body["t"] == 256
        assert body["r"] == 4
        assert body["chi"] == 4
        assert body["num_c"] == 104
        assert body["usable_pairs"] == 108
        assert body["success_bound"] == pytest.approx(0.10807, abs=5e-5)
        dist = body["distribution"]
        assert len(dist) == 256
        assert dist[0] == pytest.approx(59 / 225, abs=1e-12)
        assert dist[64] == pytest.approx(54 / 225, abs=1e-12)
        assert sum(dist) == pytest.approx(1.0, abs=1e-9)
        assert body["parker_plenio_pair_rate"] == pytest.approx(body["pair_rate"], abs=1e-12)

    def test_shared_factor_flagged(self):
        resp = client.post("/analyze", json={"N": 15, "a": 3})
        assert resp.status_code == 409
        detail = resp.json()["detail"]
        assert detail["kind"] == "trivial_factor"
        assert detail["gcd"] == 3

    def test_non_semiprime_rejected(self):
        resp = client.post("/analyze", json={"N": 16, "a": 3})
        assert resp.status_code == 422

    def test_bad_t(self):
        resp = client.post("/analyze", json={"N": 15, "a": 2, "t": 100})
        assert resp.status_code == 422


class TestVerify:
    def test_quick_passes(self):
        resp = client.post("/verify", json={"quick": True, "seed": 0})
        assert resp.status_code == 200
        body = resp.json()
        assert body["passed"]
        assert all(r["passed"] for r in body["results"])

    def test_fault_injection_names_failure(self):
        resp = client.post(
            "/verify", json={"quick": True, "break_phase_invariance": True, "seed": 0}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert not body["passed"]
        failed = [r["name"] for r in body["results"] if not r["passed"]]
        assert "global_phase_invariance" in failed
