import math

import pytest
from fastapi.testclient import TestClient

from dedekind_moments.errors import DomainError, NonConvergenceError
from dedekind_moments.main import create_app


@pytest.fixture()
def client_with(test_settings, make_stub_suites):
    def build(**overrides):
        return TestClient(create_app(settings_override=test_settings, suites_override=make_stub_suites(**overrides)))

    return build


def test_health_endpoint(test_app):
    response = test_app.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_kronecker_summary(test_app):
    response = test_app.get("/api/characters/kronecker/-3")
    assert response.status_code == 200
    body = response.json()
    assert body["q"] == 3
    assert body["parity"] == 1
    assert body["primitive"] is True
    gauss = complex(*body["gauss"])
    assert abs(gauss - 1j * math.sqrt(3)) < 1e-12


def test_kronecker_rejects_non_fundamental(test_app):
    response = test_app.get("/api/characters/kronecker/6")
    assert response.status_code == 400


def test_corollary_c2(test_app):
    response = test_app.get("/api/corollary/c2", params={"D": -4})
    assert response.status_code == 200
    # 6/pi^2 * (pi/4)^2 * (1 + 1/2)^-1
    assert response.json()["c2"] == pytest.approx(0.25, rel=1e-10)
    inert = test_app.get("/api/corollary/c2", params={"D": -4, "h": 3})
    assert inert.json()["c2"] == 0.0


def test_run_suite_endpoint(test_app):
    response = test_app.post("/api/checks/identities", json={"D": -3, "seed": 7})
    assert response.status_code == 200
    body = response.json()
    assert body["suite"] == "identities"
    assert body["config"]["seed"] == 7
    assert body["checks"][0]["name"] == "identities_stub"


def test_unknown_suite_is_unavailable(test_app):
    response = test_app.post("/api/checks/zeros", json={"D": -3})
    assert response.status_code == 503


def test_invalid_config_is_rejected(test_app):
    response = test_app.post("/api/checks/identities", json={"D": -3, "q": 4})
    assert response.status_code == 422


def test_suite_errors_map_to_status_codes(client_with, make_stub):
    with client_with(afe=make_stub("afe", error=DomainError("t outside the window"))) as client:
        assert client.post("/api/checks/afe", json={"q": 5}).status_code == 400
    with client_with(afe=make_stub("afe", error=NonConvergenceError("quadrature stalled"))) as client:
        response = client.post("/api/checks/afe", json={"q": 5})
        assert response.status_code == 422
        assert "stalled" in response.json()["detail"]


def test_main_term_endpoint(test_app):
    response = test_app.post("/api/moment/main-term", json={"D": -4, "T": 1000.0, "h": 2, "k": 3})
    assert response.status_code == 200
    body = response.json()
    assert (body["h"], body["k"]) == (2, 3)
    assert body["T0"] == pytest.approx(400.0)
    assert len(body["per_term"]) == 6
    total = sum(complex(*term) for term in body["per_term"])
    assert abs(total - complex(*body["main_term"])) < 1e-9 * abs(total)
    assert body["oracle"] is None


def test_main_term_rejects_bad_character(test_app):
    response = test_app.post("/api/moment/main-term", json={"D": 6})
    assert response.status_code == 400
