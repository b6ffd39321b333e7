"""CLI dispatch, HTTP session service, event stream, persistence."""

import json
import subprocess
import sys
import time

import pytest
from fastapi.testclient import TestClient

from rankstop.cli import main as cli_main
from rankstop.service import (
    ServiceConfig,
    SessionStore,
    create_app,
    parse_config,
    scoreboard_from_records,
)

HIDDEN_KEYS = {"values", "N", "true_F", "n_total", "f_index", "final_ranks", "times"}


def all_keys(obj):
    keys = set()
    if isinstance(obj, dict):
        for k, v in obj.items():
            keys.add(k)
            keys |= all_keys(v)
    elif isinstance(obj, list):
        for v in obj:
            keys |= all_keys(v)
    return keys


@pytest.fixture()
def client(tmp_path):
    app = create_app(ServiceConfig(data_dir=str(tmp_path / "data")))
    with TestClient(app) as c:
        c.app = app
        yield c


class TestCli:
    def test_exact_json_contract(self, capsys):
        assert cli_main(["exact", "--n", "2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload == {
            "n": 2, "value": 1.25, "method": "closed-form", "error_bound": 0.0
        }

    def test_exact_resource_refusal_exit_3(self, capsys):
        assert cli_main(["exact", "--n", "7"]) == 3
        assert capsys.readouterr().out == ""

    def test_unknown_subcommand_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            cli_main(["frobnicate"])
        assert exc.value.code == 2

    def test_correlate_near_theory(self, capsys):
        assert cli_main(["correlate", "--n", "3", "--reps", "200000",
                         "--seed", "3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert abs(payload["estimate"] - payload["theory"]) < 0.01
        assert payload["theory"] == pytest.approx((2 / 4) ** 0.5)

    def test_ml_opt_free_and_family(self, capsys):
        assert cli_main(["ml-opt", "--n", "12", "--free"]) == 0
        free = json.loads(capsys.readouterr().out)
        assert cli_main(["ml-opt", "--n", "12"]) == 0
        family = json.loads(capsys.readouterr().out)
        assert free["value"] <= family["value"] + 1e-9
        assert "phi" in free and "c_star" in family
        assert free["family_gap"] == pytest.approx(
            family["value"] - free["value"], abs=1e-9
        )

    def test_truncate_and_secretary(self, capsys):
        assert cli_main(["truncate", "--n", "10", "--level", "2"]) == 0
        t = json.loads(capsys.readouterr().out)
        assert 1.0 <= t["value"] <= 2.0
        assert cli_main(["secretary", "--n", "10000"]) == 0
        s = json.loads(capsys.readouterr().out)
        assert abs(s["success_prob"] - 0.36788) < 1e-3

    def test_truncate_budget_exit_3(self):
        assert cli_main(["truncate", "--n", "10", "--level", "3"]) == 3

    def test_cloud_search_emits_audit_lines(self, capsys):
        assert cli_main(["cloud-search", "--n", "25", "--rounds", "4",
                         "--batch", "50", "--seed", "5"]) == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        assert len(lines) == 4
        for i, rec in enumerate(lines):
            assert rec["round"] == i
            assert {"policy", "mean", "se", "kept_or_perturbed"} <= set(rec)

    def test_ode_and_poisson_w(self, capsys):
        assert cli_main(["ode", "--h", "zero", "--tmax", "50"]) == 0
        ode = json.loads(capsys.readouterr().out)
        assert ode["limit_estimate"] == pytest.approx(1.0, abs=0.01)
        assert cli_main(["poisson-w", "--c", "2", "--t", "20"]) == 0
        w = json.loads(capsys.readouterr().out)
        assert 1.0 < w["value"] < 3.87

    def test_console_entry_point(self):
        out = subprocess.run(
            [sys.executable, "-m", "rankstop.cli", "exact", "--n", "1"],
            capture_output=True,
            text=True,
        )
        assert out.returncode == 0
        assert json.loads(out.stdout)["value"] == 1.0


class TestHttpSessions:
    def test_m1_accept_flow(self, client):
        sid = client.post("/sessions", json={"m": 1, "seed": 11}).json()["id"]
        view = client.post(f"/sessions/{sid}/advance").json()
        assert view["revealed"] == 1
        assert view["arrivals"][0]["rel_rank"] == 1
        view = client.post(f"/sessions/{sid}/decision",
                           json={"decision": "ACCEPT"}).json()
        assert view["status"] == "ACCEPTED"
        reveal = client.get(f"/sessions/{sid}/reveal").json()
        assert reveal["outcome"]["final_rank"] == 1

    def test_all_pass_forces_final_acceptance(self, client):
        sid = client.post("/sessions", json={"m": 6, "seed": 23}).json()["id"]
        status = "OPEN"
        while status == "OPEN":
            view = client.post(f"/sessions/{sid}/advance").json()
            view = client.post(f"/sessions/{sid}/decision",
                               json={"decision": "PASS"}).json()
            status = view["status"]
        assert status == "EXHAUSTED"
        reveal = client.get(f"/sessions/{sid}/reveal").json()
        assert reveal["outcome"]["forced"] is True
        values = reveal["values"]
        last = values[-1]
        expected_rank = sum(v < last for v in values) + sum(v == last for v in values)
        assert reveal["outcome"]["final_rank"] == expected_rank

    def test_pre_close_responses_never_leak(self, client):
        sid = client.post(
            "/sessions",
            json={"m": 5, "seed": 31, "objective": {"kind": "TOP_PERCENT", "param": 20},
                  "objective_secret": True},
        ).json()["id"]
        responses = [client.get(f"/sessions/{sid}").json()]
        for _ in range(3):
            responses.append(client.post(f"/sessions/{sid}/advance").json())
            view = client.post(f"/sessions/{sid}/decision",
                               json={"decision": "PASS"}).json()
            responses.append(view)
            if view["status"] != "OPEN":
                break
        for payload in responses:
            leaked = all_keys(payload) & HIDDEN_KEYS
            assert not leaked, f"leaked {leaked}"
            assert payload.get("objective") is None

    def test_conflicts_and_unknown_ids(self, client):
        assert client.get("/sessions/nope").status_code == 404
        sid = client.post("/sessions", json={"m": 1, "seed": 41}).json()["id"]
        # decision before any arrival
        r = client.post(f"/sessions/{sid}/decision", json={"decision": "ACCEPT"})
        assert r.status_code == 409
        client.post(f"/sessions/{sid}/advance")
        # double advance while a decision is pending
        assert client.post(f"/sessions/{sid}/advance").status_code == 409
        client.post(f"/sessions/{sid}/decision", json={"decision": "ACCEPT"})
        # accept twice
        r = client.post(f"/sessions/{sid}/decision", json={"decision": "ACCEPT"})
        assert r.status_code == 409
        assert client.post(f"/sessions/{sid}/advance").status_code == 409

    def test_machine_mode_plays_itself(self, client):
        sid = client.post(
            "/sessions",
            json={"m": 8, "seed": 53, "mode": "machine",
                  "objective": {"kind": "EXACT_RANK", "param": 1}},
        ).json()["id"]
        r = client.post(f"/sessions/{sid}/decision", json={"decision": "PASS"})
        assert r.status_code == 409
        status = "OPEN"
        while status == "OPEN":
            status = client.post(f"/sessions/{sid}/advance").json()["status"]
        reveal = client.get(f"/sessions/{sid}/reveal").json()
        assert reveal["outcome"]["final_rank"] >= 1

    def test_reveal_blocked_while_open(self, client):
        sid = client.post("/sessions", json={"m": 4, "seed": 61}).json()["id"]
        assert client.get(f"/sessions/{sid}/reveal").status_code == 409


class TestEventStream:
    def _play_to_close(self, client, sid):
        status = "OPEN"
        while status == "OPEN":
            client.post(f"/sessions/{sid}/advance")
            status = client.post(
                f"/sessions/{sid}/decision", json={"decision": "PASS"}
            ).json()["status"]

    @staticmethod
    def parse_sse(text):
        events = []
        for block in text.strip().split("\n\n"):
            ev = {}
            for line in block.splitlines():
                field, _, value = line.partition(": ")
                ev[field] = value
            if ev:
                events.append(
                    {"id": int(ev["id"]), "event": ev["event"],
                     "data": json.loads(ev["data"])}
                )
        return events

    def test_full_stream_after_close(self, client):
        sid = client.post("/sessions", json={"m": 3, "seed": 71}).json()["id"]
        self._play_to_close(client, sid)
        events = self.parse_sse(client.get(f"/sessions/{sid}/events").text)
        kinds = [e["event"] for e in events]
        assert kinds[0] == "created"
        assert kinds[-1] == "closed"
        assert kinds.count("arrival") == kinds.count("decision")
        assert [e["id"] for e in events] == list(range(1, len(events) + 1))

    def test_replay_from_last_event_id(self, client):
        sid = client.post("/sessions", json={"m": 3, "seed": 73}).json()["id"]
        self._play_to_close(client, sid)
        full = self.parse_sse(client.get(f"/sessions/{sid}/events").text)
        cut = full[2]["id"]
        tail = self.parse_sse(
            client.get(f"/sessions/{sid}/events?last_event_id={cut}").text
        )
        assert tail == full[3:]
        via_header = self.parse_sse(
            client.get(f"/sessions/{sid}/events",
                       headers={"Last-Event-ID": str(cut)}).text
        )
        assert via_header == tail


class TestPersistence:
    def test_crash_restart_preserves_records(self, tmp_path):
        data = str(tmp_path / "data")
        app = create_app(ServiceConfig(data_dir=data))
        with TestClient(app) as client:
            ids = []
            for seed in (81, 83):
                sid = client.post("/sessions", json={"m": 3, "seed": seed}).json()["id"]
                status = "OPEN"
                while status == "OPEN":
                    client.post(f"/sessions/{sid}/advance")
                    status = client.post(
                        f"/sessions/{sid}/decision", json={"decision": "PASS"}
                    ).json()["status"]
                ids.append(sid)
            before = {sid: client.get(f"/sessions/{sid}/reveal").content for sid in ids}
        app2 = create_app(ServiceConfig(data_dir=data))
        with TestClient(app2) as client2:
            for sid in ids:
                assert client2.get(f"/sessions/{sid}/reveal").content == before[sid]

    def test_store_records_are_immutable(self, tmp_path):
        store = SessionStore(tmp_path)
        store.write_record({"id": "abc", "outcome": {}})
        with pytest.raises(FileExistsError):
            store.write_record({"id": "abc", "outcome": {"x": 1}})

    def test_scoreboard_matches_recompute(self, client):
        for seed, mode in ((91, "human"), (93, "machine"), (97, "human")):
            body = {"m": 4, "seed": seed, "mode": mode}
            if mode == "human":
                body["objective"] = {"kind": "TOP_PERCENT", "param": 50}
                body["objective_secret"] = True
            sid = client.post("/sessions", json=body).json()["id"]
            status = "OPEN"
            while status == "OPEN":
                view = client.post(f"/sessions/{sid}/advance").json()
                if mode == "human":
                    view = client.post(
                        f"/sessions/{sid}/decision", json={"decision": "PASS"}
                    ).json()
                status = view["status"]
        stats = client.get("/stats").json()
        store: SessionStore = client.app.state.store
        recomputed = scoreboard_from_records(store.read_all())
        human = stats["scoreboard"]["human"]
        assert human["games"] == recomputed["human"]["games"]
        assert human["mean_rank"] == pytest.approx(
            recomputed["human"]["rank_total"] / recomputed["human"]["games"]
        )
        assert stats["ledger"]["games"] == 2
        weights = [h["weight"] for h in stats["ledger"]["hypotheses"]]
        assert sum(weights) == pytest.approx(1.0)

    def test_session_ttl_expires_open_sessions(self, tmp_path):
        app = create_app(
            ServiceConfig(data_dir=str(tmp_path / "d"), session_ttl_seconds=1)
        )
        with TestClient(app) as client:
            sid = client.post("/sessions", json={"m": 3, "seed": 99}).json()["id"]
            time.sleep(1.2)
            assert client.get(f"/sessions/{sid}").status_code == 404


def test_basket_definition_file_loads(tmp_path):
    basket_path = tmp_path / "basket.json"
    basket_path.write_text(
        json.dumps(
            {
                "a": 0.0,
                "b": 1.0,
                "entries": [
                    {"name": "uniform", "family": "uniform", "params": {}},
                    {"name": "steep", "family": "power", "params": {"k": 3.0}},
                ],
            }
        )
    )
    config = ServiceConfig(data_dir=str(tmp_path / "d"), basket_file=str(basket_path))
    basket = config.basket()
    assert basket.names() == ["uniform", "steep"]
    assert basket.entries[1].cdf(0.5) == pytest.approx(0.125)


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "service.conf"
    path.write_text(
        "# comment\nbind = 0.0.0.0:9000\ndata_dir = /tmp/x\n"
        "default_m = 40\nmaster_seed = 9\nsession_ttl_seconds = 60\n"
    )
    config = parse_config(path)
    assert config.host == "0.0.0.0"
    assert config.port == 9000
    assert config.default_m == 40
    assert config.session_ttl_seconds == 60
    with pytest.raises(ValueError):
        ServiceConfig(session_ttl_seconds=0)
