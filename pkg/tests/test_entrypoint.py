"""Boots the real server process and checks log-based recovery."""

from __future__ import annotations

import json
import signal
import subprocess
import sys
import threading
import urllib.request
from pathlib import Path

import pytest

from conftest import make_report
from fieldalert.server.config import ServerConfig, load_config

DATA_DIR = Path(__file__).parent / "data"


class TestConfig:
    def test_defaults(self):
        config = ServerConfig()
        assert config.listen_port == 8464
        assert config.neighbor_radius_m == 10_000.0
        assert (config.official_weight, config.user_weight) == (3, 1)
        assert config.auto_threshold == 5

    def test_load_partial_file(self, tmp_path):
        path = tmp_path / "server.json"
        path.write_text(json.dumps({"region_file": "r.json",
                                    "listen_port": 9000}), "utf-8")
        config = load_config(path)
        assert config.region_file == "r.json"
        assert config.listen_port == 9000
        assert config.user_weight == 1  # untouched default

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "server.json"
        path.write_text(json.dumps({"regoin_file": "oops"}), "utf-8")
        with pytest.raises(ValueError, match="regoin_file"):
            load_config(path)


def _boot(extra_args: list[str]) -> tuple[subprocess.Popen, str]:
    """Start the server process and wait for its listen line."""
    proc = subprocess.Popen(
        [sys.executable, "-m", "fieldalert.server",
         "--regions", str(DATA_DIR / "regions_luang.json"),
         "--directory", str(DATA_DIR / "directory_luang.json"),
         "--port", "0", *extra_args],
        stderr=subprocess.PIPE, text=True)

    address: list[str] = []

    def scan():
        for line in proc.stderr:
            if "listening on" in line:
                address.append(line.rsplit(" ", 1)[-1].strip())
                break

    scanner = threading.Thread(target=scan, daemon=True)
    scanner.start()
    scanner.join(timeout=20)
    if not address:
        proc.kill()
        raise AssertionError("server never reported its listen address")
    return proc, f"http://{address[0]}"


def _stop(proc: subprocess.Popen) -> None:
    if proc.poll() is None:
        proc.send_signal(signal.SIGINT)
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()


def _get(base_url: str, path: str) -> dict:
    with urllib.request.urlopen(base_url + path, timeout=10) as response:
        return json.loads(response.read())


def _post(base_url: str, path: str, payload: dict) -> dict:
    request = urllib.request.Request(
        base_url + path, json.dumps(payload).encode("utf-8"),
        {"Content-Type": "application/json"})
    with urllib.request.urlopen(request, timeout=10) as response:
        return json.loads(response.read())


class TestServerProcess:
    def test_missing_inputs_is_a_usage_error(self):
        result = subprocess.run(
            [sys.executable, "-m", "fieldalert.server"],
            capture_output=True, text=True)
        assert result.returncode == 2

    def test_boot_submit_and_recover(self, tmp_path):
        log_arg = ["--log", str(tmp_path / "audit.log")]

        proc, base_url = _boot(log_arg)
        try:
            assert _get(base_url, "/health") == {"status": "ok", "reports": 0}
            created = _post(base_url, "/reports",
                            {"report": make_report().to_dict()})
            assert created == {"id": "r-000001"}
            assert _get(base_url, "/health")["reports"] == 1
        finally:
            _stop(proc)
        assert proc.returncode == 0

        # A fresh process over the same log comes back with the state,
        # keeps numbering where it left off, and appends new events.
        proc, base_url = _boot(log_arg)
        try:
            assert _get(base_url, "/health")["reports"] == 1
            view = _get(base_url, "/reports/r-000001")
            assert view["report"]["state"] == "Distributed"
            created = _post(base_url, "/reports", {"report": make_report(
                reporter="vil-ban-nong", lat=19.9, lon=102.15).to_dict()})
            assert created == {"id": "r-000002"}
        finally:
            _stop(proc)

        events = (tmp_path / "audit.log").read_text("utf-8").splitlines()
        assert len(events) == 4  # two submissions, two distributions
        assert [line.split("\t")[0] for line in events] == ["1", "2", "3", "4"]
