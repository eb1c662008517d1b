from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path

import pytest

from fieldalert.geo import AdminHierarchy, load_region_data
from fieldalert.model import (
    DisasterKind,
    DisasterReport,
    DiseaseDetails,
    GeoPoint,
    Severity,
    default_details,
)
from fieldalert.routing import ActorDirectory, load_directory_data
from fieldalert.server.core import AlertServer
from fieldalert.server.http import make_http_server

DATA_DIR = Path(__file__).parent / "data"

#: Coordinate used across the fixtures; sits inside kumban Sangkalok.
SANGKALOK_POINT = GeoPoint(19.845519, 102.078652)


@pytest.fixture(scope="session")
def region_data() -> dict:
    return json.loads((DATA_DIR / "regions_luang.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def hierarchy(region_data) -> AdminHierarchy:
    return load_region_data(region_data)


@pytest.fixture(scope="session")
def directory_data() -> dict:
    return json.loads((DATA_DIR / "directory_luang.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def directory(directory_data) -> ActorDirectory:
    return load_directory_data(directory_data)


@pytest.fixture(scope="session")
def sample_alert_bytes() -> bytes:
    return (DATA_DIR / "sample_alert.xml").read_bytes()


def make_report(kind: DisasterKind = DisasterKind.PLANT_DISEASE,
                lat: float = SANGKALOK_POINT.lat,
                lon: float = SANGKALOK_POINT.lon,
                **overrides) -> DisasterReport:
    """Valid report located in the Sangkalok fixture kumban by default."""
    details = overrides.pop("details", None)
    if details is None:
        if kind is DisasterKind.PLANT_DISEASE:
            details = DiseaseDetails(disease_kind=kind,
                                     disease_name="rice blast",
                                     affected_count=40)
        else:
            details = default_details(kind)
    fields = dict(
        id="",
        kind=kind,
        details=details,
        location=GeoPoint(lat, lon),
        province_id="Louangphabang",
        district_id="Louangprabang",
        kumban_id="Sangkalok",
        reporter="vil-ban-sangkha",
        reporter_phone="+856 20 555 0500",
        description="crop leaves turning grey",
        created_at=datetime(2013, 9, 25, 7, 5, 2, tzinfo=timezone.utc),
        severity=Severity.EXTREME,
    )
    fields.update(overrides)
    return DisasterReport(**fields)


@pytest.fixture
def report_factory():
    return make_report


@pytest.fixture
def server(hierarchy, directory):
    srv = AlertServer(hierarchy, directory)
    yield srv
    srv.close()


@pytest.fixture
def http_base_url(server):
    httpd = make_http_server(server, "127.0.0.1", 0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    host, port = httpd.server_address[:2]
    yield f"http://{host}:{port}"
    httpd.shutdown()
    httpd.server_close()
    thread.join(timeout=5)
