"""Administrative region registry and geometry helpers.

Regions form a containment tree: provinces hold districts, districts hold
kumbans, kumbans hold villages. Every region is a named polygon ring;
villages are named points. Point-in-polygon is ray casting with an
explicit on-boundary check so border points resolve inside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

from .errors import DegenerateRing, OutOfCoverage, RegionFileError
from .model import DisasterReport, GeoPoint

#: Mean Earth radius in metres, shared with the test oracles.
EARTH_RADIUS_M = 6_371_000.0

DEFAULT_NEIGHBOR_RADIUS_M = 10_000.0

_EPS = 1e-9

Ring = tuple[GeoPoint, ...]


@dataclass(frozen=True)
class Village:
    id: str
    location: GeoPoint


@dataclass(frozen=True)
class Kumban:
    id: str
    ring: Ring
    villages: tuple[Village, ...] = ()


@dataclass(frozen=True)
class District:
    id: str
    ring: Ring
    kumbans: tuple[Kumban, ...] = ()


@dataclass(frozen=True)
class Province:
    id: str
    ring: Ring
    districts: tuple[District, ...] = ()


@dataclass(frozen=True)
class Location:
    """Result of a point lookup: innermost containing regions."""

    province_id: str
    district_id: str | None = None
    kumban_id: str | None = None


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in metres."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def _on_segment(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> bool:
    cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon)
    if abs(cross) > _EPS:
        return False
    return (min(a.lon, b.lon) - _EPS <= p.lon <= max(a.lon, b.lon) + _EPS
            and min(a.lat, b.lat) - _EPS <= p.lat <= max(a.lat, b.lat) + _EPS)


def point_in_ring(point: GeoPoint, ring: Ring) -> bool:
    """Ray-cast containment test; points on an edge or vertex count as inside."""
    n = len(ring)
    for i in range(n):
        if _on_segment(point, ring[i], ring[(i + 1) % n]):
            return True
    inside = False
    j = n - 1
    for i in range(n):
        yi, xi = ring[i].lat, ring[i].lon
        yj, xj = ring[j].lat, ring[j].lon
        if (yi > point.lat) != (yj > point.lat):
            x_cross = (xj - xi) * (point.lat - yi) / (yj - yi) + xi
            if point.lon < x_cross:
                inside = not inside
        j = i
    return inside


def ring_bbox(ring: Ring) -> tuple[float, float, float, float]:
    """(min_lat, min_lon, max_lat, max_lon)."""
    lats = [p.lat for p in ring]
    lons = [p.lon for p in ring]
    return min(lats), min(lons), max(lats), max(lons)


def ring_centroid(ring: Ring) -> GeoPoint:
    """Area centroid of a simple polygon (shoelace formula).

    Raises DegenerateRing for fewer than 3 points or zero signed area
    (collinear vertices).
    """
    if len(ring) < 3:
        raise DegenerateRing(f"ring needs at least 3 points, got {len(ring)}")
    twice_area = 0.0
    cx = 0.0
    cy = 0.0
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        cross = a.lon * b.lat - b.lon * a.lat
        twice_area += cross
        cx += (a.lon + b.lon) * cross
        cy += (a.lat + b.lat) * cross
    if abs(twice_area) < 1e-12:
        raise DegenerateRing("ring vertices are collinear")
    return GeoPoint(lat=cy / (3.0 * twice_area), lon=cx / (3.0 * twice_area))


@dataclass
class AdminHierarchy:
    """The loaded containment tree plus id-keyed lookup tables."""

    provinces: tuple[Province, ...]
    ministry_id: str = "MAF"
    province_by_id: dict[str, Province] = field(init=False, repr=False)
    district_by_id: dict[str, District] = field(init=False, repr=False)
    kumban_by_id: dict[str, Kumban] = field(init=False, repr=False)
    village_by_id: dict[str, Village] = field(init=False, repr=False)
    #: district id -> owning province id (same pattern for the other maps)
    province_of_district: dict[str, str] = field(init=False, repr=False)
    district_of_kumban: dict[str, str] = field(init=False, repr=False)
    kumban_of_village: dict[str, str] = field(init=False, repr=False)

    def __post_init__(self):
        self.province_by_id = {}
        self.district_by_id = {}
        self.kumban_by_id = {}
        self.village_by_id = {}
        self.province_of_district = {}
        self.district_of_kumban = {}
        self.kumban_of_village = {}
        for prov in self.provinces:
            self.province_by_id[prov.id] = prov
            for dist in prov.districts:
                self.district_by_id[dist.id] = dist
                self.province_of_district[dist.id] = prov.id
                for kum in dist.kumbans:
                    self.kumban_by_id[kum.id] = kum
                    self.district_of_kumban[kum.id] = dist.id
                    for vil in kum.villages:
                        self.village_by_id[vil.id] = vil
                        self.kumban_of_village[vil.id] = kum.id

    # ------------------------------------------------------------ lookups

    def iter_villages(self) -> Iterator[Village]:
        for prov in self.provinces:
            for dist in prov.districts:
                for kum in dist.kumbans:
                    yield from kum.villages

    def knows_unit(self, unit_id: str) -> bool:
        return (unit_id == self.ministry_id
                or unit_id in self.province_by_id
                or unit_id in self.district_by_id
                or unit_id in self.kumban_by_id
                or unit_id in self.village_by_id)

    # ---------------------------------------------------------- operations

    def locate(self, point: GeoPoint) -> Location:
        """Innermost regions containing the point, document order on ties."""
        for prov in self.provinces:
            if not point_in_ring(point, prov.ring):
                continue
            district_id: str | None = None
            kumban_id: str | None = None
            for dist in prov.districts:
                if not point_in_ring(point, dist.ring):
                    continue
                district_id = dist.id
                for kum in dist.kumbans:
                    if point_in_ring(point, kum.ring):
                        kumban_id = kum.id
                        break
                break
            return Location(prov.id, district_id, kumban_id)
        raise OutOfCoverage(
            f"point ({point.lat}, {point.lon}) lies in no known province")

    def neighbors(self, center: GeoPoint,
                  radius_m: float = DEFAULT_NEIGHBOR_RADIUS_M) -> list[Village]:
        """Villages within radius_m of center, nearest first.

        Inclusive at the radius; distance ties break on village id.
        """
        if radius_m <= 0:
            raise ValueError("radius_m must be positive")
        hits = [(haversine_m(center, v.location), v)
                for v in self.iter_villages()]
        hits = [h for h in hits if h[0] <= radius_m]
        hits.sort(key=lambda h: (h[0], h[1].id))
        return [v for _, v in hits]


def attach_geometry(report: DisasterReport, ring: list[GeoPoint],
                    hierarchy: AdminHierarchy) -> DisasterReport:
    """Set a polygon on a report and recentre it.

    The closing edge is implicit; a duplicated final vertex is dropped.
    The report's location becomes the ring centroid and its region ids
    are re-resolved, so the call is idempotent for a fixed ring.
    """
    pts = list(ring)
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    centroid = ring_centroid(tuple(pts))
    located = hierarchy.locate(centroid)
    return replace(
        report,
        geometry=tuple(pts),
        location=centroid,
        province_id=located.province_id,
        district_id=located.district_id,
        kumban_id=located.kumban_id,
    )


# --------------------------------------------------------------------------
# Region file loading
# --------------------------------------------------------------------------

def _parse_ring(raw, owner: str) -> Ring:
    if not isinstance(raw, list) or len(raw) < 3:
        raise RegionFileError(f"region '{owner}': polygon needs at least 3 points")
    pts = []
    for pair in raw:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise RegionFileError(f"region '{owner}': ring entries must be [lat, lon] pairs")
        pts.append(GeoPoint(float(pair[0]), float(pair[1])))
    if pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) < 3:
        raise RegionFileError(f"region '{owner}': polygon needs at least 3 distinct points")
    return tuple(pts)


def load_region_data(data: dict) -> AdminHierarchy:
    """Build a hierarchy from the parsed region document."""
    seen: set[str] = set()

    def claim(rid, kind: str) -> str:
        if not rid or not isinstance(rid, str):
            raise RegionFileError(f"{kind} with missing or non-string id")
        if rid in seen:
            raise RegionFileError(f"duplicate region id '{rid}'")
        seen.add(rid)
        return rid

    ministry_id = data.get("ministry", "MAF")
    claim(ministry_id, "ministry")
    provinces = []
    for p in data.get("provinces", []):
        pid = claim(p.get("id"), "province")
        pring = _parse_ring(p.get("ring"), pid)
        pbox = ring_bbox(pring)
        districts = []
        for d in p.get("districts", []):
            did = claim(d.get("id"), "district")
            dring = _parse_ring(d.get("ring"), did)
            dbox = ring_bbox(dring)
            # Sanity bound: a district may not spill outside its province's bbox.
            if (dbox[0] < pbox[0] - _EPS or dbox[1] < pbox[1] - _EPS
                    or dbox[2] > pbox[2] + _EPS or dbox[3] > pbox[3] + _EPS):
                raise RegionFileError(
                    f"district '{did}' extends outside province '{pid}' bounding box")
            kumbans = []
            for k in d.get("kumbans", []):
                kid = claim(k.get("id"), "kumban")
                kring = _parse_ring(k.get("ring"), kid)
                villages = []
                for v in k.get("villages", []):
                    vid = claim(v.get("id"), "village")
                    try:
                        villages.append(Village(vid, GeoPoint(float(v["lat"]), float(v["lon"]))))
                    except (KeyError, TypeError, ValueError) as exc:
                        raise RegionFileError(f"village '{vid}': bad coordinates") from exc
                kumbans.append(Kumban(kid, kring, tuple(villages)))
            districts.append(District(did, dring, tuple(kumbans)))
        provinces.append(Province(pid, pring, tuple(districts)))
    if not provinces:
        raise RegionFileError("region file defines no provinces")
    return AdminHierarchy(tuple(provinces), ministry_id=ministry_id)


def load_region_file(path: str | Path) -> AdminHierarchy:
    """Load a region document from disk (JSON)."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise RegionFileError(f"cannot read region file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RegionFileError(f"region file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise RegionFileError("region file must be a JSON object")
    return load_region_data(data)
