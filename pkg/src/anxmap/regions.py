"""Optional polygon-region hook (off by default).

The query surface is grid-cell addressed; deployments with real
administrative boundaries can load a GeoJSON FeatureCollection of
(Multi)Polygons and assign points to named regions with this module
instead. Coordinates follow GeoJSON order: [lon, lat].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


class BadRegionFile(ValueError):
    """Region file is not a usable GeoJSON FeatureCollection of polygons."""


Ring = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class PolygonRegion:
    id: str
    # each polygon: outer ring first, then hole rings
    polygons: tuple[tuple[Ring, ...], ...]

    def contains(self, lat: float, lon: float) -> bool:
        for rings in self.polygons:
            if _in_ring(lon, lat, rings[0]) and not any(_in_ring(lon, lat, hole) for hole in rings[1:]):
                return True
        return False


class PolygonIndex:
    """Point-in-polygon assignment over named regions."""

    def __init__(self, regions: Sequence[PolygonRegion]):
        self.regions = tuple(regions)

    @classmethod
    def load_geojson(cls, path: str | Path) -> "PolygonIndex":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise BadRegionFile(f"cannot read region file {path}: {exc}") from None
        if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
            raise BadRegionFile("expected a GeoJSON FeatureCollection")
        regions = []
        for n, feature in enumerate(doc.get("features") or []):
            geom = feature.get("geometry") or {}
            gtype = geom.get("type")
            if gtype == "Polygon":
                polys = [geom.get("coordinates")]
            elif gtype == "MultiPolygon":
                polys = geom.get("coordinates")
            else:
                raise BadRegionFile(f"feature {n}: unsupported geometry {gtype!r}")
            props = feature.get("properties") or {}
            region_id = props.get("id") or props.get("name") or feature.get("id") or f"region{n}"
            try:
                parsed = tuple(
                    tuple(tuple((float(x), float(y)) for x, y in ring) for ring in poly)
                    for poly in polys
                )
            except (TypeError, ValueError) as exc:
                raise BadRegionFile(f"feature {n}: bad coordinates: {exc}") from None
            if any(len(poly) == 0 or any(len(ring) < 4 for ring in poly) for poly in parsed):
                raise BadRegionFile(f"feature {n}: rings need at least 4 positions")
            regions.append(PolygonRegion(id=str(region_id), polygons=parsed))
        return cls(regions)

    def region_of(self, lat: float, lon: float) -> str | None:
        """Id of the first region containing the point, or None."""
        for region in self.regions:
            if region.contains(lat, lon):
                return region.id
        return None


def _in_ring(x: float, y: float, ring: Ring) -> bool:
    # even-odd ray casting; points exactly on an edge may land either side
    inside = False
    for (x1, y1), (x2, y2) in zip(ring, list(ring[1:]) + [ring[0]]):
        if (y1 > y) != (y2 > y):
            if x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
                inside = not inside
    return inside
