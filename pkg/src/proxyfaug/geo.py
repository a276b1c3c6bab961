"""Geodesic primitives on a spherical Earth model.

All distances are great-circle (haversine) distances in meters, using the
mean Earth radius. At the tens-of-meters scale relevant to proximity-based
augmentation the spherical model error is orders of magnitude below GPS
noise, so no ellipsoidal corrections are applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    """A ground-truth location in decimal degrees (WGS84 lat/lon)."""

    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range [-90, 90]: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range [-180, 180]: {self.lon}")


def haversine(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters between two lat/lon pairs in degrees."""
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return EARTH_RADIUS_M * 2.0 * math.asin(min(1.0, math.sqrt(a)))


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two points."""
    return haversine(a.lat, a.lon, b.lat, b.lon)


def haversine_array(lats1, lons1, lats2, lons2) -> np.ndarray:
    """Vectorized haversine (meters) with numpy broadcasting on degree inputs."""
    phi1 = np.radians(np.asarray(lats1, dtype=np.float64))
    phi2 = np.radians(np.asarray(lats2, dtype=np.float64))
    dphi = phi2 - phi1
    dlam = np.radians(np.asarray(lons2, dtype=np.float64)) - np.radians(
        np.asarray(lons1, dtype=np.float64)
    )
    a = np.sin(dphi / 2.0) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlam / 2.0) ** 2
    return EARTH_RADIUS_M * 2.0 * np.arcsin(np.minimum(1.0, np.sqrt(a)))


def to_unit_vectors(lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Convert degree lat/lon arrays to (n, 3) unit vectors on the sphere."""
    phi = np.radians(np.asarray(lats, dtype=np.float64))
    lam = np.radians(np.asarray(lons, dtype=np.float64))
    cos_phi = np.cos(phi)
    return np.stack([cos_phi * np.cos(lam), cos_phi * np.sin(lam), np.sin(phi)], axis=-1)


def midpoint(a: GeoPoint, b: GeoPoint) -> GeoPoint:
    """Spherical midpoint of two points.

    Computed by normalizing the sum of the two position vectors, which makes
    the result symmetric in its arguments and equidistant from both inputs.
    Raises ValueError for (near-)antipodal pairs, where the midpoint is
    undefined.
    """
    va = to_unit_vectors(np.array([a.lat]), np.array([a.lon]))[0]
    vb = to_unit_vectors(np.array([b.lat]), np.array([b.lon]))[0]
    m = va + vb
    norm = float(np.linalg.norm(m))
    if norm < 1e-9:
        raise ValueError("midpoint undefined for antipodal points")
    m /= norm
    lat = math.degrees(math.atan2(m[2], math.hypot(m[0], m[1])))
    lon = math.degrees(math.atan2(m[1], m[0]))
    return GeoPoint(lat, lon)


def mean_location(lats: np.ndarray, lons: np.ndarray) -> GeoPoint:
    """Arithmetic mean of coordinates.

    Valid at city scale away from the antimeridian, where degree axes are
    locally linear.
    """
    return GeoPoint(float(np.mean(lats)), float(np.mean(lons)))
