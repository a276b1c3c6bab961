"""Shared builders for synthetic fingerprint datasets."""

from __future__ import annotations

import math

import numpy as np

from proxyfaug.datasets import FingerprintDataset, Origin
from proxyfaug.geo import EARTH_RADIUS_M

METERS_PER_DEG_LAT = EARTH_RADIUS_M * math.pi / 180.0


def make_dataset(rssi, lats, lons, sentinel=-200.0, floor=None, ids=None, origins=None):
    rssi = np.atleast_2d(np.asarray(rssi, dtype=np.float64))
    m, b = rssi.shape
    if ids is None:
        ids = [f"bs{j:03d}" for j in range(b)]
    if origins is None:
        origins = (Origin.ORIGINAL,) * m
    return FingerprintDataset(
        rssi=rssi,
        lats=np.asarray(lats, dtype=np.float64),
        lons=np.asarray(lons, dtype=np.float64),
        origins=tuple(origins),
        basestation_ids=tuple(ids),
        sentinel=sentinel,
        floor=floor,
    )


def offset_deg(lat0: float, north_m: float, east_m: float) -> tuple[float, float]:
    """Degree offsets that move roughly north_m/east_m meters at latitude lat0."""
    dlat = north_m / METERS_PER_DEG_LAT
    dlon = east_m / (METERS_PER_DEG_LAT * math.cos(math.radians(lat0)))
    return dlat, dlon


def scatter(rng, m, lat0=51.2, lon0=4.41, spread_m=60.0):
    """m random points in a disc of radius spread_m around the anchor."""
    angles = rng.uniform(0.0, 2.0 * math.pi, size=m)
    radii = spread_m * np.sqrt(rng.uniform(0.0, 1.0, size=m))
    lats = np.empty(m)
    lons = np.empty(m)
    for i in range(m):
        dlat, dlon = offset_deg(lat0, radii[i] * math.sin(angles[i]), radii[i] * math.cos(angles[i]))
        lats[i] = lat0 + dlat
        lons[i] = lon0 + dlon
    return lats, lons


def city_cloud(rng, m, b, spread_m=60.0, lat0=51.2, lon0=4.41, lo=-150.0, hi=-70.0):
    """Random dataset: m fingerprints in a spread_m disc, RSSI in [lo, hi] dBm."""
    lats, lons = scatter(rng, m, lat0=lat0, lon0=lon0, spread_m=spread_m)
    rssi = rng.uniform(lo, hi, size=(m, b))
    return make_dataset(rssi, lats, lons)
