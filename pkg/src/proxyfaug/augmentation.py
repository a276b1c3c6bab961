"""Proximity-based crossover-and-mutate augmentation of fingerprint datasets.

Every training fingerprint anchors a cluster of at most ``max_cluster_size``
fingerprints lying within ``range_m`` meters of it (a uniform random subset is
kept when more are in range). Each unordered pair within a cluster breeds
``crossovers_per_pair`` offspring: a uniform crossover picks every RSSI
feature from either parent with equal probability, then each feature mutates
with probability ``mutation_prob`` into a uniform draw between the two parent
values. Offspring are placed at the spherical midpoint of their parents.

Augmentation operates on raw dBm values after sentinel replacement: mutation
intervals are meaningful in signal units, while the powed transform belongs
to the positioning pipeline.

Randomness is organized in per-reference substreams seeded by
``(seed, reference_index, lane)``, so cluster processing order and thread
count can never change the output.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datasets import EmptyDatasetError, Fingerprint, FingerprintDataset, Origin, SchemaError
from .geo import EARTH_RADIUS_M, haversine_array, midpoint, to_unit_vectors

# Substream lanes: neighbor subset selection and offspring generation draw
# from independent streams so that calling form_clusters separately replays
# exactly what augment_dataset does internally.
_LANE_SELECT = 0
_LANE_OFFSPRING = 1


@dataclass(frozen=True)
class AugmentationParams:
    """The four augmentation knobs plus the RNG seed.

    Defaults match the Sigfox setting: 20 m proximity range, clusters of two,
    eight offspring per pair, 0.3 mutation probability.
    """

    range_m: float = 20.0
    max_cluster_size: int = 2
    crossovers_per_pair: int = 8
    mutation_prob: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.range_m <= 0:
            raise ValueError(f"range_m must be positive, got {self.range_m}")
        if self.max_cluster_size < 2:
            raise ValueError(f"max_cluster_size must be >= 2, got {self.max_cluster_size}")
        if self.crossovers_per_pair < 1:
            raise ValueError(f"crossovers_per_pair must be >= 1, got {self.crossovers_per_pair}")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob must be in [0, 1], got {self.mutation_prob}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class Cluster:
    """A reference fingerprint index and its proximal members (itself included)."""

    reference: int
    members: tuple[int, ...]

    def __post_init__(self):
        if self.reference not in self.members:
            raise ValueError("cluster members must include the reference index")


def _substream(seed: int, reference: int, lane: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, reference, lane)))


class SpatialGrid:
    """Uniform 3-D grid over Earth-frame positions for fixed-radius lookup.

    Cell edge equals the chord length of the search radius, so every point
    within ``radius_m`` (great-circle) of a query sits in the query's 3x3x3
    cell neighborhood. Candidates are then distance-filtered with haversine.
    Unlike a lat/lon grid this stays correct at the poles and across the
    antimeridian.
    """

    def __init__(self, lats: np.ndarray, lons: np.ndarray, radius_m: float):
        if radius_m <= 0:
            raise ValueError(f"radius_m must be positive, got {radius_m}")
        self.lats = np.asarray(lats, dtype=np.float64)
        self.lons = np.asarray(lons, dtype=np.float64)
        self.radius_m = radius_m
        xyz = to_unit_vectors(self.lats, self.lons) * EARTH_RADIUS_M
        arc = min(radius_m / (2.0 * EARTH_RADIUS_M), math.pi / 2.0)
        self._cell_size = 2.0 * EARTH_RADIUS_M * math.sin(arc)
        keys = np.floor(xyz / self._cell_size).astype(np.int64)
        self._keys = keys
        self._cells: dict[tuple[int, int, int], list[int]] = {}
        for idx, key in enumerate(map(tuple, keys)):
            self._cells.setdefault(key, []).append(idx)

    def neighbors_within(self, i: int) -> np.ndarray:
        """Ascending indices of all other points within radius_m of point i."""
        kx, ky, kz = self._keys[i]
        candidates: list[int] = []
        for dx, dy, dz in itertools.product((-1, 0, 1), repeat=3):
            candidates.extend(self._cells.get((kx + dx, ky + dy, kz + dz), ()))
        cand = np.array(sorted(candidates), dtype=np.int64)
        cand = cand[cand != i]
        if cand.size == 0:
            return cand
        dists = haversine_array(self.lats[i], self.lons[i], self.lats[cand], self.lons[cand])
        return cand[dists <= self.radius_m]


def form_clusters(train: FingerprintDataset, params: AugmentationParams) -> list[Cluster]:
    """One cluster per training fingerprint, in dataset order.

    When more than ``max_cluster_size - 1`` neighbors are in range, a uniform
    random subset is kept alongside the reference (per-reference substream).
    Isolated points yield singleton clusters, which produce no pairs.
    """
    if len(train) == 0:
        raise EmptyDatasetError("cannot cluster an empty training set")
    grid = SpatialGrid(train.lats, train.lons, params.range_m)
    keep = params.max_cluster_size - 1
    clusters = []
    for i in range(len(train)):
        neighbors = grid.neighbors_within(i)
        if neighbors.size > keep:
            rng = _substream(params.seed, i, _LANE_SELECT)
            neighbors = rng.choice(neighbors, size=keep, replace=False)
        members = tuple(sorted([i, *neighbors.tolist()]))
        clusters.append(Cluster(reference=i, members=members))
    return clusters


def enumerate_pairs(cluster: Cluster) -> list[tuple[int, int]]:
    """All unordered member pairs, sorted by index."""
    return list(itertools.combinations(sorted(cluster.members), 2))


def crossover(a: Fingerprint, b: Fingerprint, rng: np.random.Generator) -> Fingerprint:
    """Uniform crossover: each feature comes from either parent with p=1/2.

    Produces a single offspring located at the spherical midpoint of the
    parents (no complementary sibling).
    """
    if a.rssi.shape != b.rssi.shape:
        raise SchemaError(
            f"parents disagree on basestation count: {a.rssi.shape[0]} vs {b.rssi.shape[0]}"
        )
    take_a = rng.random(a.rssi.shape[0]) < 0.5
    mid = midpoint(a.location, b.location)
    return Fingerprint(
        rssi=np.where(take_a, a.rssi, b.rssi),
        lat=mid.lat,
        lon=mid.lon,
        origin=Origin.AUGMENTED,
    )


def mutate(
    child: Fingerprint,
    a: Fingerprint,
    b: Fingerprint,
    mutation_prob: float,
    rng: np.random.Generator,
) -> Fingerprint:
    """Mutate each feature with probability ``mutation_prob``.

    A mutated feature is redrawn uniformly from the closed interval between
    the parents' values, so features on which the parents agree cannot move.
    Draw counts are independent of which features mutate, keeping substreams
    aligned.
    """
    n = child.rssi.shape[0]
    mutated = rng.random(n) < mutation_prob
    u = rng.random(n)
    lo = np.minimum(a.rssi, b.rssi)
    hi = np.maximum(a.rssi, b.rssi)
    rssi = np.where(mutated, lo + u * (hi - lo), child.rssi)
    return Fingerprint(rssi=rssi, lat=child.lat, lon=child.lon, origin=child.origin)


def crossover_and_mutate(
    a: Fingerprint,
    b: Fingerprint,
    mutation_prob: float,
    rng: np.random.Generator,
) -> Fingerprint:
    """The combined operator: crossover, then mutation, on one stream."""
    return mutate(crossover(a, b, rng), a, b, mutation_prob, rng)


def _cluster_offspring(
    train: FingerprintDataset, cluster: Cluster, params: AugmentationParams
) -> list[Fingerprint]:
    pairs = enumerate_pairs(cluster)
    if not pairs:
        return []
    rng = _substream(params.seed, cluster.reference, _LANE_OFFSPRING)
    out = []
    for ia, ib in pairs:
        parent_a, parent_b = train[ia], train[ib]
        for _ in range(params.crossovers_per_pair):
            out.append(crossover_and_mutate(parent_a, parent_b, params.mutation_prob, rng))
    return out


def augment_dataset(
    train: FingerprintDataset, params: AugmentationParams, threads: int = 1
) -> FingerprintDataset:
    """Run the full augmentation process over a (sentinel-replaced) training set.

    The output starts with the original fingerprints verbatim, followed by
    offspring in canonical order (reference index, pair, offspring index).
    Clusters anchored at different references may repeat a pair; no
    deduplication is applied. The result is deterministic in ``params.seed``
    regardless of ``threads``.
    """
    if len(train) == 0:
        raise EmptyDatasetError("cannot augment an empty training set")
    clusters = form_clusters(train, params)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_cluster = list(pool.map(lambda c: _cluster_offspring(train, c, params), clusters))
    else:
        per_cluster = [_cluster_offspring(train, c, params) for c in clusters]
    offspring = [fp for group in per_cluster for fp in group]
    if not offspring:
        return train
    return FingerprintDataset(
        rssi=np.vstack([train.rssi, np.stack([fp.rssi for fp in offspring])]),
        lats=np.concatenate([train.lats, [fp.lat for fp in offspring]]),
        lons=np.concatenate([train.lons, [fp.lon for fp in offspring]]),
        origins=train.origins + tuple(fp.origin for fp in offspring),
        basestation_ids=train.basestation_ids,
        sentinel=train.sentinel,
        floor=train.floor,
    )


def size_upper_bound(m: int, s_max: int, n: int) -> int:
    """Largest possible augmented-set size: ``m + m * C(s_max, 2) * n``."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    if s_max < 2:
        raise ValueError(f"s_max must be >= 2, got {s_max}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return m + m * math.comb(s_max, 2) * n
