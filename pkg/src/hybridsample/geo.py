"""Simulated venue-query API and the random region zoom-in sampler.

The index answers rectangle queries truncated to at most K venues, the way
location-based service APIs do.  The zoom-in sampler recursively splits a
truncated region into four equal quadrants, descends into a uniformly
chosen nonempty quadrant, and finally picks one venue uniformly in a fully
accessible leaf.  Because a venue sits in exactly one leaf, the product of
branching factors times the leaf pick gives the exact draw probability,
which is what the indirect estimators need.

Region membership is half-open, [lat_min, lat_max) x [lon_min, lon_max),
so quadrant splits partition a region exactly and no probability mass is
lost or counted twice.  Build the root region with a little headroom above
the largest coordinates (see VenueIndex.bounding_region).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import EstimateReport, vsa_theta_known_n, vsa_theta_unknown_n
from .graphs import HybridNetwork, Labeler
from .samplers import VsaDraw, VsaSample
from .seeds import STREAM_AUX, spawn_rng

MAX_ZOOM_DEPTH = 60


@dataclass(frozen=True)
class Venue:
    id: int
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} out of range")


@dataclass(frozen=True)
class Region:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self):
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ValueError(f"degenerate region {self}")

    def contains(self, lat: float, lon: float) -> bool:
        """Half-open membership used by the venue index."""
        return (
            self.lat_min <= lat < self.lat_max
            and self.lon_min <= lon < self.lon_max
        )

    def contains_closed(self, lat: float, lon: float) -> bool:
        """Inclusive membership, used for bounding-box record filters."""
        return (
            self.lat_min <= lat <= self.lat_max
            and self.lon_min <= lon <= self.lon_max
        )

    def quadrants(self) -> tuple:
        """Four equal quadrants partitioning the region (half-open)."""
        mid_lat = (self.lat_min + self.lat_max) / 2.0
        mid_lon = (self.lon_min + self.lon_max) / 2.0
        return (
            Region(self.lat_min, mid_lat, self.lon_min, mid_lon),
            Region(self.lat_min, mid_lat, mid_lon, self.lon_max),
            Region(mid_lat, self.lat_max, self.lon_min, mid_lon),
            Region(mid_lat, self.lat_max, mid_lon, self.lon_max),
        )


# Default demo bounding box: New York City.
NYC_REGION = Region(40.4, 41.4, -74.3, -73.3)


class VenueIndex:
    """Immutable spatial point set with truncated rectangle queries."""

    def __init__(self, venues):
        self.venues = sorted(venues, key=lambda v: v.id)
        ids = [v.id for v in self.venues]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate venue ids")
        self._lats = np.array([v.lat for v in self.venues])
        self._lons = np.array([v.lon for v in self.venues])

    def __len__(self) -> int:
        return len(self.venues)

    def query(self, region: Region, k: int):
        """Venues inside the region, truncated to the K smallest ids.

        Returns (venues, truncated).
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        mask = (
            (self._lats >= region.lat_min)
            & (self._lats < region.lat_max)
            & (self._lons >= region.lon_min)
            & (self._lons < region.lon_max)
        )
        idx = np.flatnonzero(mask)
        if len(idx) > k:
            return [self.venues[i] for i in idx[:k]], True
        return [self.venues[i] for i in idx], False

    def bounding_region(self, pad: float = 1e-6) -> Region:
        if not self.venues:
            raise ValueError("empty index has no bounding region")
        lats = [v.lat for v in self.venues]
        lons = [v.lon for v in self.venues]
        return Region(min(lats), max(lats) + pad, min(lons), max(lons) + pad)


def query_region(index: VenueIndex, region: Region, k: int):
    return index.query(region, k)


@dataclass
class RrziDraw:
    """One venue draw with its exact inclusion probability and cost."""

    venue: Venue
    p: float
    zoom_path: list
    api_calls: int


def rrzi_draw(index: VenueIndex, root: Region, k: int, seed, *, _rng=None) -> RrziDraw:
    """Zoom into the root region until a query is no longer truncated, then
    pick one venue uniformly in the leaf.

    Each level splits into four equal quadrants, probes each with one query
    to find the nonempty ones, and descends into one of those uniformly at
    random.  The recorded probability is the product of the per-level
    branching choices times the uniform leaf pick and equals the overall
    probability of drawing that venue.
    """
    rng = _rng if _rng is not None else spawn_rng(seed, STREAM_AUX)
    region = root
    p = 1.0
    path = []
    api_calls = 0
    for _ in range(MAX_ZOOM_DEPTH + 1):
        hits, truncated = index.query(region, k)
        api_calls += 1
        if not truncated:
            if not hits:
                raise ValueError("region contains no venues")
            venue = hits[rng.randrange(len(hits))]
            return RrziDraw(venue, p / len(hits), path, api_calls)
        mid_lat = (region.lat_min + region.lat_max) / 2.0
        mid_lon = (region.lon_min + region.lon_max) / 2.0
        if not (region.lat_min < mid_lat < region.lat_max and region.lon_min < mid_lon < region.lon_max):
            break  # region no longer splittable in float precision
        quads = region.quadrants()
        nonempty = []
        for qi, quad in enumerate(quads):
            sub, _ = index.query(quad, 1)
            api_calls += 1
            if sub:
                nonempty.append(qi)
        choice = nonempty[rng.randrange(len(nonempty))]
        p /= len(nonempty)
        path.append(choice)
        region = quads[choice]
    raise RuntimeError(
        f"zoom exhausted (depth limit {MAX_ZOOM_DEPTH}); more than {k} venues share a location"
    )


def rrzi_vsa_estimate(
    hybrid: HybridNetwork,
    index: VenueIndex,
    root: Region,
    k: int,
    b_prime: int,
    labeler: Labeler,
    seed,
) -> EstimateReport:
    """B' independent zoom-in draws fed into the indirect estimators.

    The returned report's theta is the ratio (unknown-n) form; the known-n
    form and the size estimate ride along.
    """
    if b_prime < 1:
        raise ValueError("b_prime must be >= 1")
    rng = spawn_rng(seed, STREAM_AUX)
    right = hybrid.affiliation.right_adj
    left = hybrid.affiliation.left_adj
    draws = []
    degrees: dict = {}
    api_calls = 0
    for _ in range(b_prime):
        d = rrzi_draw(index, root, k, seed, _rng=rng)
        api_calls += d.api_calls
        v = d.venue.id
        if not 0 <= v < hybrid.auxiliary.n:
            raise ValueError(f"venue id {v} is not an auxiliary node")
        nbrs = tuple(right[v])
        draws.append(VsaDraw(v, d.p, nbrs))
        for u in nbrs:
            if u not in degrees:
                degrees[u] = len(left[u])
    sample = VsaSample(draws, degrees, query_count=api_calls)
    report = vsa_theta_unknown_n(sample, labeler, seed=seed)
    known = vsa_theta_known_n(sample, labeler, hybrid.target.n, seed=seed)
    report.method = "RRZI-VSA"
    report.theta_known_n = known.theta
    return report


def load_venues(path) -> list:
    """Read a venue file: one "id lat lon" triple per line, '#' comments."""
    venues = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'id lat lon', got {line!r}")
            try:
                venues.append(Venue(int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return venues


def write_venues(venues, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in sorted(venues, key=lambda v: v.id):
            fh.write(f"{v.id} {v.lat!r} {v.lon!r}\n")
