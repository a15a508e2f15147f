"""Verifiers and estimators for the structural properties the diameter
algorithm relies on, measured on concrete instances.

Deterministic facts (the lower stretch bound) get pass/fail; everything
asymptotic is reported as numbers only.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import pairwise_distance
from .graphcore import UNREACHABLE, GeometricGraph, distance_matrix
from .partition import RecursivePartition, check_separators

CSV_SCHEMA = 1
CSV_COLUMNS = ["schema", "property", "instance", "parameter", "statistic", "value", "passed"]

# slack for float rounding in ceil(d_X / r)
_EPS = 1e-9


@dataclass
class PropertyReport:
    """One property measured on one instance.

    ``stats`` maps a parameter point (``""`` when there is none) to a dict of
    statistic -> value.  ``passed`` is set only for exact invariants.
    """

    property: str
    params: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    passed: bool | None = None
    sample: dict = field(default_factory=dict)

    def record(self, point, **values) -> None:
        self.stats.setdefault(str(point), {}).update(values)

    def rows(self, instance: str = "") -> list[dict]:
        out = []
        passed = "" if self.passed is None else ("PASS" if self.passed else "FAIL")
        for point, values in self.stats.items():
            for name, v in values.items():
                out.append({"schema": CSV_SCHEMA, "property": self.property, "instance": instance,
                            "parameter": point, "statistic": name, "value": v, "passed": passed})
        if not out:
            out.append({"schema": CSV_SCHEMA, "property": self.property, "instance": instance,
                        "parameter": "", "statistic": "", "value": "", "passed": passed})
        return out


def write_csv(reports, fh, instance: str = "") -> None:
    """Write reports (or ``(instance, report)`` tuples) as schema-1 CSV rows."""
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for item in reports:
        inst, rep = item if isinstance(item, tuple) else (instance, item)
        for row in rep.rows(inst):
            w.writerow(row)


def reports_to_csv(reports, instance: str = "") -> str:
    buf = io.StringIO()
    write_csv(reports, buf, instance)
    return buf.getvalue()


def _describe(g: GeometricGraph) -> dict:
    return {"n": g.n, "m": g.m, "kind": g.space.kind.value, "radius": g.radius}


def _sample_pairs(n: int, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    u = rng.integers(0, n, count)
    v = rng.integers(0, n, count)
    return u, v


def _pair_distances(g: GeometricGraph, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Graph distances for pairs, one BFS per distinct source."""
    out = np.empty(len(u), dtype=np.int64)
    order = np.argsort(u, kind="stable")
    src, start = np.unique(u[order], return_index=True)
    rows = distance_matrix(g, src)
    bounds = list(start) + [len(u)]
    for i in range(len(src)):
        idx = order[bounds[i]:bounds[i + 1]]
        out[idx] = rows[i, v[idx]]
    return out


# ---------------------------------------------------------------------------
# stretch


def check_lower_stretch(g: GeometricGraph, samples: int = 10_000, seed: int = 0,
                        exhaustive_below: int = 300) -> PropertyReport:
    """d_G(u, v) >= ceil(d_X(u, v) / r) on sampled pairs (all pairs if n is small)."""
    if g.radius is None:
        raise ValueError("graph has no connection radius")
    rep = PropertyReport("stretch_lower", {"samples": samples, "seed": seed}, sample=_describe(g))
    if g.n <= exhaustive_below:
        D = distance_matrix(g).astype(np.int64)
        u, v = np.nonzero(np.ones((g.n, g.n), dtype=bool))
        dg = D[u, v]
    else:
        u, v = _sample_pairs(g.n, samples, seed)
        dg = _pair_distances(g, u, v)
    dx = pairwise_distance(g.space, g.coords[u], g.coords[v])
    lower = np.ceil(dx / g.radius - _EPS).astype(np.int64)
    ok = dg < UNREACHABLE
    bad = ok & (dg < lower)
    rep.record("", pairs=int(ok.sum()), violations=int(bad.sum()))
    rep.passed = not bad.any()
    return rep


def measure_upper_stretch(g: GeometricGraph, samples: int = 10_000, seed: int = 0,
                          buckets=(1, 2, 4, 8, 16, 32, 64)) -> PropertyReport:
    """Excess d_G * r / d_X - 1 over sampled pairs with d_X > r, bucketed by d_X / r.

    Bucket ``b`` collects pairs with ``b <= d_X / r < next bucket``.
    """
    rep = PropertyReport("stretch_upper", {"samples": samples, "seed": seed,
                                           "buckets": list(buckets)}, sample=_describe(g))
    u, v = _sample_pairs(g.n, samples, seed)
    dx = pairwise_distance(g.space, g.coords[u], g.coords[v])
    keep = dx > g.radius
    u, v, dx = u[keep], v[keep], dx[keep]
    dg = _pair_distances(g, u, v).astype(float)
    reach = dg < UNREACHABLE
    excess = dg[reach] * g.radius / dx[reach] - 1.0
    t = dx[reach] / g.radius
    edges = list(buckets) + [math.inf]
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (t >= lo) & (t < hi)
        if sel.any():
            rep.record(f"dx/r>={lo}", pairs=int(sel.sum()), max_excess=float(excess[sel].max()),
                       p95_excess=float(np.percentile(excess[sel], 95)))
    if len(excess):
        rep.record("all", pairs=len(excess), max_excess=float(excess.max()),
                   p95_excess=float(np.percentile(excess, 95)))
    return rep


# ---------------------------------------------------------------------------
# ball covers


def d_local_estimate(n: int, r: float) -> float:
    return n ** 0.5 * r ** (-7.0 / 3.0) + 1.0


def greedy_cover(dist: np.ndarray, members: np.ndarray, radius: int) -> int:
    """Balls of fixed ``radius`` centred at members, lowest uncovered id first."""
    left = np.zeros(dist.shape[1], dtype=bool)
    left[members] = True
    count = 0
    while left.any():
        c = int(np.flatnonzero(left)[0])
        left &= dist[c] > radius
        count += 1
    return count


def cover_profile(dist: np.ndarray, members: np.ndarray, radii) -> list[int]:
    """Cover counts over increasing radii.

    A cover by balls of radius r' is also one by balls of any larger radius,
    so the running minimum is still an upper bound on the optimum and makes
    the profile nonincreasing.
    """
    out, best = [], math.inf
    for R in sorted(radii):
        best = min(best, greedy_cover(dist, members, R))
        out.append(int(best))
    return out


def growing_cover(dist: np.ndarray, members: np.ndarray) -> list[tuple[int, int]]:
    """Greedy cover where each ball grows until one more hop adds no member.

    Returns ``(center, radius)`` per ball; centres are the lowest uncovered
    member.  Rows of ``dist`` must be indexed by vertex id.
    """
    left = np.zeros(dist.shape[1], dtype=bool)
    left[members] = True
    balls = []
    while left.any():
        c = int(np.flatnonzero(left)[0])
        d = dist[c]
        R = 0
        while True:
            grows = left & (d == R + 1)
            if not grows.any():
                break
            R += 1
        left &= d > R
        balls.append((c, R))
    return balls


def _check_dists(g: GeometricGraph, naive_dists: np.ndarray) -> np.ndarray:
    D = np.asarray(naive_dists)
    if D.shape != (g.n, g.n):
        raise ValueError("naive_dists must be the full n x n distance matrix")
    return D


def measure_local_partners(g: GeometricGraph, naive_dists: np.ndarray, x_grid=(1, 2, 4, 8),
                           samples: int = 64, seed: int = 0) -> PropertyReport:
    """Cover the x-diametric partners of sampled vertices by graph balls."""
    D = _check_dists(g, naive_dists)
    diam = int(D.max())
    dl = d_local_estimate(g.n, g.radius or 1.0)
    rng = np.random.default_rng(seed)
    vs = np.sort(rng.choice(g.n, size=min(samples, g.n), replace=False))
    rep = PropertyReport("local_partners", {"x_grid": list(x_grid), "samples": len(vs),
                                            "seed": seed, "d_local": dl}, sample=_describe(g))
    for x in x_grid:
        counts, ratios = [], []
        for v in vs:
            partners = np.flatnonzero(D[v] >= diam - x)
            if len(partners) == 0:
                continue
            balls = growing_cover(D, partners)
            counts.append(len(balls))
            ratios.append(max(R for _, R in balls) / (x + dl))
        rep.record(f"x={x}", vertices=len(counts), max_cover=max(counts, default=0),
                   mean_cover=float(np.mean(counts)) if counts else 0.0,
                   max_radius_ratio=max(ratios, default=0.0))
    return rep


def measure_few_corners(g: GeometricGraph, naive_dists: np.ndarray, x_grid=(1, 2, 4, 8)) -> PropertyReport:
    """Cover the vertices owning an x-diametric partner by graph balls."""
    D = _check_dists(g, naive_dists)
    diam = int(D.max())
    ecc = D.max(axis=1)
    dc = d_local_estimate(g.n, g.radius or 1.0)
    rep = PropertyReport("few_corners", {"x_grid": list(x_grid), "d_corner": dc},
                         sample=_describe(g))
    for x in x_grid:
        owners = np.flatnonzero(ecc >= diam - x)
        balls = growing_cover(D, owners)
        rep.record(f"x={x}", owners=len(owners), owner_fraction=len(owners) / g.n,
                   cover=len(balls), max_radius_ratio=max(R for _, R in balls) / (x + dc))
    return rep


# ---------------------------------------------------------------------------
# partition properties


def block_diameters(g: GeometricGraph, P: RecursivePartition, max_work: int | None = None) -> np.ndarray:
    """Exact diameter of G[B] for every node (UNREACHABLE if G[B] is disconnected).

    ``max_work`` caps the estimated arc scans (sum of |B| * arcs(B)).
    """
    est = 0
    subs = []
    for node in P.nodes:
        ip, ix = g.induced(node.block)
        subs.append((ip, ix))
        est += node.size * len(ix)
    if max_work is not None and est > max_work:
        raise ValueError(f"block diameters need about {est} arc scans, above the cap {max_work}")
    out = np.empty(len(P.nodes), dtype=np.int64)
    for node, (ip, ix) in zip(P.nodes, subs):
        src = np.arange(node.size, dtype=np.int64)
        ecc, reached, _ = _kernels.eccentricities(ip, ix, src)
        out[node.id] = UNREACHABLE if (reached < node.size).any() else int(ecc.max())
    return out


def check_size_dependent_diameters(g: GeometricGraph, P: RecursivePartition,
                                   diams: np.ndarray | None = None,
                                   max_work: int | None = None) -> PropertyReport:
    """Diameter ratios within each level and the scaling diam * r / sqrt(|B|)."""
    if diams is None:
        diams = block_diameters(g, P, max_work)
    rep = PropertyReport("size_dependent_diameters", {}, sample=_describe(g))
    r = g.radius or 1.0
    flagged = [u.id for u in P.nodes if diams[u.id] >= UNREACHABLE]
    by_level: dict[int, list] = {}
    for u in P.nodes:
        if diams[u.id] < UNREACHABLE:
            by_level.setdefault(u.level, []).append(u)
    scale = []
    for lvl in sorted(by_level):
        nodes = by_level[lvl]
        ds = np.array([diams[u.id] for u in nodes], dtype=float)
        pos = ds[ds > 0]
        ratio = float(pos.max() / pos.min()) if len(pos) else 1.0
        sc = [diams[u.id] * r / math.sqrt(u.size) for u in nodes if u.size > 1]
        scale.extend(sc)
        rep.record(f"level={lvl}", blocks=len(nodes), max_diam=int(ds.max()), min_diam=int(ds.min()),
                   diam_ratio=ratio, scale_min=min(sc, default=0.0), scale_max=max(sc, default=0.0))
    rep.record("all", root_diameter=int(diams[P.root]), disconnected_blocks=len(flagged),
               scale_min=min(scale, default=0.0), scale_max=max(scale, default=0.0),
               scale_band=(max(scale) / min(scale)) if scale and min(scale) > 0 else 0.0)
    rep.params["disconnected"] = flagged
    return rep


def _ball_blocks(g: GeometricGraph, P: RecursivePartition, v: int, radius: int,
                 dist: np.ndarray, queue: np.ndarray) -> set[int]:
    dist.fill(UNREACHABLE)
    _kernels.bfs(g.indptr, g.indices, v, dist, queue)
    ball = np.flatnonzero(dist <= radius)
    hit = set()
    for leaf in np.unique(P.leaf_of[ball]):
        hit.update(P.ancestors(int(leaf)))
    return hit


def measure_fragmentation(g: GeometricGraph, P: RecursivePartition, radii=(1, 2, 4, 8),
                          diams: np.ndarray | None = None, samples: int = 64, seed: int = 0,
                          max_work: int | None = None) -> PropertyReport:
    """Blocks with diameter in [r'/2, 2r'] met by graph balls of radius r'."""
    if diams is None:
        diams = block_diameters(g, P, max_work)
    rng = np.random.default_rng(seed)
    vs = np.sort(rng.choice(g.n, size=min(samples, g.n), replace=False))
    rep = PropertyReport("fragmentation", {"radii": list(radii), "samples": len(vs), "seed": seed},
                         sample=_describe(g))
    dist = np.empty(g.n, dtype=np.int32)
    queue = np.empty(g.n, dtype=np.int32)
    for R in radii:
        in_range = {u.id for u in P.nodes if R / 2 <= diams[u.id] <= 2 * R}
        counts = [len(_ball_blocks(g, P, int(v), R, dist, queue) & in_range) for v in vs]
        rep.record(f"radius={R}", blocks_in_range=len(in_range), max_count=max(counts),
                   mean_count=float(np.mean(counts)))
    return rep


def check_block_concentration(g: GeometricGraph, P: RecursivePartition) -> PropertyReport:
    """|B| / s^2 and |sep(B)| / (4 (s - r) r) per block, s the cell side."""
    rep = PropertyReport("block_concentration", {}, sample=_describe(g))
    r = g.radius or 1.0
    by_level: dict[int, list] = {}
    for u in P.nodes:
        if u.cell is not None:
            by_level.setdefault(u.level, []).append(u)
    for lvl in sorted(by_level):
        dens, seps = [], []
        for u in by_level[lvl]:
            s = u.cell.size
            dens.append(u.size / (s * s))
            if u.children and s > r:
                seps.append(len(u.separator) / (4 * (s - r) * r))
        rep.record(f"level={lvl}", blocks=len(dens), density_min=min(dens), density_max=max(dens),
                   sep_ratio_min=min(seps, default=float("nan")),
                   sep_ratio_max=max(seps, default=float("nan")))
    return rep


def measure_separators(g: GeometricGraph, P: RecursivePartition, alpha: float = 0.5,
                       beta: float | None = None) -> PropertyReport:
    """max |sep(B)| / (|B|^alpha n^beta); beta defaults to log_n r."""
    if beta is None:
        beta = math.log(g.radius) / math.log(g.n) if g.radius and g.radius > 1 and g.n > 1 else 0.0
    sr = check_separators(P, alpha, beta)
    rep = PropertyReport("separators", {"alpha": alpha, "beta": beta}, sample=_describe(g))
    rep.record("", max_ratio=sr.max_ratio, worst_node=-1 if sr.worst_node is None else sr.worst_node)
    return rep
