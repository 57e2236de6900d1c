"""Plane-level minimisation of the follower value.

Every unrestricted minimiser lies on a vertical line through a candidate
point: a crossing of two disc tangent lines, of a tangent line and a disc
boundary, or of two disc boundaries.  Each family is searched without
materialising it, using the vertical-line decision oracle to discard
half-planes: the tangent-tangent family through a comparator network whose
unresolved comparisons are settled by shrinking one global slab, the
tangent-circle family through descriptor windows over the angular neighbour
orders, and the circle-circle family through plain binary search over its
points.  A certified optimum found anywhere stops everything early.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .geom import (
    TWO_PI,
    DirectedLine,
    Instance,
    Point,
    circle_circle_intersections,
    Circle,
)
from .medianoid import MedianoidResult, solve_medianoid
from .linesearch import (
    STRONG,
    AngularIndex,
    LineLocalOptimum,
    build_angular_index,
    local_optimum_on_line,
    _tel_inc,
    _weighted_median_np,
)
from .vprune import (
    CONDITIONAL_CENTROID,
    PRUNE_LEFT,
    PRUNE_RIGHT,
    STRONG_CENTROID,
    BoundingFrame,
    PruneDecision,
    build_frame,
    decide,
)

PARAMETRIC = "parametric"
INTERMEDIATE = "intermediate"
BRUTE = "brute"
MODES = (PARAMETRIC, INTERMEDIATE, BRUTE)

# A line direction whose |ny| falls below this is treated as vertical in the
# comparator network (it has no y-order) and is searched directly instead.
VERTICAL_EPS = 1e-12

# Remaining tangent-circle elements at or below this count are evaluated
# directly instead of pruned further.
LM_REMNANT = 32


class Telemetry:
    """Mutable counters shared by all stages of one solve."""

    def __init__(self) -> None:
        self.medianoid_calls = 0
        self.decide_calls = 0
        self.lines_searched = 0
        self.prune_log: List[Tuple[int, int]] = []
        self.lt_wires = 0
        self.lt_rounds = 0
        self.lt_comparators = 0
        self.lt_oracle = 0
        self.lm_mass0 = 0
        self.lm_rounds = 0
        self.lc_points = 0
        self.lc_steps = 0
        self.schedule = "odd-even-merge"
        self.wall_time_s = 0.0
        self.certified: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        frac = 1.0
        for mass, pruned in self.prune_log:
            if mass > 0:
                frac = min(frac, pruned / mass)
        return {
            "medianoid_calls": self.medianoid_calls,
            "decide_calls": self.decide_calls,
            "lines_searched": self.lines_searched,
            "prune_iterations": len(self.prune_log),
            "prune_min_fraction": frac if self.prune_log else None,
            "lt_wires": self.lt_wires,
            "lt_rounds": self.lt_rounds,
            "lt_comparators": self.lt_comparators,
            "lt_oracle": self.lt_oracle,
            "lm_mass0": self.lm_mass0,
            "lm_rounds": self.lm_rounds,
            "lc_points": self.lc_points,
            "lc_steps": self.lc_steps,
            "schedule": self.schedule,
            "wall_time_s": self.wall_time_s,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class SolveReport:
    """Final answer of one solve: the chosen leader point, its follower
    value, one angle at which the follower attains it, the solver mode, and
    a telemetry dictionary."""

    centroid: Point
    weight_loss: float
    witness_angle: float
    solver: str
    telemetry: Dict[str, object]


class CertifiedOptimum(Exception):
    """Raised internally when an evaluation certifies a global optimum."""

    def __init__(self, point: Point, weight_loss: float, origin: str) -> None:
        super().__init__(origin)
        self.point = point
        self.weight_loss = weight_loss
        self.origin = origin


def _decision_to_certificate(dec: PruneDecision) -> None:
    if dec.kind in (STRONG_CENTROID, CONDITIONAL_CENTROID):
        raise CertifiedOptimum(dec.point, dec.weight_loss, dec.evidence)


def _batcher_rounds(m: int):
    """Comparator rounds of odd-even mergesort on ``m`` wires.

    Yields ``(a, b)`` index arrays with ``a < b`` positionwise; each round's
    pairs are disjoint, and the total number of rounds is at most
    ``k*(k+1)/2`` for ``k = ceil(log2 m)``.
    """
    p = 1
    while p < m:
        k = p
        while k >= 1:
            js = np.arange(k % p, m - k, 2 * k, dtype=np.int64)
            if len(js):
                iv = np.arange(0, k, dtype=np.int64)
                a = js[:, None] + iv[None, :]
                ok = iv[None, :] < np.minimum(k, m - js[:, None] - k)
                ok &= (a // (2 * p)) == ((a + k) // (2 * p))
                a = a[ok]
                if len(a):
                    yield a, a + k
            k //= 2
        p *= 2


class _Slab:
    """Open vertical slab that shrinks as decisions accumulate."""

    def __init__(self) -> None:
        self.lo = -math.inf
        self.hi = math.inf

    def apply(self, dec: PruneDecision, x: float) -> None:
        _decision_to_certificate(dec)
        if dec.kind == PRUNE_LEFT:
            self.lo = x
        elif dec.kind == PRUNE_RIGHT:
            self.hi = x
        else:
            raise RuntimeError("unexpected decision kind %r" % (dec.kind,))

    def test_x(self) -> float:
        if math.isinf(self.lo) and math.isinf(self.hi):
            return 0.0
        if math.isinf(self.lo):
            return self.hi - 1.0
        if math.isinf(self.hi):
            return self.lo + 1.0
        return (self.lo + self.hi) / 2.0

    def boundary_xs(self) -> List[float]:
        out = []
        if math.isfinite(self.lo):
            out.append(self.lo)
        if math.isfinite(self.hi):
            out.append(self.hi)
        return out


def _best_vertical_line(
    inst: Instance,
    idx: AngularIndex,
    xs: List[float],
    telemetry,
) -> Optional[DirectedLine]:
    """Among vertical lines at the given positions, the one with the lowest
    line-restricted follower value (certified optima short-circuit)."""
    best: Optional[Tuple[float, float]] = None
    best_line: Optional[DirectedLine] = None
    for x in sorted(set(xs)):
        line = DirectedLine.vertical(x)
        opt = local_optimum_on_line(inst, idx, line, telemetry=telemetry)
        if opt.status == STRONG:
            raise CertifiedOptimum(
                opt.point, opt.weight_loss, "strong centroid on a candidate line"
            )
        key = (opt.weight_loss, x)
        if best is None or key < best:
            best = key
            best_line = line
    return best_line


def local_optimal_line_LT(
    inst: Instance,
    idx: AngularIndex,
    frame: BoundingFrame,
    telemetry=None,
) -> Optional[DirectedLine]:
    """Vertical line through the best tangent-tangent crossing.

    The tangent lines plus the two frame lines are pushed through an
    odd-even mergesort comparator network keyed by their y-order at a point
    of the current slab.  A comparison whose crossing falls inside the open
    slab is resolved by shrinking the slab at the median unresolved
    crossing.  No two remaining lines cross strictly inside the final slab,
    so the minimum over its (at most two) boundary lines dominates every
    discarded crossing.  Returns ``None`` when the family is empty.
    """
    n = idx.n
    flat = np.arange(n * n)
    offdiag = (flat // n) != (flat % n)
    lnx = idx.tan_nx[offdiag]
    lny = idx.tan_ny[offdiag]
    loff = idx.tan_off[offdiag]
    # Frame lines: y = c is nx*x + ny*y = off with normal (0, 1).
    lnx = np.append(lnx, (0.0, 0.0))
    lny = np.append(lny, (1.0, 1.0))
    loff = np.append(loff, (frame.t_top.anchor.y, frame.t_btm.anchor.y))

    vertical = np.abs(lny) <= VERTICAL_EPS
    direct_xs = (loff[vertical] / lnx[vertical]).tolist()
    lnx, lny, loff = lnx[~vertical], lny[~vertical], loff[~vertical]
    m = len(lnx)
    if telemetry is not None:
        telemetry.lt_wires = m
    if m < 2:
        return _best_vertical_line(inst, idx, direct_xs, telemetry)

    wires = np.arange(m, dtype=np.int64)
    slab = _Slab()
    for a_pos, b_pos in _batcher_rounds(m):
        _tel_inc(telemetry, "lt_rounds")
        _tel_inc(telemetry, "lt_comparators", len(a_pos))
        la = wires[a_pos]
        lb = wires[b_pos]
        with np.errstate(divide="ignore", invalid="ignore"):
            den = lnx[lb] * lny[la] - lnx[la] * lny[lb]
            x_ab = (loff[lb] * lny[la] - loff[la] * lny[lb]) / den
        parallel = np.abs(den) <= VERTICAL_EPS
        with np.errstate(invalid="ignore"):
            unresolved = ~parallel & (x_ab > slab.lo) & (x_ab < slab.hi)
        while unresolved.any():
            xs_un = x_ab[unresolved]
            k = (len(xs_un) - 1) // 2
            x_med = float(np.partition(xs_un, k)[k])
            dec = decide(
                inst, idx, frame, DirectedLine.vertical(x_med), telemetry
            )
            _tel_inc(telemetry, "lt_oracle")
            slab.apply(dec, x_med)
            unresolved &= (x_ab > slab.lo) & (x_ab < slab.hi)
        tx = slab.test_x()
        ya = (loff[la] - lnx[la] * tx) / lny[la]
        yb = (loff[lb] - lnx[lb] * tx) / lny[lb]
        swap = (ya > yb) | ((ya == yb) & (la > lb))
        if swap.any():
            wires[a_pos[swap]] = lb[swap]
            wires[b_pos[swap]] = la[swap]
    xs = slab.boundary_xs() + direct_xs
    if not xs:
        return None
    return _best_vertical_line(inst, idx, xs, telemetry)


class _LMDescriptors:
    """Index windows over tangent-circle crossing abscissas.

    Each descriptor is a contiguous window of one customer's angular
    neighbour order, on one intersection branch with one disc boundary, cut
    so that the crossing x-coordinate is strictly monotone in the index.
    """

    def __init__(self, idx: AngularIndex) -> None:
        inst = idx.inst
        n = idx.n
        r = inst.r
        self.idx = idx
        self.r = r
        dv: List[int] = []
        du: List[int] = []
        dbr: List[int] = []
        dlo: List[int] = []
        dhi: List[int] = []
        dincr: List[bool] = []
        dx3: List[float] = []
        dth0: List[float] = []
        drho: List[float] = []

        def add(v, u, br, lo, hi, incr, x3=0.0, th0=0.0, rho=1.0):
            dv.append(v)
            du.append(u)
            dbr.append(br)
            dlo.append(lo)
            dhi.append(hi)
            dincr.append(incr)
            dx3.append(x3)
            dth0.append(th0)
            drho.append(rho)

        half_pi = math.pi / 2.0
        for v in range(n):
            row = idx.angles2[v]
            if len(row) == 0:
                continue
            # Touch points of this customer's own tangent family on its own
            # disc boundary: x = site_x + r sin(alpha).
            for blo, bhi, incr in (
                (half_pi, 3.0 * half_pi, False),
                (3.0 * half_pi, 5.0 * half_pi, True),
            ):
                lo_i = int(np.searchsorted(row, blo, side="right"))
                hi_i = int(np.searchsorted(row, bhi, side="right"))
                if hi_i > lo_i:
                    add(v, v, 0, lo_i, hi_i, incr)
            for u in range(n):
                if u == v:
                    continue
                th0 = float(idx.ang[v, u])
                rho = float(idx.dist[v, u])
                # The tangent toward u touches u's disc boundary.
                add(v, u, 3, 0, 1, True, x3=idx.xs[u] + r * math.sin(th0))
                if rho > 2.0 * r:
                    half = math.asin(2.0 * r / rho)
                    intervals = (
                        (th0, th0 + half),
                        (th0 + math.pi - half, th0 + math.pi),
                    )
                    flips: Tuple[float, ...] = ()
                else:
                    intervals = ((th0, th0 + math.pi),)
                    psa = math.asin(min(1.0, rho / (2.0 * r)))
                    flips = (th0 + psa, th0 + math.pi - psa)
                splits: List[float] = list(flips)
                for px in (idx.xs[u] + r, idx.xs[u] - r):
                    a = px - idx.xs[v]
                    b = idx.ys[u] - idx.ys[v]
                    rab = math.hypot(a, b)
                    if rab <= r:
                        continue
                    dw = math.asin(r / rab)
                    w0 = math.atan2(b, a)
                    for c in (w0 + dw, w0 + math.pi - dw):
                        cc = th0 + ((c - th0) % TWO_PI)
                        if th0 < cc < th0 + math.pi:
                            splits.append(cc)
                splits.sort()
                for elo, ehi in intervals:
                    bounds = [elo]
                    bounds.extend(s for s in splits if elo < s < ehi)
                    bounds.append(ehi)
                    for bi in range(len(bounds) - 1):
                        blo, bhi = bounds[bi], bounds[bi + 1]
                        if bhi - blo <= 1e-12:
                            continue
                        lo_i = int(np.searchsorted(row, blo, side="right"))
                        hi_i = int(np.searchsorted(row, bhi, side="right"))
                        if hi_i <= lo_i:
                            continue
                        amid = (blo + bhi) / 2.0
                        h = rho * math.sin(amid - th0) - r
                        s = math.sqrt(max(r * r - h * h, 1e-300))
                        hp = rho * math.cos(amid - th0)
                        delta = math.asin(max(-1.0, min(1.0, h / r)))
                        for br in (1, 2):
                            if br == 1:
                                gamma = amid + math.pi - delta
                                dgamma = 1.0 - hp / s
                            else:
                                gamma = amid + delta
                                dgamma = 1.0 + hp / s
                            dx = -r * math.sin(gamma) * dgamma
                            add(v, u, br, lo_i, hi_i, dx > 0.0,
                                th0=th0, rho=rho)
        self.dv = np.array(dv, dtype=np.int64)
        self.du = np.array(du, dtype=np.int64)
        self.dbr = np.array(dbr, dtype=np.int64)
        self.dlo = np.array(dlo, dtype=np.int64)
        self.dhi = np.array(dhi, dtype=np.int64)
        self.dincr = np.array(dincr, dtype=bool)
        self.dx3 = np.array(dx3, dtype=float)
        self.dth0 = np.array(dth0, dtype=float)
        self.drho = np.array(drho, dtype=float)

    def total_mass(self) -> int:
        if len(self.dlo) == 0:
            return 0
        return int(np.sum(self.dhi - self.dlo))

    def _x_at(self, pos: np.ndarray) -> np.ndarray:
        idx = self.idx
        r = self.r
        ip = np.clip(self.dlo + pos, 0, max(idx.order2.shape[1] - 1, 0))
        if idx.order2.shape[1] == 0:
            return self.dx3.copy()
        alpha = idx.angles2[self.dv, ip]
        with np.errstate(invalid="ignore"):
            h = self.drho * np.sin(alpha - self.dth0) - r
            delta = np.arcsin(np.clip(h / r, -1.0, 1.0))
            gamma = np.where(
                self.dbr == 1, alpha + math.pi - delta, alpha + delta
            )
            x = idx.xs[self.du] + r * np.cos(gamma)
            x = np.where(self.dbr == 0, idx.xs[self.dv] + r * np.sin(alpha), x)
        return np.where(self.dbr == 3, self.dx3, x)

    def middles(self) -> Tuple[np.ndarray, np.ndarray]:
        lens = self.dhi - self.dlo
        act = lens > 0
        pos = np.maximum(lens - 1, 0) // 2
        x = self._x_at(pos)
        return x[act], lens[act]

    def _count_leading(self, X: float, keep_gt: bool) -> np.ndarray:
        """Per descriptor: length of the maximal leading run that will be
        dropped (keep_gt) or kept (not keep_gt) under the cut at X."""
        lens = self.dhi - self.dlo
        lo = np.zeros_like(lens)
        hi = lens.copy()
        while True:
            searching = lo < hi
            if not searching.any():
                break
            mid = (lo + hi) >> 1
            x = self._x_at(mid)
            if keep_gt:
                cond = np.where(self.dincr, x <= X, x > X)
            else:
                cond = np.where(self.dincr, x < X, x >= X)
            lo = np.where(searching & cond, mid + 1, lo)
            hi = np.where(searching & ~cond, mid, hi)
        return lo

    def cut_keep_gt(self, X: float) -> None:
        c = self._count_leading(X, keep_gt=True)
        self.dlo = np.where(self.dincr, self.dlo + c, self.dlo)
        self.dhi = np.where(self.dincr, self.dhi, np.minimum(self.dhi, self.dlo + c))

    def cut_keep_lt(self, X: float) -> None:
        c = self._count_leading(X, keep_gt=False)
        self.dhi = np.where(self.dincr, np.minimum(self.dhi, self.dlo + c), self.dhi)
        self.dlo = np.where(self.dincr, self.dlo, self.dlo + c)

    def _x_scalar(self, d: int, k: int) -> float:
        idx = self.idx
        r = self.r
        br = int(self.dbr[d])
        if br == 3:
            return float(self.dx3[d])
        alpha = float(idx.angles2[self.dv[d], self.dlo[d] + k])
        if br == 0:
            return float(idx.xs[self.dv[d]] + r * math.sin(alpha))
        h = self.drho[d] * math.sin(alpha - self.dth0[d]) - r
        delta = math.asin(max(-1.0, min(1.0, h / r)))
        gamma = alpha + math.pi - delta if br == 1 else alpha + delta
        return float(idx.xs[self.du[d]] + r * math.cos(gamma))

    def remaining_xs(self) -> List[float]:
        out: List[float] = []
        lens = self.dhi - self.dlo
        for d in np.nonzero(lens > 0)[0]:
            for k in range(int(lens[d])):
                out.append(self._x_scalar(int(d), k))
        return out


def local_optimal_line_LM(
    inst: Instance,
    idx: AngularIndex,
    frame: BoundingFrame,
    telemetry=None,
) -> Optional[DirectedLine]:
    """Vertical line through the best tangent-circle crossing.

    Rounds of weighted-median pruning over the descriptor windows discard a
    constant fraction of the crossings per decision; the few survivors and
    the last cut line on each side are then searched directly.
    """
    descs = _LMDescriptors(idx)
    mass0 = descs.total_mass()
    if telemetry is not None:
        telemetry.lm_mass0 = mass0
    if mass0 == 0:
        return None
    slab = _Slab()
    budget = 2.0 * (math.log(max(mass0, 2)) / math.log(8.0 / 7.0) + 8)
    rounds = 0
    while descs.total_mass() > LM_REMNANT:
        mass = descs.total_mass()
        vals, lens = descs.middles()
        x_med = _weighted_median_np(vals, lens.astype(float))
        dec = decide(inst, idx, frame, DirectedLine.vertical(x_med), telemetry)
        rounds += 1
        _tel_inc(telemetry, "lm_rounds")
        slab.apply(dec, x_med)
        if dec.kind == PRUNE_LEFT:
            descs.cut_keep_gt(x_med)
        else:
            descs.cut_keep_lt(x_med)
        pruned = mass - descs.total_mass()
        if pruned * 8 < mass:
            raise RuntimeError(
                "tangent-circle pruning fell below the guaranteed fraction"
            )
        if rounds > budget:
            raise RuntimeError("tangent-circle pruning exceeded its round budget")
    xs = descs.remaining_xs() + slab.boundary_xs()
    if not xs:
        return None
    return _best_vertical_line(inst, idx, xs, telemetry)


def local_optimal_line_LC(
    inst: Instance,
    idx: AngularIndex,
    frame: BoundingFrame,
    telemetry=None,
) -> Optional[DirectedLine]:
    """Vertical line through the best disc-boundary crossing, by binary
    search over the sorted crossing abscissas."""
    r = inst.r
    pts: List[float] = []
    for i in range(idx.n):
        ci = Circle(inst.customers[i].site, r)
        for j in range(i + 1, idx.n):
            cj = Circle(inst.customers[j].site, r)
            for p in circle_circle_intersections(ci, cj, eps=inst.eps):
                pts.append(p.x)
    if telemetry is not None:
        telemetry.lc_points = len(pts)
    if not pts:
        return None
    xs = np.sort(np.array(pts))
    lo, hi = 0, len(xs)
    slab = _Slab()
    while hi > lo:
        mid = (lo + hi) // 2
        X = float(xs[mid])
        dec = decide(inst, idx, frame, DirectedLine.vertical(X), telemetry)
        _tel_inc(telemetry, "lc_steps")
        slab.apply(dec, X)
        if dec.kind == PRUNE_LEFT:
            lo = int(np.searchsorted(xs, X, side="right"))
        else:
            hi = int(np.searchsorted(xs, X, side="left"))
    bounds = slab.boundary_xs()
    if not bounds:
        return None
    return _best_vertical_line(inst, idx, bounds, telemetry)


def solve_centroid(inst: Instance, mode: str = PARAMETRIC) -> SolveReport:
    """Minimise the follower value over the whole plane.

    ``mode`` selects the solver: ``"parametric"`` prunes the three candidate
    families with the vertical-line decision oracle, ``"intermediate"`` runs
    the line search on every tangent line, and ``"brute"`` evaluates every
    candidate point.  All return the same follower value; ties between
    optimal points are broken lexicographically by (x, y).
    """
    if mode not in MODES:
        raise ValueError("unknown solver mode %r" % (mode,))
    if mode == BRUTE:
        from .oracle import brute_centroid

        return brute_centroid(inst)

    t0 = time.perf_counter()
    tel = Telemetry()
    idx = build_angular_index(inst)
    frame = build_frame(inst)

    best: Optional[Tuple[float, float, float]] = None
    best_point: Optional[Point] = None

    def consider(point: Point, weight_loss: float) -> None:
        nonlocal best, best_point
        key = (weight_loss, point.x, point.y)
        if best is None or key < best:
            best = key
            best_point = point

    def run_line(line: DirectedLine) -> None:
        opt = local_optimum_on_line(inst, idx, line, telemetry=tel)
        if opt.status == STRONG:
            raise CertifiedOptimum(
                opt.point, opt.weight_loss, "strong centroid on a searched line"
            )
        consider(opt.point, opt.weight_loss)

    try:
        if mode == INTERMEDIATE:
            for i in range(idx.n):
                for j in range(idx.n):
                    if i == j:
                        continue
                    if abs(math.sin(idx.ang[i, j])) <= VERTICAL_EPS:
                        continue
                    run_line(idx.tangent_line(i, j))
            r = inst.r
            for i in range(idx.n):
                ci = Circle(inst.customers[i].site, r)
                for j in range(i + 1, idx.n):
                    cj = Circle(inst.customers[j].site, r)
                    for p in circle_circle_intersections(ci, cj, eps=inst.eps):
                        res = solve_medianoid(inst, p)
                        tel.medianoid_calls += 1
                        consider(p, res.weight_loss)
        else:
            for family in (
                local_optimal_line_LT,
                local_optimal_line_LM,
                local_optimal_line_LC,
            ):
                line = family(inst, idx, frame, tel)
                if line is not None:
                    run_line(line)
        for c in inst.customers:
            res = solve_medianoid(inst, c.site)
            tel.medianoid_calls += 1
            consider(c.site, res.weight_loss)
    except CertifiedOptimum as cert:
        tel.certified = cert.origin
        best_point = cert.point

    if best_point is None:
        raise RuntimeError("no candidate point was evaluated")
    final = solve_medianoid(inst, best_point)
    tel.medianoid_calls += 1
    tel.wall_time_s = time.perf_counter() - t0
    return SolveReport(
        centroid=best_point,
        weight_loss=final.weight_loss,
        witness_angle=final.witness_angle,
        solver=mode,
        telemetry=tel.to_dict(),
    )
