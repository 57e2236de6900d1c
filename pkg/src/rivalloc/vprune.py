"""Classifying a vertical query line: which side of it can be discarded.

The plane search over candidate lines needs one primitive: given a vertical
line, either certify an optimum on it or name the half-plane that cannot
contain a better point.  The classification rests on two anchor points, the
lowest breakpoint with a downward wedge and the highest with an upward
wedge.  Everything strictly between them is sideward or optimal; when no
breakpoint lies between, the segment midpoint or a pseudo-wedge built at the
better anchor settles the direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geom import (
    TWO_PI,
    DirectedLine,
    Instance,
    Point,
    normalize_angle,
    unit_vector,
)
from .medianoid import (
    DOWNWARD,
    SIDEWARD_LEFT,
    SIDEWARD_RIGHT,
    UPWARD,
    MedianoidResult,
    Wedge,
    classify_wedge_on_line,
    solve_medianoid,
)
from .linesearch import (
    AngularIndex,
    _LineFrame,
    _SequenceBundle,
    _explicit_sequence,
    _prune_search,
    _tangent_sequences,
    _tel_inc,
)

PRUNE_LEFT = "prune-left"
PRUNE_RIGHT = "prune-right"
STRONG_CENTROID = "strong-centroid"
CONDITIONAL_CENTROID = "conditional-centroid"

PW_NULL = "null"

# Absolute cosine slack when deciding whether a direction cone stays weakly
# on one side of the vertical axis.
COS_EPS = 1e-12


@dataclass(frozen=True)
class BoundingFrame:
    """Axis-aligned box covering all customer discs, plus two horizontal
    auxiliary lines safely above and below it whose crossings guarantee that
    every vertical line through the box owns both anchor types."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    t_top: DirectedLine
    t_btm: DirectedLine


def build_frame(inst: Instance) -> BoundingFrame:
    r = inst.r
    xs = [c.site.x for c in inst.customers]
    ys = [c.site.y for c in inst.customers]
    xmin = min(xs) - r
    xmax = max(xs) + r
    ymin = min(ys) - r
    ymax = max(ys) + r
    off = max(inst.R, 1.0)
    return BoundingFrame(
        xmin=xmin,
        xmax=xmax,
        ymin=ymin,
        ymax=ymax,
        t_top=DirectedLine.horizontal(ymax + off),
        t_btm=DirectedLine.horizontal(ymin - off),
    )


@dataclass(frozen=True)
class PseudoWedge:
    """Wedge at the better anchor trimmed by a maximum-capture half-plane.

    ``classification`` says where the trimmed direction cone points:
    ``"sideward-right"`` or ``"sideward-left"`` when it stays weakly on one
    side of the vertical line, ``"null"`` when the cone is empty.
    """

    apex: Point
    wedge: Wedge
    theta_star: float
    trimming_line: DirectedLine
    classification: str
    max_capture: float


@dataclass(frozen=True)
class PruneDecision:
    """Outcome of classifying one vertical line.

    ``kind`` is one of ``"prune-left"``, ``"prune-right"`` (naming the
    discarded side), ``"strong-centroid"`` or ``"conditional-centroid"``
    (carrying a certified optimal ``point``).  ``evidence`` names the rule
    that produced the decision; the anchor fields record the points it was
    based on when they exist.
    """

    kind: str
    point: Optional[Point] = None
    weight_loss: Optional[float] = None
    evidence: str = ""
    x_D: Optional[Point] = None
    x_U: Optional[Point] = None
    x_B: Optional[Point] = None
    pseudo: Optional[PseudoWedge] = None


Anchor = Tuple[float, Point, MedianoidResult]


def find_xD_xU(inst, idx: AngularIndex, frame: BoundingFrame, L: DirectedLine,
               telemetry=None):
    """Locate the lowest downward and highest upward breakpoints on ``L``.

    Returns ``("anchors", down, up)`` with each anchor ``(t, point,
    evaluation)``, or ``("decision", PruneDecision)`` when an evaluation en
    route already settles the line (sideward wedge or strong centroid).
    """
    fr = _LineFrame(idx, L)
    seqs = _tangent_sequences(fr)
    expl = _explicit_sequence(fr, (frame.t_top, frame.t_btm))
    if expl is not None:
        seqs.append(expl)
    bundle = _SequenceBundle(fr, seqs)

    state = {"down": None, "up": None, "decision": None}

    def react(t, point, res):
        if res.strong_centroid:
            state["decision"] = PruneDecision(
                STRONG_CENTROID,
                point=point,
                weight_loss=res.weight_loss,
                evidence="strong centroid at a breakpoint of the query line",
            )
            return ("stop", "strong")
        cls = classify_wedge_on_line(res.wedge, fr.up_angle)
        if cls == UPWARD:
            if state["up"] is None or t > state["up"][0]:
                state["up"] = (t, point, res)
            return ("above",)
        if cls == DOWNWARD:
            if state["down"] is None or t < state["down"][0]:
                state["down"] = (t, point, res)
            return ("below",)
        if cls in (SIDEWARD_RIGHT, SIDEWARD_LEFT):
            state["decision"] = PruneDecision(
                PRUNE_LEFT if cls == SIDEWARD_RIGHT else PRUNE_RIGHT,
                point=point,
                weight_loss=res.weight_loss,
                evidence="sideward wedge at a breakpoint of the query line",
            )
            return ("stop", "sideward")
        raise RuntimeError("wedge degenerately contains the query line")

    outcome, _tag = _prune_search(inst, bundle, react, telemetry)
    if outcome == "stopped":
        return ("decision", state["decision"])
    down, up = state["down"], state["up"]
    if down is None or up is None:
        raise RuntimeError(
            "auxiliary frame crossings failed to supply both anchors"
        )
    if not down[0] > up[0]:
        raise RuntimeError(
            "downward anchor does not lie strictly above the upward anchor"
        )
    return ("anchors", down, up)


def _cone_intersection(a0: float, sa: float, b0: float, sb: float):
    """Intersect two closed CCW angle intervals of span <= pi each.

    Returns ``(lo, span)`` in absolute angles or ``None`` when disjoint.
    """
    d0 = (b0 - a0) % TWO_PI
    for shift in (d0, d0 - TWO_PI):
        lo = max(0.0, shift)
        hi = min(sa, shift + sb)
        if lo <= hi:
            return (a0 + lo, hi - lo)
    return None


def _cos_extremes(lo: float, span: float) -> Tuple[float, float]:
    """Minimum and maximum of cos over the closed interval [lo, lo+span]."""
    hi = lo + span
    cmin = min(math.cos(lo), math.cos(hi))
    cmax = max(math.cos(lo), math.cos(hi))
    k_lo = math.ceil(lo / TWO_PI)
    if k_lo * TWO_PI <= hi:
        cmax = 1.0
    k_pi = math.ceil((lo - math.pi) / TWO_PI)
    if math.pi + k_pi * TWO_PI <= hi:
        cmin = -1.0
    return cmin, cmax


def pseudo_wedge(
    inst: Instance,
    apex: Point,
    W1: float,
    result: Optional[MedianoidResult] = None,
) -> PseudoWedge:
    """Build the trimmed wedge at ``apex`` that certifies one-side pruning.

    ``W1`` is the follower value at the worse anchor of the same vertical
    line.  A direction of maximum closed capture (weight of customers whose
    disc lies weakly beyond distance ``r`` along the direction) is chosen on
    the anchor's far half of directions; it must capture at least ``W1``.
    The wedge's direction cone intersected with the half-turn around that
    direction then either sits weakly on one side of the vertical line or is
    empty.
    """
    if result is None:
        result = solve_medianoid(inst, apex)
    wedge = result.wedge
    if wedge is None:
        raise ValueError("pseudo-wedge requires a point with a proper wedge")
    cls = classify_wedge_on_line(wedge, math.pi / 2.0)
    if cls == UPWARD:
        t_lo, t_hi = math.pi, TWO_PI
    elif cls == DOWNWARD:
        t_lo, t_hi = 0.0, math.pi
    else:
        raise ValueError("pseudo-wedge anchor must be upward or downward")

    r = inst.r
    tol = 1e-9 * max(1.0, r)
    cands: List[float] = [t_lo, t_hi]
    for c in inst.customers:
        dx = c.site.x - apex.x
        dy = c.site.y - apex.y
        d = math.hypot(dx, dy)
        # Anchors commonly sit exactly on a customer circle; keep the arc's
        # collapsed endpoint as a candidate when d == r up to rounding.
        if d < r - tol:
            continue
        theta_v = math.atan2(dy, dx)
        phi = math.acos(min(1.0, r / d))
        for ep in (theta_v - phi, theta_v + phi):
            nrm = normalize_angle(ep)
            if t_lo <= nrm <= t_hi:
                cands.append(nrm)
            elif t_lo <= nrm + TWO_PI <= t_hi:
                cands.append(nrm + TWO_PI)
    cands.sort()
    thetas = np.array(cands)
    vx = np.array([c.site.x - apex.x for c in inst.customers])
    vy = np.array([c.site.y - apex.y for c in inst.customers])
    wts = np.array([c.weight for c in inst.customers])
    dots = np.outer(np.cos(thetas), vx) + np.outer(np.sin(thetas), vy)
    captures = np.sum(np.where(dots >= r - tol, wts, 0.0), axis=1)
    k = int(np.argmax(captures))
    theta_star = float(thetas[k])
    max_capture = float(captures[k])
    if max_capture < W1 - 1e-9 * max(1.0, inst.total_weight()):
        raise RuntimeError(
            "no direction at the anchor captures the worse anchor's value"
        )

    cone_lo, cone_span = wedge.boundary_directions
    cone_span = cone_span - cone_lo
    trimmed = _cone_intersection(
        cone_lo, cone_span, theta_star - math.pi / 2.0, math.pi
    )
    trimming = DirectedLine(apex, normalize_angle(theta_star + math.pi / 2.0))
    if trimmed is None:
        classification = PW_NULL
    else:
        cmin, cmax = _cos_extremes(*trimmed)
        if cmin >= -COS_EPS:
            classification = SIDEWARD_RIGHT
        elif cmax <= COS_EPS:
            classification = SIDEWARD_LEFT
        else:
            raise RuntimeError(
                "trimmed pseudo-wedge cone straddles the vertical line"
            )
    return PseudoWedge(
        apex=apex,
        wedge=wedge,
        theta_star=theta_star,
        trimming_line=trimming,
        classification=classification,
        max_capture=max_capture,
    )


def decide(inst, idx: AngularIndex, frame: BoundingFrame, L: DirectedLine,
           telemetry=None) -> PruneDecision:
    """Classify the vertical line ``L``: certify an optimum on it or name
    the side of the plane that cannot contain a better point."""
    _tel_inc(telemetry, "decide_calls")
    ux, uy = L.direction
    if abs(ux) > 1e-9:
        raise ValueError("decide requires a vertical query line")
    X = L.anchor.x
    if X < frame.xmin:
        return PruneDecision(
            PRUNE_LEFT,
            evidence="line lies left of the bounding box of all discs",
        )
    if X > frame.xmax:
        return PruneDecision(
            PRUNE_RIGHT,
            evidence="line lies right of the bounding box of all discs",
        )

    got = find_xD_xU(inst, idx, frame, L, telemetry)
    if got[0] == "decision":
        return got[1]
    _kind, (t_D, p_D, r_D), (t_U, p_U, r_U) = got

    # A breakpoint strictly between the anchors, when one exists, must carry
    # a sideward wedge or a strong centroid: it can be neither upward (it
    # lies above the highest upward breakpoint) nor downward.
    fr = _LineFrame(idx, L)
    seqs = _tangent_sequences(fr)
    expl = _explicit_sequence(fr, (frame.t_top, frame.t_btm))
    if expl is not None:
        seqs.append(expl)
    bundle = _SequenceBundle(fr, seqs)
    bundle.cut_keep_below(t_D)
    bundle.cut_keep_above(t_U)
    mid_t = (t_U + t_D) / 2.0
    if bundle.total_mass() > 0:
        hit = bundle.closest_to(mid_t)
        t_z, bp = hit
        pz = bp.location
        res_z = solve_medianoid(inst, pz)
        _tel_inc(telemetry, "medianoid_calls")
        if res_z.strong_centroid:
            return PruneDecision(
                STRONG_CENTROID,
                point=pz,
                weight_loss=res_z.weight_loss,
                evidence="strong centroid between the vertical anchors",
                x_D=p_D,
                x_U=p_U,
            )
        cls = classify_wedge_on_line(res_z.wedge, fr.up_angle)
        if cls in (SIDEWARD_RIGHT, SIDEWARD_LEFT):
            return PruneDecision(
                PRUNE_LEFT if cls == SIDEWARD_RIGHT else PRUNE_RIGHT,
                point=pz,
                weight_loss=res_z.weight_loss,
                evidence="sideward wedge at a breakpoint between the anchors",
                x_D=p_D,
                x_U=p_U,
            )
        raise RuntimeError(
            "breakpoint strictly between the anchors is neither sideward "
            "nor a strong centroid"
        )

    # No breakpoint between the anchors: probe the segment midpoint.
    x_B = fr.point_at(mid_t)
    res_B = solve_medianoid(inst, x_B)
    _tel_inc(telemetry, "medianoid_calls")
    if res_B.strong_centroid:
        return PruneDecision(
            STRONG_CENTROID,
            point=x_B,
            weight_loss=res_B.weight_loss,
            evidence="strong centroid at the anchor-segment midpoint",
            x_D=p_D,
            x_U=p_U,
            x_B=x_B,
        )
    cls_B = classify_wedge_on_line(res_B.wedge, fr.up_angle)
    if cls_B in (SIDEWARD_RIGHT, SIDEWARD_LEFT):
        return PruneDecision(
            PRUNE_LEFT if cls_B == SIDEWARD_RIGHT else PRUNE_RIGHT,
            point=x_B,
            weight_loss=res_B.weight_loss,
            evidence="sideward wedge at the anchor-segment midpoint",
            x_D=p_D,
            x_U=p_U,
            x_B=x_B,
        )

    # Non-leaning line: both anchors and the midpoint look along the line.
    W_D = r_D.weight_loss
    W_U = r_U.weight_loss
    if abs(W_D - W_U) <= 1e-9 * max(1.0, inst.total_weight()):
        raise RuntimeError(
            "anchor values coincide on a non-leaning line; cannot classify"
        )
    if W_D < W_U:
        apex_t, apex_p, apex_r = t_D, p_D, r_D
        W1 = W_U
    else:
        apex_t, apex_p, apex_r = t_U, p_U, r_U
        W1 = W_D
    pw = pseudo_wedge(inst, apex_p, W1, result=apex_r)
    if pw.classification == PW_NULL:
        return PruneDecision(
            CONDITIONAL_CENTROID,
            point=apex_p,
            weight_loss=apex_r.weight_loss,
            evidence="empty pseudo-wedge cone at the better anchor",
            x_D=p_D,
            x_U=p_U,
            x_B=x_B,
            pseudo=pw,
        )
    return PruneDecision(
        PRUNE_LEFT if pw.classification == SIDEWARD_RIGHT else PRUNE_RIGHT,
        point=apex_p,
        weight_loss=apex_r.weight_loss,
        evidence="pseudo-wedge cone at the better anchor points to one side",
        x_D=p_D,
        x_U=p_U,
        x_B=x_B,
        pseudo=pw,
    )
