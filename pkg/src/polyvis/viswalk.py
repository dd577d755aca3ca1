"""Output-sensitive visibility computation via ray shooting.

vis_rayshoot builds the same representation as vis_oracle but walks the
boundary of the visible region instead of scanning every element: each
step shoots one ray at the next polygon vertex along the current edge.
A blocked step means the current edge ends at a window; the occluding
chain (itself part of the answer) is then walked in the opposite
direction until a shot lands back on the current edge, which pins the
window foot.  The number of ray_shoot calls is proportional to the
output size.

Degenerate grazing contacts (vertices and whole edges lying exactly on
a sight line) are recovered from the vertices each ray passes through,
so the output matches the oracle's closure conventions exactly.
"""

import sys

from .geom import (
    InvalidPolygon, Point, PointOutside, Q, on_segment, orient, seg_param, sub,
)
from .tripaths import _ray_walk
from .visibility import rep_from_records


def vis_rayshoot(tri, q):
    """Visibility representation of q computed with O(k) ray shoots."""
    if tri.locate(q) is None:
        raise PointOutside(q)
    limit = 8 * tri.poly.n + 200
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    walk = _VisWalk(tri, q)
    walk.run()
    return rep_from_records(tri.poly, q, walk.records())


class _VisWalk:
    """One boundary walk; accumulates visible vertices and edge spans."""

    def __init__(self, tri, q):
        self.tri = tri
        self.poly = tri.poly
        self.q = q
        self.verts = set()
        self.spans = {}         # edge index -> list of (t_lo, t_hi)

    # --- emission -----------------------------------------------------

    def _emit_vertex(self, i):
        self.verts.add(i % self.poly.n)

    def _emit_span(self, j, p1, p2):
        a, b = self.poly.edge(j)
        t1 = seg_param(a, b, p1)
        t2 = seg_param(a, b, p2)
        if t2 < t1:
            t1, t2 = t2, t1
        self.spans.setdefault(j % self.poly.n, []).append((t1, t2))

    def _shoot(self, d):
        """Counted ray shot from q; grazing contacts along the chord are
        emitted on the spot (vertices, and boundary edges collinear with
        the sight line)."""
        hit, eid, passed = _ray_walk(self.tri, self.q, d)
        poly = self.poly
        contacts = list(passed)
        if poly.is_vertex_id(eid) and hit != self.q:
            contacts.append(poly.vertex_index_of_id(eid))
        for k in contacts:
            self._emit_vertex(k)
            for j in ((k - 1) % poly.n, k):
                a, b = poly.edge(j)
                other = a if j != k else b
                if on_segment(other, self.q, hit):
                    self._emit_span(j, a, b)
        return hit, eid

    # --- positions ----------------------------------------------------
    # a position is (edge index j, point p on that edge); p may be the
    # edge's source vertex V[j] but never its target

    def _land_ccw(self, hit, eid):
        poly = self.poly
        if poly.is_vertex_id(eid):
            k = poly.vertex_index_of_id(eid)
            self._emit_vertex(k)
            return (k, hit)
        return (eid // 2 - 1, hit)

    def _land_cw(self, hit, eid):
        poly = self.poly
        if poly.is_vertex_id(eid):
            k = poly.vertex_index_of_id(eid)
            self._emit_vertex(k)
            return ((k - 1) % poly.n, hit)
        return (eid // 2 - 1, hit)

    def _inward_radial(self, near, far):
        """Is the step from far to near along a ray from q, moving toward
        q?  (Both points on the current edge; near is the step target.)"""
        return (orient(self.q, near, far) == 0
                and seg_param(self.q, near, far) > 1)

    def _coord(self, pos):
        j, p = pos
        a, b = self.poly.edge(j)
        return j + (seg_param(a, b, p) if p != a else Q(0))

    # --- the walk -------------------------------------------------------

    def run(self):
        poly, q = self.poly, self.q
        eid = poly.element_at(q)
        if eid is not None:
            if poly.is_vertex_id(eid):
                k = poly.vertex_index_of_id(eid)
                self._emit_vertex(k)
                pos = (k, q)
            else:
                pos = (eid // 2 - 1, q)
        else:
            hit, hel = self._shoot(sub(poly.vertices[0], q))
            pos = self._land_ccw(hit, hel)
        self._walk_ccw(pos, None)

    def _walk_ccw(self, pos, target):
        """Walk the visible boundary counterclockwise.

        target None: top-level full loop around the polygon.
        target = edge index: nested walk resolving a window; returns the
        window foot as soon as a shot exits on that edge."""
        poly, q = self.poly, self.q
        n = poly.n
        tgt = None if target is None else poly.edge(target)
        if target is None:
            c0 = self._coord(pos)
            travel = Q(0)
        guard = 4 * n + 16
        while guard > 0:
            guard -= 1
            j, p = pos
            w_idx = (j + 1) % n
            w = poly.vertices[w_idx]
            if w == q:
                self._emit_span(j, p, w)
                if target is None:
                    return None
                # the window hinges at q itself: the chord runs along
                # the current edge's line, through p and beyond
                hit, eid = self._shoot(sub(p, q))
                if on_segment(hit, tgt[0], tgt[1]):
                    return hit
                newpos = self._land_ccw(hit, eid)
            else:
                hit, eid = self._shoot(sub(w, q))
                t = seg_param(q, w, hit)
                if t >= 1:
                    self._emit_span(j, p, w)
                    self._emit_vertex(w_idx)
                    if tgt is not None and on_segment(hit, *tgt):
                        return hit
                    if t == 1 or self._inward_radial(w, p):
                        # an inward step along an edge collinear with q:
                        # the shot exits on the far, already-walked side
                        newpos = (w_idx, w)
                    else:
                        newpos = self._land_ccw(hit, eid)
                else:
                    foot = self._walk_cw(self._land_cw(hit, eid), j)
                    self._emit_span(j, p, foot)
                    newpos = self._land_ccw(hit, eid)
            if target is None:
                step = (self._coord(newpos) - self._coord(pos)) % n
                travel += step if step != 0 else n
                if travel >= n:
                    return None
            pos = newpos
        raise InvalidPolygon("visibility walk did not terminate")

    def _walk_cw(self, pos, target):
        """Mirror walk clockwise along an occluding chain; returns the
        window foot on the target edge."""
        poly, q = self.poly, self.q
        n = poly.n
        tgt = poly.edge(target)
        guard = 4 * n + 16
        while guard > 0:
            guard -= 1
            j, p = pos
            u = poly.vertices[j]
            if u == q:
                self._emit_span(j, u, p)
                hit, eid = self._shoot(sub(p, q))
                if on_segment(hit, tgt[0], tgt[1]):
                    return hit
                pos = self._land_cw(hit, eid)
                continue
            hit, eid = self._shoot(sub(u, q))
            t = seg_param(q, u, hit)
            if t >= 1:
                self._emit_span(j, u, p)
                self._emit_vertex(j)
                if on_segment(hit, *tgt):
                    return hit
                if t == 1 or self._inward_radial(u, p):
                    pos = ((j - 1) % n, u)
                else:
                    pos = self._land_cw(hit, eid)
            else:
                foot = self._walk_ccw(self._land_ccw(hit, eid), j)
                self._emit_span(j, foot, p)
                pos = self._land_cw(hit, eid)
        raise InvalidPolygon("visibility walk (cw) did not terminate")

    # --- records ------------------------------------------------------

    def records(self):
        poly = self.poly
        out = []
        for i in sorted(self.verts):
            out.append((poly.vertex_id(i),))
        for j in sorted(self.spans):
            pieces = sorted(self.spans[j])
            merged = []
            for lo, hi in pieces:
                if merged and lo <= merged[-1][1]:
                    merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
                else:
                    merged.append((lo, hi))
            merged = [iv for iv in merged if iv[0] < iv[1]]
            if not merged:
                continue
            if len(merged) > 1:
                raise InvalidPolygon(
                    "edge %d visible in %d pieces" % (j, len(merged)))
            lo, hi = merged[0]
            a, b = poly.edge(j)
            lo_pt = None if lo == 0 else Point(a.x + lo * (b.x - a.x),
                                               a.y + lo * (b.y - a.y))
            hi_pt = None if hi == 1 else Point(a.x + hi * (b.x - a.x),
                                               a.y + hi * (b.y - a.y))
            out.append((poly.edge_id(j), lo_pt, hi_pt))
        return out
