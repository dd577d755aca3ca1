"""Ground-truth visibility: the exact oracle and reconstruction.

The oracle computes, for each boundary element independently, its
visible part using exact shadow intervals:

- an edge's visible sub-segment is the edge minus the union of open
  shadows cast by every other edge (plus pinch-vertex and own-cone
  shadows for queries on the boundary);
- a vertex is visible iff the closed segment from the query properly
  crosses no open edge and exits the polygon at no pinch vertex.

Conventions (shared by every structure in the package):

- grazing contact counts as visible;
- an edge's recorded portion is the closure of its visible set, so a
  portion endpoint may be a point that is only a limit of visible
  points (the window foot);
- zero-length edge portions are dropped;
- every element occurs at most once (simple polygons only).

A VisRep is a FunctionalSeq keyed by (element-id, 0) for polygon
elements and (vertex-id, 1) for subpolygon boundary diagonals, cut at
the smallest key.
"""

from .geom import (
    BOUNDARY, COLLINEAR, INSIDE, OUTSIDE, Point, PointOutside, Q,
    cross, on_segment, orient, seg_param, sub,
)
from .seq import FunctionalSeq


class InconsistentRep(ValueError):
    pass


# edge-entry clip markers: None means "reaches its own endpoint";
# WINDOW means "clipped by the window to the neighboring entry"
WINDOW = "win"

V_ENTRY = ("v",)


def vkey(eid):
    return (eid, 0)


def dkey(depart_vertex_eid):
    return (depart_vertex_eid, 1)


# --- direction cones at polygon vertices -----------------------------------


def dir_in_cone(prev_v, v, next_v, w):
    """Is direction w (from v) inside the closed interior cone at v?

    prev_v and next_v are the boundary neighbors of v in ccw order.
    """
    a = sub(next_v, v)   # forward boundary direction
    b = sub(prev_v, v)   # backward boundary direction
    s = a.x * b.y - a.y * b.x
    ca = a.x * w.y - a.y * w.x   # cross(a, w)
    cb = w.x * b.y - w.y * b.x   # cross(w, b)
    if s > 0:       # convex vertex
        return ca >= 0 and cb >= 0
    if s < 0:       # reflex vertex
        return ca >= 0 or cb >= 0
    # angle pi (or degenerate spike): closed halfplane left of a
    return ca >= 0


def _vertex_exit(poly, i, w):
    """Does a ray leaving vertex i in direction w exit the polygon?"""
    n = poly.n
    return not dir_in_cone(poly.vertices[(i - 1) % n], poly.vertices[i],
                           poly.vertices[(i + 1) % n], w)


# --- interval arithmetic over open intervals --------------------------------

_FULL = (None, None)


def _affine_pos(c0, c1):
    """Open solution interval of c0 + (c1 - c0) t > 0, or None if empty."""
    if c0 == c1:
        return _FULL if c0 > 0 else None
    r = c0 / (c0 - c1)
    return (r, None) if c1 > c0 else (None, r)


def _isect(a, b):
    if a is None or b is None:
        return None
    lo = a[0] if b[0] is None else (b[0] if a[0] is None else max(a[0], b[0]))
    hi = a[1] if b[1] is None else (b[1] if a[1] is None else min(a[1], b[1]))
    if lo is not None and hi is not None and lo >= hi:
        return None
    return (lo, hi)


def _clip01(iv):
    if iv is None:
        return None
    lo = Q(0) if iv[0] is None or iv[0] < 0 else iv[0]
    hi = Q(1) if iv[1] is None or iv[1] > 1 else iv[1]
    if lo >= hi:
        return None
    return (lo, hi)


def _complement01(open_intervals):
    """Closed intervals of [0,1] not covered by the open intervals."""
    ivs = sorted(i for i in (map(_clip01, open_intervals)) if i is not None)
    out = []
    cur = Q(0)
    for lo, hi in ivs:
        if lo > cur:
            out.append((cur, lo))
        elif lo == cur and (not out or out[-1][1] != cur):
            pass
        if hi > cur:
            cur = hi
    if cur < 1:
        out.append((cur, Q(1)))
    # merge abutting pieces (they arise from shadows that only touch)
    merged = []
    for lo, hi in out:
        if merged and merged[-1][1] >= lo:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return [(lo, hi) for lo, hi in merged if lo < hi]


# --- shadows ----------------------------------------------------------------


def _edge_shadow(q, c, d, a, b):
    """Open t-interval of segment a->b hidden behind open edge cd, or None."""
    sq = cross(c, d, q)
    if sq == 0:
        return None     # q on the blocker's line: no transversal crossing
    fa, fb = cross(c, d, a), cross(c, d, b)
    far = _affine_pos(-fa, -fb) if sq > 0 else _affine_pos(fa, fb)
    if far is None:
        return None
    s = cross(q, c, d)
    if s == 0:
        return None     # blocker radial from q
    ua, ub = cross(q, c, a), cross(q, c, b)
    wa, wb = cross(q, d, a), cross(q, d, b)
    if s > 0:
        iv = _isect(_affine_pos(ua, ub), _affine_pos(-wa, -wb))
    else:
        iv = _isect(_affine_pos(-ua, -ub), _affine_pos(wa, wb))
    return _isect(far, iv)


def _own_position_shadows(poly, q, a, b):
    """Shadows on segment a->b for directions that leave the polygon
    immediately at q, when q lies on the boundary."""
    out = []
    eid = poly.element_at(q)
    if eid is None:
        return out
    if poly.is_vertex_id(eid):
        i = poly.vertex_index_of_id(eid)
        pv = poly.vertices[(i - 1) % poly.n]
        nv = poly.vertices[(i + 1) % poly.n]
        av = sub(nv, q)
        bv = sub(pv, q)
        s = av.x * bv.y - av.y * bv.x
        # cross(av, S(t)-q) and cross(S(t)-q, bv) as affine functions of t
        ca0, ca1 = cross(q, Point(q.x + av.x, q.y + av.y), a), \
            cross(q, Point(q.x + av.x, q.y + av.y), b)
        cb0, cb1 = -cross(q, Point(q.x + bv.x, q.y + bv.y), a), \
            -cross(q, Point(q.x + bv.x, q.y + bv.y), b)
        if s > 0:
            # convex: blocked when cross(a,u) < 0 or cross(u,b) < 0
            out.append(_affine_pos(-ca0, -ca1))
            out.append(_affine_pos(-cb0, -cb1))
        elif s < 0:
            out.append(_isect(_affine_pos(-ca0, -ca1),
                              _affine_pos(-cb0, -cb1)))
        else:
            out.append(_affine_pos(-ca0, -ca1))
    else:
        ea, eb = poly.edge_of_id(eid)
        out.append(_affine_pos(-cross(ea, eb, a), -cross(ea, eb, b)))
    return [iv for iv in out if iv is not None]


def _pinch_shadow_collinear(poly, q, a, b):
    """Shadows on a target segment collinear with q: parts strictly
    beyond a vertex at which the ray exits the polygon."""
    out = []
    for i, v in enumerate(poly.vertices):
        if v == q:
            continue
        if orient(q, a, v) != COLLINEAR or orient(q, b, v) != COLLINEAR:
            continue
        u = sub(v, q)
        if not _vertex_exit(poly, i, u):
            continue
        # blocked where (S(t)-q).u > |u|^2
        d0 = (a.x - q.x) * u.x + (a.y - q.y) * u.y
        d1 = (b.x - q.x) * u.x + (b.y - q.y) * u.y
        lim = u.x * u.x + u.y * u.y
        iv = _affine_pos(d0 - lim, d1 - lim)
        if iv is not None:
            out.append(iv)
    return out


def segment_blocked(poly, q, w, skip_vertex=None):
    """Is the closed segment q->w blocked (leaves the closed polygon)?

    Used for exact vertex visibility.  skip_vertex: vertex index not to
    treat as a pinch (the target itself).
    """
    if q == w:
        return False
    # leaving q itself
    eid = poly.element_at(q)
    if eid is not None:
        if poly.is_vertex_id(eid):
            i = poly.vertex_index_of_id(eid)
            pv = poly.vertices[(i - 1) % poly.n]
            nv = poly.vertices[(i + 1) % poly.n]
            if not dir_in_cone(pv, q, nv, sub(w, q)):
                return True
        else:
            ea, eb = poly.edge_of_id(eid)
            if orient(ea, eb, w) == -1:
                return True
    for i in range(poly.n):
        c, d = poly.edge(i)
        o1, o2 = orient(q, w, c), orient(q, w, d)
        o3, o4 = orient(c, d, q), orient(c, d, w)
        if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
            return True
    for i, v in enumerate(poly.vertices):
        if v == q or v == w or i == skip_vertex:
            continue
        if on_segment(v, q, w) and _vertex_exit(poly, i, sub(w, q)):
            return True
    return False


def edge_visible_portions(poly, q, i):
    """Closed visible t-intervals of edge i from q (closure convention)."""
    a, b = poly.edge(i)
    shadows = []
    for j in range(poly.n):
        if j == i:
            continue
        c, d = poly.edge(j)
        iv = _edge_shadow(q, c, d, a, b)
        if iv is not None:
            shadows.append(iv)
    shadows.extend(_own_position_shadows(poly, q, a, b))
    if orient(q, a, b) == COLLINEAR and q != a and q != b:
        shadows.extend(_pinch_shadow_collinear(poly, q, a, b))
    return _complement01(shadows)


class VisRep:
    """Combinatorial representation of a visibility region."""

    __slots__ = ("poly", "q", "seq")

    def __init__(self, poly, q, seq):
        self.poly = poly
        self.q = q
        self.seq = seq

    def __len__(self):
        return len(self.seq)

    def entries(self):
        return self.seq.items()

    def element_ids(self):
        return [k[0] for k, _ in self.seq.items() if k[1] == 0]

    def canonical(self):
        """Canonical geometric resolution: tuple of per-element records
        ((eid,) for vertices, (eid, lo, hi) for edges) with window feet
        resolved against q and clip endpoints normalized to None when
        they coincide with the edge's own endpoints."""
        items = self.entries()
        out = []
        m = len(items)
        for idx, (key, val) in enumerate(items):
            eid, tag = key
            if tag == 1:
                raise InconsistentRep("diagonal entry in a final answer")
            if val[0] == "v":
                out.append((eid,))
                continue
            _, lo, hi = val
            a, b = self.poly.edge_of_id(eid)
            if lo is WINDOW:
                lo = self._window_foot(items, idx, -1, a, b)
            if hi is WINDOW:
                hi = self._window_foot(items, idx, +1, a, b)
            if lo == a:
                lo = None
            if hi == b:
                hi = None
            out.append((eid, lo, hi))
        return tuple(out)

    def _window_foot(self, items, idx, step, a, b):
        key, val = items[(idx + step) % len(items)]
        if key[1] == 1 or val[0] != "v":
            raise InconsistentRep("window neighbor is not a vertex")
        v = self.poly.vertex_of_id(key[0])
        # foot of the window: ray q -> v extended onto the edge's line
        u = sub(v, self.q)
        denom = u.x * (b.y - a.y) - u.y * (b.x - a.x)
        if denom == 0:
            raise InconsistentRep("window ray parallel to clipped edge")
        t = ((a.x - self.q.x) * (b.y - a.y)
             - (a.y - self.q.y) * (b.x - a.x)) / denom
        return Point(self.q.x + t * u.x, self.q.y + t * u.y)

    def __eq__(self, other):
        return (isinstance(other, VisRep)
                and self.canonical() == other.canonical())

    def __hash__(self):  # pragma: no cover
        return hash(self.canonical())

    def __repr__(self):
        return "VisRep(q=%r, %r)" % (self.q, self.entries())


def rep_from_records(poly, q, records):
    """Build a VisRep from canonical-style records in boundary order."""
    pairs = []
    for rec in records:
        if len(rec) == 1:
            pairs.append((vkey(rec[0]), V_ENTRY))
        else:
            pairs.append((vkey(rec[0]), ("e", rec[1], rec[2])))
    pairs.sort(key=lambda kv: kv[0])
    return VisRep(poly, q, FunctionalSeq.from_sorted(pairs))


def vis_oracle(poly, q):
    """Exact reference visibility representation of q in poly."""
    if poly.locate_point(q) == OUTSIDE:
        raise PointOutside(q)
    records = []
    for i, v in enumerate(poly.vertices):
        if v == q or not segment_blocked(poly, q, v, skip_vertex=i):
            records.append((poly.vertex_id(i),))
    for i in range(poly.n):
        a, b = poly.edge(i)
        portions = edge_visible_portions(poly, q, i)
        if len(portions) > 1:
            raise InconsistentRep(
                "edge %d visible in %d pieces" % (i, len(portions)))
        for lo, hi in portions:
            lo_pt = None if lo == 0 else Point(a.x + lo * (b.x - a.x),
                                               a.y + lo * (b.y - a.y))
            hi_pt = None if hi == 1 else Point(a.x + hi * (b.x - a.x),
                                               a.y + hi * (b.y - a.y))
            records.append((poly.edge_id(i), lo_pt, hi_pt))
    return rep_from_records(poly, q, records)


def reconstruct(rep):
    """Geometric visibility polygon from a representation."""
    from .geom import Polygon
    canon = rep.canonical()
    if not canon:
        raise InconsistentRep("empty representation")
    pts = []

    def push(p):
        if p is not None and (not pts or pts[-1] != p):
            pts.append(p)

    for rec in canon:
        if len(rec) == 1:
            push(rep.poly.vertex_of_id(rec[0]))
        else:
            a, b = rep.poly.edge_of_id(rec[0])
            push(rec[1] if rec[1] is not None else a)
            push(rec[2] if rec[2] is not None else b)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 3:
        raise InconsistentRep("degenerate region")
    return Polygon([(p.x, p.y) for p in pts])
