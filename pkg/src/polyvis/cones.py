"""Visibility cones through a separating diagonal or concave chain.

A diagonal d splits the polygon into a far side (the subpolygon behind
d) and a near side holding the query points.  Every element w of the
far side that can see part of d sees a contiguous piece s_w of it, and
the near-side positions q that can see w through d form a cone bounded
by the two inner common tangents of the hourglass chains (the geodesics
from d's endpoints to w inside the far subpolygon).  Membership of q in
these cones therefore decides, per element, whether w shows up when
looking through d from q.

A query point's own view of d is a cone as well (apex q, spanning the
visible piece of d); shooting its two bounding rays pins the first and
last far-side elements actually visible, which is the clipping step.

through_diagonal_brute is an exact reference oracle for the same
membership question, used to validate the cone constructions.
"""

import itertools
from collections import namedtuple

from .geom import (
    InvalidPolygon, Point, Polygon, Q, cross, dist2, line_intersection,
    on_segment, orient, seg_param, segment_segment_point, sub,
)
from .tripaths import (
    _ray_walk, geodesic, shortest_path_tree, tree_path, triangulate,
)
from .visibility import segment_blocked


class ChainNotConcave(ValueError):
    """Separating chain bends the wrong way for cone construction."""


# ta/tb: bounding lines as (base, head) pairs directed into the query
# side, ta crossing the separator nearer its start; None for halfplane
# cones (the separator endpoints).  ca/cb: the bounding line contains
# the generator edge (grazing along it gives positive-length overlap).
# rd: directed separator segments; membership needs q weakly left of
# at least one.  span: the separator piece the cone looks through.
Cone = namedtuple("Cone", "kind gen ta tb ca cb rd apex span empty")

# cones ordered by chain position; start/nedges give the boundary chain
# of the far subpolygon (ccw from vertex start over nedges edges).
ConeSet = namedtuple("ConeSet", "poly start nedges a b sep cones")


def chain_position(cs, eid):
    """Position of element eid along the far chain (0 = first vertex,
    odd positions are edges), or None if not on the chain."""
    poly = cs.poly
    n = poly.n
    if poly.is_vertex_id(eid):
        m = (poly.vertex_index_of_id(eid) - cs.start) % n
        return 2 * m if m <= cs.nedges else None
    m = (eid // 2 - 1 - cs.start) % n
    return 2 * m + 1 if m < cs.nedges else None


def element_at_position(cs, pos):
    """Element id at a chain position (inverse of chain_position)."""
    poly = cs.poly
    k = (cs.start + pos // 2) % poly.n
    return poly.vertex_id(k) if pos % 2 == 0 else poly.edge_id(k)


def cone_contains(cone, p):
    """Exact membership test; closed except where a grazing contact
    would yield only a zero-length piece of a generator edge."""
    if cone.empty:
        return False
    if cone.rd and not any(cross(u, v, p) >= 0 for u, v in cone.rd):
        return False
    if cone.ta is None:
        return True
    sa = cross(cone.ta[0], cone.ta[1], p)
    sb = cross(cone.tb[0], cone.tb[1], p)
    if cone.kind == "edge":
        return (sa < 0 or (sa == 0 and cone.ca)) and \
               (sb > 0 or (sb == 0 and cone.cb))
    return sa <= 0 and sb >= 0


def _oriented(poly, diag, side):
    i, j = diag
    if side == "cw":
        i, j = j, i
    return i % poly.n, j % poly.n


def _check_diagonal(poly, i, j):
    n = poly.n
    if (j - i) % n in (0, 1, n - 1):
        raise InvalidPolygon("not a diagonal: (%d, %d)" % (i, j))
    a, b = poly.vertices[i], poly.vertices[j]
    if not poly.segment_inside(a, b):
        raise InvalidPolygon("segment (%d, %d) leaves the polygon" % (i, j))
    for k, v in enumerate(poly.vertices):
        if k != i and k != j and on_segment(v, a, b):
            raise InvalidPolygon("vertex %d on diagonal (%d, %d)" % (k, i, j))


def _subpolygon(poly, i, j):
    """Vertex indices of the ccw boundary chain i..j."""
    idx = [i]
    k = i
    while k != j:
        k = (k + 1) % poly.n
        idx.append(k)
    return idx


def _line_key(s, t):
    """Canonical form of the directed line through s and t."""
    A = t.y - s.y
    B = s.x - t.x
    C = -(A * s.x + B * s.y)
    g = abs(A) if A != 0 else abs(B)
    return (A / g, B / g, C / g)


def _chain_hull(pts):
    """Convex hull vertices of a point list (strict turns only)."""
    ps = sorted(set(pts))
    if len(ps) <= 2:
        return ps

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lo = half(ps)
    hi = half(reversed(ps))
    return lo[:-1] + hi[:-1]


def _separating_lines(c1, c2):
    """Directed lines keeping chain c1 weakly left and c2 weakly right.

    Candidates pass through one point of each chain (inner tangency);
    at most two distinct lines survive for valid hourglass chains.
    Weak separation only depends on the convex hulls, and a separating
    line through a non-hull point must contain a whole hull edge, so
    hull vertex pairs generate every separating line."""
    h1 = _chain_hull(c1)
    h2 = _chain_hull(c2)
    out = {}
    for s, t in itertools.chain(itertools.product(h1, h2),
                                itertools.product(h2, h1)):
        if s == t:
            continue
        if all(cross(s, t, p) >= 0 for p in h1) and \
                all(cross(s, t, p) <= 0 for p in h2):
            out.setdefault(_line_key(s, t), (s, t))
    return list(out.values())


def _sep_crossing(sep, a, b, line):
    """(param, point) where a directed line crosses the separator
    polyline; parallel lines sort to the end matching their direction."""
    s, t = line
    best = None
    for r in range(len(sep) - 1):
        pt = line_intersection(sep[r], sep[r + 1], s, t)
        if pt is None:
            continue
        u = seg_param(sep[r], sep[r + 1], pt)
        if 0 <= u <= 1:
            return (Q(r) + u, pt, True)
        if best is None:
            best = (Q(r) + u, pt, False)
    if best is not None:
        return best
    # parallel to the whole separator: label by direction against a->b
    d = sub(b, a)
    w = sub(t, s)
    return ((Q(len(sep)) if d.x * w.x + d.y * w.y >= 0 else Q(-1)), None,
            False)


def _graze_sample(line, pt, kind, apex, x, y):
    """A query-side point on a grazing sight line: the element contact
    of the tangent, reflected through its separator crossing."""
    if pt is None:
        return None
    s, t = line
    if kind == "vertex":
        w = apex
    elif orient(s, t, x) == 0 and orient(s, t, y) == 0:
        w = x if dist2(pt, x) >= dist2(pt, y) else y
    else:
        w = line_intersection(x, y, s, t)
        if w is None or not (0 <= seg_param(x, y, w) <= 1):
            return None
    if w == pt:
        return None
    return Point(2 * pt.x - w.x, 2 * pt.y - w.y)


def _cone_from_chains(sep, a, b, kind, gen, apex, c1, c2, x=None, y=None):
    lines = _separating_lines(c1, c2)
    if not lines:
        return Cone(kind, gen, None, None, False, False, (), apex, None,
                    True)
    labeled = sorted((_sep_crossing(sep, a, b, ln) + (ln,) for ln in lines),
                     key=lambda rec: rec[0])
    if all(rec[1] is None for rec in labeled):
        # every separating line runs along the separator itself: the
        # element can only be grazed along that line, never seen from
        # an off-line query point
        return Cone(kind, gen, None, None, False, False, (), apex, None,
                    True)
    undirected = {min(_line_key(s, t), _line_key(t, s)) for s, t in lines}
    if len(undirected) == 1:
        # the element sees a single point of the separator, along a
        # single grazing line: the cone collapses to the ray beyond
        # that point, directed away from the element contact
        pa, pt, inr, ta = labeled[0]
        if not inr:
            return Cone(kind, gen, None, None, False, False, (), apex,
                        None, True)
        if kind == "vertex":
            w = apex
        elif orient(ta[0], ta[1], x) == 0 and orient(ta[0], ta[1], y) == 0:
            w = x if dist2(pt, x) >= dist2(pt, y) else y
        else:
            w = line_intersection(x, y, ta[0], ta[1])
            if w is None or not (0 <= seg_param(x, y, w) <= 1):
                return Cone(kind, gen, None, None, False, False, (), apex,
                            None, True)
        if w == pt:
            return Cone(kind, gen, None, None, False, False, (), apex,
                        None, True)
        dx, dy = pt.x - w.x, pt.y - w.y
        rd = ((pt, Point(pt.x + dy, pt.y - dx)),)
        coll = (kind == "edge" and orient(ta[0], ta[1], x) == 0
                and orient(ta[0], ta[1], y) == 0)
        return Cone(kind, gen, ta, ta, coll, coll, rd, apex, (pt, pt),
                    False)
    (pa, spt_lo, in_a, ta), (pb, spt_hi, in_b, tb) = labeled[0], labeled[-1]
    # the crossing order can tie when both tangents meet the separator
    # at one point; check the wedge choice against real sight lines
    samples = []
    for pt, inr, ln in ((spt_lo, in_a, ta), (spt_hi, in_b, tb)):
        smp = _graze_sample(ln, pt if inr else None, kind, apex, x, y)
        if smp is not None:
            samples.append(smp)

    def fits(t1, t2):
        return all(cross(t1[0], t1[1], s) <= 0 and
                   cross(t2[0], t2[1], s) >= 0 for s in samples)

    if samples and not fits(ta, tb) and fits(tb, ta):
        ta, tb = tb, ta
        spt_lo, spt_hi = spt_hi, spt_lo
        pa, pb = pb, pa
    ca = cb = False
    if kind == "edge":
        ca = orient(ta[0], ta[1], x) == 0 and orient(ta[0], ta[1], y) == 0
        cb = orient(tb[0], tb[1], x) == 0 and orient(tb[0], tb[1], y) == 0
    m = len(sep) - 1
    lo, hi = sorted((pa, pb))
    lo = min(max(int(lo), 0), m - 1)
    hi = min(max(int(hi), 0), m - 1)
    rd = tuple((sep[r], sep[r + 1]) for r in range(lo, hi + 1))
    return Cone(kind, gen, ta, tb, ca, cb, rd, apex, (spt_lo, spt_hi), False)


def _build_cones(poly, idx, sep):
    """Cones of all chain elements, from the shortest path trees of the
    separator endpoints inside the far subpolygon."""
    verts = [poly.vertices[k] for k in idx]
    interior = [p for p in sep[1:-1]]
    # the far chain of a checked diagonal or chain is always simple, so
    # the quadratic simplicity validation is skipped
    polyL = Polygon(verts + list(reversed(interior)))
    triL = triangulate(polyL)
    a, b = sep[0], sep[-1]
    spt_a = shortest_path_tree(triL, a)
    spt_b = shortest_path_tree(triL, b)
    last = len(verts) - 1
    to_a = [tree_path(triL, spt_a, k) for k in range(len(verts))]
    to_b = [tree_path(triL, spt_b, k) for k in range(len(verts))]
    cones = []
    half = ((sep[r], sep[r + 1]) for r in range(len(sep) - 1))
    half = tuple(half)
    for k in range(len(verts)):
        vid = poly.vertex_id(idx[k])
        if k == 0 or k == last:
            cones.append(Cone("vertex", vid, None, None, False, False,
                              half, verts[k], (a, b), False))
        else:
            c1 = to_a[k]
            c2 = list(reversed(to_b[k]))
            cones.append(_cone_from_chains(sep, a, b, "vertex", vid,
                                           verts[k], c1, c2))
        if k < last:
            c1 = to_a[k]
            c2 = list(reversed(to_b[k + 1]))
            cones.append(_cone_from_chains(
                sep, a, b, "edge", poly.edge_id(idx[k]), None, c1, c2,
                x=verts[k], y=verts[k + 1]))
    cones = [c for c in cones if not c.empty]
    return ConeSet(poly, idx[0], len(verts) - 1, a, b, tuple(sep),
                   tuple(cones))


def cones_through_diagonal(poly, tri, diag, side="ccw"):
    """Cones of all far-side elements through diagonal diag = (i, j);
    the far side is the ccw boundary chain i..j (j..i for side="cw")."""
    i, j = _oriented(poly, diag, side)
    _check_diagonal(poly, i, j)
    idx = _subpolygon(poly, i, j)
    return _build_cones(poly, idx, [poly.vertices[i], poly.vertices[j]])


def cones_through_chain(poly, tri, chain, side="ccw"):
    """Cones of far-side elements through a concave separating chain.

    chain lists vertex indices from its start to its end; interior
    waypoints must bend weakly toward the far side (left turns seen
    along the chain), else ChainNotConcave.  Membership tests are
    reliable for query points inside the pocket of a single chain
    segment, which is how the chain case is used."""
    ch = list(chain)
    if side == "cw":
        ch.reverse()
    i, j = ch[0] % poly.n, ch[-1] % poly.n
    sep = [poly.vertices[k % poly.n] for k in ch]
    for k in range(1, len(sep) - 1):
        if orient(sep[k - 1], sep[k], sep[k + 1]) < 0:
            raise ChainNotConcave(sep[k])
    idx = _subpolygon(poly, i, j)
    return _build_cones(poly, idx, sep)


def query_cone(tri, q, diag, side="ccw"):
    """Cone of directions through which q sees diagonal diag, with apex
    q and span the visible piece of the diagonal; None if q sees no
    point of it."""
    poly = tri.poly
    i, j = _oriented(poly, diag, side)
    a, b = poly.vertices[i], poly.vertices[j]
    if q == a or q == b:
        return Cone("query", None, None, None, False, False, ((b, a),),
                    q, (a, b), False)
    ga = geodesic(tri, q, a).waypoints
    gb = geodesic(tri, q, b).waypoints
    if len(ga) > 2 and len(gb) > 2 and ga[1] == gb[1]:
        # funnel closed at the first waypoint: at most a grazing ray
        u = ga[1]
        pt = line_intersection(q, u, a, b)
        if pt is None or not (0 <= seg_param(a, b, pt) <= 1):
            return None
        if seg_param(q, u, pt) < 1 or segment_blocked(poly, q, pt):
            return None
        return Cone("query", None, (pt, q), (pt, q), False, False,
                    ((b, a),), q, (pt, pt), False)
    p1 = a if len(ga) == 2 else line_intersection(q, ga[1], a, b)
    p2 = b if len(gb) == 2 else line_intersection(q, gb[1], a, b)
    if p1 is None or p2 is None:
        return None
    t1 = max(seg_param(a, b, p1), Q(0))
    t2 = min(seg_param(a, b, p2), Q(1))
    if t1 > t2:
        return None
    p1 = Point(a.x + t1 * (b.x - a.x), a.y + t1 * (b.y - a.y))
    p2 = Point(a.x + t2 * (b.x - a.x), a.y + t2 * (b.y - a.y))
    return Cone("query", None, (p1, q), (p2, q), False, False, ((b, a),),
                q, (p1, p2), False)


def _ray_extreme(cs, tri, q, p, pick):
    """Chain position of the extreme contact of the ray q->p, plus the
    ray's landing point when that position is the element it hit."""
    hit, eid, passed = _ray_walk(tri, q, sub(p, q))
    poly = cs.poly
    pos = []
    for k in passed:
        cp = chain_position(cs, poly.vertex_id(k))
        if cp is not None:
            pos.append(cp)
    hp = chain_position(cs, eid)
    if hp is not None and hit != q:
        pos.append(hp)
    if not pos:
        return None, None
    best = pick(pos)
    return best, (hit if best == hp and hit != q else None)


def clip_details(cs, qcone, tri):
    """(lo, hi, lo_point, hi_point): first and last chain positions
    visible inside the query cone, found by shooting its two bounding
    rays, with the exact landing points when the extremes are direct
    ray hits (None entries otherwise); None if nothing is visible."""
    if qcone is None or qcone.empty:
        return None
    if not cs.cones:
        return None
    if qcone.ta is None:
        pos = [chain_position(cs, c.gen) for c in cs.cones]
        return (min(pos), max(pos), None, None)
    q = qcone.apex
    p1, p2 = qcone.span
    lo, hlo = _ray_extreme(cs, tri, q, p1, min)
    hi, hhi = _ray_extreme(cs, tri, q, p2, max)
    if lo is None and hi is None:
        return None
    if lo is None:
        lo, hlo = hi, hhi
    if hi is None:
        hi, hhi = lo, hlo
    return (lo, hi, hlo, hhi)


def clip_interval(cs, qcone, tri):
    """First and last chain positions visible inside the query cone,
    found by shooting its two bounding rays; None if nothing is."""
    det = clip_details(cs, qcone, tri)
    return None if det is None else det[:2]


# --- reference oracle --------------------------------------------------------


def _cross_point_closed(q, w, a, b):
    """Intersection of closed segments qw and ab; collinear overlaps
    resolve to the overlap point nearest w."""
    if q == w:
        return q if on_segment(q, a, b) else None
    if orient(q, w, a) == 0 and orient(q, w, b) == 0:
        best = None
        for p in (a, b, q, w):
            if on_segment(p, a, b) and on_segment(p, q, w):
                if best is None or dist2(p, w) < dist2(best, w):
                    best = p
        return best
    return segment_segment_point(q, w, a, b)


def _point_sees_through(polyL, q, a, b, p):
    """Does q see point p of the far subpolygon through diagonal ab?
    Blockers between q and the diagonal are ignored by definition."""
    c = _cross_point_closed(q, p, a, b)
    return c is not None and polyL.segment_inside(c, p)


def _edge_member(polyL, q, a, b, x, y):
    """Does a positive-length piece of edge xy show through diagonal ab?

    The visibility of points along the edge changes only where the
    sight line passes a subpolygon vertex, runs along the diagonal's
    endpoints, or where the edge crosses the diagonal's line; testing a
    midpoint between consecutive such breakpoints is exact."""
    cand = {Q(0), Q(1)}
    radial = orient(x, y, q) == 0
    for v in polyL.vertices:
        if v == q:
            continue
        if radial:
            if orient(x, y, v) == 0:
                cand.add(seg_param(x, y, v))
        else:
            pt = line_intersection(q, v, x, y)
            if pt is not None:
                cand.add(seg_param(x, y, pt))
    if radial:
        for k in range(polyL.n):
            c, d = polyL.edge(k)
            pt = line_intersection(x, y, c, d)
            if pt is not None:
                cand.add(seg_param(x, y, pt))
    pt = line_intersection(a, b, x, y)
    if pt is not None:
        cand.add(seg_param(x, y, pt))
    ts = sorted(t for t in cand if 0 <= t <= 1)
    for t1, t2 in zip(ts, ts[1:]):
        if t1 == t2:
            continue
        tm = (t1 + t2) / 2
        pm = Point(x.x + tm * (y.x - x.x), x.y + tm * (y.y - x.y))
        if _point_sees_through(polyL, q, a, b, pm):
            return True
    return False


def through_diagonal_brute(poly, diag, q, side="ccw"):
    """Element ids of the far side of diag visible from q through the
    diagonal, by exhaustive exact tests.  Grazing contact counts for
    vertices; edges need a positive-length visible piece."""
    i, j = _oriented(poly, diag, side)
    _check_diagonal(poly, i, j)
    idx = _subpolygon(poly, i, j)
    a, b = poly.vertices[i], poly.vertices[j]
    verts = [poly.vertices[k] for k in idx]
    polyL = Polygon(verts)
    out = set()
    for k, w in enumerate(verts):
        if w != q and _point_sees_through(polyL, q, a, b, w):
            out.add(poly.vertex_id(idx[k]))
    for k in range(len(verts) - 1):
        if _edge_member(polyL, q, a, b, verts[k], verts[k + 1]):
            out.add(poly.edge_id(idx[k]))
    return frozenset(out)
