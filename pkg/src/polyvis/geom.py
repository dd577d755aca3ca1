"""Exact geometric primitives and the polygon model.

All coordinates are arbitrary-precision rationals (gmpy2.mpq, falling
back to fractions.Fraction).  Every predicate is exact; there are no
floating point fast paths.

Element indexing: a polygon with n vertices has 2n boundary *elements*,
indexed 1..2n in counterclockwise order.  Odd index 2i+1 is vertex i
(0-based), even index 2i+2 is the open edge from vertex i to vertex
i+1 (mod n).
"""

from collections import namedtuple
from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

LEFT = 1
RIGHT = -1
COLLINEAR = 0

# point_in_polygon / point classification results
OUTSIDE = 0
BOUNDARY = 1
INSIDE = 2

Point = namedtuple("Point", "x y")


def P(x, y):
    """Make an exact point; accepts ints, strings like '1/3', floats."""
    return Point(Q(x), Q(y))


def orient(a, b, c):
    """Sign of the cross product (b-a) x (c-a): LEFT, RIGHT or COLLINEAR."""
    d = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    if d > 0:
        return LEFT
    if d < 0:
        return RIGHT
    return COLLINEAR


def cross(o, a, b):
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def dot(o, a, b):
    return (a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y)


def sub(a, b):
    return Point(a.x - b.x, a.y - b.y)


def add(a, b):
    return Point(a.x + b.x, a.y + b.y)


def scale(v, t):
    return Point(v.x * t, v.y * t)


def dist2(a, b):
    return (a.x - b.x) ** 2 + (a.y - b.y) ** 2


def on_segment(p, a, b):
    """True iff p lies on the closed segment ab."""
    if orient(a, b, p) != COLLINEAR:
        return False
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)
            and min(a.y, b.y) <= p.y <= max(a.y, b.y))


def segments_cross_properly(a, b, c, d):
    """True iff the open segments ab and cd cross at a single interior
    point of both (transversal crossing, no endpoint contact)."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return o1 != o2 and o3 != o4 and o1 != COLLINEAR and o2 != COLLINEAR \
        and o3 != COLLINEAR and o4 != COLLINEAR


def segments_intersect(a, b, c, d):
    """True iff closed segments ab and cd share at least one point."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == COLLINEAR and on_segment(c, a, b):
        return True
    if o2 == COLLINEAR and on_segment(d, a, b):
        return True
    if o3 == COLLINEAR and on_segment(a, c, d):
        return True
    if o4 == COLLINEAR and on_segment(b, c, d):
        return True
    return False


def line_intersection(a, b, c, d):
    """Intersection point of lines ab and cd, or None if parallel."""
    d1 = sub(b, a)
    d2 = sub(d, c)
    denom = d1.x * d2.y - d1.y * d2.x
    if denom == 0:
        return None
    t = ((c.x - a.x) * d2.y - (c.y - a.y) * d2.x) / denom
    return Point(a.x + t * d1.x, a.y + t * d1.y)


def seg_param(a, b, p):
    """Parameter t with p = a + t*(b-a); p must be collinear with ab."""
    dx = b.x - a.x
    if dx != 0:
        return (p.x - a.x) / dx
    return (p.y - a.y) / (b.y - a.y)


def ray_segment_hit(q, v, a, b):
    """First intersection of the ray q + t*v (t > 0) with the closed
    segment ab.  Returns (t, point) of the nearest such point, or None.
    For a collinear overlap the nearest overlap point is returned."""
    denom = v.x * (b.y - a.y) - v.y * (b.x - a.x)
    if denom == 0:
        # parallel; collinear overlap?
        if orient(q, Point(q.x + v.x, q.y + v.y), a) != COLLINEAR:
            return None
        best = None
        for p in (a, b):
            if v.x != 0:
                t = (p.x - q.x) / v.x
            else:
                t = (p.y - q.y) / v.y
            if t > 0 and (best is None or t < best[0]):
                best = (t, p)
        # the overlap may start between a and b only if q itself is on ab,
        # in which case every t>0 side is covered by the nearer endpoint
        # test above or by q being the start (t=0 excluded).
        return best
    t = ((a.x - q.x) * (b.y - a.y) - (a.y - q.y) * (b.x - a.x)) / denom
    if t <= 0:
        return None
    p = Point(q.x + t * v.x, q.y + t * v.y)
    if orient(a, b, p) != COLLINEAR:
        return None
    if not (min(a.x, b.x) <= p.x <= max(a.x, b.x)
            and min(a.y, b.y) <= p.y <= max(a.y, b.y)):
        return None
    return (t, p)


class PointOutside(ValueError):
    pass


class InvalidPolygon(ValueError):
    pass


class Polygon:
    """Immutable simple polygon, counterclockwise, exact coordinates."""

    def __init__(self, vertices):
        self.vertices = tuple(Point(Q(x), Q(y)) for (x, y) in vertices)
        self.n = len(self.vertices)

    # --- element indexing -------------------------------------------------

    def vertex_id(self, i):
        return 2 * (i % self.n) + 1

    def edge_id(self, i):
        return 2 * (i % self.n) + 2

    def is_vertex_id(self, eid):
        return eid % 2 == 1

    def vertex_of_id(self, eid):
        assert eid % 2 == 1
        return self.vertices[(eid - 1) // 2]

    def vertex_index_of_id(self, eid):
        return (eid - 1) // 2

    def edge_of_id(self, eid):
        assert eid % 2 == 0
        i = eid // 2 - 1
        return self.vertices[i], self.vertices[(i + 1) % self.n]

    def edge(self, i):
        return self.vertices[i % self.n], self.vertices[(i + 1) % self.n]

    def element_ids(self):
        return range(1, 2 * self.n + 1)

    # --- basic measures ---------------------------------------------------

    def twice_area(self):
        s = Q(0)
        for i in range(self.n):
            a, b = self.edge(i)
            s += a.x * b.y - a.y * b.x
        return s

    def is_ccw(self):
        return self.twice_area() > 0

    def reversed(self):
        return Polygon([(p.x, p.y) for p in reversed(self.vertices)])

    # --- validation ---------------------------------------------------

    def validate(self):
        """Return a list of violation strings; empty means Ok."""
        out = []
        if self.n < 3:
            out.append("fewer than 3 vertices")
            return out
        seen = set()
        for p in self.vertices:
            if p in seen:
                out.append("repeated vertex %s" % (p,))
            seen.add(p)
        for i in range(self.n):
            a, b = self.edge(i)
            if a == b:
                out.append("zero-length edge %d" % i)
        for i in range(self.n):
            a, b = self.edge(i)
            for j in range(i + 1, self.n):
                c, d = self.edge(j)
                adjacent = (j == i + 1) or (i == 0 and j == self.n - 1)
                if adjacent:
                    # may share exactly the common endpoint
                    shared = b if j == i + 1 else a
                    other_pts = [p for p in (c, d) if p != shared]
                    if segments_cross_properly(a, b, c, d):
                        out.append("edges %d,%d cross" % (i, j))
                    elif any(on_segment(p, a, b) for p in other_pts if p not in (a, b)):
                        out.append("edges %d,%d overlap" % (i, j))
                    elif any(on_segment(p, c, d) for p in (a, b) if p not in (c, d)):
                        out.append("edges %d,%d overlap" % (i, j))
                else:
                    if segments_intersect(a, b, c, d):
                        out.append("edges %d,%d intersect" % (i, j))
        if not out and not self.is_ccw():
            out.append("clockwise orientation")
        return out

    # --- point queries ------------------------------------------------

    def locate_point(self, p):
        """Classify p: INSIDE, BOUNDARY or OUTSIDE (exact crossing test)."""
        if self.element_at(p) is not None:
            return BOUNDARY
        # crossing number with a ray in +x direction; perturb past
        # vertices lying exactly at p.y by the standard half-open rule
        cnt = 0
        for i in range(self.n):
            a, b = self.edge(i)
            if (a.y > p.y) != (b.y > p.y):
                # x coordinate of crossing with the horizontal line
                xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
                if xc > p.x:
                    cnt += 1
        return INSIDE if cnt % 2 == 1 else OUTSIDE

    def element_at(self, p):
        """ElementId of the vertex or open edge containing p, else None."""
        for i, v in enumerate(self.vertices):
            if v == p:
                return self.vertex_id(i)
        for i in range(self.n):
            a, b = self.edge(i)
            if p != a and p != b and on_segment(p, a, b):
                return self.edge_id(i)
        return None

    def segment_inside(self, p, q):
        """True iff the closed segment pq lies in the closed polygon.
        Grazing contact with the boundary counts as inside."""
        if self.locate_point(p) == OUTSIDE or self.locate_point(q) == OUTSIDE:
            raise PointOutside((p, q))
        if p == q:
            return True
        for i in range(self.n):
            a, b = self.edge(i)
            if segments_cross_properly(p, q, a, b):
                return False
        # collect boundary contact parameters along pq, then check the
        # midpoint of every contact-free gap stays inside
        ts = [Q(0), Q(1)]
        for i, v in enumerate(self.vertices):
            if on_segment(v, p, q):
                ts.append(seg_param(p, q, v))
        for i in range(self.n):
            a, b = self.edge(i)
            hit = segment_segment_point(p, q, a, b)
            if hit is not None:
                ts.append(seg_param(p, q, hit))
        ts = sorted(set(ts))
        for t0, t1 in zip(ts, ts[1:]):
            tm = (t0 + t1) / 2
            m = Point(p.x + tm * (q.x - p.x), p.y + tm * (q.y - p.y))
            if self.locate_point(m) == OUTSIDE:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "Polygon(%r)" % (list(self.vertices),)


def segment_segment_point(p, q, a, b):
    """A single intersection point of closed segments pq and ab if they
    cross transversally; None for parallel/collinear or no contact."""
    d1 = sub(q, p)
    d2 = sub(b, a)
    denom = d1.x * d2.y - d1.y * d2.x
    if denom == 0:
        return None
    t = ((a.x - p.x) * d2.y - (a.y - p.y) * d2.x) / denom
    u = ((a.x - p.x) * d1.y - (a.y - p.y) * d1.x) / denom
    if 0 <= t <= 1 and 0 <= u <= 1:
        return Point(p.x + t * d1.x, p.y + t * d1.y)
    return None


# --- canonical fixtures ----------------------------------------------------

SQUARE = Polygon([(0, 0), (4, 0), (4, 4), (0, 4)])
LSHAPE = Polygon([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)])


def comb(t):
    """Axis-aligned comb with t teeth; n = 4t vertices."""
    if t < 1:
        raise ValueError("need at least one tooth")
    pts = [(0, 0), (2 * t - 1, 0)]
    for i in range(t - 1, 0, -1):
        pts.extend([(2 * i + 1, 3), (2 * i, 3), (2 * i, 1), (2 * i - 1, 1)])
    pts.extend([(1, 3), (0, 3)])
    return Polygon(pts)
