"""Triangulation, ray shooting, geodesic paths and chain tangents.

The triangulation is built by monotone decomposition (plane sweep in
O(n log n)) and a stack pass per monotone piece; exact ear clipping is
kept as a fallback for degenerate pieces and as an independent
cross-check for small inputs.  Ray shooting walks the triangulation
from the origin's triangle.  Geodesics run the funnel algorithm over
the portals of the dual-tree path.
"""

from collections import deque, namedtuple
from math import ceil, sqrt

from .counters import COUNTERS
from .geom import (
    InvalidPolygon, Point, PointOutside, Q, cross, on_segment, orient, sub,
)
from .visibility import _vertex_exit, dir_in_cone


class OriginOutside(ValueError):
    pass


GeodesicPath = namedtuple("GeodesicPath", ["waypoints"])

ShortestPathTree = namedtuple("ShortestPathTree",
                              ["root", "parent", "index"])


# --- monotone decomposition ---------------------------------------------------

_START, _END, _SPLIT, _MERGE, _REGULAR = range(5)


def _lexkey(v):
    return (v.y, -v.x)


def _classify(V, n, i):
    p, q = V[(i - 1) % n], V[(i + 1) % n]
    ki, kp, kq = _lexkey(V[i]), _lexkey(p), _lexkey(q)
    if kp < ki and kq < ki:
        return _START if orient(p, V[i], q) > 0 else _SPLIT
    if kp > ki and kq > ki:
        return _END if orient(p, V[i], q) > 0 else _MERGE
    return _REGULAR


class _Status:
    """Sweep status: edges ordered left to right at the sweep point."""

    def __init__(self, V, n):
        self.V = V
        self.n = n
        self.edges = []

    def _ends(self, e):
        a, b = self.V[e], self.V[(e + 1) % self.n]
        return (a, b) if _lexkey(a) < _lexkey(b) else (b, a)

    def _count_left(self, p):
        """Number of status edges strictly left of point p."""
        lo, hi = 0, len(self.edges)
        while lo < hi:
            mid = (lo + hi) // 2
            L, U = self._ends(self.edges[mid])
            if orient(L, U, p) < 0:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def insert(self, e, at):
        self.edges.insert(self._count_left(at), e)

    def delete(self, e, at):
        k = self._count_left(at)
        if k < len(self.edges) and self.edges[k] == e:
            self.edges.pop(k)
            return
        raise InvalidPolygon("sweep status lost an edge")

    def left_of(self, p):
        k = self._count_left(p)
        if k == 0:
            raise InvalidPolygon("no edge left of a split/merge vertex")
        return self.edges[k - 1]


def _monotone_diagonals(poly):
    V, n = poly.vertices, poly.n
    events = sorted(range(n), key=lambda i: _lexkey(V[i]), reverse=True)
    status = _Status(V, n)
    helper = {}
    vtype = [_classify(V, n, i) for i in range(n)]
    diags = []

    def fix(e, v):
        h, ht = helper[e]
        if ht == _MERGE:
            diags.append((v, h))

    for v in events:
        t = vtype[v]
        pv = (v - 1) % n
        if t == _START:
            status.insert(v, V[v])
            helper[v] = (v, t)
        elif t == _END:
            fix(pv, v)
            status.delete(pv, V[v])
        elif t == _SPLIT:
            e = status.left_of(V[v])
            diags.append((v, helper[e][0]))
            helper[e] = (v, t)
            status.insert(v, V[v])
            helper[v] = (v, t)
        elif t == _MERGE:
            fix(pv, v)
            status.delete(pv, V[v])
            e = status.left_of(V[v])
            fix(e, v)
            helper[e] = (v, t)
        else:
            if _lexkey(V[pv]) > _lexkey(V[v]):
                fix(pv, v)
                status.delete(pv, V[v])
                status.insert(v, V[v])
                helper[v] = (v, t)
            else:
                e = status.left_of(V[v])
                fix(e, v)
                helper[e] = (v, t)
    return diags


def _faces_from_diagonals(poly, diags):
    """Split the polygon along the diagonals; return interior faces as
    ccw vertex-index cycles."""
    V, n = poly.vertices, poly.n
    nbrs = {i: {(i - 1) % n, (i + 1) % n} for i in range(n)}
    for a, b in diags:
        nbrs[a].add(b)
        nbrs[b].add(a)

    def angkey_cmp(v):
        import functools

        def c(i, j):
            a, b = sub(V[i], V[v]), sub(V[j], V[v])
            ha = 0 if (a.y > 0 or (a.y == 0 and a.x > 0)) else 1
            hb = 0 if (b.y > 0 or (b.y == 0 and b.x > 0)) else 1
            if ha != hb:
                return -1 if ha < hb else 1
            s = a.x * b.y - a.y * b.x
            return 0 if s == 0 else (-1 if s > 0 else 1)

        return functools.cmp_to_key(c)

    order = {}
    for v in range(n):
        lst = sorted(nbrs[v], key=angkey_cmp(v))
        order[v] = {u: k for k, u in enumerate(lst)}, lst

    visited = set()
    faces = []
    for v0 in range(n):
        for u0 in nbrs[v0]:
            if (v0, u0) in visited:
                continue
            face = [v0]
            u, v = v0, u0
            while True:
                visited.add((u, v))
                face.append(v)
                pos, lst = order[v]
                w = lst[(pos[u] - 1) % len(lst)]
                u, v = v, w
                if (u, v) == (v0, u0):
                    break
            face.pop()
            area2 = 0
            for k in range(len(face)):
                a, b = V[face[k]], V[face[(k + 1) % len(face)]]
                area2 += a.x * b.y - a.y * b.x
            if area2 > 0:
                faces.append(face)
    return faces


class _NeedsEarClip(Exception):
    pass


def _triangulate_monotone(V, face):
    m = len(face)
    if m == 3:
        return [tuple(face)]
    keyed = sorted(range(m), key=lambda k: _lexkey(V[face[k]]), reverse=True)
    top, bottom = keyed[0], keyed[-1]
    chain = {}
    k = top
    while k != bottom:             # ccw walk = left chain
        chain[k] = "L"
        k = (k + 1) % m
    k = top
    while k != bottom:
        chain[k] = "R"
        k = (k - 1) % m
    chain[top] = chain[bottom] = "L"

    def emit(a, b, c):
        s = orient(V[face[a]], V[face[b]], V[face[c]])
        if s == 0:
            raise _NeedsEarClip()
        return (face[a], face[b], face[c]) if s > 0 else \
            (face[a], face[c], face[b])

    tris = []
    stack = [keyed[0], keyed[1]]
    for j in range(2, m - 1):
        u = keyed[j]
        if chain[u] != chain[stack[-1]]:
            old_top = stack[-1]
            while len(stack) >= 2:
                a = stack.pop()
                tris.append(emit(u, a, stack[-1]))
            stack = [old_top, u]
        else:
            last = stack.pop()
            while stack:
                if chain[u] == "L":
                    ok = orient(V[face[stack[-1]]], V[face[last]],
                                V[face[u]]) > 0
                else:
                    ok = orient(V[face[u]], V[face[last]],
                                V[face[stack[-1]]]) > 0
                if not ok:
                    break
                tris.append(emit(u, last, stack[-1]))
                last = stack.pop()
            stack.append(last)
            stack.append(u)
    u = keyed[-1]
    for k in range(len(stack) - 1):
        tris.append(emit(u, stack[k], stack[k + 1]))
    return tris


def _point_in_closed_tri(p, a, b, c):
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 \
        and orient(c, a, p) >= 0


def _ear_clip_face(V, face):
    idxs = list(face)
    tris = []
    while len(idxs) > 3:
        m = len(idxs)
        for k in range(m):
            a, b, c = idxs[(k - 1) % m], idxs[k], idxs[(k + 1) % m]
            if orient(V[a], V[b], V[c]) <= 0:
                continue
            if any(_point_in_closed_tri(V[d], V[a], V[b], V[c])
                   for d in idxs if d not in (a, b, c)):
                continue
            tris.append((a, b, c))
            idxs.pop(k)
            break
        else:
            raise InvalidPolygon("no ear found")
        continue
    a, b, c = idxs
    if orient(V[a], V[b], V[c]) <= 0:
        raise InvalidPolygon("degenerate final triangle")
    tris.append((a, b, c))
    return tris


def ear_clip_triangulate(poly):
    """O(n^2) exact ear clipping over the whole polygon (cross-check)."""
    return _ear_clip_face(poly.vertices, list(range(poly.n)))


class Triangulation:
    """Immutable triangulation with dual adjacency and a point locator.

    triangles: vertex-index triples, ccw.  adj[t]: list of
    (neighbor triangle, shared (u, v) index pair) over diagonals.
    """

    def __init__(self, poly, triangles):
        self.poly = poly
        self.triangles = triangles
        V = poly.vertices
        by_pair = {}
        for t, tri in enumerate(triangles):
            for k in range(3):
                u, v = tri[k], tri[(k + 1) % 3]
                by_pair.setdefault(frozenset((u, v)), []).append(t)
        self.adj = [[] for _ in triangles]
        for pair, ts in by_pair.items():
            if len(ts) == 2:
                u, v = tuple(pair)
                self.adj[ts[0]].append((ts[1], (u, v)))
                self.adj[ts[1]].append((ts[0], (u, v)))
        self.vert_tris = {}
        for t, tri in enumerate(triangles):
            for u in tri:
                self.vert_tris.setdefault(u, []).append(t)
        # uniform-grid locator keyed on float boxes; candidates are
        # verified exactly, so float rounding only costs extra checks
        xs = [float(v.x) for v in V]
        ys = [float(v.y) for v in V]
        self._x0, self._y0 = min(xs), min(ys)
        span_x = max(xs) - self._x0 or 1.0
        span_y = max(ys) - self._y0 or 1.0
        g = max(1, int(ceil(sqrt(len(triangles)))))
        self._g = g
        self._sx, self._sy = span_x / g, span_y / g
        self._cells = {}
        for t, tri in enumerate(triangles):
            cx = [float(V[u].x) for u in tri]
            cy = [float(V[u].y) for u in tri]
            i0 = max(0, int((min(cx) - self._x0) / self._sx) - 1)
            i1 = min(g - 1, int((max(cx) - self._x0) / self._sx) + 1)
            j0 = max(0, int((min(cy) - self._y0) / self._sy) - 1)
            j1 = min(g - 1, int((max(cy) - self._y0) / self._sy) + 1)
            for i in range(i0, i1 + 1):
                for j in range(j0, j1 + 1):
                    self._cells.setdefault((i, j), []).append(t)

    def _tri_pts(self, t):
        a, b, c = self.triangles[t]
        V = self.poly.vertices
        return V[a], V[b], V[c]

    def locate(self, p):
        """Index of a triangle whose closed interior contains p, or None."""
        g = self._g
        i = min(g - 1, max(0, int((float(p.x) - self._x0) / self._sx)))
        j = min(g - 1, max(0, int((float(p.y) - self._y0) / self._sy)))
        for t in self._cells.get((i, j), ()):
            if _point_in_closed_tri(p, *self._tri_pts(t)):
                return t
        for t in range(len(self.triangles)):
            if _point_in_closed_tri(p, *self._tri_pts(t)):
                return t
        return None


def triangulate(poly):
    """Triangulation of a ccw simple polygon; raises InvalidPolygon when
    the sweep detects an inconsistency (e.g. non-simple input)."""
    if poly.n == 3:
        return Triangulation(poly, [(0, 1, 2)])
    diags = _monotone_diagonals(poly)
    tris = []
    for face in _faces_from_diagonals(poly, diags):
        try:
            tris.extend(_triangulate_monotone(poly.vertices, face))
        except _NeedsEarClip:
            tris.extend(_ear_clip_face(poly.vertices, face))
    if len(tris) != poly.n - 2:
        raise InvalidPolygon("triangulation has %d triangles, expected %d"
                             % (len(tris), poly.n - 2))
    return Triangulation(poly, tris)


# --- ray shooting -------------------------------------------------------------


def _boundary_edge_index(poly, u, v):
    """Edge index if (u, v) is a boundary edge, else None."""
    n = poly.n
    if (u + 1) % n == v:
        return u
    if (v + 1) % n == u:
        return v
    return None


def ray_shoot(tri, origin, direction):
    """First boundary point hit by the ray origin + t*direction, t >= 0,
    together with the element id it lies on.  Grazing along the boundary
    continues; only a strict exit stops the ray."""
    hit, eid, _ = _ray_walk(tri, origin, direction)
    return hit, eid


def _ray_walk(tri, origin, direction):
    """ray_shoot plus the list of vertex indices the ray passes through
    (grazing contacts strictly between the origin and the hit)."""
    COUNTERS.ray_shoots += 1
    poly = tri.poly
    if direction.x == 0 and direction.y == 0:
        raise ValueError("zero direction")
    t0 = tri.locate(origin)
    if t0 is None:
        raise OriginOutside(origin)
    passed = []
    eid = poly.element_at(origin)
    if eid is not None:
        if poly.is_vertex_id(eid):
            i = poly.vertex_index_of_id(eid)
            if _vertex_exit(poly, i, direction):
                return origin, eid, passed
        else:
            a, b = poly.edge_of_id(eid)
            if orient(a, b, Point(origin.x + direction.x,
                                  origin.y + direction.y)) < 0:
                return origin, eid, passed

    V = poly.vertices
    cur = t0
    tcur = Q(0)
    guard = 4 * len(tri.triangles) + 16
    while guard > 0:
        guard -= 1
        tri_idx = tri.triangles[cur]
        best = None
        hits = []
        for k in range(3):
            u, v = tri_idx[k], tri_idx[(k + 1) % 3]
            X, Y = V[u], V[v]
            # inside constraint f(t) = cross(X, Y, o + t d) = c0 + t*rate
            c0 = cross(X, Y, origin)
            rate = (Y.x - X.x) * direction.y - (Y.y - X.y) * direction.x
            if rate >= 0:
                continue
            texit = c0 / -rate
            if best is None or texit < best:
                best = texit
                hits = [(u, v)]
            elif texit == best:
                hits.append((u, v))
        if best is None or best < tcur:
            raise OriginOutside(origin)
        hit = Point(origin.x + best * direction.x,
                    origin.y + best * direction.y)
        at_vertex = None
        for u, v in hits:
            if hit == V[u]:
                at_vertex = u
            elif hit == V[v]:
                at_vertex = v
        if len(hits) > 1 and at_vertex is None:
            raise InvalidPolygon("inconsistent triangle walk")
        if at_vertex is not None:
            if _vertex_exit(poly, at_vertex, direction):
                return hit, poly.vertex_id(at_vertex), passed
            if hit != origin and (not passed or passed[-1] != at_vertex):
                passed.append(at_vertex)
            nxt = None
            for t2 in tri.vert_tris[at_vertex]:
                a, b, c = tri.triangles[t2]
                while a != at_vertex:
                    a, b, c = b, c, a
                e1, e2 = sub(V[b], V[a]), sub(V[c], V[a])
                if (e1.x * direction.y - e1.y * direction.x) >= 0 and \
                        (direction.x * e2.y - direction.y * e2.x) >= 0:
                    if t2 != cur:
                        nxt = t2
                        break
                    if nxt is None:
                        nxt = t2
            if nxt is None:
                raise InvalidPolygon("ray walk stuck at a vertex")
            cur, tcur = nxt, best
            continue
        u, v = hits[0]
        be = _boundary_edge_index(poly, u, v)
        if be is not None:
            return hit, poly.edge_id(be), passed
        moved = False
        for t2, pair in tri.adj[cur]:
            if frozenset(pair) == frozenset((u, v)):
                cur, tcur, moved = t2, best, True
                break
        if not moved:
            raise InvalidPolygon("triangle walk lost adjacency")
    raise InvalidPolygon("ray walk did not terminate")


# --- geodesics ----------------------------------------------------------------


def _dual_path(tri, t_from, t_to):
    if t_from == t_to:
        return [t_from]
    prev = {t_from: None}
    dq = deque([t_from])
    while dq:
        t = dq.popleft()
        if t == t_to:
            break
        for t2, _pair in tri.adj[t]:
            if t2 not in prev:
                prev[t2] = t
                dq.append(t2)
    if t_to not in prev:
        raise InvalidPolygon("dual graph is disconnected")
    path = [t_to]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    return path


def _portal_for(tri, t_from, pair):
    """Order the shared diagonal (left, right) as seen when leaving
    t_from through it."""
    a, b, c = tri.triangles[t_from]
    corners = (a, b, c)
    for k in range(3):
        u, v = corners[k], corners[(k + 1) % 3]
        if frozenset((u, v)) == frozenset(pair):
            # directed u->v in ccw order of the exited triangle:
            # crossing it, v is on the left, u on the right
            return v, u
    raise InvalidPolygon("portal edge missing")


def _string_pull(p, q, portals):
    ls = [p] + [l for l, r in portals] + [q]
    rs = [p] + [r for l, r in portals] + [q]
    path = [p]
    apex, left, right = p, p, p
    apex_i = left_i = right_i = 0
    i = 1
    while i < len(ls):
        l, r = ls[i], rs[i]
        if cross(apex, right, r) >= 0:
            if apex == right or cross(apex, left, r) < 0:
                right, right_i = r, i
            else:
                if path[-1] != left:
                    path.append(left)
                apex, apex_i = left, left_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        if cross(apex, left, l) <= 0:
            if apex == left or cross(apex, right, l) > 0:
                left, left_i = l, i
            else:
                if path[-1] != right:
                    path.append(right)
                apex, apex_i = right, right_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        i += 1
    if path[-1] != q:
        path.append(q)
    return path


def geodesic(tri, p, q):
    """Unique shortest path between p and q inside the closed polygon."""
    tp, tq = tri.locate(p), tri.locate(q)
    if tp is None:
        raise PointOutside(p)
    if tq is None:
        raise PointOutside(q)
    if p == q:
        return GeodesicPath([p])
    path = _dual_path(tri, tp, tq)
    portals = []
    V = tri.poly.vertices
    for k in range(len(path) - 1):
        pair = None
        for t2, pr in tri.adj[path[k]]:
            if t2 == path[k + 1]:
                pair = pr
                break
        lv, rv = _portal_for(tri, path[k], pair)
        portals.append((V[lv], V[rv]))
    # an endpoint exactly on a diagonal may locate to the triangle on
    # either side; portals through the endpoint itself would start the
    # funnel fully degenerate, and the path never needs their triangle
    while portals and on_segment(p, portals[0][0], portals[0][1]):
        portals.pop(0)
    while portals and on_segment(q, portals[-1][0], portals[-1][1]):
        portals.pop()
    return GeodesicPath(_string_pull(p, q, portals))


def _wraps(a, b, w, sign):
    """Does the taut path to w bend past chain vertex b (edge a->b)?
    Collinear grazing counts when b lies between a and w, so tree paths
    list every boundary vertex the taut path touches."""
    c = cross(a, b, w)
    if sign * c > 0:
        return True
    return c == 0 and on_segment(b, a, w)


def _funnel_attach(funnel, w):
    """Previous waypoint on the taut path to w through the funnel, and
    the full chain from the funnel apex to w."""
    apex, L, R = funnel
    if len(R) > 1 and _wraps(R[0], R[1], w, -1):
        k = 1
        while k + 1 < len(R) and _wraps(R[k], R[k + 1], w, -1):
            k += 1
        return R[k], R[:k + 1] + [w]
    if len(L) > 1 and _wraps(L[0], L[1], w, 1):
        k = 1
        while k + 1 < len(L) and _wraps(L[k], L[k + 1], w, 1):
            k += 1
        return L[k], L[:k + 1] + [w]
    return apex, [apex, w]


def _split_funnel(c1, c2):
    """Child funnel between two taut chains sharing a prefix."""
    i = 1
    stop = min(len(c1), len(c2))
    while i < stop and c1[i] == c2[i]:
        i += 1
    return (c1[i - 1], c1[i - 1:], c2[i - 1:])


def shortest_path_tree(tri, root):
    """Parent map: vertex id -> previous waypoint on the geodesic from
    root (None for a vertex coinciding with root).

    One funnel-splitting walk over the triangulation dual: every
    triangle is entered once through its unique entry portal, the
    opposite vertex attaches to the entry funnel, and the funnel splits
    into the two exit portals."""
    poly = tri.poly
    V = poly.vertices
    starts = [t for t in range(len(tri.triangles))
              if _point_in_closed_tri(root, *tri._tri_pts(t))]
    if not starts:
        raise PointOutside(root)
    parent = {}
    index = {v: i for i, v in enumerate(V)}
    for t in starts:
        for u in tri.triangles[t]:
            parent[poly.vertex_id(u)] = None if V[u] == root else root
    visited = set(starts)
    stack = []
    for t in starts:
        for t2, pair in tri.adj[t]:
            if t2 in visited:
                continue
            visited.add(t2)
            lv, rv = _portal_for(tri, t, pair)
            stack.append((t2, lv, rv,
                          (root, [root, V[lv]], [root, V[rv]])))
    while stack:
        t2, lv, rv, funnel = stack.pop()
        w = next(u for u in tri.triangles[t2] if u not in (lv, rv))
        prev, chain_w = _funnel_attach(funnel, V[w])
        wid = poly.vertex_id(w)
        if wid not in parent:
            parent[wid] = prev
        chains = {lv: funnel[1], rv: funnel[2], w: chain_w}
        for t3, pair3 in tri.adj[t2]:
            if t3 in visited:
                continue
            visited.add(t3)
            lv3, rv3 = _portal_for(tri, t2, pair3)
            stack.append((t3, lv3, rv3,
                          _split_funnel(chains[lv3], chains[rv3])))
    return ShortestPathTree(root, parent, index)


def tree_path(tri, spt, i):
    """Waypoints of the geodesic from spt.root to vertex index i,
    reconstructed through parent links.  Every boundary vertex the taut
    path touches is listed, including collinear grazing contacts, so
    the waypoints can differ from geodesic() by collinear points while
    describing the same polyline."""
    poly = tri.poly
    idx_of = spt.index
    out = [poly.vertices[i]]
    cur = spt.parent[poly.vertex_id(i)]
    while cur is not None:
        out.append(cur)
        if cur == spt.root:
            break
        cur = spt.parent[poly.vertex_id(idx_of[cur])]
    else:
        out.append(spt.root)
    if out[-1] != spt.root:
        out.append(spt.root)
    out.reverse()
    return out


# --- tangents to a concave chain ---------------------------------------------


def _farther(q, a, b):
    da = (a.x - q.x) ** 2 + (a.y - q.y) ** 2
    db = (b.x - q.x) ** 2 + (b.y - q.y) ** 2
    return a if da >= db else b


def _sgn(x):
    return 0 if x == 0 else (1 if x > 0 else -1)


def _touch_ok(pts, q, t):
    """Is vertex t a valid tangent touch point of the convex chain?

    Local test (sufficient by convexity): the two hull neighbors of t
    must not lie strictly on opposite sides of the ray q -> t.  A tie
    (q collinear with a chain edge at t) resolves to the farther edge
    endpoint, so the nearer one is rejected."""
    m = len(pts)
    prev = pts[t - 1] if t > 0 else pts[m - 1]
    nxt = pts[t + 1] if t < m - 1 else pts[0]
    a, b = orient(q, pts[t], prev), orient(q, pts[t], nxt)
    if a != 0 and b != 0 and (a > 0) != (b > 0):
        return False
    for nb in ((pts[t - 1],) if t > 0 else ()) + \
            ((pts[t + 1],) if t < m - 1 else ()):
        if orient(q, pts[t], nb) == 0 and nb != pts[t] and \
                _farther(q, pts[t], nb) != pts[t]:
            return False
    return True


def tangents(chain, q):
    """Tangent touch points from q to a convex (concave-as-seen) chain.

    Binary searches: an extreme-vertex search toward q followed by two
    sign-block searches over the edge orientation signs; each candidate
    is verified by an O(1) local test, with a linear fallback (also
    counted) for inputs outside the convexity precondition.  A tie (q
    collinear with a chain edge) resolves to the farther endpoint.
    Returns the two touch points in chain order."""
    pts = chain.waypoints if hasattr(chain, "waypoints") else list(chain)
    m = len(pts)
    if m == 1:
        return pts[0], pts[0]

    def h(i):
        return orient(q, pts[i], pts[i + 1])

    cand = {0, m - 1}
    if m > 2:
        ux = q.x - (pts[0].x + pts[-1].x) / 2
        uy = q.y - (pts[0].y + pts[-1].y) / 2

        def phi(i):
            return ux * pts[i].x + uy * pts[i].y

        lo, hi = 0, m - 1
        while lo < hi:
            COUNTERS.locate_steps += 1
            mid = (lo + hi) // 2
            if phi(mid + 1) > phi(mid):
                lo = mid + 1
            else:
                hi = mid
        k = lo
        s0 = _sgn(h(0)) or _sgn(h(1))
        sl = _sgn(h(m - 2)) or _sgn(h(m - 3)) if m > 3 else _sgn(h(m - 2))
        # first edge up to the extreme vertex that leaves the s0 block
        lo, hi = 0, min(k, m - 2)
        while lo < hi:
            COUNTERS.locate_steps += 1
            mid = (lo + hi) // 2
            if _sgn(h(mid)) == s0 and s0 != 0:
                lo = mid + 1
            else:
                hi = mid
        if _sgn(h(lo)) != s0:
            cand.add(lo)
            cand.add(lo + 1)
        # last edge from the extreme vertex still outside the sl block
        lo, hi = max(k - 1, 0), m - 2
        while lo < hi:
            COUNTERS.locate_steps += 1
            mid = (lo + hi + 1) // 2
            if _sgn(h(mid)) == sl and sl != 0:
                hi = mid - 1
            else:
                lo = mid
        if _sgn(h(lo)) != sl:
            cand.add(lo)
            cand.add(lo + 1)
    else:
        if h(0) == 0:
            f = _farther(q, pts[0], pts[1])
            return f, f
    valid = sorted(t for t in cand if _touch_ok(pts, q, t))
    if len(valid) < 2 or len(valid) > 2:
        valid = []
        for t in range(m):
            COUNTERS.locate_steps += 1
            if _touch_ok(pts, q, t):
                valid.append(t)
    if not valid:
        raise ValueError("no tangent exists (q inside the chain hull)")
    if len(valid) == 1:
        return pts[valid[0]], pts[valid[0]]
    return pts[valid[0]], pts[valid[-1]]
