"""Seeded polygon generators for tests, benchmarks and the CLI."""

import random

from .geom import Polygon, comb


class GenerationFailed(RuntimeError):
    pass


def gen_polygon(kind, n, seed):
    """Deterministic simple polygon of the requested kind.

    kinds: random (2-opt untangling; jagged star above the 2-opt size
    cutoff), convex, comb (n rounded down to a multiple of 4), spiral
    (axis-aligned rectangular spiral).
    """
    if n < 3:
        raise GenerationFailed("n must be >= 3")
    rng = random.Random((kind, n, seed).__repr__())
    if kind == "convex":
        return _gen_convex(n, rng)
    if kind == "comb":
        return comb(max(1, n // 4))
    if kind == "spiral":
        return _gen_spiral(n)
    if kind == "random":
        if n <= 256:
            return _gen_2opt(n, rng)
        return _gen_star(n, rng)
    raise GenerationFailed("unknown kind %r" % (kind,))


# --- convex: random integer vectors summing to zero, angle-sorted -----------


def _angle_key(v):
    x, y = v
    if y > 0 or (y == 0 and x > 0):
        half = 0
    else:
        half = 1
    return (half, -x if half == 0 else x, y)


def _angle_sort(vecs):
    # exact angular sort: split into halves, then comparison by cross
    import functools

    def halfcmp(a, b):
        ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
        hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
        if ha != hb:
            return -1 if ha < hb else 1
        c = a[0] * b[1] - a[1] * b[0]
        if c > 0:
            return -1
        if c < 0:
            return 1
        return 0

    return sorted(vecs, key=functools.cmp_to_key(halfcmp))


def _gen_convex(n, rng):
    for _ in range(64):
        vecs = []
        seen_dirs = set()
        while len(vecs) < n - 1:
            v = (rng.randint(-4 * n, 4 * n), rng.randint(-4 * n, 4 * n))
            if v == (0, 0):
                continue
            from math import gcd
            g = gcd(abs(v[0]), abs(v[1]))
            d = (v[0] // g, v[1] // g)
            if d in seen_dirs:
                continue
            seen_dirs.add(d)
            vecs.append(v)
        last = (-sum(v[0] for v in vecs), -sum(v[1] for v in vecs))
        if last == (0, 0):
            continue
        from math import gcd
        g = gcd(abs(last[0]), abs(last[1]))
        if (last[0] // g, last[1] // g) in seen_dirs:
            continue
        vecs.append(last)
        vecs = _angle_sort(vecs)
        pts = [(0, 0)]
        for v in vecs[:-1]:
            pts.append((pts[-1][0] + v[0], pts[-1][1] + v[1]))
        poly = Polygon(pts)
        if not poly.is_ccw():
            poly = poly.reversed()
        # strictly convex (every turn left) implies simple, so the
        # quadratic simplicity check is unnecessary
        m = len(pts)
        if all(_cross_i(poly.vertices[i - 1], poly.vertices[i],
                        poly.vertices[(i + 1) % m]) > 0 for i in range(m)):
            return poly
    raise GenerationFailed("convex generation did not converge")


# --- random: 2-opt untangling of a random cycle ------------------------------


def _cross_i(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _gen_points_general_position(n, rng):
    span = max(20, 6 * n)
    pts = []
    tries = 0
    while len(pts) < n:
        tries += 1
        if tries > 200 * n:
            raise GenerationFailed("point sampling stalled")
        p = (rng.randint(0, span), rng.randint(0, span))
        if p in pts:
            continue
        if any(_cross_i(a, b, p) == 0 for i, a in enumerate(pts)
               for b in pts[i + 1:]):
            continue
        pts.append(p)
    return pts


def _segments_cross(a, b, c, d):
    o1, o2 = _cross_i(a, b, c), _cross_i(a, b, d)
    o3, o4 = _cross_i(c, d, a), _cross_i(c, d, b)
    return ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0))


def _gen_2opt(n, rng):
    pts = _gen_points_general_position(n, rng)
    rng.shuffle(pts)
    # untangle: reverse the sub-tour between any two crossing edges
    for _ in range(50 * n * n):
        crossing = None
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                c, d = pts[j], pts[(j + 1) % n]
                if _segments_cross(a, b, c, d):
                    crossing = (i, j)
                    break
            if crossing:
                break
        if crossing is None:
            poly = Polygon(pts)
            if not poly.is_ccw():
                poly = poly.reversed()
            if poly.validate():
                raise GenerationFailed("2-opt produced an invalid polygon")
            return poly
        i, j = crossing
        pts[i + 1:j + 1] = reversed(pts[i + 1:j + 1])
    raise GenerationFailed("2-opt did not converge")


# --- large random: jagged star (angle-sorted random radii) -------------------


def _gen_star(n, rng):
    from math import gcd
    dirs = {}
    m = 8 * n
    while len(dirs) < n:
        v = (rng.randint(-m, m), rng.randint(-m, m))
        if v == (0, 0):
            continue
        g = gcd(abs(v[0]), abs(v[1]))
        d = (v[0] // g, v[1] // g)
        if d not in dirs:
            dirs[d] = rng.randint(1, 50)
    vecs = _angle_sort(list(dirs.keys()))
    pts = []
    for d in vecs:
        k = dirs[d]
        pts.append((k * d[0], k * d[1]))
    poly = Polygon(pts)
    if not poly.is_ccw():
        poly = poly.reversed()
    return poly


# --- spiral: axis-aligned rectangular spiral ---------------------------------


def _gen_spiral(n):
    # unit-cell corridor spiralling outward (arm spacing one cell); the
    # polygon is the boundary of the cell union, so it is simple by
    # construction; vertex count is the closest realizable value to n
    runs = max(4, n // 2)
    cells = [(0, 0)]
    x = y = 0
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    for k in range(runs):
        dx, dy = dirs[k % 4]
        length = 2 * (k // 2 + 1)
        for _ in range(length):
            x += dx
            y += dy
            cells.append((x, y))
    pts = _cell_union_boundary(set(cells))
    poly = Polygon(pts)
    if not poly.is_ccw():
        poly = poly.reversed()
    # the boundary of a simply connected cell union is simple by
    # construction; the quadratic check stays as a guard at small sizes
    if poly.n <= 512 and poly.validate():
        raise GenerationFailed("spiral construction invalid")
    return poly


def _cell_union_boundary(cells):
    """Boundary cycle of a union of unit cells, collinear corners removed.

    Assumes the union is simply connected and no two cells touch only
    at a corner (true for the spiral corridor).
    """
    nxt = {}
    for cx, cy in cells:
        sides = [((cx, cy), (cx + 1, cy), (0, -1)),
                 ((cx + 1, cy), (cx + 1, cy + 1), (1, 0)),
                 ((cx + 1, cy + 1), (cx, cy + 1), (0, 1)),
                 ((cx, cy + 1), (cx, cy), (-1, 0))]
        for a, b, (ox, oy) in sides:
            if (cx + ox, cy + oy) not in cells:
                nxt[a] = b
    start = min(nxt)
    loop = [start]
    cur = nxt[start]
    while cur != start:
        loop.append(cur)
        cur = nxt[cur]
    out = []
    m = len(loop)
    for i, p in enumerate(loop):
        a, b = loop[i - 1], loop[(i + 1) % m]
        if (p[0] - a[0]) * (b[1] - a[1]) != (p[1] - a[1]) * (b[0] - a[0]):
            out.append(p)
    return out
