"""Slow, independent re-implementations used as test oracles."""

from collections import deque


def naive_syndrome(m, edge_ids):
    """Vertex ids with odd degree, computed from coordinates."""
    deg = {}
    for e in edge_ids:
        if e < m * m:
            x, y = e % m, e // m
            ends = [(x, y), ((x + 1) % m, y)]
        else:
            f = e - m * m
            x, y = f % m, f // m
            ends = [(x, y), (x, (y + 1) % m)]
        for vx, vy in ends:
            deg[vy * m + vx] = deg.get(vy * m + vx, 0) + 1
    return {v for v, d in deg.items() if d % 2}


def _faces(m):
    for y in range(m):
        for x in range(m):
            yield [y * m + x, ((y + 1) % m) * m + x, m * m + y * m + x, m * m + y * m + (x + 1) % m]


def _as_int(edge_ids):
    v = 0
    for e in edge_ids:
        v ^= 1 << e
    return v


def _reduce(basis, v):
    for pivot in sorted(basis, reverse=True):
        if v >> pivot & 1:
            v ^= basis[pivot]
    return v


def face_span_basis(m):
    basis = {}
    for f in _faces(m):
        v = _reduce(basis, _as_int(f))
        if v:
            basis[v.bit_length() - 1] = v
    return basis


def gf2_homology(m, edge_ids, basis=None):
    """Class (a, b) such that cycle + a*column + b*row lies in the span of the faces."""
    basis = basis or face_span_basis(m)
    c = _as_int(edge_ids)
    row = _as_int(range(m))  # H(x, 0): crosses the vertical cut once
    col = _as_int(m * m + y * m for y in range(m))  # V(0, y)
    for a in (0, 1):
        for b in (0, 1):
            if _reduce(basis, c ^ (col if b else 0) ^ (row if a else 0)) == 0:
                return a, b
    raise AssertionError("not a cycle")


def bfs_distance(m, g, a, b):
    """Graph distance on the coarse torus with spacing g, by breadth-first search."""
    M = m // g
    start = ((a % m) // g, (a // m) // g)
    goal = ((b % m) // g, (b // m) // g)
    seen = {start: 0}
    q = deque([start])
    while q:
        x, y = q.popleft()
        if (x, y) == goal:
            return seen[(x, y)]
        for nx, ny in ((x + 1) % M, y), ((x - 1) % M, y), (x, (y + 1) % M), (x, (y - 1) % M):
            if (nx, ny) not in seen:
                seen[(nx, ny)] = seen[(x, y)] + 1
                q.append((nx, ny))
    raise AssertionError("unreachable")


def wilson(x, n, z=1.959963984540054):
    """95% Wilson score interval from the closed-form expression."""
    ph = x / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * ((ph * (1 - ph) / n + z * z / (4 * n * n)) ** 0.5) / den
    return centre - half, centre + half
