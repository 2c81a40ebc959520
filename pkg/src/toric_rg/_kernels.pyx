# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled decoding kernels.

Same signatures and bit-exact results as ``toric_rg._purepy``. Each step scans
every block of the stage, reads the syndrome snapshot, and records vertex
toggles in a buffer that is applied only when the step is complete.
"""

import numpy as np
cimport numpy as cnp

ctypedef unsigned char u8
ctypedef Py_ssize_t idx_t

cnp.import_array()


cdef inline void flip_h(u8[::1] e, idx_t m, idx_t x0, idx_t y0, idx_t g) noexcept nogil:
    cdef idx_t base = (y0 % m) * m + (x0 % m)
    cdef idx_t j
    for j in range(g):
        e[base + j] ^= 1


cdef inline void flip_v(u8[::1] e, idx_t m, idx_t x0, idx_t y0, idx_t g) noexcept nogil:
    cdef idx_t base = m * m + (y0 % m) * m + (x0 % m)
    cdef idx_t j
    for j in range(g):
        e[base + j * m] ^= 1


cdef inline idx_t vid(idx_t m, idx_t x, idx_t y) noexcept nogil:
    return (y % m) * m + (x % m)


cdef idx_t _stage(u8[::1] s, idx_t m, idx_t g, u8[::1] e, idx_t[::1] buf,
                  bint skip1, bint skip2) noexcept nogil:
    """One reduction stage in place on ``s``; returns the change in |s|."""
    cdef idx_t nb = m // (2 * g)
    cdef idx_t bx, by, X0, Y0, nt, t, delta = 0
    cdef idx_t a, b, c, d

    # Step 1: D cells pair diagonal corners.
    if not skip1:
        nt = 0
        for by in range(nb):
            Y0 = 2 * g * by
            for bx in range(nb):
                X0 = 2 * g * bx
                a = vid(m, X0 + g, Y0 + g)
                b = vid(m, X0 + 2 * g, Y0 + g)
                c = vid(m, X0 + g, Y0 + 2 * g)
                d = vid(m, X0 + 2 * g, Y0 + 2 * g)
                if s[a] and s[d]:
                    flip_v(e, m, X0 + g, Y0 + g, g)
                    flip_h(e, m, X0 + g, Y0 + 2 * g, g)
                    buf[nt] = a; buf[nt + 1] = d; nt += 2
                if s[b] and s[c]:
                    flip_h(e, m, X0 + g, Y0 + 2 * g, g)
                    flip_v(e, m, X0 + 2 * g, Y0 + g, g)
                    buf[nt] = b; buf[nt + 1] = c; nt += 2
        for t in range(nt):
            delta += -1 if s[buf[t]] else 1
            s[buf[t]] ^= 1

    # Step 2: C cells pair vertically, B cells horizontally.
    if not skip2:
        nt = 0
        for by in range(nb):
            Y0 = 2 * g * by
            for bx in range(nb):
                X0 = 2 * g * bx
                a = vid(m, X0, Y0 + g)
                b = vid(m, X0 + g, Y0 + g)
                c = vid(m, X0, Y0 + 2 * g)
                d = vid(m, X0 + g, Y0 + 2 * g)
                if s[a] and s[c]:
                    flip_v(e, m, X0, Y0 + g, g)
                    buf[nt] = a; buf[nt + 1] = c; nt += 2
                if s[b] and s[d]:
                    flip_v(e, m, X0 + g, Y0 + g, g)
                    buf[nt] = b; buf[nt + 1] = d; nt += 2
                a = vid(m, X0 + g, Y0)
                b = vid(m, X0 + 2 * g, Y0)
                c = vid(m, X0 + g, Y0 + g)
                d = vid(m, X0 + 2 * g, Y0 + g)
                if s[a] and s[b]:
                    flip_h(e, m, X0 + g, Y0, g)
                    buf[nt] = a; buf[nt + 1] = b; nt += 2
                if s[c] and s[d]:
                    flip_h(e, m, X0 + g, Y0 + g, g)
                    buf[nt] = c; buf[nt + 1] = d; nt += 2
        for t in range(nt):
            delta += -1 if s[buf[t]] else 1
            s[buf[t]] ^= 1

    # Step 3: A cells shift leftovers to the block anchor.
    nt = 0
    for by in range(nb):
        Y0 = 2 * g * by
        for bx in range(nb):
            X0 = 2 * g * bx
            a = vid(m, X0, Y0)
            b = vid(m, X0 + g, Y0)
            c = vid(m, X0, Y0 + g)
            d = vid(m, X0 + g, Y0 + g)
            if s[b]:
                flip_h(e, m, X0, Y0, g)
                buf[nt] = b; buf[nt + 1] = a; nt += 2
            if s[c]:
                flip_v(e, m, X0, Y0, g)
                buf[nt] = c; buf[nt + 1] = a; nt += 2
            if s[d]:
                flip_h(e, m, X0, Y0 + g, g)
                flip_v(e, m, X0, Y0, g)
                buf[nt] = d; buf[nt + 1] = a; nt += 2
    for t in range(nt):
        delta += -1 if s[buf[t]] else 1
        s[buf[t]] ^= 1
    return delta


def syndrome(bits, idx_t m):
    """Odd-degree vertex indicator (uint8, length m*m) of an edge vector."""
    cdef const u8[::1] e = np.ascontiguousarray(bits, dtype=np.uint8)
    out = np.zeros(m * m, dtype=np.uint8)
    cdef u8[::1] s = out
    cdef idx_t x, y, mm = m * m
    with nogil:
        for y in range(m):
            for x in range(m):
                if e[y * m + x]:
                    s[y * m + x] ^= 1
                    s[y * m + (x + 1) % m] ^= 1
                if e[mm + y * m + x]:
                    s[y * m + x] ^= 1
                    s[((y + 1) % m) * m + x] ^= 1
    return out


def reduce_stage(synd, idx_t m, idx_t g, ebits, bint skip1=False, bint skip2=False):
    """Dense reduction stage; flips into ``ebits`` in place, returns new syndrome."""
    out = np.array(synd, dtype=np.uint8, copy=True)
    cdef u8[::1] s = out
    cdef u8[::1] e = ebits
    cdef idx_t nb = m // (2 * g)
    cdef idx_t[::1] buf = np.empty(max(8 * nb * nb, 8), dtype=np.intp)
    with nogil:
        _stage(s, m, g, e, buf, skip1, skip2)
    return out


cdef idx_t _decode(u8[::1] s, idx_t m, idx_t k, u8[::1] e, idx_t[::1] buf,
                   bint skip1, bint skip2) noexcept nogil:
    cdef idx_t count = 0, v, i, g
    for v in range(m * m):
        count += s[v]
    i = k
    while count > 0 and i > 0:
        g = (<idx_t>1) << (k - i)
        count += _stage(s, m, g, e, buf, skip1, skip2)
        i -= 1
    return count


def decode(synd, idx_t m, idx_t k, bint skip1=False, bint skip2=False):
    """Dense full decode; returns the correction as a uint8 edge vector."""
    work = np.array(synd, dtype=np.uint8, copy=True)
    ebits = np.zeros(2 * m * m, dtype=np.uint8)
    cdef u8[::1] s = work
    cdef u8[::1] e = ebits
    cdef idx_t[::1] buf = np.empty(max(2 * m * m, 8), dtype=np.intp)
    with nogil:
        _decode(s, m, k, e, buf, skip1, skip2)
    return ebits


def homology(bits, idx_t m):
    """Winding parities (windH, windV) of an edge vector."""
    cdef const u8[::1] e = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef idx_t j, wh = 0, wv = 0, mm = m * m
    for j in range(m):
        wh ^= e[j * m + m - 1]
        wv ^= e[mm + (m - 1) * m + j]
    return int(wh), int(wv)


def trial_fails(bits, idx_t m, idx_t k):
    """Decode the syndrome of ``bits`` and report a nontrivial residual."""
    cdef const u8[::1] err = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef idx_t mm = m * m, x, y, j, wh = 0, wv = 0
    synd = np.zeros(mm, dtype=np.uint8)
    ebits = np.zeros(2 * mm, dtype=np.uint8)
    cdef u8[::1] s = synd
    cdef u8[::1] e = ebits
    cdef idx_t[::1] buf = np.empty(max(2 * mm, 8), dtype=np.intp)
    with nogil:
        for y in range(m):
            for x in range(m):
                if err[y * m + x]:
                    s[y * m + x] ^= 1
                    s[y * m + (x + 1) % m] ^= 1
                if err[mm + y * m + x]:
                    s[y * m + x] ^= 1
                    s[((y + 1) % m) * m + x] ^= 1
        _decode(s, m, k, e, buf, False, False)
        for j in range(m):
            wh ^= err[j * m + m - 1] ^ e[j * m + m - 1]
            wv ^= err[mm + (m - 1) * m + j] ^ e[mm + (m - 1) * m + j]
    return wh != 0 or wv != 0
