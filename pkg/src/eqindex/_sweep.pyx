# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled binomial sweeps on dense int64 coefficient grids.

Both kernels act in place on a C-contiguous (nx, ny) int64 grid whose row
index is the q-numerator and column index the g-numerator.  Any signed
64-bit overflow raises OverflowError so the caller can redo the whole
computation with arbitrary-precision integers.
"""

cdef extern from *:
    """
    static inline int eqi_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int eqi_add_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    static inline int eqi_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int eqi_mul_ovf(long long a, long long b, long long *r) nogil
    int eqi_add_ovf(long long a, long long b, long long *r) nogil
    int eqi_sub_ovf(long long a, long long b, long long *r) nogil


cdef int _poly_once(long long[:, ::1] g, Py_ssize_t da, Py_ssize_t dw,
                    long long s) nogil:
    cdef Py_ssize_t nx = g.shape[0], ny = g.shape[1]
    cdef Py_ssize_t x, y, x0, y0, xs, ys
    cdef long long t, r
    cdef bint desc = da > 0 or (da == 0 and dw > 0)
    for xs in range(nx):
        x = nx - 1 - xs if desc else xs
        x0 = x - da
        if x0 < 0 or x0 >= nx:
            continue
        for ys in range(ny):
            y = ny - 1 - ys if desc else ys
            y0 = y - dw
            if y0 < 0 or y0 >= ny:
                continue
            if g[x0, y0] == 0:
                continue
            if eqi_mul_ovf(s, g[x0, y0], &t):
                return 1
            if eqi_sub_ovf(g[x, y], t, &r):
                return 1
            g[x, y] = r
    return 0


cdef int _geom_once(long long[:, ::1] g, Py_ssize_t da, Py_ssize_t dw,
                    long long s) nogil:
    cdef Py_ssize_t nx = g.shape[0], ny = g.shape[1]
    cdef Py_ssize_t x, y, x0, y0
    cdef long long t, r
    for x in range(nx):
        x0 = x - da
        if x0 < 0:
            continue
        for y in range(ny):
            y0 = y - dw
            if y0 < 0 or y0 >= ny:
                continue
            if g[x0, y0] == 0:
                continue
            if eqi_mul_ovf(s, g[x0, y0], &t):
                return 1
            if eqi_add_ovf(g[x, y], t, &r):
                return 1
            g[x, y] = r
    return 0


def poly_sweep(long long[:, ::1] grid, Py_ssize_t da, Py_ssize_t dw,
               long long s, int k):
    """Multiply the grid by (1 - s q^da g^dw)^k in place."""
    cdef int i, bad = 0
    with nogil:
        for i in range(k):
            bad = _poly_once(grid, da, dw, s)
            if bad:
                break
    if bad:
        raise OverflowError("int64 overflow in poly_sweep")


def geom_sweep(long long[:, ::1] grid, Py_ssize_t da, Py_ssize_t dw,
               long long s, int k):
    """Divide the grid by (1 - s q^da g^dw)^k in place; (da, dw) > (0, 0)."""
    if not (da > 0 or (da == 0 and dw > 0)):
        raise ValueError("geom_sweep needs a lexicographically positive step")
    cdef int i, bad = 0
    with nogil:
        for i in range(k):
            bad = _geom_once(grid, da, dw, s)
            if bad:
                break
    if bad:
        raise OverflowError("int64 overflow in geom_sweep")
