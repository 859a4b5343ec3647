# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled channel kernels. Same contracts as ``_pykernels``."""

from libc.stdlib cimport free, malloc



def respond(const signed char[:, ::1] signals, const signed char[::1] mask,
            long long[::1] out):
    cdef Py_ssize_t n = signals.shape[0]
    cdef Py_ssize_t width = signals.shape[1]
    cdef Py_ssize_t i, j, c, ncon = 0
    cdef Py_ssize_t count = 0, first = -1
    cdef bint hit
    cdef Py_ssize_t *con
    if mask.shape[0] != width or out.shape[0] != width:
        raise ValueError("signals, mask and out must share one width")

    con = <Py_ssize_t *> malloc(max(width, 1) * sizeof(Py_ssize_t))
    if con == NULL:
        raise MemoryError()
    try:
        for j in range(width):
            if mask[j] != 0:
                con[ncon] = j
                ncon += 1
            out[j] = 0
        for i in range(n):
            hit = True
            for c in range(ncon):
                j = con[c]
                if signals[i, j] != mask[j]:
                    hit = False
                    break
            if hit:
                if count == 0:
                    first = i
                count += 1
                for j in range(width):
                    out[j] += signals[i, j]
    finally:
        free(con)
    return count, first


def split_scan(const long long[::1] answer):
    cdef Py_ssize_t width = answer.shape[0]
    cdef Py_ssize_t j, p1 = -1, p2 = -1
    cdef long long v, m1 = -1, m2 = -1
    for j in range(width):
        v = answer[j] if answer[j] >= 0 else -answer[j]
        if v > m1:
            m1 = v
            p1 = j
    for j in range(width):
        v = answer[j] if answer[j] >= 0 else -answer[j]
        if v < m1 and v > m2:
            m2 = v
            p2 = j
    return m1, p1, m2, p2
