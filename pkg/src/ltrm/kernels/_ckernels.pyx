# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled interval kernels; same contracts as ``_pykernels``."""

from libc.stdlib cimport malloc, free, qsort


cdef struct Item:
    long long g
    long long s
    long long e
    Py_ssize_t i


cdef int _cmp(const void* pa, const void* pb) noexcept nogil:
    cdef const Item* a = <const Item*> pa
    cdef const Item* b = <const Item*> pb
    if a.g != b.g:
        return -1 if a.g < b.g else 1
    if a.s != b.s:
        return -1 if a.s < b.s else 1
    if a.e != b.e:
        return -1 if a.e < b.e else 1
    if a.i != b.i:
        return -1 if a.i < b.i else 1
    return 0


cdef Item* _sorted(const long long[:] groups, const long long[:] starts,
                   const long long[:] ends, Py_ssize_t n) except NULL:
    cdef Item* items = <Item*> malloc((n if n > 0 else 1) * sizeof(Item))
    cdef Py_ssize_t k
    if items == NULL:
        raise MemoryError()
    for k in range(n):
        items[k].g = groups[k]
        items[k].s = starts[k]
        items[k].e = ends[k]
        items[k].i = k
    qsort(items, n, sizeof(Item), _cmp)
    return items


def contains_point(const long long[:] starts, const long long[:] ends, long long t):
    cdef Py_ssize_t i, n = starts.shape[0]
    out = []
    for i in range(n):
        if starts[i] <= t and t <= ends[i]:
            out.append(i)
    return out


def overlapping(const long long[:] starts, const long long[:] ends, long long lo, long long hi):
    cdef Py_ssize_t i, n = starts.shape[0]
    cdef long long s, e
    out = []
    for i in range(n):
        s = starts[i]
        e = ends[i]
        if s <= e and (s if s > lo else lo) <= (e if e < hi else hi):
            out.append(i)
    return out


def overlap_pairs(const long long[:] groups, const long long[:] starts, const long long[:] ends):
    cdef Py_ssize_t n = starts.shape[0]
    cdef Py_ssize_t a, b
    cdef Item* items = _sorted(groups, starts, ends, n)
    cdef Item x, y
    pairs = []
    try:
        for a in range(n):
            x = items[a]
            if x.s > x.e:
                continue
            for b in range(a + 1, n):
                y = items[b]
                if y.g != x.g or y.s > x.e:
                    break
                if y.s <= y.e:
                    if x.i < y.i:
                        pairs.append((x.i, y.i))
                    else:
                        pairs.append((y.i, x.i))
    finally:
        free(items)
    pairs.sort()
    return pairs


def coalesce_runs(const long long[:] groups, const long long[:] starts, const long long[:] ends):
    cdef Py_ssize_t n = starts.shape[0]
    cdef Py_ssize_t k, current = -1, nruns = 0
    cdef long long current_group = 0, current_end = 0
    cdef Item* items = _sorted(groups, starts, ends, n)
    cdef Item x
    run_of = [0] * n
    run_starts = []
    run_ends = []
    try:
        for k in range(n):
            x = items[k]
            if x.s > x.e:
                run_of[x.i] = nruns
                run_starts.append(x.s)
                run_ends.append(x.e)
                nruns += 1
                continue
            if current >= 0 and x.g == current_group and x.s <= current_end + 1:
                if x.e > current_end:
                    current_end = x.e
                    run_ends[current] = x.e
            else:
                current = nruns
                current_group = x.g
                current_end = x.e
                run_starts.append(x.s)
                run_ends.append(x.e)
                nruns += 1
            run_of[x.i] = current
    finally:
        free(items)
    return run_of, run_starts, run_ends
