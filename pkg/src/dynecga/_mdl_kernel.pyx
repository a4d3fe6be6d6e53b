# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pairwise merge scoring for the greedy MDL model search."""

from libc.stdlib cimport calloc, malloc, free


def pair_clogc(const int[:, ::1] labels, const long long[::1] card,
               const long long[::1] ia, const long long[::1] ib,
               const double[::1] clogc, double[::1] out, int[::1] workspace=None):
    """For each slot pair ``(ia[p], ib[p])`` store sum_c c*log2(c) over the
    joint configuration counts of the two groups in ``out[p]``.

    ``labels[s, i]`` is the compact configuration label of individual ``i``
    in group slot ``s``; ``card[s]`` bounds the labels of slot ``s``.
    ``workspace`` must be all zeros and at least as long as the largest
    ``card[a] * card[b]``; it is left zeroed on return.
    """
    cdef Py_ssize_t n = labels.shape[1]
    cdef Py_ssize_t npairs = ia.shape[0]
    cdef Py_ssize_t p, i
    cdef long long size, biggest = 1
    cdef int db, key, c
    cdef double s
    cdef const int* la
    cdef const int* lb
    cdef int* counts
    cdef int* keys

    if ib.shape[0] != npairs or out.shape[0] < npairs:
        raise ValueError("pair index arrays and output must have equal length")
    for p in range(npairs):
        size = card[ia[p]] * card[ib[p]]
        if size > biggest:
            biggest = size
    if biggest > 2147483647:
        raise OverflowError("joint configuration space too large")
    cdef bint owned = workspace is None
    if owned:
        counts = <int*> calloc(biggest, sizeof(int))
    else:
        if workspace.shape[0] < biggest:
            raise ValueError("workspace too small")
        counts = &workspace[0]
    keys = <int*> malloc(max(n, 1) * sizeof(int))
    if counts == NULL or keys == NULL:
        if owned:
            free(counts)
        free(keys)
        raise MemoryError()
    try:
        with nogil:
            for p in range(npairs):
                la = &labels[ia[p], 0]
                lb = &labels[ib[p], 0]
                db = <int> card[ib[p]]
                for i in range(n):
                    key = la[i] * db + lb[i]
                    keys[i] = key
                    counts[key] += 1
                s = 0.0
                for i in range(n):
                    key = keys[i]
                    c = counts[key]
                    if c:
                        s += clogc[c]
                        counts[key] = 0
                out[p] = s
    finally:
        if owned:
            free(counts)
        free(keys)
