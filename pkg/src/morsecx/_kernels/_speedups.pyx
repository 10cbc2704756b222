# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels: permutation cycles and int64 Smith normal form.

Entries are bounded by 2**31 so every product of two stays inside int64;
exceeding the bound raises OverflowError and the caller falls back to the
big-integer implementation.
"""

from libc.stdlib cimport malloc, free, llabs

cdef long long LIMIT = 1LL << 31


def perm_cycles(perm):
    cdef Py_ssize_t n = len(perm)
    cdef Py_ssize_t start, i
    cdef long long *p = <long long *>malloc(n * sizeof(long long) + 1)
    cdef char *seen = <char *>malloc(n + 1)
    if p == NULL or seen == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            p[i] = perm[i]
            seen[i] = 0
            if p[i] < 0 or p[i] >= n:
                raise ValueError("not a permutation")
        cycles = []
        for start in range(n):
            if seen[start]:
                continue
            cycle = []
            i = start
            while not seen[i]:
                seen[i] = 1
                cycle.append(i)
                i = p[i]
            if i != start:
                raise ValueError("not a permutation")
            cycles.append(cycle)
        return cycles
    finally:
        free(p)
        free(seen)


cdef class _Mat:
    cdef long long *d
    cdef Py_ssize_t rows, cols

    def __cinit__(self, Py_ssize_t rows, Py_ssize_t cols):
        self.rows = rows
        self.cols = cols
        self.d = <long long *>malloc(rows * cols * sizeof(long long) + 1)
        if self.d == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.d)

    cdef inline long long get(self, Py_ssize_t i, Py_ssize_t j):
        return self.d[i * self.cols + j]

    cdef void swap_rows(self, Py_ssize_t a, Py_ssize_t b):
        cdef Py_ssize_t k
        cdef long long t
        for k in range(self.cols):
            t = self.d[a * self.cols + k]
            self.d[a * self.cols + k] = self.d[b * self.cols + k]
            self.d[b * self.cols + k] = t

    cdef void swap_cols(self, Py_ssize_t a, Py_ssize_t b):
        cdef Py_ssize_t k
        cdef long long t
        for k in range(self.rows):
            t = self.d[k * self.cols + a]
            self.d[k * self.cols + a] = self.d[k * self.cols + b]
            self.d[k * self.cols + b] = t

    cdef int add_row(self, Py_ssize_t dst, Py_ssize_t src, long long c) except -1:
        cdef Py_ssize_t k
        cdef long long v
        for k in range(self.cols):
            v = self.d[src * self.cols + k]
            if v:
                v = self.d[dst * self.cols + k] + c * v
                if llabs(v) > LIMIT:
                    raise OverflowError("entry exceeds int64 kernel bound")
                self.d[dst * self.cols + k] = v
        return 0

    cdef int add_col(self, Py_ssize_t dst, Py_ssize_t src, long long c) except -1:
        cdef Py_ssize_t k
        cdef long long v
        for k in range(self.rows):
            v = self.d[k * self.cols + src]
            if v:
                v = self.d[k * self.cols + dst] + c * v
                if llabs(v) > LIMIT:
                    raise OverflowError("entry exceeds int64 kernel bound")
                self.d[k * self.cols + dst] = v
        return 0

    cdef void negate_row(self, Py_ssize_t r):
        cdef Py_ssize_t k
        for k in range(self.cols):
            self.d[r * self.cols + k] = -self.d[r * self.cols + k]

    def tolist(self):
        cdef Py_ssize_t i, j
        return [[self.d[i * self.cols + j] for j in range(self.cols)]
                for i in range(self.rows)]


cdef _Mat _identity(Py_ssize_t n):
    cdef _Mat M = _Mat(n, n)
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            M.d[i * n + j] = 1 if i == j else 0
    return M


def smith_form(A, bint transforms=True):
    cdef Py_ssize_t m = len(A)
    cdef Py_ssize_t n = len(A[0]) if m else 0
    cdef Py_ssize_t i, j, t, bi, bj, bad
    cdef long long a, p, babs
    cdef bint dirty
    cdef _Mat S = _Mat(m, n)
    cdef _Mat U = _identity(m if transforms else 0)
    cdef _Mat V = _identity(n if transforms else 0)

    for i in range(m):
        row = A[i]
        for j in range(n):
            a = row[j]
            if llabs(a) > LIMIT:
                raise OverflowError("entry exceeds int64 kernel bound")
            S.d[i * n + j] = a

    t = 0
    while t < m and t < n:
        babs = 0
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                a = llabs(S.d[i * n + j])
                if a and (babs == 0 or a < babs):
                    babs = a
                    bi = i
                    bj = j
                    if babs == 1:
                        break
            if babs == 1:
                break
        if babs == 0:
            break
        if bi != t:
            S.swap_rows(bi, t)
            if transforms:
                U.swap_rows(bi, t)
        if bj != t:
            S.swap_cols(bj, t)
            if transforms:
                V.swap_cols(bj, t)

        while True:
            p = S.d[t * n + t]
            dirty = False
            for i in range(t + 1, m):
                a = S.d[i * n + t]
                if a:
                    # cdivision is off, so // floors like Python
                    a = -(a // p)
                    S.add_row(i, t, a)
                    if transforms:
                        U.add_row(i, t, a)
                    if S.d[i * n + t]:
                        dirty = True
            for j in range(t + 1, n):
                a = S.d[t * n + j]
                if a:
                    a = -(a // p)
                    S.add_col(j, t, a)
                    if transforms:
                        V.add_col(j, t, a)
                    if S.d[t * n + j]:
                        dirty = True
            if dirty:
                babs = 0
                for i in range(t, m):
                    a = llabs(S.d[i * n + t])
                    if a and (babs == 0 or a < babs):
                        babs = a
                        bi = i
                        bj = t
                for j in range(t, n):
                    a = llabs(S.d[t * n + j])
                    if a and (babs == 0 or a < babs):
                        babs = a
                        bi = t
                        bj = j
                if bi != t:
                    S.swap_rows(bi, t)
                    if transforms:
                        U.swap_rows(bi, t)
                if bj != t:
                    S.swap_cols(bj, t)
                    if transforms:
                        V.swap_cols(bj, t)
                continue
            bad = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if S.d[i * n + j] % p:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            S.add_row(t, bad, 1)
            if transforms:
                U.add_row(t, bad, 1)

        if S.d[t * n + t] < 0:
            S.negate_row(t)
            if transforms:
                U.negate_row(t)
        t += 1

    if transforms:
        return S.tolist(), U.tolist(), V.tolist()
    return S.tolist(), None, None
