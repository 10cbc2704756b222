"""Pure-Python reference kernels.

These are the fallback when the compiled extension is unavailable, and the
baseline the compiled kernels are cross-checked against.
"""


def perm_cycles(perm):
    """Return the cycles of a permutation of ``range(len(perm))``.

    Each cycle starts at its smallest element; cycles are listed by that
    element.
    """
    n = len(perm)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cycle = []
        i = start
        while not seen[i]:
            seen[i] = True
            cycle.append(i)
            i = perm[i]
        if i != start:
            raise ValueError("not a permutation")
        cycles.append(cycle)
    return cycles


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_form(A, transforms=True):
    """Smith normal form over the integers.

    Parameters
    ----------
    A : list of list of int
        ``m x n`` integer matrix (rows may be empty).
    transforms : bool
        If false, ``U`` and ``V`` are not accumulated and returned as None.

    Returns
    -------
    S, U, V
        ``U @ A @ V == S`` with ``S`` diagonal, non-negative, and each
        diagonal entry dividing the next.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(map(int, row)) for row in A]
    U = _identity(m) if transforms else None
    V = _identity(n) if transforms else None

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        if transforms:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        if transforms:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row[dst] += c * row[src]
        rd, rs = S[dst], S[src]
        for k in range(n):
            if rs[k]:
                rd[k] += c * rs[k]
        if transforms:
            ud, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ud[k] += c * us[k]

    def add_col(dst, src, c):
        for row in S:
            if row[src]:
                row[dst] += c * row[src]
        if transforms:
            for row in V:
                if row[src]:
                    row[dst] += c * row[src]

    t = 0
    while t < m and t < n:
        # pivot: least non-zero absolute value in the trailing block
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                a = row[j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)

        while True:
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                a = S[i][t]
                if a:
                    add_row(i, t, -(a // p))
                    if S[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                a = S[t][j]
                if a:
                    add_col(j, t, -(a // p))
                    if S[t][j]:
                        dirty = True
            if dirty:
                # a smaller remainder appeared: move it to the pivot slot
                best = None
                for i in range(t, m):
                    a = S[i][t]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, t)
                for j in range(t, n):
                    a = S[t][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), t, j)
                _, i, j = best
                if i != t:
                    swap_rows(i, t)
                if j != t:
                    swap_cols(j, t)
                continue
            # row and column cleared; enforce divisibility of the rest
            bad = None
            for i in range(t + 1, m):
                row = S[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)

        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            if transforms:
                U[t] = [-x for x in U[t]]
        t += 1
    return S, U, V
