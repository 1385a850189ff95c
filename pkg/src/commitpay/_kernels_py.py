"""Pure-Python integer pivoting kernels.

Tableaux are lists of rows of Python ints sharing one positive denominator
``det``; the real value of an entry is ``T[i][j] / det``.  Pivoting follows
Edmonds' fraction-free scheme, so every division below is exact.
"""


def pivot(T, r, q, det):
    """Pivot ``T`` in place on row ``r``, column ``q``; return the new denominator."""
    prow = T[r]
    p = prow[q]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[q]
        if f:
            T[i] = [(a * p - f * b) // det for a, b in zip(row, prow)]
        elif p != det:
            T[i] = [a * p // det for a in row]
    if p < 0:
        for i, row in enumerate(T):
            T[i] = [-a for a in row]
        p = -p
    return p


def solve_square(M, rhs):
    """Solve ``M x = rhs`` over the integers' fraction field.

    Returns ``(numerators, den)`` with ``x[i] == numerators[i] / den`` and
    ``den > 0``, or ``None`` when ``M`` is singular.  Inputs are not modified.
    """
    n = len(M)
    T = [list(row) + [b] for row, b in zip(M, rhs)]
    det = 1
    for k in range(n):
        for s in range(k, n):
            if T[s][k]:
                break
        else:
            return None
        if s != k:
            T[k], T[s] = T[s], T[k]
        det = pivot(T, k, k, det)
    return [T[i][n] for i in range(n)], det
