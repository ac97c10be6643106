"""Exact Gaussian elimination over any field whose elements support + - * / and bool.

Used with GaussRat entries (complex computations) and Fraction entries
(real tangent spaces).
"""


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols, zero, one):
    """Basis of {v : rows . v = 0}, as a list of vectors of length ncols."""
    if not rows:
        return [[one if j == i else zero for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), start=0 * row[0]) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), start=0 * row[0]) for row in a]


def solve_combination(rows, target):
    """Coefficients c with sum c_i rows[i] = target, or None if target is not in the span."""
    k = len(rows)
    if k == 0:
        return None if any(target) else []
    # columns of the augmented system are the given rows
    aug = [[rows[i][j] for i in range(k)] + [target[j]] for j in range(len(target))]
    m, pivots = rref(aug)
    if k in pivots:
        return None
    zero = 0 * target[0]
    coeffs = [zero] * k
    for r, p in enumerate(pivots):
        coeffs[p] = m[r][k]
    return coeffs
