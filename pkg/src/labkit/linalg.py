"""Small dense linear algebra: exact over Q(i) and modulo a prime."""

from __future__ import annotations

import random
from collections.abc import Sequence

from .poly import Poly
from .scalar import demote, scalar

# prime > 2**31 with p = 1 (mod 4), so -1 has a square root and Gaussian
# coefficients reduce consistently
PRIME = 2147483693
SQRT_M1 = 72742850


def rank_exact(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows)[1])


def row_echelon(rows: Sequence[Sequence]):
    """Reduced row echelon form over Q(i); returns (matrix, pivot columns)."""
    m = [[scalar(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [demote(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [demote(a - f * b) for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_exact(rows: Sequence[Sequence], rhs: Sequence) -> list | None:
    """Solve ``x @ rows = rhs`` (rhs as a combination of rows); None if not in span."""
    n = len(rows)
    if n == 0:
        return [] if not any(scalar(v) for v in rhs) else None
    # columns of the augmented system are the given rows
    ncols = len(rhs)
    aug = [[rows[j][c] for j in range(n)] + [rhs[c]] for c in range(ncols)]
    red, piv = row_echelon(aug)
    if n in piv:
        return None
    x = [scalar(0)] * n
    for i, col in enumerate(piv):
        x[col] = red[i][n]
    return x


def inverse_exact(mat: Sequence[Sequence]) -> list[list]:
    n = len(mat)
    aug = [list(mat[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    red, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def rank_mod(rows: Sequence[Sequence[int]], p: int = PRIME) -> int:
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(r + 1, len(m)):
            f = m[i][col]
            if f:
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def random_point(nvars: int, rng: random.Random, p: int = PRIME) -> list[int]:
    return [rng.randrange(p) for _ in range(nvars)]


def poly_matrix_rank_mod(mat: Sequence[Sequence[Poly]], point: Sequence[int], p: int = PRIME) -> int:
    return rank_mod([[e.evaluate_mod(point, p, SQRT_M1) for e in row] for row in mat], p)


def generic_rank(mat: Sequence[Sequence[Poly]], nvars: int, seed: int = 0, samples: int = 3) -> int:
    """Generic rank of a polynomial matrix by random prime-field evaluation.

    Takes the maximum over ``samples`` independent points (Schwartz-Zippel),
    and one extra exact evaluation at a small random integer point.
    """
    if not mat or not mat[0]:
        return 0
    rng = random.Random(seed)
    best = 0
    for _ in range(max(samples, 3)):
        best = max(best, poly_matrix_rank_mod(mat, random_point(nvars, rng)))
    small = [rng.randint(-50, 50) for _ in range(nvars)]
    exact = rank_exact([[e.evaluate(small) for e in row] for row in mat])
    return max(best, exact)

