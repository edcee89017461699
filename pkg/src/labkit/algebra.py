"""Lie algebras given by structure constants, and their Lie-Poisson calculus.

Sign convention: the bracket of polynomials on the dual space is the
Lie-Poisson bracket with ``pb(x_i, x_j) = sum_k C_ij^k x_k``.  With the
differential operators ``X_i^ = C_ij^k x_k d/dx_j`` this gives
``pb(x_l, h) = X_l^(h)`` and ``pb(f, g) = sum_i df/dx_i * X_i^(g)``.
Vanishing of the bracket does not depend on the overall sign.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from gmpy2 import mpq

from .linalg import generic_rank, inverse_exact
from .poly import BITS, Poly, _clean
from .scalar import demote, format_scalar, scalar

__all__ = [
    "LieAlgebra",
    "ValidationReport",
    "validate",
    "adjoint_matrix",
    "invariant_count",
    "diffop_apply",
    "is_invariant",
    "berezin_bracket",
    "change_basis",
    "direct_sum",
    "so3",
    "heisenberg",
    "sl3",
    "abelian",
]

_ZERO = mpq(0)


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class LieAlgebra:
    """Lie algebra with basis X_0..X_{n-1} and ``[X_i, X_j] = sum_k C_ij^k X_k``.

    ``brackets`` stores only pairs with ``i < j``; the rest follow from
    antisymmetry.
    """

    name: str
    dim: int
    names: tuple[str, ...]
    brackets: Mapping[tuple[int, int], tuple[tuple[int, object], ...]]
    _adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 0:
            raise AlgebraError("dimension must be non-negative")
        if len(self.names) != self.dim:
            raise AlgebraError(f"{len(self.names)} names for dimension {self.dim}")
        clean = {}
        for (i, j), terms in self.brackets.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise AlgebraError(f"bracket index ({i}, {j}) out of range")
            if i >= j:
                raise AlgebraError(f"bracket key ({i}, {j}) must have i < j")
            acc: dict[int, object] = {}
            for k, c in terms:
                if not 0 <= k < self.dim:
                    raise AlgebraError(f"structure constant index {k} out of range in [{i},{j}]")
                acc[k] = demote(acc.get(k, _ZERO) + scalar(c))
            acc = {k: c for k, c in sorted(acc.items()) if c}
            if acc:
                clean[(i, j)] = tuple(acc.items())
        object.__setattr__(self, "brackets", dict(sorted(clean.items())))
        adj: list[list] = [[] for _ in range(self.dim)]
        for (i, j), terms in self.brackets.items():
            adj[i].append((j, terms))
            adj[j].append((i, tuple((k, -c) for k, c in terms)))
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a, key=lambda t: t[0])) for a in adj))

    @classmethod
    def from_table(cls, name: str, names: Sequence[str], table: Mapping) -> LieAlgebra:
        """Build from ``{(i, j): {k: c}}`` with pairs in either order."""
        acc: dict[tuple[int, int], dict[int, object]] = {}
        for (i, j), terms in table.items():
            if i == j:
                if any(scalar(c) for c in dict(terms).values()):
                    raise AlgebraError(f"diagonal bracket [{i},{i}] must vanish")
                continue
            sign = 1 if i < j else -1
            key = (min(i, j), max(i, j))
            slot = acc.setdefault(key, {})
            items = terms.items() if isinstance(terms, Mapping) else terms
            for k, c in items:
                slot[k] = slot.get(k, _ZERO) + sign * scalar(c)
        return cls(name, len(names), tuple(names), {k: tuple(v.items()) for k, v in acc.items()})

    def bracket(self, i: int, j: int) -> dict[int, object]:
        """Coefficients of ``[X_i, X_j]``."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), ()))
        return {k: -c for k, c in self.brackets.get((j, i), ())}

    def bracket_vectors(self, u: Sequence, v: Sequence) -> list:
        """Bracket of two linear combinations of generators (coefficient lists)."""
        out = [_ZERO] * self.dim
        for (i, j), terms in self.brackets.items():
            w = scalar(u[i]) * scalar(v[j]) - scalar(u[j]) * scalar(v[i])
            if w:
                for k, c in terms:
                    out[k] = out[k] + w * c
        return [demote(x) for x in out]

    def neighbours(self, i: int):
        """Nonzero brackets ``[X_i, X_j]`` as ``(j, ((k, c), ...))``."""
        return self._adj[i]

    def commutes(self, i: int, j: int) -> bool:
        return i == j or (min(i, j), max(i, j)) not in self.brackets

    # -- json ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "generators": list(self.names),
            "brackets": [
                {"i": i, "j": j, "terms": [{"k": k, "c": format_scalar(c)} for k, c in terms]}
                for (i, j), terms in self.brackets.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> LieAlgebra:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            dim = int(data["dim"])
            names = data.get("generators") or [f"X{k}" for k in range(dim)]
            br = {}
            for entry in data.get("brackets", []):
                i, j = int(entry["i"]), int(entry["j"])
                if i >= j:
                    raise AlgebraError(f"bracket entry ({i}, {j}) must have i < j")
                terms = [(int(t["k"]), scalar(str(t["c"]))) for t in entry["terms"]]
                if (i, j) in br:
                    raise AlgebraError(f"duplicate bracket entry ({i}, {j})")
                br[(i, j)] = tuple(terms)
        except (KeyError, TypeError) as exc:
            raise AlgebraError(f"malformed algebra JSON: {exc}") from exc
        return cls(data.get("name", ""), dim, tuple(names), br)


@dataclass
class ValidationReport:
    ok: bool
    failures: list[tuple[int, int, int]]
    checked: int

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": [list(t) for t in self.failures], "checked": self.checked}


def validate(alg: LieAlgebra) -> ValidationReport:
    """Exact Jacobi check over all triples ``i < j < k``."""
    n = alg.dim
    basis = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    br = [[alg.bracket_vectors(basis[i], basis[j]) if i != j else [_ZERO] * n
           for j in range(n)] for i in range(n)]
    failures = []
    checked = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                checked += 1
                s = [_ZERO] * n
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = br[b][c]
                    outer = alg.bracket_vectors(basis[a], inner)
                    s = [x + y for x, y in zip(s, outer)]
                if any(s):
                    failures.append((i, j, k))
    return ValidationReport(not failures, failures, checked)


def adjoint_matrix(alg: LieAlgebra) -> list[list[Poly]]:
    """Matrix with entry (i, j) equal to ``sum_k C_ij^k x_k``."""
    n = alg.dim
    mat = [[Poly.zero(n) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j, terms in alg.neighbours(i):
            mat[i][j] = Poly.linear(n, dict(terms))
    return mat


def invariant_count(alg: LieAlgebra, seed: int = 0, samples: int = 3) -> int:
    """Number of functionally independent invariants, ``dim - generic rank``."""
    if alg.dim == 0:
        return 0
    return alg.dim - generic_rank(adjoint_matrix(alg), alg.dim, seed=seed, samples=samples)


def diffop_apply(alg: LieAlgebra, coeffs: Sequence, f: Poly) -> Poly:
    """Apply ``sum_i a_i X_i^`` with ``X_i^ = C_ij^k x_k d/dx_j``."""
    if len(coeffs) != alg.dim:
        raise ValueError(f"expected {alg.dim} coefficients, got {len(coeffs)}")
    if f.nvars != alg.dim:
        raise ValueError("polynomial variable count differs from the algebra dimension")
    n = alg.dim
    t: dict = {}
    get = t.get
    derivs: dict[int, Poly] = {}
    support = f.support()
    for i, a in enumerate(coeffs):
        a = scalar(a)
        if not a:
            continue
        for j, terms in alg.neighbours(i):
            if j not in support:
                continue
            d = derivs.get(j)
            if d is None:
                d = derivs[j] = f.diff(j)
            for k, c in terms:
                w = a * c
                unit = 1 << (BITS * k)
                for key, v in d._t.items():
                    kk = key + unit
                    t[kk] = get(kk, _ZERO) + w * v
    return Poly._raw(n, _clean(t))


def generator_op(alg: LieAlgebra, i: int, f: Poly) -> Poly:
    """``X_i^(f)`` for a single basis generator."""
    coeffs = [0] * alg.dim
    coeffs[i] = 1
    return diffop_apply(alg, coeffs, f)


def is_invariant(alg: LieAlgebra, f: Poly) -> bool:
    return all(not generator_op(alg, i, f) for i in range(alg.dim))


def berezin_bracket(alg: LieAlgebra, f: Poly, g: Poly) -> Poly:
    """Lie-Poisson bracket ``sum_{i<j} C_ij^k x_k (f_i g_j - f_j g_i)``.

    Evaluated as ``sum_i df/dx_i * X_i^(g)``, which only touches nonzero
    structure constants.
    """
    n = alg.dim
    if f.nvars != n or g.nvars != n:
        raise ValueError("polynomial variable count differs from the algebra dimension")
    t: dict = {}
    get = t.get
    fsup = f.support()
    for i in range(n):
        if i not in fsup or not alg.neighbours(i):
            continue
        vi = generator_op(alg, i, g)
        if not vi:
            continue
        fi = f.diff(i)
        a, b = (fi._t, vi._t) if len(fi._t) <= len(vi._t) else (vi._t, fi._t)
        bt = list(b.items())
        for k1, c1 in a.items():
            for k2, c2 in bt:
                k = k1 + k2
                t[k] = get(k, _ZERO) + c1 * c2
    return Poly._raw(n, _clean(t))


def change_basis(alg: LieAlgebra, rows: Sequence[Sequence], names: Sequence[str] | None = None,
                 name: str | None = None) -> LieAlgebra:
    """Algebra over the basis ``Y_a = sum_b rows[a][b] X_b`` (rows invertible)."""
    n = alg.dim
    inv = inverse_exact(rows)  # X_b = sum_a inv[b][a] Y_a
    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = alg.bracket_vectors(rows[a], rows[b])
            coords = [_ZERO] * n
            for e, ce in enumerate(v):
                if ce:
                    for c in range(n):
                        if inv[e][c]:
                            coords[c] = coords[c] + ce * inv[e][c]
            terms = {c: demote(x) for c, x in enumerate(coords) if x}
            if terms:
                table[(a, b)] = terms
    return LieAlgebra.from_table(name or alg.name, tuple(names or alg.names), table)


def direct_sum(a: LieAlgebra, b: LieAlgebra, name: str | None = None) -> LieAlgebra:
    off = a.dim
    table = {key: dict(terms) for key, terms in a.brackets.items()}
    for (i, j), terms in b.brackets.items():
        table[(i + off, j + off)] = {k + off: c for k, c in terms}
    return LieAlgebra.from_table(name or f"{a.name}+{b.name}", a.names + b.names, table)


# -- standard algebras ---------------------------------------------------------

def so3() -> LieAlgebra:
    """so(3): [X1,X2]=X3, [X2,X3]=X1, [X3,X1]=X2 (0-based X0, X1, X2)."""
    return LieAlgebra.from_table("so3", ("X1", "X2", "X3"),
                                 {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def heisenberg() -> LieAlgebra:
    return LieAlgebra.from_table("heisenberg", ("X1", "X2", "X3"), {(0, 1): {2: 1}})


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(f"abelian{n}", n, tuple(f"X{k + 1}" for k in range(n)), {})


def sl3() -> LieAlgebra:
    """sl(3) in the basis E12, E13, E21, E23, E31, E32, H1=E11-E22, H2=E22-E33."""
    offdiag = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
    names = [f"E{i}{j}" for i, j in offdiag] + ["H1", "H2"]
    # every element as a 3x3 matrix of mpq
    mats = []
    for i, j in offdiag:
        m = [[_ZERO] * 3 for _ in range(3)]
        m[i - 1][j - 1] = mpq(1)
        mats.append(m)
    for a, b in ((0, 1), (1, 2)):
        m = [[_ZERO] * 3 for _ in range(3)]
        m[a][a], m[b][b] = mpq(1), mpq(-1)
        mats.append(m)
    return _matrix_algebra("sl3", names, mats)


def _matrix_algebra(name: str, names: Sequence[str], mats: Sequence) -> LieAlgebra:
    """Structure constants of a span of matrices closed under commutators."""
    from .linalg import solve_exact

    def flat(m):
        return [x for row in m for x in row]

    def mm(a, b):
        n = len(a)
        return [[sum((a[i][k] * b[k][j] for k in range(n)), _ZERO) for j in range(n)] for i in range(n)]

    basis = [flat(m) for m in mats]
    table = {}
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            ab, ba = mm(mats[a], mats[b]), mm(mats[b], mats[a])
            comm = [x - y for x, y in zip(flat(ab), flat(ba))]
            coeffs = solve_exact(basis, comm)
            if coeffs is None:
                raise AlgebraError("matrix span is not closed under commutators")
            terms = {k: c for k, c in enumerate(coeffs) if c}
            if terms:
                table[(a, b)] = terms
    return LieAlgebra.from_table(name, tuple(names), table)

