"""The sp(6) > su(3) x u(1) chain in the Racah realization.

Generators ``X_{i,j}`` with ``-3 <= i, j <= 3`` (no zero index) subject to
``X_{i,j} + e_i e_j X_{-j,-i} = 0`` where ``e_i = sgn(i)``.  The 21
canonical representatives are, in index order::

    0..8    X_{i,j}    1 <= i, j <= 3   (row-major; the u(3) block)
    9..14   X_{i,-j}   1 <= i <= j <= 3
    15..20  X_{-i,j}   1 <= i <= j <= 3

Dual coordinates use the same indices.  After the Cartan change of basis
the indices 0, 4, 8 (``X_{1,1}``, ``X_{2,2}``, ``X_{3,3}``) carry
``H_1 = X_{1,1} - X_{2,2}``, ``H_2 = X_{2,2} - X_{3,3}`` and
``H_3 = X_{1,1} + X_{2,2} + X_{3,3}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .algebra import LieAlgebra, berezin_bracket, change_basis, invariant_count, is_invariant, validate
from .enveloping import certify_nonfactorizable
from .labeling import (
    CommutativityCertificate,
    ReductionChain,
    Verdict,
    functional_independence,
    grading_split,
    is_subgroup_scalar,
    mlp_count,
    validate_chain,
)
from .poly import Poly, char_poly_det, format_poly, substitute_linear
from .scalar import I

log = logging.getLogger(__name__)

__all__ = [
    "Sp6Basis",
    "ChainArtifacts",
    "build_sp6",
    "build_M_and_casimirs",
    "build_chain",
    "adapted_algebra",
    "extract_labels",
    "sub_casimirs",
    "build_artifacts",
    "verify_all",
    "REPORTED_TERM_COUNTS",
]

N = 21
UNITARY = tuple(range(9))
COMPLEMENT = tuple(range(9, 21))
DIAGONAL = (0, 4, 8)
# published term counts for the three labels, keyed by name
REPORTED_TERM_COUNTS = {"C22": 126, "C24": 686, "C42": 444}


class TranscriptionError(RuntimeError):
    """An internal consistency check on the sp(6) data failed."""


def eps(i: int) -> int:
    return 1 if i > 0 else -1


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


@dataclass(frozen=True)
class Sp6Basis:
    pairs: tuple[tuple[int, int], ...]
    index: dict[tuple[int, int], int] = field(repr=False)
    unitary_block: tuple[int, ...] = UNITARY
    complement_block: tuple[int, ...] = COMPLEMENT

    @classmethod
    def racah(cls) -> Sp6Basis:
        r = (1, 2, 3)
        pairs = [(i, j) for i in r for j in r]
        pairs += [(i, -j) for i in r for j in r if i <= j]
        pairs += [(-i, j) for i in r for j in r if i <= j]
        return cls(tuple(pairs), {p: k for k, p in enumerate(pairs)})

    def resolve(self, i: int, j: int) -> tuple[int, int]:
        """Canonical generator index and sign for the raw pair ``X_{i,j}``."""
        if i == 0 or j == 0 or abs(i) > 3 or abs(j) > 3:
            raise ValueError(f"no generator X_{{{i},{j}}}")
        k = self.index.get((i, j))
        if k is not None:
            return k, 1
        k = self.index.get((-j, -i))
        if k is None:
            raise TranscriptionError(f"pair ({i}, {j}) resolves to no canonical generator")
        return k, -eps(i) * eps(j)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"X{i},{j}" for i, j in self.pairs)

    def var(self, i: int, j: int, coeff=1) -> Poly:
        k, s = self.resolve(i, j)
        return Poly.var(N, k, s * coeff)


def _raw_bracket(basis: Sp6Basis, i, j, k, l) -> dict[int, int]:
    out: dict[int, int] = {}

    def add(c, p, q):
        if c:
            idx, s = basis.resolve(p, q)
            out[idx] = out.get(idx, 0) + c * s

    e = eps(i) * eps(j)
    add(_delta(j, k), i, l)
    add(-_delta(i, l), k, j)
    add(e * _delta(j, -l), k, -i)
    add(-e * _delta(i, -k), -j, l)
    return {a: c for a, c in out.items() if c}


def build_sp6() -> tuple[LieAlgebra, Sp6Basis]:
    """Evaluate the Racah bracket on all canonical pairs.

    Every bracket is evaluated on both raw representatives of each
    argument; disagreement means the formula or constraint was transcribed
    wrongly and aborts.
    """
    basis = Sp6Basis.racah()
    table = {}
    for a in range(N):
        for b in range(a + 1, N):
            results = []
            for (p, sp) in _representatives(basis, a):
                for (q, sq) in _representatives(basis, b):
                    r = _raw_bracket(basis, *p, *q)
                    results.append({k: c * sp * sq for k, c in r.items()})
            if any(r != results[0] for r in results):
                raise TranscriptionError(f"bracket [{basis.names[a]}, {basis.names[b]}] is ambiguous")
            if results[0]:
                table[(a, b)] = results[0]
    alg = LieAlgebra.from_table("sp6", basis.names, table)
    return alg, basis


def _representatives(basis: Sp6Basis, a: int):
    i, j = basis.pairs[a]
    return [((i, j), 1), ((-j, -i), -eps(i) * eps(j))]


# -- Casimirs from the characteristic polynomial ---------------------------------

# Candidate layouts of the 6x6 matrix, tried in order until the coefficients
# are invariant.  Each entry: (name, transpose upper-left, transpose
# lower-right, factor upper-right, factor lower-left).
M_CONVENTIONS = (
    ("literal", False, False, I, I),
    ("literal-transposed", True, True, I, I),
    ("conjugate-pair", False, True, -I, I),
    ("conjugate-pair-transposed", True, False, I, -I),
)


def build_M(basis: Sp6Basis, convention: str = "conjugate-pair-transposed") -> list[list[Poly]]:
    """The block matrix ``[[A, f1*B], [f2*C, -A]]`` for one layout convention.

    ``A = (x_{i,j})``, ``B = (x_{-i,j})``, ``C = (x_{i,-j})`` for
    ``1 <= i, j <= 3`` with row index ``i``; the convention picks block
    transposes and the imaginary factors.  The off-diagonal blocks trade
    places whenever the upper-left block is not transposed.
    """
    layout = {c[0]: c[1:] for c in M_CONVENTIONS}[convention]
    t_ul, t_lr, f_ur, f_ll = layout
    r = (1, 2, 3)
    A = [[basis.var(i, j) for j in r] for i in r]
    At = [list(col) for col in zip(*A)]
    B = [[basis.var(-i, j) for j in r] for i in r]
    C = [[basis.var(i, -j) for j in r] for i in r]
    ul = At if t_ul else A
    lr = At if t_lr else A
    ur, ll = (B, C) if (t_ul or convention == "literal") else (C, B)
    top = [ul[a] + [e.scale(f_ur) for e in ur[a]] for a in range(3)]
    bottom = [[e.scale(f_ll) for e in ll[a]] + [-e for e in lr[a]] for a in range(3)]
    return top + bottom


@dataclass
class CasimirResult:
    C2: Poly
    C4: Poly
    C6: Poly
    convention: str
    rejected: list[str]
    odd_coefficients_vanish: bool


def build_M_and_casimirs(basis: Sp6Basis, alg: LieAlgebra) -> CasimirResult:
    """``det(M - T) = T^6 + C2 T^4 + C4 T^2 + C6`` with the first invariant layout.

    Layouts are tried in ``M_CONVENTIONS`` order; the invariance check
    ``X_a^ C_k = 0`` for all 21 generators decides.
    """
    rejected = []
    for name, *_ in M_CONVENTIONS:
        coeffs = char_poly_det(build_M(basis, name))
        odd_ok = all(not coeffs[k] for k in (1, 3, 5))
        cas = (coeffs[4], coeffs[2], coeffs[0])
        if odd_ok and all(c.is_real() for c in cas) and all(is_invariant(alg, c) for c in cas):
            if coeffs[6] != 1:
                raise TranscriptionError("leading coefficient of det(M - T) is not 1")
            return CasimirResult(*cas, name, rejected, odd_ok)
        log.info("M layout %s rejected: coefficients not invariant", name)
        rejected.append(name)
    raise TranscriptionError("no M layout yields invariant coefficients")


# -- the su(3) x u(1) basis ---------------------------------------------------------

def cartan_rows() -> dict[int, list]:
    """H_1, H_2, H_3 as combinations of the 21 Racah generators."""
    rows = {}
    for slot, coeffs in zip(DIAGONAL, ({0: 1, 4: -1}, {4: 1, 8: -1}, {0: 1, 4: 1, 8: 1})):
        row = [0] * N
        for k, c in coeffs.items():
            row[k] = c
        rows[slot] = row
    return rows


def h_substitution() -> dict[int, Poly]:
    """x_{1,1}, x_{2,2}, x_{3,3} in terms of h_1, h_2, h_3 (stored at 0, 4, 8)."""
    h1, h2, h3 = (Poly.var(N, k) for k in DIAGONAL)
    return {
        0: (2 * h1 + h2 + h3) / 3,
        4: (-h1 + h2 + h3) / 3,
        8: (-h1 - 2 * h2 + h3) / 3,
    }


def adapted_algebra(alg: LieAlgebra, basis: Sp6Basis) -> LieAlgebra:
    """sp(6) over the basis with H_1, H_2, H_3 in place of the diagonal X_{i,i}."""
    rows = [[1 if a == b else 0 for b in range(N)] for a in range(N)]
    for slot, row in cartan_rows().items():
        rows[slot] = row
    names = list(basis.names)
    for slot, n in zip(DIAGONAL, ("H1", "H2", "H3")):
        names[slot] = n
    return change_basis(alg, rows, names, name="sp6_su3u1")


def build_chain(basis: Sp6Basis, alg: LieAlgebra) -> ReductionChain:
    """sp(6) > su(3) x u(1): six off-diagonal unitary generators plus H_1, H_2, H_3."""
    rows = []
    for k in UNITARY:
        if k in DIAGONAL:
            continue
        row = [0] * N
        row[k] = 1
        rows.append(row)
    rows.extend(cartan_rows().values())
    return ReductionChain(alg, tuple(map(tuple, rows)), 0, frozenset(COMPLEMENT))


def adapted_chain(adapted: LieAlgebra) -> ReductionChain:
    rows = [[1 if a == b else 0 for b in range(N)] for a in UNITARY]
    return ReductionChain(adapted, tuple(map(tuple, rows)), 0, frozenset(COMPLEMENT))


@dataclass
class ChainArtifacts:
    algebra: LieAlgebra
    basis: Sp6Basis
    casimirs: CasimirResult
    adapted: LieAlgebra
    h_basis_casimirs: tuple[Poly, Poly, Poly]
    chain: ReductionChain
    adapted_chain: ReductionChain
    split4: dict[int, Poly] = field(default_factory=dict)
    split6: dict[int, Poly] = field(default_factory=dict)
    labels: dict[str, Poly] = field(default_factory=dict)
    sub: dict[str, Poly] = field(default_factory=dict)


def extract_labels(art: ChainArtifacts) -> dict[str, Poly]:
    """C(2,2), C(4,2), C(2,4) from the complement-degree split of C4 and C6."""
    _, C4, C6 = art.h_basis_casimirs
    art.split4 = grading_split(C4, COMPLEMENT)
    art.split6 = grading_split(C6, COMPLEMENT)
    if set(art.split4) != {0, 2, 4} or set(art.split6) != {0, 2, 4, 6}:
        raise TranscriptionError(f"unexpected grading degrees {sorted(art.split4)}, {sorted(art.split6)}")
    art.labels = {"C22": art.split4[2], "C42": art.split6[4], "C24": art.split6[2]}
    return art.labels


def sub_casimirs(art: ChainArtifacts) -> dict[str, Poly]:
    """Quadratic and cubic su(3) Casimirs (traceless u(3) block) and h_3."""
    h1, h2, h3 = (Poly.var(N, k) for k in DIAGONAL)
    diag = {0: (2 * h1 + h2) / 3, 4: (-h1 + h2) / 3, 8: (-h1 - 2 * h2) / 3}
    r = (1, 2, 3)
    A = []
    for i in r:
        row = []
        for j in r:
            k, _ = art.basis.resolve(i, j)
            row.append(diag[k] if k in diag else Poly.var(N, k))
        A.append(row)
    coeffs = char_poly_det(A)
    if coeffs[2]:
        raise TranscriptionError("traceless block has a nonzero trace")
    art.sub = {"c2": coeffs[1], "c3": -coeffs[0], "h3": h3}
    return art.sub


def build_artifacts() -> ChainArtifacts:
    alg, basis = build_sp6()
    cas = build_M_and_casimirs(basis, alg)
    sub = h_substitution()
    hc = tuple(substitute_linear(c, sub) for c in (cas.C2, cas.C4, cas.C6))
    adapted = adapted_algebra(alg, basis)
    art = ChainArtifacts(alg, basis, cas, adapted, hc, build_chain(basis, alg), adapted_chain(adapted))
    extract_labels(art)
    sub_casimirs(art)
    return art


# -- verification -------------------------------------------------------------------

LABEL_PAIRS = (("C22", "C42"), ("C22", "C24"), ("C24", "C42"))


def certify_label_pair(art: ChainArtifacts, a: str, b: str) -> tuple[CommutativityCertificate, dict]:
    """Certificate for one label pair, trying the adapted basis then the Racah basis.

    Symmetrization and the Berezin bracket do not depend on the basis, so a
    non-factorizability certificate in either basis licenses the verdict.
    """
    f, g = art.labels[a], art.labels[b]
    vanishes = not berezin_bracket(art.adapted, f, g)
    inverse = h_inverse()
    attempts = {}
    status = None
    witness = None
    for name, alg, (ff, gg) in (
        ("su3u1", art.adapted, (f, g)),
        ("racah", art.algebra, (substitute_linear(f, inverse), substitute_linear(g, inverse))),
    ):
        res = certify_nonfactorizable(alg, ff, gg)
        attempts[name] = res.to_json()
        if res.nonfactorizable:
            status = res
            break
        witness = witness or res.to_json().get("witness")
    pair_id = f"{a},{b}"
    if status is not None:
        verdict = Verdict.COMMUTING if vanishes else Verdict.NON_COMMUTING
        cert = CommutativityCertificate(pair_id, status.status.value, vanishes, verdict, False)
    else:
        cert = CommutativityCertificate(pair_id, "PossiblyFactorizable", vanishes,
                                        Verdict.INCONCLUSIVE, False, witness)
    return cert, attempts


def h_inverse() -> dict[int, Poly]:
    """h_1, h_2, h_3 back in terms of x_{1,1}, x_{2,2}, x_{3,3}."""
    x = {k: Poly.var(N, k) for k in DIAGONAL}
    return {0: x[0] - x[4], 4: x[4] - x[8], 8: x[0] + x[4] + x[8]}


def _check(checks: list, name: str, ok: bool, **detail):
    entry = {"name": name, "ok": bool(ok)}
    entry.update(detail)
    checks.append(entry)
    return ok


def verify_all(seed: int = 0, art: ChainArtifacts | None = None) -> dict:
    """Run the whole sp(6) pipeline and collect every check in a JSON-ready dict."""
    checks: list[dict] = []
    art = art or build_artifacts()
    alg, adapted = art.algebra, art.adapted
    cas = art.casimirs

    rep = validate(alg)
    _check(checks, "jacobi", rep.ok, triples=rep.checked, failures=[list(t) for t in rep.failures])
    counts = [invariant_count(alg, seed=seed + k) for k in range(3)]
    _check(checks, "invariant_count", counts == [3, 3, 3], values=counts)

    _check(checks, "odd_T_coefficients_vanish", cas.odd_coefficients_vanish,
           convention=cas.convention, rejected=cas.rejected)
    for name, c, d in (("C2", cas.C2, 2), ("C4", cas.C4, 4), ("C6", cas.C6, 6)):
        ok = is_invariant(alg, c) and c.is_real() and c.is_homogeneous() and c.degree == d
        _check(checks, f"casimir_{name}", ok, degree=c.degree, terms=len(c),
               **({} if ok else {"poly": format_poly(c)}))

    mlp = mlp_count(art.chain, seed=seed)
    _check(checks, "mlp_count", (mlp.n_missing, mlp.m_available, mlp.n_subgroup_scalars) == (3, 6, 12),
           **mlp.to_json())
    v = validate_chain(art.chain)
    h3_row = art.chain.sub_rows[-1]
    h3_central = all(not any(alg.bracket_vectors(h3_row, r)) for r in art.chain.sub_rows)
    _check(checks, "chain_closed", v.ok, error=v.error)
    _check(checks, "h3_central_in_subalgebra", h3_central)

    _, C4, C6 = art.h_basis_casimirs
    _check(checks, "grading_C4", sorted(art.split4) == [0, 2, 4], degrees=sorted(art.split4))
    _check(checks, "grading_C6", sorted(art.split6) == [0, 2, 4, 6], degrees=sorted(art.split6))
    _check(checks, "reassemble_C4", sum(art.split4.values(), Poly.zero(N)) == C4)
    _check(checks, "reassemble_C6", sum(art.split6.values(), Poly.zero(N)) == C6)

    ach = art.adapted_chain
    for name, f in art.labels.items():
        scalar_ok = is_subgroup_scalar(ach, f)
        not_inv = not is_invariant(adapted, f)
        _check(checks, f"label_{name}_subgroup_scalar", scalar_ok and not_inv,
               annihilated_by_subalgebra=scalar_ok, not_ambient_invariant=not_inv,
               **({} if scalar_ok else {"poly": format_poly(f)}))
    # the same labels pulled back to the Racah coordinates are scalars of the original chain
    inverse = h_inverse()
    for name, f in art.labels.items():
        _check(checks, f"label_{name}_racah_chain_scalar",
               is_subgroup_scalar(art.chain, substitute_linear(f, inverse)))
    for name, f in art.sub.items():
        _check(checks, f"subalgebra_invariant_{name}", is_subgroup_scalar(ach, f))

    certs = []
    for a, b in LABEL_PAIRS:
        pb = berezin_bracket(adapted, art.labels[a], art.labels[b])
        _check(checks, f"bracket_{a}_{b}", not pb, terms=len(pb),
               **({} if not pb else {"poly": format_poly(pb)}))
        cert, attempts = certify_label_pair(art, a, b)
        certs.append({**cert.to_json(), "attempts": attempts})

    nine = [*art.h_basis_casimirs, art.sub["c2"], art.sub["c3"], art.sub["h3"],
            art.labels["C22"], art.labels["C42"], art.labels["C24"]]
    rank = functional_independence(nine, N, seed=seed)
    _check(checks, "functional_independence", rank == 9, rank=rank)

    terms = {k: len(v) for k, v in art.labels.items()}
    racah_terms = {k: len(substitute_linear(v, inverse)) for k, v in art.labels.items()}
    return {
        "seed": seed,
        "ok": all(c["ok"] for c in checks),
        "checks": checks,
        "certificates": certs,
        "term_counts": {
            "normalization": "su(3)xu(1) basis (h_1, h_2, h_3 substituted), unit-coefficient M entries",
            "computed": terms,
            "reported": REPORTED_TERM_COUNTS,
            "match": terms == REPORTED_TERM_COUNTS,
            "racah_basis": racah_terms,
        },
    }
