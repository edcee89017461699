"""Reduction chains, missing-label counts and commutativity certificates."""

from __future__ import annotations

import enum
import json
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import LieAlgebra, berezin_bracket, diffop_apply, invariant_count, is_invariant
from .enveloping import Factorizability, certify_nonfactorizable, nc_commutator, symmetrize
from .linalg import PRIME, SQRT_M1, rank_exact, rank_mod, random_point, solve_exact
from .poly import BITS, MASK, Poly, scalar_mod
from .scalar import format_scalar, scalar

__all__ = [
    "ChainError",
    "ReductionChain",
    "ChainValidation",
    "MlpReport",
    "Verdict",
    "CommutativityCertificate",
    "OracleBudget",
    "validate_chain",
    "mlp_count",
    "is_subgroup_scalar",
    "invariant_in_subalgebra",
    "grading_split",
    "functional_independence",
    "certify_commuting",
]


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionChain:
    """Ambient algebra plus subalgebra generators as rows of ambient coordinates."""

    ambient: LieAlgebra
    sub_rows: tuple[tuple, ...]
    l_prime: int = 0
    complement_vars: frozenset[int] | None = None

    def __post_init__(self):
        rows = tuple(tuple(scalar(c) for c in r) for r in self.sub_rows)
        for r in rows:
            if len(r) != self.ambient.dim:
                raise ChainError(f"row of length {len(r)} for a {self.ambient.dim}-dim algebra")
        object.__setattr__(self, "sub_rows", rows)
        if self.l_prime < 0:
            raise ChainError("l_prime must be non-negative")
        if self.complement_vars is not None:
            cv = frozenset(int(v) for v in self.complement_vars)
            if any(not 0 <= v < self.ambient.dim for v in cv):
                raise ChainError("complement variable index out of range")
            object.__setattr__(self, "complement_vars", cv)

    def to_json(self, algebra_ref: str | None = None) -> dict:
        return {
            "algebra": algebra_ref if algebra_ref is not None else self.ambient.to_json(),
            "sub_rows": [[format_scalar(c) for c in r] for r in self.sub_rows],
            "l_prime": self.l_prime,
            "complement_vars": sorted(self.complement_vars) if self.complement_vars is not None else [],
        }

    @classmethod
    def from_json(cls, data: dict | str, base: Path | None = None) -> ReductionChain:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            alg = data["algebra"]
            if isinstance(alg, str):
                path = Path(alg)
                if base is not None and not path.is_absolute():
                    path = base / path
                alg = json.loads(path.read_text())
            ambient = LieAlgebra.from_json(alg)
            rows = [[scalar(str(c)) for c in r] for r in data["sub_rows"]]
            cv = data.get("complement_vars")
        except (KeyError, TypeError) as exc:
            raise ChainError(f"malformed chain JSON: {exc}") from exc
        return cls(ambient, tuple(map(tuple, rows)), int(data.get("l_prime", 0)),
                   frozenset(cv) if cv else None)


@dataclass
class ChainValidation:
    ok: bool
    subalgebra: LieAlgebra | None = None
    error: str | None = None
    offending_pair: tuple[int, int] | None = None

    def to_json(self) -> dict:
        out = {"ok": self.ok}
        if self.subalgebra is not None:
            out["subalgebra"] = self.subalgebra.to_json()
        if self.error:
            out["error"] = self.error
        if self.offending_pair is not None:
            out["offending_pair"] = list(self.offending_pair)
        return out


def validate_chain(chain: ReductionChain) -> ChainValidation:
    """Check independence and bracket closure; derive the subalgebra."""
    rows = chain.sub_rows
    alg = chain.ambient
    if rank_exact(rows) < len(rows):
        return ChainValidation(False, error="subalgebra rows are linearly dependent")
    table = {}
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            v = alg.bracket_vectors(rows[a], rows[b])
            coeffs = solve_exact(rows, v)
            if coeffs is None:
                return ChainValidation(False, error=f"bracket of rows {a} and {b} leaves the span",
                                       offending_pair=(a, b))
            terms = {k: c for k, c in enumerate(coeffs) if c}
            if terms:
                table[(a, b)] = terms
    if chain.complement_vars is not None:
        support = {i for r in rows for i, c in enumerate(r) if c}
        if support & chain.complement_vars:
            return ChainValidation(False, error="complement variables overlap the subalgebra support")
        kept = [i for i in range(alg.dim) if i not in chain.complement_vars]
        if len(kept) != len(rows) or rank_exact([[r[i] for i in kept] for r in rows]) < len(rows):
            return ChainValidation(False, error="grading needs a sub-basis embedding "
                                                "(rows must span the non-complement coordinates)")
    names = tuple(f"Y{a}" for a in range(len(rows)))
    sub = LieAlgebra.from_table(f"{alg.name}_sub", names, table)
    return ChainValidation(True, subalgebra=sub)


@dataclass(frozen=True)
class MlpReport:
    dim_g: int
    dim_h: int
    N_g: int
    N_h: int
    l_prime: int
    n_missing: int
    m_available: int
    n_subgroup_scalars: int
    n_subgroup_scalars_direct: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _subsystem_rank(chain: ReductionChain, seed: int, samples: int = 3) -> int:
    """Generic rank of the subalgebra rows of the differential-operator system."""
    alg = chain.ambient
    n = alg.dim
    rng = random.Random(seed)
    best = 0
    for _ in range(samples):
        pt = random_point(n, rng)
        rows = []
        for r in chain.sub_rows:
            row = [0] * n
            for i, a in enumerate(r):
                if not a:
                    continue
                a = scalar_mod(a, PRIME, SQRT_M1)
                for j, terms in alg.neighbours(i):
                    for k, c in terms:
                        row[j] += a * scalar_mod(c, PRIME, SQRT_M1) * pt[k]
            rows.append(row)
        best = max(best, rank_mod(rows))
    return best


def mlp_count(chain: ReductionChain, seed: int = 0) -> MlpReport:
    """Missing-label counts for ``chain``.

    ``n = (dim g - N(g) - dim h - N(h)) / 2 + l'`` and ``m = 2n``.  The
    number of subgroup scalars ``m + N(g) + N(h) - l'`` is checked against
    ``dim g - dim h + l'`` and against a direct rank computation of the
    subalgebra operators.
    """
    v = validate_chain(chain)
    if not v.ok:
        raise ChainError(v.error)
    dim_g, dim_h = chain.ambient.dim, len(chain.sub_rows)
    N_g = invariant_count(chain.ambient, seed=seed)
    N_h = invariant_count(v.subalgebra, seed=seed)
    lp = chain.l_prime
    twice = dim_g - N_g - dim_h - N_h + 2 * lp
    if twice % 2:
        raise ChainError(f"half-integer number of missing labels ({twice}/2); check l_prime")
    n = twice // 2
    if n < 0:
        raise ChainError(f"negative number of missing labels ({n}); check l_prime")
    m = 2 * n
    scalars = m + N_g + N_h - lp
    direct = dim_g - _subsystem_rank(chain, seed)
    if scalars != dim_g - dim_h + lp or scalars != direct:
        raise ChainError(f"inconsistent subgroup-scalar counts: {scalars}, "
                         f"{dim_g - dim_h + lp}, {direct}; check l_prime")
    return MlpReport(dim_g, dim_h, N_g, N_h, lp, n, m, scalars, direct)


def is_subgroup_scalar(chain: ReductionChain, f: Poly) -> bool:
    alg = chain.ambient
    return all(not diffop_apply(alg, row, f) for row in chain.sub_rows)


def invariant_in_subalgebra(chain: ReductionChain, f: Poly) -> bool:
    """True if ``f`` is an ambient invariant using only subalgebra coordinates.

    Only meaningful for sub-basis embeddings, where each row is a multiple
    of a single ambient generator; used to justify a supplied ``l_prime``.
    """
    coords = set()
    for r in chain.sub_rows:
        nz = [i for i, c in enumerate(r) if c]
        if len(nz) != 1:
            raise ChainError("invariant_in_subalgebra needs a sub-basis embedding")
        coords.add(nz[0])
    return f.support() <= coords and is_invariant(chain.ambient, f)


def grading_split(f: Poly, complement_vars: Iterable[int]) -> dict[int, Poly]:
    """Split ``f`` by total degree in the complement variables.

    For homogeneous ``f`` of degree d the component at key k has bidegree
    ``(k, d - k)``.
    """
    comp_mask = 0
    for v in complement_vars:
        comp_mask |= MASK << (BITS * v)
    parts: dict[int, dict] = {}
    for key, c in f._t.items():
        k = key & comp_mask
        deg = 0
        while k:
            deg += k & MASK
            k >>= BITS
        parts.setdefault(deg, {})[key] = c
    return {k: Poly._raw(f.nvars, t) for k, t in sorted(parts.items())}


def functional_independence(polys: Sequence[Poly], n_vars: int, seed: int = 0, samples: int = 3) -> int:
    """Generic rank of the Jacobian ``(d f_i / d x_j)`` over a prime field."""
    if not polys:
        return 0
    rng = random.Random(seed)
    jac = [[f.diff(j) for j in range(n_vars)] for f in polys]
    best = 0
    for _ in range(max(samples, 3)):
        pt = random_point(n_vars, rng)
        best = max(best, rank_mod([[d.evaluate_mod(pt, PRIME, SQRT_M1) for d in row] for row in jac]))
        if best == len(polys):
            break
    return best


class Verdict(enum.Enum):
    COMMUTING = "CertifiedCommuting"
    NON_COMMUTING = "CertifiedNonCommuting"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class OracleBudget:
    max_degree: int = 8
    max_dim: int = 6

    def allows(self, alg: LieAlgebra, p: int, q: int) -> bool:
        return p + q <= self.max_degree and alg.dim <= self.max_dim


@dataclass
class CommutativityCertificate:
    pair_id: str
    nonfactorizable: str
    bracket_vanishes: bool
    verdict: Verdict
    oracle_used: bool
    witness: dict | None = field(default=None)

    def to_json(self) -> dict:
        out = {
            "pair_id": self.pair_id,
            "nonfactorizable": self.nonfactorizable,
            "bracket_vanishes": self.bracket_vanishes,
            "verdict": self.verdict.value,
            "oracle_used": self.oracle_used,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def certify_commuting(alg: LieAlgebra | ReductionChain, f: Poly, g: Poly,
                      oracle_budget: OracleBudget | None = OracleBudget(), *,
                      pair_id: str = "", cross_check: bool = False) -> CommutativityCertificate:
    """Decide whether ``Lambda(f)`` and ``Lambda(g)`` commute.

    For a certified non-factorizable pair of homogeneous polynomials the
    verdict follows the Berezin bracket.  Possibly-factorizable pairs fall
    back to the enveloping-algebra commutator when the budget allows, and
    are Inconclusive otherwise.  ``cross_check`` runs the commutator for
    every in-budget pair and lets it decide.
    """
    if isinstance(alg, ReductionChain):
        alg = alg.ambient
    if not f.is_homogeneous() or not g.is_homogeneous():
        raise ValueError("certify_commuting needs homogeneous polynomials")
    if not f or not g:
        return CommutativityCertificate(pair_id, Factorizability.NON_FACTORIZABLE.value, True,
                                        Verdict.COMMUTING, False)
    fac = certify_nonfactorizable(alg, f, g)
    vanishes = not berezin_bracket(alg, f, g)
    in_budget = oracle_budget is not None and oracle_budget.allows(alg, f.degree, g.degree)
    witness = fac.to_json().get("witness")
    if in_budget and (cross_check or not fac.nonfactorizable):
        zero = not nc_commutator(alg, symmetrize(alg, f), symmetrize(alg, g))
        verdict = Verdict.COMMUTING if zero else Verdict.NON_COMMUTING
        return CommutativityCertificate(pair_id, fac.status.value, vanishes, verdict, True, witness)
    if fac.nonfactorizable:
        verdict = Verdict.COMMUTING if vanishes else Verdict.NON_COMMUTING
    else:
        verdict = Verdict.INCONCLUSIVE
    return CommutativityCertificate(pair_id, fac.status.value, vanishes, verdict, False, witness)
