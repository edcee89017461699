import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labkit.algebra import berezin_bracket, heisenberg, sl3, so3
from labkit.enveloping import nc_commutator, symmetrize
from labkit.labeling import (
    ChainError,
    CommutativityCertificate,
    OracleBudget,
    ReductionChain,
    Verdict,
    certify_commuting,
    functional_independence,
    grading_split,
    invariant_in_subalgebra,
    is_subgroup_scalar,
    mlp_count,
    validate_chain,
)
from labkit.poly import Poly, parse_poly

SO3 = so3()


def unit(n, k):
    return [1 if i == k else 0 for i in range(n)]


def P(text, n=3):
    return parse_poly(text, n)


def so3_z():
    return ReductionChain(SO3, (unit(3, 2),))


def elliott():
    # su(3) > so(3): antisymmetric combinations of the off-diagonal E_ij
    alg = sl3()
    idx = {n: k for k, n in enumerate(alg.names)}

    def row(a, b):
        r = [0] * alg.dim
        r[idx[a]], r[idx[b]] = 1, -1
        return r

    return ReductionChain(alg, (row("E12", "E21"), row("E13", "E31"), row("E23", "E32")))


# -- chains ----------------------------------------------------------------------------

def test_validate_chain_examples():
    v = validate_chain(so3_z())
    assert v.ok and v.subalgebra.dim == 1 and not v.subalgebra.brackets
    bad = validate_chain(ReductionChain(SO3, (unit(3, 0), unit(3, 1))))
    assert not bad.ok and bad.offending_pair == (0, 1)
    dep = validate_chain(ReductionChain(SO3, (unit(3, 0), [2, 0, 0])))
    assert not dep.ok


def test_chain_json_round_trip(tmp_path):
    (tmp_path / "so3.json").write_text(json.dumps(SO3.to_json()))
    chain = ReductionChain(SO3, (unit(3, 2),), 0, frozenset({0, 1}))
    data = chain.to_json("so3.json")
    again = ReductionChain.from_json(json.dumps(data), tmp_path)
    assert again.sub_rows == chain.sub_rows and again.complement_vars == chain.complement_vars
    inline = ReductionChain.from_json(chain.to_json())
    assert inline.ambient.brackets == SO3.brackets


def test_chain_rejects_bad_input():
    with pytest.raises(ChainError):
        ReductionChain(SO3, ((1, 0),))
    with pytest.raises(ChainError):
        ReductionChain(SO3, (unit(3, 2),), -1)
    with pytest.raises(ChainError):
        ReductionChain.from_json({"sub_rows": []})


# -- counting --------------------------------------------------------------------------

def test_mlp_elliott_chain():
    rep = mlp_count(elliott())
    assert (rep.dim_g, rep.dim_h, rep.N_g, rep.N_h) == (8, 3, 2, 1)
    assert rep.n_missing == 1 and rep.m_available == 2
    assert rep.n_subgroup_scalars == rep.n_subgroup_scalars_direct == 5


@pytest.mark.parametrize("chain", [so3_z(), elliott()])
def test_mlp_identities(chain):
    rep = mlp_count(chain)
    assert rep.m_available == 2 * rep.n_missing
    assert rep.n_subgroup_scalars == rep.m_available + rep.N_g + rep.N_h - rep.l_prime
    assert rep.n_subgroup_scalars == rep.dim_g - rep.dim_h + rep.l_prime


def test_mlp_trivial_chain_needs_l_prime():
    rows = tuple(unit(3, k) for k in range(3))
    with pytest.raises(ChainError):
        mlp_count(ReductionChain(SO3, rows, 0))
    # here the one Casimir depends only on subalgebra variables, so l' = 1
    chain = ReductionChain(SO3, rows, 1)
    assert invariant_in_subalgebra(chain, P("x0^2 + x1^2 + x2^2"))
    rep = mlp_count(chain)
    assert rep.n_missing == 0 and rep.n_subgroup_scalars == rep.n_subgroup_scalars_direct == 1


def test_mlp_rejects_invalid_chain():
    with pytest.raises(ChainError):
        mlp_count(ReductionChain(SO3, (unit(3, 0), unit(3, 1))))


# -- scalars ---------------------------------------------------------------------------

def test_subgroup_scalar_examples():
    c = so3_z()
    assert is_subgroup_scalar(c, P("x0^2 + x1^2 + x2^2"))
    assert is_subgroup_scalar(c, P("x0^2 + x1^2"))
    assert not is_subgroup_scalar(c, P("x0"))


scalar_field = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), max_size=3)


@settings(max_examples=30, deadline=None)
@given(scalar_field, scalar_field)
def test_scalars_closed_under_bracket(a, b):
    # polynomials in x2 and x0^2 + x1^2 generate the so(3) > <X2> scalars
    r2, z = P("x0^2 + x1^2"), P("x2")

    def build(terms):
        return sum((c * r2**i * z**j for i, j, c in terms), Poly.zero(3))

    f, g = build(a), build(b)
    chain = so3_z()
    assert is_subgroup_scalar(chain, f) and is_subgroup_scalar(chain, g)
    assert is_subgroup_scalar(chain, berezin_bracket(SO3, f, g))


# -- grading -----------------------------------------------------------------------------

def test_grading_examples():
    f = P("x0^2*x3 + x0*x1", 4)
    assert grading_split(f, {3}) == {0: P("x0*x1", 4), 1: P("x0^2*x3", 4)}
    g = P("x0 + x1^2")
    assert grading_split(g, set()) == {0: g}


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(*[st.integers(0, 3)] * 4), st.integers(-5, 5), max_size=6),
       st.sets(st.integers(0, 3)))
def test_grading_reassembles(terms, comp):
    f = Poly(4, terms)
    parts = grading_split(f, comp)
    assert sum(parts.values(), Poly.zero(4)) == f
    for k, part in parts.items():
        for m, _ in part.items():
            assert sum(e for v, e in m.exponents.items() if v in comp) == k


# -- independence -----------------------------------------------------------------------

def test_functional_independence_examples():
    assert functional_independence([P("x0"), P("x1")], 3) == 2
    assert functional_independence([P("x0"), P("x0^2")], 3) == 1
    assert functional_independence([], 3) == 0


# -- certificates ------------------------------------------------------------------------

def test_certificate_examples():
    cas = P("x0^2 + x1^2 + x2^2")
    cert = certify_commuting(SO3, cas, P("x2"))
    assert cert.verdict is Verdict.COMMUTING and cert.bracket_vanishes
    cert = certify_commuting(SO3, P("x0^2"), P("x1^2"))
    assert cert.verdict is Verdict.NON_COMMUTING and cert.nonfactorizable == "NonFactorizable"
    assert not cert.oracle_used


def test_certificate_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        certify_commuting(SO3, P("x0^2 + x1"), P("x2"))


def test_out_of_budget_flagged_pair_is_inconclusive():
    f, g = P("x0^2 + x1^2 + x2^2"), P("x2")
    cert = certify_commuting(SO3, f, g, oracle_budget=None)
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert certify_commuting(SO3, f, g, OracleBudget(max_degree=2)).verdict is Verdict.INCONCLUSIVE


def test_cross_check_catches_degree_four_pair():
    f, g = P("x0*x1"), P("x0^2*x1^2")
    plain = certify_commuting(SO3, f, g)
    assert plain.verdict is Verdict.COMMUTING and not plain.oracle_used
    checked = certify_commuting(SO3, f, g, cross_check=True)
    assert checked.verdict is Verdict.NON_COMMUTING and checked.oracle_used


def test_certificate_json():
    cert = certify_commuting(SO3, P("x0^2"), P("x1^2"), pair_id="a,b")
    data = cert.to_json()
    assert data["pair_id"] == "a,b" and data["verdict"] == "CertifiedNonCommuting"
    assert set(data) >= {"nonfactorizable", "bracket_vanishes", "oracle_used"}
    assert isinstance(cert, CommutativityCertificate)


def _homogeneous_grid(n):
    out = []
    for d in (1, 2, 3):
        for e in itertools.product(range(d + 1), repeat=n):
            if sum(e) == d:
                out.append(Poly(n, {e: 1}))
    return out


@pytest.mark.parametrize("alg", [so3(), heisenberg()], ids=["so3", "heisenberg"])
def test_certified_verdicts_agree_with_oracle(alg):
    grid = _homogeneous_grid(alg.dim)
    for f in grid:
        for g in grid:
            cert = certify_commuting(alg, f, g, oracle_budget=None)
            if cert.verdict is Verdict.INCONCLUSIVE:
                continue
            zero = not nc_commutator(alg, symmetrize(alg, f), symmetrize(alg, g))
            assert (cert.verdict is Verdict.COMMUTING) == zero, (str(f), str(g))
