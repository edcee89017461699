import pytest

from labkit.algebra import is_invariant, validate
from labkit.labeling import Verdict, is_subgroup_scalar, validate_chain
from labkit.labeling import functional_independence
from labkit.poly import Poly, char_poly_det, substitute_linear
from labkit.sp6 import (
    COMPLEMENT,
    M_CONVENTIONS,
    Sp6Basis,
    build_M,
    h_inverse,
    h_substitution,
    verify_all,
)


@pytest.fixture(scope="module")
def report(sp6_art):
    return verify_all(seed=0, art=sp6_art)


def test_basis_blocks():
    b = Sp6Basis.racah()
    assert len(b.pairs) == 21 and len(set(b.pairs)) == 21
    assert len(b.unitary_block) == 9 and len(b.complement_block) == 12
    assert set(b.unitary_block).isdisjoint(b.complement_block)


def test_constraint_resolves_every_pair():
    b = Sp6Basis.racah()
    idx = [k for k in range(-3, 4) if k]
    raw = [(i, j) for i in idx for j in idx]
    non_canonical = [p for p in raw if p not in b.index]
    assert len(raw) == 36 and len(non_canonical) == 15
    for i, j in raw:
        k, s = b.resolve(i, j)
        # X_{i,j} + e_i e_j X_{-j,-i} = 0 from both sides
        k2, s2 = b.resolve(-j, -i)
        assert k == k2 and s == -(1 if i > 0 else -1) * (1 if j > 0 else -1) * s2
    with pytest.raises(ValueError):
        b.resolve(0, 1)


def test_sample_bracket(sp6_art):
    alg, b = sp6_art.algebra, sp6_art.basis
    # [X11, X12] = X12 from the delta terms; [X12, X21] = X11 - X22
    assert alg.bracket(b.index[(1, 1)], b.index[(1, 2)]) == {b.index[(1, 2)]: 1}
    assert alg.bracket(b.index[(1, 2)], b.index[(2, 1)]) == {b.index[(1, 1)]: 1, b.index[(2, 2)]: -1}


def test_algebra_is_valid(sp6_art):
    rep = validate(sp6_art.algebra)
    assert rep.ok and rep.checked == 1330


def test_only_invariant_layouts_accepted(sp6_art):
    cas = sp6_art.casimirs
    names = [c[0] for c in M_CONVENTIONS]
    assert cas.convention in names
    assert names.index(cas.convention) == len(cas.rejected)
    for name in cas.rejected:
        coeffs = char_poly_det(build_M(sp6_art.basis, name))
        assert not all(is_invariant(sp6_art.algebra, c) for c in (coeffs[4], coeffs[2], coeffs[0]))


def test_casimirs(sp6_art):
    cas = sp6_art.casimirs
    assert (cas.C2.degree, cas.C4.degree, cas.C6.degree) == (2, 4, 6)
    for c in (cas.C2, cas.C4, cas.C6):
        assert c.is_real() and c.is_homogeneous()
        assert is_invariant(sp6_art.algebra, c)


def test_h_substitution_round_trip():
    sub, inv = h_substitution(), h_inverse()
    for k in (0, 4, 8):
        x = Poly.var(21, k)
        assert substitute_linear(substitute_linear(x, inv), sub) == x


def test_chain_closure_and_h3(sp6_art):
    v = validate_chain(sp6_art.chain)
    assert v.ok and v.subalgebra.dim == 9
    assert validate_chain(sp6_art.adapted_chain).ok
    assert sp6_art.chain.complement_vars == frozenset(COMPLEMENT)


def test_labels_are_scalars_but_not_invariants(sp6_art):
    for name, f in sp6_art.labels.items():
        assert f.is_homogeneous()
        assert is_subgroup_scalar(sp6_art.adapted_chain, f), name
        assert not is_invariant(sp6_art.adapted, f), name


def test_label_bidegrees(sp6_art):
    expected = {"C22": (2, 2), "C42": (4, 2), "C24": (2, 4)}
    for name, (k, l) in expected.items():
        f = sp6_art.labels[name]
        assert f.degree == k + l
        for m, _ in f.items():
            assert sum(e for v, e in m.exponents.items() if v in COMPLEMENT) == k


def test_sub_casimirs(sp6_art):
    sub = sp6_art.sub
    assert (sub["c2"].degree, sub["c3"].degree, sub["h3"].degree) == (2, 3, 1)
    assert functional_independence(list(sub.values()), 21) == 3


def test_report_all_checks_pass(report):
    failed = [c["name"] for c in report["checks"] if not c["ok"]]
    assert not failed and report["ok"]


def test_report_term_counts(report):
    tc = report["term_counts"]
    assert tc["computed"] == {"C22": 126, "C42": 444, "C24": 686}
    assert tc["match"]


def test_report_certificates(report):
    verdicts = {c["pair_id"]: c["verdict"] for c in report["certificates"]}
    assert set(verdicts) == {"C22,C42", "C22,C24", "C24,C42"}
    # never a non-commuting verdict: every bracket vanishes
    assert Verdict.NON_COMMUTING.value not in verdicts.values()
    assert verdicts["C24,C42"] == Verdict.COMMUTING.value
    for c in report["certificates"]:
        assert c["bracket_vanishes"]
        if c["verdict"] == Verdict.INCONCLUSIVE.value:
            assert c["witness"] and all(a["status"] == "PossiblyFactorizable" for a in c["attempts"].values())


def test_report_is_deterministic(sp6_art, report):
    assert verify_all(seed=0, art=sp6_art) == report
