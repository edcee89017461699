import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labkit.algebra import (
    AlgebraError,
    LieAlgebra,
    abelian,
    adjoint_matrix,
    berezin_bracket,
    change_basis,
    diffop_apply,
    generator_op,
    heisenberg,
    invariant_count,
    is_invariant,
    sl3,
    so3,
    validate,
)
from labkit.poly import Poly, parse_poly

x = [Poly.var(3, k) for k in range(3)]
CASIMIR = x[0] ** 2 + x[1] ** 2 + x[2] ** 2


@st.composite
def small_polys(draw, n=3, max_deg=3):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        exps = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        terms[exps] = draw(st.integers(-5, 5))
    return Poly(n, terms)


def test_standard_algebras_validate():
    for alg in (so3(), heisenberg(), abelian(4), sl3()):
        rep = validate(alg)
        assert rep.ok and not rep.failures


def test_rescaled_so3_still_satisfies_jacobi():
    # [X1, X2] = X3, [X2, X3] = 2 X1, [X3, X1] = X2 is a diagonal rescaling
    alg = LieAlgebra.from_table("so3s", ["X1", "X2", "X3"],
                                {(0, 1): {2: 1}, (1, 2): {0: 2}, (2, 0): {1: 1}})
    assert validate(alg).ok


def test_tampered_so3_reports_triple():
    alg = LieAlgebra.from_table("bad", ["X1", "X2", "X3"],
                                {(0, 1): {2: 1}, (1, 2): {0: 1, 1: 1}, (2, 0): {1: 1}})
    rep = validate(alg)
    assert not rep.ok and rep.failures == [(0, 1, 2)]


def test_bad_index_rejected():
    with pytest.raises(AlgebraError):
        LieAlgebra.from_table("bad", ["A", "B"], {(0, 1): {5: 1}})
    with pytest.raises(AlgebraError):
        LieAlgebra.from_json({"dim": 2, "brackets": [{"i": 1, "j": 0, "terms": []}]})


def test_json_round_trip():
    alg = sl3()
    again = LieAlgebra.from_json(json.loads(json.dumps(alg.to_json())))
    assert again.brackets == alg.brackets and again.names == alg.names


def test_adjoint_matrices():
    z = Poly.zero(3)
    assert adjoint_matrix(heisenberg()) == [[z, x[2], z], [-x[2], z, z], [z, z, z]]
    assert adjoint_matrix(so3()) == [[z, x[2], -x[1]], [-x[2], z, x[0]], [x[1], -x[0], z]]
    assert all(not e for row in adjoint_matrix(abelian(3)) for e in row)


@pytest.mark.parametrize("alg,expected", [(so3(), 1), (heisenberg(), 1), (abelian(4), 4), (sl3(), 2),
                                          (abelian(0), 0), (abelian(1), 1)])
def test_invariant_count(alg, expected):
    assert {invariant_count(alg, seed=s) for s in range(3)} == {expected}


@pytest.mark.parametrize("seed", range(4))
def test_invariant_count_basis_independent(seed):
    rng = random.Random(seed)
    alg = sl3()
    while True:
        rows = [[rng.randint(-3, 3) for _ in range(alg.dim)] for _ in range(alg.dim)]
        try:
            other = change_basis(alg, rows)
            break
        except ValueError:
            continue
    assert validate(other).ok
    assert invariant_count(other, seed=seed) == invariant_count(alg, seed=seed)


def test_diffop_examples():
    alg = so3()
    assert not diffop_apply(alg, [1, 0, 0], CASIMIR)
    assert generator_op(alg, 0, x[1]) == x[2]
    assert not generator_op(alg, 2, Poly.const(3, 7))
    with pytest.raises(ValueError):
        diffop_apply(alg, [1, 0], x[0])


def test_is_invariant_examples():
    assert is_invariant(so3(), CASIMIR)
    assert is_invariant(heisenberg(), x[2])
    assert not is_invariant(so3(), x[0])
    assert generator_op(so3(), 1, x[0]) == -x[2]


def test_berezin_examples():
    alg = so3()
    assert berezin_bracket(alg, x[0], x[1]) == x[2]
    assert berezin_bracket(alg, x[0] ** 2, x[1] ** 2) == 4 * x[0] * x[1] * x[2]
    g = parse_poly("x0^3 - 2*x1*x2 + 5", 3)
    assert not berezin_bracket(alg, CASIMIR, g)


@settings(max_examples=40, deadline=None)
@given(small_polys(), small_polys(), small_polys(), st.sampled_from(["so3", "heisenberg"]))
def test_poisson_axioms(f, g, h, name):
    alg = so3() if name == "so3" else heisenberg()

    def pb(a, b):
        return berezin_bracket(alg, a, b)

    assert pb(f, g) == -pb(g, f)
    assert pb(f * g, h) == f * pb(g, h) + pb(f, h) * g
    assert not (pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g)))


@settings(max_examples=40, deadline=None)
@given(small_polys(), st.integers(0, 2), st.sampled_from(["so3", "heisenberg"]))
def test_bracket_with_linear_symbol_is_the_operator(h, l, name):
    alg = so3() if name == "so3" else heisenberg()
    assert berezin_bracket(alg, x[l], h) == generator_op(alg, l, h)


@settings(max_examples=30, deadline=None)
@given(small_polys())
def test_invariants_are_poisson_central(g):
    assert not berezin_bracket(so3(), CASIMIR, g)
    assert not berezin_bracket(heisenberg(), x[2] ** 2, g)
