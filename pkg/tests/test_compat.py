from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import (
    GF5,
    GF11,
    GF16,
    P1,
    P2,
    P3,
    Q,
    Q1_basic,
    R1_basic,
    elements,
    random_array,
    random_typed_basic,
    same_theta_star_pair,
)

from leonard.compat import (
    CompatInput,
    basic_conditions,
    closed_form_companion,
    companion_entries_typeO,
    companion_families,
    companion_of,
    compat_conditions_basic,
    compatible,
    compatible_by_endpoints,
    compatible_by_products,
    compatible_direct,
    detect_bond_shift,
    detect_shift,
    materialize_family,
)
from leonard.errors import (
    LeonardError,
    MissingRoot,
    NotCompatible,
    ThetaStarMismatch,
    TypeMismatch,
    TypeO,
    WrongDegree,
)
from leonard.matrix import Matrix, bond_mate
from leonard.oracle import in_omega, is_leonard_pair
from leonard.parray import (
    ParameterArray,
    affine,
    invariants,
    is_bipartite,
    realize,
    relatives,
)
from leonard.typesys import BasicSequence, LeonardType, array_from_basic


def _pair(p, q) -> CompatInput:
    return CompatInput(p, q)


# -- the three tests on the small fixtures ------------------------------------


@pytest.mark.parametrize("other", [P1, P2, P3], ids=["P1", "P2", "P3"])
def test_small_fixtures_are_compatible(other):
    c = _pair(P1(), other())
    assert compatible_by_products(c) and compatible_by_endpoints(c) and compatible_direct(c)


def test_products_differ():
    other = ParameterArray.make(Q, [-1, 1], [0, 1], [1], [3])
    c = _pair(P1(), other)
    assert not compatible(c)
    with pytest.raises(NotCompatible):
        companion_of(c)


def test_commutators_of_p1_and_p3():
    a, b = realize(P1()), realize(P3())
    assert b.a_matrix == Matrix.from_rows(Q, [[2, -2], [1, -1]])
    expected = Matrix.from_rows(Q, [[0, -2], [-1, 0]])
    assert a.a_matrix @ a.a_star - a.a_star @ a.a_matrix == expected
    assert b.a_matrix @ b.a_star - b.a_star @ b.a_matrix == expected


def test_theta_star_must_match():
    with pytest.raises(ThetaStarMismatch):
        CompatInput(P1(), ParameterArray.make(Q, [0, 1], [0, 2], [2], [4]))


def test_companion_examples():
    assert companion_of(_pair(P1(), P3())).k_diagonal == [Q(-3), Q(3)]
    res = companion_of(_pair(P1(), P2()))
    assert res.k.is_zero() and res.b == realize(P1()).a_matrix
    assert companion_of(_pair(P1(), relatives(P1(), "vee"))).k_diagonal == [Q(-2), Q(4)]


def test_shift_detection():
    assert detect_shift(_pair(P1(), P2())) == 0
    assert detect_shift(_pair(P1(), affine(P1(), 1, 5, 1, 0))) == 5
    assert detect_shift(_pair(P1(), P3())) is None


def test_bond_shift_detection():
    assert detect_bond_shift(_pair(P1(), P3())) == 1
    assert realize(P3()).a_matrix == bond_mate(realize(P1()).a_matrix).shift(Q(1))
    assert detect_bond_shift(_pair(P1(), relatives(P1(), "vee"))) == 0
    assert detect_bond_shift(_pair(P1(), P2())) is None


def test_small_diameter_entries():
    assert companion_entries_typeO(_pair(P1(), P3())) == [Q(-3), Q(3)]
    assert companion_entries_typeO(_pair(P1(), P2())) == [Q(0), Q(0)]
    with pytest.raises(WrongDegree):
        companion_entries_typeO(_pair(array_from_basic(Q1_basic(), 3), array_from_basic(Q1_basic(), 3)))


def test_small_diameter_entries_d2():
    rng = random.Random(21)
    hits = 0
    while hits < 10:
        c = same_theta_star_pair(LeonardType.O, rng)
        if c.d != 2 or not compatible(c):
            continue
        assert companion_entries_typeO(c) == companion_of(c).k_diagonal
        hits += 1


# -- basic-variable conditions -----------------------------------------------------


def test_conditions_basic_examples():
    b = Q1_basic()
    assert compat_conditions_basic(b, b, 3)
    assert compat_conditions_basic(b, b.replace(mu=-b["mu"]), 3)
    r = R1_basic()
    assert compat_conditions_basic(r, r.replace(r=r["r"] + r["s"] + r["s"] * r["s_star"]), 3)


def test_conditions_basic_rejects_mixed_inputs():
    with pytest.raises(TypeMismatch):
        basic_conditions(Q1_basic(), Q1_basic().replace(h_star=Q(2)), 3)
    b = BasicSequence.make("III+", Q, [0, 1, 1, 0, 1, 1, 0])
    with pytest.raises(TypeMismatch):
        basic_conditions(Q1_basic(), b, 3)


def test_kappa_mismatch_with_equal_endpoint_products():
    b = BasicSequence.make("II", GF11, [1, 2, 8, 6, 5, 7, 0])
    bp = BasicSequence.make("II", GF11, [1, 2, 0, 6, 5, 7, 4])
    p, q = array_from_basic(b, 3), array_from_basic(bp, 3)
    assert all(p.vphi(i) * p.ph(i) == q.vphi(i) * q.ph(i) for i in (1, 3))
    assert invariants(p).kappa != invariants(q).kappa
    c = CompatInput(p, q)
    assert not compatible_by_endpoints(c)
    assert not compatible_by_products(c)
    assert not compat_conditions_basic(b, bp, 3)


# -- families ------------------------------------------------------------------------


def _ids(b, d=3):
    return [f.family_id for f in companion_families(b, d)]


def test_type3plus_has_four_families():
    b = BasicSequence.make("III+", Q, [0, 1, 1, 0, 2, 1, 3])
    fams = companion_families(b, 4)
    assert [f.family_id for f in fams] == ["type3+sol1", "type3+sol2", "type3+sol3", "type3+sol4"]
    assert "s' = tau/h*" in fams[2].constraints and "tau' = s h*" in fams[2].constraints


def test_type4_families_on_r1():
    assert _ids(R1_basic()) == ["type4sol1", "type4sol3"]
    r = R1_basic()
    results = materialize_family(r, "type4sol1")
    assert {x.b_basic["r"] for x in results} == {r["r"], r["r"] + r["s"] + r["s"] * r["s_star"]}


def test_type4_second_family_has_no_root_over_gf4():
    # The quadratic reduces to v^2 + v + omega, and omega has trace 1.
    with pytest.raises(MissingRoot):
        materialize_family(R1_basic(), "type4sol3")


def test_type4_second_family_over_gf16():
    # R1's shape with omega in GF(16), but s* = r = t (the generator) so that s' + 1 != 0.
    w = next(x for x in elements(GF16) if x * x + x + 1 == 0)
    t = GF16([0, 1, 0, 0])
    b = BasicSequence(LeonardType.IV, (GF16(0), GF16(1), w, GF16(0), GF16(1), t, t))
    results = materialize_family(b, "type4sol3")
    assert results
    a = realize(array_from_basic(b, 3)).a_matrix
    for r in results:
        assert r.closed_form == "type4-second-family"
        assert r.b_basic["s"] == 1 + b["s"] + b["s_star"]
        assert r.b_basic["r"] + b["r"] != 0
        assert r.k == a - r.b


def test_type1_guards():
    degenerate = BasicSequence.make("I", Q, [0, 1, 2, 0, 1, 0, 0], q=2)
    assert _ids(degenerate) == ["type1sol1", "type1sol2", "type1sol5"]
    assert _ids(degenerate.replace(tau=Q(3))) == ["type1sol1", "type1sol2"]
    generic = BasicSequence.make("I", Q, [0, 1, 2, 0, 1, 1, 3], q=2)
    fams = companion_families(generic, 3)
    assert [f.family_id for f in fams] == ["type1sol1", "type1sol2", "type1sol3", "type1sol4"]
    assert [f.requires_sqrt for f in fams] == [False, False, True, True]


def test_type_o_has_no_basic_sequence():
    with pytest.raises(TypeO):
        BasicSequence.make("O", Q, [0] * 7)


def test_type2_degenerate_family():
    b = BasicSequence.make("II", Q, [0, 1, 0, 0, 1, 0, 3])
    assert _ids(b) == ["type2sol1", "type2sol2", "type2sol5"]
    (res,) = materialize_family(b, "type2sol5", {"tau_prime": -3}, 3)
    tau, tau2, mu_star = Q(3), Q(-3), Q(1)
    assert res.k_diagonal == [-(3 - 2 * i) * (tau - tau2) / mu_star for i in range(4)]
    assert res.k == realize(array_from_basic(b, 3)).a_matrix - res.b
    with pytest.raises(MissingRoot):
        materialize_family(b, "type2sol5", {"tau_prime": 1}, 3)


def test_bond_family_doubles_the_diagonal():
    b = Q1_basic()
    (res,) = materialize_family(b, "type2sol2", None, 3)
    a = realize(array_from_basic(b, 3)).a
    assert res.k_diagonal == [2 * x for x in a]
    assert res.closed_form == "bond"


def test_closed_form_shift_family():
    b = Q1_basic()
    name, entries = closed_form_companion(b, b.replace(delta=Q(-4)), "type2sol1", 3)
    assert name == "shift" and entries == [Q(4)] * 4


# -- properties ------------------------------------------------------------------------


@pytest.mark.parametrize("t", list(LeonardType), ids=lambda t: t.value)
def test_family_members_satisfy_the_equations(t):
    if t is LeonardType.O:
        return
    rng = random.Random(31)
    checked = 0
    while checked < 8:
        b, d = random_typed_basic(t, rng)
        p = array_from_basic(b, d)
        for fam in companion_families(b, d):
            if fam.free_parameters:
                continue
            try:
                results = materialize_family(b, fam, None, d)
            except LeonardError:
                continue
            for r in results:
                assert compat_conditions_basic(b, r.b_basic, d)
                assert companion_of(CompatInput(p, r.b_array)).k == r.k
                checked += 1


def _gf5_arrays(d: int, n: int, seed: int):
    rng = random.Random(seed)
    arrays = []
    while len(arrays) < n:
        p = random_array(GF5, d, rng)
        if p is not None:
            arrays.append(p)
    return arrays


def test_compatibility_is_an_equivalence_relation():
    # Every array sharing one theta_star, so all pairs are admissible inputs.
    rng = random.Random(41)
    base = random_array(GF5, 2, rng)
    family = [base]
    while len(family) < 12:
        p = random_array(GF5, 2, rng, theta_star=list(base.theta_star))
        if p is not None:
            family.append(p)
    rel = {(i, j): compatible(CompatInput(x, y)) for i, x in enumerate(family) for j, y in enumerate(family)}
    n = len(family)
    for i in range(n):
        assert rel[i, i]
        for j in range(n):
            assert rel[i, j] == rel[j, i]
            for k in range(n):
                if rel[i, j] and rel[j, k]:
                    assert rel[i, k]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_companions_stay_companions_under_scalar_shifts(seed):
    rng = random.Random(seed)
    c = same_theta_star_pair(rng.choice([LeonardType.O, LeonardType.II]), rng)
    if not compatible(c):
        return
    res = companion_of(c)
    a = realize(c.p)
    zeta = c.p.field(rng.randint(-4, 4))
    moved = a.a_matrix - res.k.shift(zeta)
    assert moved == res.b.shift(-zeta)
    # A - (K + zeta I) is a Leonard pair partner of A*, though no longer normalized.
    assert is_leonard_pair(moved, a.a_star).is_pair


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_shifting_both_arrays_keeps_compatibility(seed):
    rng = random.Random(seed)
    c = same_theta_star_pair(rng.choice([LeonardType.O, LeonardType.IIIminus]), rng)
    zeta = rng.randint(-3, 3)
    shifted = CompatInput(affine(c.p, 1, zeta, 1, 0), affine(c.p_prime, 1, zeta, 1, 0))
    assert compatible(shifted) == compatible(c)


@pytest.mark.parametrize("p", _gf5_arrays(1, 6, 3) + _gf5_arrays(2, 6, 4) + _gf5_arrays(3, 4, 5),
                         ids=lambda p: f"d{p.d}")
def test_bipartite_iff_bond_self_paired(p):
    r = realize(p)
    assert is_bipartite(r) == (bond_mate(r.a_matrix) == r.a_matrix)
    assert in_omega(r.a_matrix, r.a_star)
