from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import GF5, GF7, GF13, P1, Q, Q1_basic, random_array

from leonard.errors import DegreeTooSmall, InvalidInput, LengthMismatch, ZeroScale
from leonard.matrix import Matrix, bond_mate
from leonard.parray import (
    ParameterArray,
    affine,
    dual_basis_data,
    invariants,
    is_bipartite,
    one_d_identities,
    realize,
    relatives,
    split_realize,
    validate,
)
from leonard.typesys import array_from_basic


def test_p1_is_valid():
    assert validate(P1()).valid
    assert validate(P1()).to_json() == {"valid": True}


def test_p1_violations():
    bad_phi = ParameterArray.make(Q, [0, 1], [0, 1], [1], [0])
    assert "ii'" in {v.condition for v in validate(bad_phi).violations}
    bad_theta = ParameterArray.make(Q, [0, 0], [0, 1], [1], [2])
    assert "i" in {v.condition for v in validate(bad_theta).violations}


def test_shape_errors():
    with pytest.raises(LengthMismatch):
        ParameterArray.make(Q, [0, 1, 2], [0, 1], [1], [2])
    with pytest.raises(InvalidInput):
        ParameterArray.make(Q, [0], [0], [], [])


def test_q1_invariants():
    p = array_from_basic(Q1_basic(), 3)
    assert p.theta == tuple(Q(x) for x in ["-21/2", "-3/2", "11/2", "21/2"])
    inv = invariants(p)
    assert inv.beta == 2 and inv.kappa == 4
    with pytest.raises(DegreeTooSmall):
        invariants(P1())


def test_relatives_of_p1():
    assert relatives(P1(), "Down") == ParameterArray.make(Q, [1, 0], [0, 1], [2], [1])
    assert relatives(P1(), "vee") == ParameterArray.make(Q, [0, -1], [0, 1], [-1], [-2])
    assert relatives(relatives(P1(), "star"), "star") == P1()


def test_affine_of_p1():
    assert affine(P1(), 2, 3, 1, 0) == ParameterArray.make(Q, [3, 5], [0, 1], [2], [4])
    assert affine(P1(), 1, 0, 1, 0) == P1()
    assert affine(P1(), -1, 0, 1, 0) == relatives(P1(), "vee")
    with pytest.raises(ZeroScale):
        affine(P1(), 0, 0, 1, 0)


def test_realize_p1():
    r = realize(P1())
    assert r.a == (Q(-1), Q(2)) and r.x == (Q(-2),)
    assert r.a_matrix == Matrix.from_rows(Q, [[-1, -2], [1, 2]])
    assert r.a_star == Matrix.diag(Q, [0, 1])
    down = realize(relatives(P1(), "Down"))
    assert down.a_matrix == r.a_matrix
    vee = realize(relatives(P1(), "vee"))
    assert vee.a == (Q(1), Q(-2)) and vee.x == (Q(-2),)
    assert vee.a_matrix == bond_mate(r.a_matrix)


def test_split_realize_p1():
    s = split_realize(P1())
    assert s.a_split == Matrix.from_rows(Q, [[0, 0], [1, 1]])
    assert s.a_star_split == Matrix.from_rows(Q, [[0, 1], [0, 1]])
    s = split_realize(relatives(P1(), "Down"))
    assert s.a_split == Matrix.from_rows(Q, [[1, 0], [1, 0]])
    assert s.a_star_split == Matrix.from_rows(Q, [[0, 2], [0, 1]])


def test_dual_basis_data_p1():
    data = dual_basis_data(realize(P1()), Q(0))
    assert data.b == (Q(1),) and data.c == (Q(-2),)
    assert data.eigvec0 == (Q(1), Q("-1/2"))  # u_0 = 1 scaling of (2, -1)
    assert data.b[0] * data.c[0] == realize(P1()).x[0]
    vee = dual_basis_data(realize(relatives(P1(), "vee")), Q(0))
    assert vee.c[0] + realize(relatives(P1(), "vee")).a[1] == 0


def test_bipartite():
    assert not is_bipartite(realize(P1()))
    p = ParameterArray.from_eigenvalues([Q(-1), Q(1)], [Q(0), Q(1)], Q(-1))
    r = realize(p)
    assert is_bipartite(r)
    assert bond_mate(r.a_matrix) == r.a_matrix


def test_one_d_identities():
    assert one_d_identities(P1()).all()
    assert one_d_identities(array_from_basic(Q1_basic(), 3)).all()


# -- random arrays ----------------------------------------------------------------

SETTINGS = [(Q, d) for d in range(1, 7)] + [(GF5, d) for d in (1, 2, 3)] + [(GF7, d) for d in (3, 4, 5)] + [
    (GF13, d) for d in (3, 6, 8)
]


def _arrays(n: int, seed: int):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        f, d = rng.choice(SETTINGS)
        p = random_array(f, d, rng)
        if p is not None:
            out.append(p)
    return out


@pytest.mark.parametrize("p", _arrays(60, 11), ids=lambda p: f"{p.field}-d{p.d}")
def test_realization_identities(p):
    r = realize(p)
    th, ts, a, d = p.theta, p.theta_star, r.a, p.d
    assert sum(a, p.field.zero()) == sum(th, p.field.zero())
    assert p.vphi(1) == (a[0] - th[0]) * (ts[0] - ts[1])
    assert p.ph(1) == (a[0] - th[d]) * (ts[0] - ts[1])
    assert p.vphi(d) == (a[d] - th[d]) * (ts[d] - ts[d - 1])
    assert p.ph(d) == (a[d] - th[0]) * (ts[d] - ts[d - 1])
    assert realize(relatives(p, "Down")).a_matrix == r.a_matrix
    down = realize(relatives(p, "down"))
    assert down.a == a[::-1]
    assert down.x == r.x[::-1]
    for ell in range(d + 1):
        assert (th[ell] - th[d - ell]) / (th[0] - th[d]) == (ts[ell] - ts[d - ell]) / (ts[0] - ts[d])
    assert one_d_identities(p).all()
    dual_basis_data(r)


def test_d2_last_diagonal_closed_form():
    rng = random.Random(12)
    for _ in range(25):
        p = random_array(rng.choice([Q, GF7, GF13]), 2, rng)
        th, ts, a = p.theta, p.theta_star, realize(p).a
        assert a[2] == (th[1] * (ts[0] - ts[2]) - a[0] * (ts[0] - ts[1])) / (ts[1] - ts[2])


@pytest.mark.parametrize("p", _arrays(30, 13), ids=lambda p: f"{p.field}-d{p.d}")
def test_relatives_are_involutions(p):
    for which in ("star", "down", "Down", "vee"):
        assert relatives(relatives(p, which), which) == p
    assert validate(relatives(p, "star")).valid


@pytest.mark.parametrize("p", _arrays(20, 14), ids=lambda p: f"{p.field}-d{p.d}")
def test_swapped_split_forces_reversed_eigenvalues(p):
    # (varphi', phi') = (phi, varphi) with the same theta_star: theta' is theta reversed, up to a shift.
    d = p.d
    for zeta in (0, 3):
        th2 = [p.theta[d - i] + zeta for i in range(d + 1)]
        q = ParameterArray(p.field, d, tuple(th2), p.theta_star, p.phi, p.varphi)
        assert validate(q).valid
        # Negated split sequences force theta'_i = zeta - theta_i.
        th3 = [p.field(zeta) - x for x in p.theta]
        neg = ParameterArray(p.field, d, tuple(th3), p.theta_star,
                             tuple(-x for x in p.varphi), tuple(-x for x in p.phi))
        assert validate(neg).valid


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_affine_preserves_validity(seed, d):
    rng = random.Random(seed)
    p = random_array(Q, d, rng)
    if p is None:
        return
    xi, xs = rng.choice([1, -2, 3]), rng.choice([1, 5, -1])
    q = affine(p, xi, rng.randint(-5, 5), xs, rng.randint(-5, 5))
    assert validate(q).valid
    assert q.varphi == tuple(p.field(xi * xs) * v for v in p.varphi)
