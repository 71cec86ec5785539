"""Shared fields, fixtures and random generators for the test suite.

The array generator never touches ``typesys``: it picks a common ``beta``,
runs the three-term eigenvalue recurrence for both sequences, completes the
split sequences from a random ``varphi_1`` and keeps the result only if it
validates. That keeps it usable as an independent source of arrays.
"""

from __future__ import annotations

import random
from fractions import Fraction

from leonard.compat import (
    CompatInput,
    all_family_companions,
    companion_families,
    materialize_family,
)
from leonard.errors import LeonardError
from leonard.field import FieldDescriptor, FieldElement
from leonard.matrix import Matrix
from leonard.parray import ParameterArray, affine, relatives, validate
from leonard.typesys import (
    BasicSequence,
    LeonardType,
    array_from_basic,
    inequality_failures,
)

Q = FieldDescriptor.rational()
GF4 = FieldDescriptor.extension(2, [1, 1, 1])
GF5 = FieldDescriptor.prime(5)
GF7 = FieldDescriptor.prime(7)
GF8 = FieldDescriptor.extension(2, [1, 1, 0, 1])
GF11 = FieldDescriptor.prime(11)
GF13 = FieldDescriptor.prime(13)
GF16 = FieldDescriptor.extension(2, [1, 1, 0, 0, 1])
GF25 = FieldDescriptor.extension(5, [2, 0, 1])

OMEGA = GF4([0, 1])  # a root of x^2 + x + 1

# One line per acceptance criterion, echoed in the pytest terminal summary.
ACCEPTANCE_LINES: list[str] = []


def P1() -> ParameterArray:
    return ParameterArray.make(Q, [0, 1], [0, 1], [1], [2])


def P2() -> ParameterArray:
    return ParameterArray.make(Q, [1, 0], [0, 1], [2], [1])


def P3() -> ParameterArray:
    return ParameterArray.make(Q, [1, 0], [0, 1], [-1], [-2])


def Q1_basic() -> BasicSequence:
    return BasicSequence.make("II", Q, [0, 7, 1, 0, 5, 1, 0])


def R1_basic() -> BasicSequence:
    w = OMEGA
    return BasicSequence.make("IV", GF4, [0, 1, w, 0, 1, w, w])


_ELEMENTS: dict[FieldDescriptor, list[FieldElement]] = {}


def elements(f: FieldDescriptor) -> list[FieldElement]:
    if f not in _ELEMENTS:
        _ELEMENTS[f] = list(f.elements())
    return _ELEMENTS[f]


def scalar(f: FieldDescriptor, rng: random.Random, nonzero: bool = False) -> FieldElement:
    while True:
        if f.is_finite:
            x = rng.choice(elements(f))
        else:
            x = f(Fraction(rng.randint(-9, 9), rng.choice([1, 1, 1, 2, 3])))
        if x or not nonzero:
            return x


def _recurrence(f: FieldDescriptor, d: int, beta: FieldElement, rng: random.Random) -> list[FieldElement]:
    s = [scalar(f, rng) for _ in range(min(d + 1, 3))]
    while len(s) < d + 1:
        s.append((beta + 1) * (s[-1] - s[-2]) + s[-3])
    return s


def random_array(f: FieldDescriptor, d: int, rng: random.Random, beta: FieldElement | None = None,
                 theta_star: list[FieldElement] | None = None, tries: int = 400) -> ParameterArray | None:
    """A random valid array, or ``None`` if ``tries`` attempts all fail."""
    for _ in range(tries):
        b = beta if beta is not None else scalar(f, rng)
        th = _recurrence(f, d, b, rng)
        ts = list(theta_star) if theta_star is not None else _recurrence(f, d, b, rng)
        if len(set(th)) < d + 1 or len(set(ts)) < d + 1:
            continue
        try:
            p = ParameterArray.from_eigenvalues(th, ts, scalar(f, rng, nonzero=True))
        except LeonardError:
            continue
        if validate(p).valid:
            return p
    return None


def random_basic(t: LeonardType, f: FieldDescriptor, d: int, rng: random.Random,
                 q: FieldElement | None = None, tries: int = 2000) -> BasicSequence | None:
    for _ in range(tries):
        try:
            b = BasicSequence(t, tuple(scalar(f, rng) for _ in range(7)), q)
        except LeonardError:
            continue
        if not inequality_failures(b, d):
            return b
    return None


# Settings used to draw basic sequences of every type: (field, d, q).
TYPE_SETTINGS: dict[LeonardType, list[tuple[FieldDescriptor, int, FieldElement | None]]] = {
    LeonardType.I: [(GF13, 3, GF13(2)), (GF11, 4, GF11(2)), (Q, 3, Q(2)), (GF16, 3, GF16([0, 1, 0, 0]))],
    LeonardType.II: [(GF11, 3, None), (GF13, 4, None), (Q, 3, None), (Q, 5, None)],
    LeonardType.IIIplus: [(GF11, 4, None), (GF13, 6, None), (Q, 4, None)],
    LeonardType.IIIminus: [(GF11, 3, None), (GF13, 5, None), (Q, 3, None)],
    LeonardType.IV: [(GF4, 3, None), (GF8, 3, None), (GF16, 3, None)],
}


def random_typed_basic(t: LeonardType, rng: random.Random) -> tuple[BasicSequence, int]:
    while True:
        f, d, q = rng.choice(TYPE_SETTINGS[t])
        b = random_basic(t, f, d, rng, q)
        if b is not None:
            return b, d


def same_theta_star_pair(t: LeonardType, rng: random.Random) -> CompatInput:
    """A pair of arrays of type ``t`` sharing ``theta_star``; roughly half are compatible."""
    if t is LeonardType.O:
        return _type_o_pair(rng)
    b, d = random_typed_basic(t, rng)
    p = array_from_basic(b, d)
    if rng.random() < 0.5:
        fams = companion_families(b, d)
        rng.shuffle(fams)
        for fam in fams:
            if fam.free_parameters:
                continue
            try:
                results = materialize_family(b, fam, {"delta_prime": scalar(b.field, rng)}, d)
            except LeonardError:
                continue
            return CompatInput(p, rng.choice(results).b_array)
    starred = {"delta_star", "mu_star", "h_star", "s_star"}
    while True:
        changes = {n: scalar(b.field, rng) for n in b.names if n not in starred}
        bp = b.replace(**changes)
        if not inequality_failures(bp, d):
            return CompatInput(p, array_from_basic(bp, d))


def _type_o_pair(rng: random.Random) -> CompatInput:
    f = rng.choice([Q, GF5, GF7, GF11, GF13])
    d = rng.choice([1, 2])
    while True:
        p = random_array(f, d, rng)
        if p is None:
            continue
        pp = random_array(f, d, rng, theta_star=list(p.theta_star))
        if pp is None:
            continue
        roll = rng.random()
        if roll < 0.3:
            matched = match_products(p, list(pp.theta))
            if matched is not None:
                pp = matched
        elif roll < 0.5 and f.is_finite and f.order <= 7:
            partners = small_partners(p)
            if partners:
                pp = rng.choice(partners)
        elif roll < 0.6:
            pp = affine(relatives(p, rng.choice(["Down", "vee"])), 1, scalar(f, rng), 1, 0)
        return CompatInput(p, pp)


def match_products(p: ParameterArray, theta: list[FieldElement]) -> ParameterArray | None:
    """An array with eigenvalues ``theta`` and the same split products as ``p``, if one exists.

    Only the first product is imposed through a quadratic in ``varphi_1``;
    for ``d = 2`` the second product is then checked.
    """
    from leonard.field import solve_quadratic

    ts = list(p.theta_star)
    d = p.d
    c = (ts[1] - ts[0]) * (theta[0] - theta[d])
    # varphi_1 * (varphi_1 - c) = varphi_1 phi_1 of p
    target = p.vphi(1) * p.ph(1)
    for v in sorted(solve_quadratic(-c, -target), key=lambda x: x.sort_key()):
        if not v:
            continue
        try:
            cand = ParameterArray.from_eigenvalues(theta, ts, v)
        except LeonardError:
            continue
        if validate(cand).valid and all(
            cand.vphi(i) * cand.ph(i) == p.vphi(i) * p.ph(i) for i in range(1, d + 1)
        ):
            return cand
    return None


def zeta_closure(ks, f: FieldDescriptor) -> set[Matrix]:
    return {k.shift(z) for k in ks for z in f.elements()}


def family_companion_set(b: BasicSequence, d: int) -> set[Matrix]:
    return zeta_closure([r.k for r in all_family_companions(b, d)], b.field)


def small_partners(p: ParameterArray) -> list[ParameterArray]:
    """Every valid array over a small finite field with ``p``'s dual eigenvalues and split products."""
    from itertools import permutations

    f = p.field
    target = [p.vphi(i) * p.ph(i) for i in range(1, p.d + 1)]
    out = []
    for th in permutations(elements(f), p.d + 1):
        for v in elements(f):
            if not v:
                continue
            cand = ParameterArray.from_eigenvalues(list(th), list(p.theta_star), v)
            if [cand.vphi(i) * cand.ph(i) for i in range(1, p.d + 1)] == target and validate(cand).valid:
                out.append(cand)
    return out
