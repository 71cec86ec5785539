"""Definition-level checks that bypass every closed form in the package.

:func:`is_leonard_pair` decides whether ``(A, A*)`` is a Leonard pair by
diagonalizing ``A`` directly and looking at the pattern of ``A*`` in the
eigenbasis. :func:`all_companions_bruteforce` enumerates every diagonal
``K`` over a small finite field and keeps those for which ``A - K, A*`` is
still a Leonard pair. Both serve as ground truth for the tests.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import pairwise
from itertools import product as cartesian

from .errors import (
    EigenvalueNotInField,
    FieldTooLarge,
    InvalidInput,
    NotDiagonal,
    NotInOmega,
)
from .field import FieldElement
from .matrix import Matrix, tridiagonal_class

DEFAULT_ENUM_CAP = 10**7

Poly = list[FieldElement]  # little-endian coefficients


def _poly_mul_linear(p: Poly, root: FieldElement) -> Poly:
    """``p(x) * (x - root)``."""
    z = root.field.zero()
    out = [z] * (len(p) + 1)
    for k, c in enumerate(p):
        out[k + 1] = out[k + 1] + c
        out[k] = out[k] - c * root
    return out


def tridiagonal_charpoly(a: Matrix) -> Poly:
    """Characteristic polynomial of a tridiagonal matrix by the three-term recurrence."""
    f = a.field
    if not tridiagonal_class(a).tridiagonal:
        raise InvalidInput("the recurrence needs a tridiagonal matrix")
    prev: Poly = [f.one()]
    cur = _poly_mul_linear(prev, a[0, 0])
    for k in range(1, a.n):
        nxt = _poly_mul_linear(cur, a[k, k])
        x = a[k, k - 1] * a[k - 1, k]
        for j, c in enumerate(prev):
            nxt[j] = nxt[j] - x * c
        prev, cur = cur, nxt
    return cur


def _eval(p: Poly, x: FieldElement) -> FieldElement:
    acc = x.field.zero()
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _deflate(p: Poly, root: FieldElement) -> Poly:
    """Quotient of ``p`` by ``x - root`` (synthetic division; remainder discarded)."""
    out = [root.field.zero()] * (len(p) - 1)
    carry = root.field.zero()
    for k in range(len(p) - 1, 0, -1):
        carry = p[k] + carry * root if k < len(p) - 1 else p[k]
        out[k - 1] = carry
    return out


def _strip(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _prem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and any(a):
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, x in enumerate(b):
            a[k + shift] -= c * x
        a = _strip(a[:-1]) if len(a) > 1 else [Fraction(0)]
    return _strip(a)


def _deriv(p: list[Fraction]) -> list[Fraction]:
    return [k * c for k, c in enumerate(p)][1:] or [Fraction(0)]


def _feval(p: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sign_changes(chain: list[list[Fraction]], x: Fraction) -> int:
    signs = [v for v in (_feval(q, x) for q in chain) if v]
    return sum(1 for u, v in pairwise(signs) if (u < 0) != (v < 0))


def _rational_candidates(p: Poly) -> list[Fraction]:
    """Every rational that can be a root of the monic rational polynomial ``p``.

    A rational root has denominator dividing the common denominator ``D``
    of the coefficients, so isolating each real root of the square-free part
    in an interval shorter than ``1/D`` (by Sturm's theorem) leaves at most
    one candidate per root.
    """
    coeffs = [c.value for c in p]
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    f = _strip(coeffs)
    if len(f) == 1:
        return []
    g = _deriv(f)
    a, b = f, g
    while any(b) and len(b) > 1:
        a, b = b, _prem(a, b)
    common = a if not any(b) else [Fraction(1)]
    sqfree = f if len(common) == 1 else _strip(_pdiv(f, common))
    chain = [sqfree, _deriv(sqfree)]
    while len(chain[-1]) > 1:
        r = _prem(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-x for x in r])
    bound = 1 + sum(abs(c) for c in sqfree[:-1]) / abs(sqfree[-1])
    out: list[Fraction] = []
    stack = [(-bound, bound)]
    width = Fraction(1, 2 * denom)
    while stack:
        lo, hi = stack.pop()
        n = _sign_changes(chain, lo) - _sign_changes(chain, hi)
        if n == 0:
            continue
        if hi - lo < width:
            k_lo = math.floor(lo * denom)
            for k in (k_lo, k_lo + 1, k_lo + 2):
                x = Fraction(k, denom)
                if lo <= x <= hi:
                    out.append(x)
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(set(out))


def _pdiv(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(a) >= len(b):
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = c
        for k, x in enumerate(b):
            a[k + shift] -= c * x
        a = a[:-1]
    return q


def roots_with_multiplicity(p: Poly) -> list[FieldElement]:
    """All roots of ``p`` lying in its field, repeated by multiplicity, in canonical order."""
    f = p[0].field
    cands = list(f.elements()) if f.is_finite else [f(c) for c in _rational_candidates(p)]
    out: list[FieldElement] = []
    for r in cands:
        while len(p) > 1 and not _eval(p, r):
            out.append(r)
            p = _deflate(p, r)
    return out


@dataclass(frozen=True)
class EigenData:
    eigenvalues: tuple[FieldElement, ...]
    eigenvectors: tuple[tuple[FieldElement, ...], ...]
    basis_change: Matrix  # columns are the eigenvectors


@dataclass(frozen=True)
class PairCheck:
    is_pair: bool
    standard_orderings: tuple[tuple[FieldElement, ...], ...] = ()
    eigen: EigenData | None = None

    def to_json(self) -> dict:
        return {
            "is_pair": self.is_pair,
            "standard_orderings": [[str(x) for x in o] for o in self.standard_orderings],
        }


def eigen_data(a: Matrix) -> EigenData | None:
    """Eigenvalues and eigenvectors when ``a`` has ``n`` distinct eigenvalues in its field.

    Returns ``None`` for a repeated eigenvalue; raises :class:`EigenvalueNotInField`
    when the characteristic polynomial does not split.
    """
    roots = roots_with_multiplicity(tridiagonal_charpoly(a))
    if len(roots) < a.n:
        raise EigenvalueNotInField(f"only {len(roots)} of {a.n} eigenvalues lie in {a.field}")
    if len(set(roots)) < a.n:
        return None
    vecs = []
    for lam in roots:
        basis = a.shift(-lam).nullspace()
        if len(basis) != 1:
            return None
        vecs.append(tuple(basis[0]))
        if a.apply(basis[0]) != [lam * x for x in basis[0]]:
            raise InvalidInput("eigenvector check failed")
    p = Matrix(a.field, tuple(tuple(v[i] for v in vecs) for i in range(a.n)))
    return EigenData(tuple(roots), tuple(vecs), p)


def _hamiltonian_path(m: Matrix) -> list[int] | None:
    """The index path along which ``m`` is irreducible tridiagonal, or ``None``."""
    n = m.n
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] or m[j, i]:
                if not (m[i, j] and m[j, i]):
                    return None
                adj[i].add(j)
                adj[j].add(i)
    if n == 1:
        return [0]
    if any(len(v) > 2 for v in adj.values()) or sum(len(v) for v in adj.values()) != 2 * (n - 1):
        return None
    ends = [i for i in range(n) if len(adj[i]) == 1]
    if len(ends) != 2:
        return None
    path, prev = [min(ends)], None
    while len(path) < n:
        nxt = [j for j in adj[path[-1]] if j != prev]
        if not nxt:
            return None
        prev = path[-1]
        path.append(nxt[0])
    return path


def is_leonard_pair(a: Matrix, a_star: Matrix) -> PairCheck:
    """Decide the pair condition straight from the definition."""
    if a.n != a_star.n or a.field != a_star.field:
        raise InvalidInput("matrices must share size and field")
    if not a_star.is_diagonal():
        raise NotDiagonal("A* must be diagonal")
    if len(set(a_star.diagonal())) != a.n:
        raise NotDiagonal("A* must have distinct diagonal entries")
    if not tridiagonal_class(a).irreducible:
        return PairCheck(False)
    eig = eigen_data(a)
    if eig is None:
        return PairCheck(False)
    conj = eig.basis_change.inverse() @ a_star @ eig.basis_change
    path = _hamiltonian_path(conj)
    if path is None:
        return PairCheck(False, (), eig)
    order = tuple(eig.eigenvalues[i] for i in path)
    orderings = (order,) if a.n == 1 else tuple(sorted(
        [order, order[::-1]], key=lambda o: [x.sort_key() for x in o]))
    return PairCheck(True, orderings, eig)


def _companions_with_first(args: tuple[Matrix, Matrix, FieldElement]) -> list[Matrix]:
    a, a_star, k0 = args
    f = a.field
    out = []
    for rest in cartesian(list(f.elements()), repeat=a.n - 1):
        k = Matrix.diag(f, (k0,) + rest)
        try:
            ok = is_leonard_pair(a - k, a_star).is_pair
        except EigenvalueNotInField:
            ok = False
        if ok:
            out.append(k)
    return out


def all_companions_bruteforce(a: Matrix, a_star: Matrix, cap: int = DEFAULT_ENUM_CAP,
                              workers: int = 1) -> list[Matrix]:
    """Every diagonal ``K`` with ``A - K, A*`` a Leonard pair, in canonical order.

    The search is split by the value of ``K[0][0]``; with ``workers > 1`` the
    slices run in separate processes and are merged by set union.
    """
    f = a.field
    if not f.is_finite:
        raise FieldTooLarge("brute-force enumeration needs a finite field")
    total = f.order ** a.n
    if total > cap:
        raise FieldTooLarge(f"{total} diagonals exceed the enumeration cap {cap}")
    if not is_leonard_pair(a, a_star).is_pair:
        raise InvalidInput("(A, A*) is not a Leonard pair")
    jobs = [(a, a_star, k0) for k0 in f.elements()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_companions_with_first, jobs))
    else:
        parts = [_companions_with_first(j) for j in jobs]
    found = {k for part in parts for k in part}
    return sorted(found, key=lambda k: [x.sort_key() for x in k.diagonal()])


def in_omega(a: Matrix, a_star: Matrix) -> bool:
    if not tridiagonal_class(a).normalized:
        return False
    try:
        return is_leonard_pair(a, a_star).is_pair
    except EigenvalueNotInField:
        return False


def isomorphic_in_omega(a: Matrix, b: Matrix, a_star: Matrix) -> bool:
    """Within the normalized set for a fixed ``A*``, isomorphism is plain equality."""
    for m in (a, b):
        if not in_omega(m, a_star):
            raise NotInOmega("matrix is not a normalized Leonard partner of A*")
    return a == b
