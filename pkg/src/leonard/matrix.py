"""Dense exact square matrices and the tridiagonal toolkit.

Rows and columns are indexed ``0..d`` for a ``(d+1) x (d+1)`` matrix. Besides
plain arithmetic this module provides the predicates and transforms used
throughout the package: diagonal conjugation, the diagonal-equivalence
witness, normalization to unit subdiagonal, and the bond mate (diagonal
negation).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

from .errors import (
    FieldMismatch,
    InvalidInput,
    LengthMismatch,
    NotIrreducibleTridiagonal,
)
from .field import FieldDescriptor, FieldElement


@dataclass(frozen=True)
class Matrix:
    field: FieldDescriptor
    rows: tuple[tuple[FieldElement, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        for row in self.rows:
            if len(row) != n:
                raise LengthMismatch("matrix must be square")
            for x in row:
                if x.field != self.field:
                    raise FieldMismatch(f"entry from {x.field} in a {self.field} matrix")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_rows(cls, field: FieldDescriptor, rows: Iterable[Iterable[Any]]) -> Matrix:
        return cls(field, tuple(tuple(field(x) for x in row) for row in rows))

    @classmethod
    def zero(cls, field: FieldDescriptor, n: int) -> Matrix:
        z = field.zero()
        return cls(field, tuple((z,) * n for _ in range(n)))

    @classmethod
    def identity(cls, field: FieldDescriptor, n: int) -> Matrix:
        return cls.diag(field, [1] * n)

    @classmethod
    def diag(cls, field: FieldDescriptor, values: Sequence[Any]) -> Matrix:
        n = len(values)
        z = field.zero()
        vals = [field(v) for v in values]
        return cls(field, tuple(tuple(vals[i] if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def tridiagonal(
        cls,
        field: FieldDescriptor,
        diagonal: Sequence[Any],
        sub: Sequence[Any],
        sup: Sequence[Any],
    ) -> Matrix:
        """Build from the diagonal, subdiagonal ``A[i][i-1]`` and superdiagonal ``A[i-1][i]``."""
        n = len(diagonal)
        if len(sub) != n - 1 or len(sup) != n - 1:
            raise LengthMismatch("off-diagonals must have length n-1")
        z = field.zero()
        rows = [[z] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = field(diagonal[i])
        for i in range(1, n):
            rows[i][i - 1] = field(sub[i - 1])
            rows[i - 1][i] = field(sup[i - 1])
        return cls(field, tuple(tuple(r) for r in rows))

    # -- access ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        i, j = ij
        return self.rows[i][j]

    def diagonal(self) -> list[FieldElement]:
        return [self.rows[i][i] for i in range(self.n)]

    def subdiagonal(self) -> list[FieldElement]:
        return [self.rows[i][i - 1] for i in range(1, self.n)]

    def superdiagonal(self) -> list[FieldElement]:
        return [self.rows[i - 1][i] for i in range(1, self.n)]

    def is_diagonal(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.n) for j in range(self.n) if i != j)

    def is_zero(self) -> bool:
        return all(not x for row in self.rows for x in row)

    # -- arithmetic -----------------------------------------------------

    def _check(self, other: Matrix) -> None:
        if not isinstance(other, Matrix):
            raise InvalidInput("matrix operand expected")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} and {other.field}")
        if other.n != self.n:
            raise LengthMismatch(f"dimensions {self.n} and {other.n} differ")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(self.field, tuple(
            tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> Matrix:
        return Matrix(self.field, tuple(tuple(-x for x in r) for r in self.rows))

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        z = self.field.zero()
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = z
                for x, y in zip(r, c):
                    if x and y:
                        acc = acc + x * y
                row.append(acc)
            out.append(tuple(row))
        return Matrix(self.field, tuple(out))

    def scale(self, c: Any) -> Matrix:
        c = self.field(c)
        return Matrix(self.field, tuple(tuple(c * x for x in r) for r in self.rows))

    def shift(self, zeta: Any) -> Matrix:
        """Return ``self + zeta * I``."""
        return self + Matrix.identity(self.field, self.n).scale(zeta)

    def apply(self, v: Sequence[FieldElement]) -> list[FieldElement]:
        z = self.field.zero()
        out = []
        for r in self.rows:
            acc = z
            for x, y in zip(r, v):
                acc = acc + x * y
            out.append(acc)
        return out

    def transpose(self) -> Matrix:
        return Matrix(self.field, tuple(zip(*self.rows)))

    # -- elimination ----------------------------------------------------

    def nullspace(self) -> list[list[FieldElement]]:
        """A basis of ``{v : self v = 0}`` from reduced row echelon form."""
        n = self.n
        rows = [list(r) for r in self.rows]
        pivots: list[int] = []
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, n) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [x * inv for x in rows[r]]
            for i in range(n):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == n:
                break
        free = [c for c in range(n) if c not in pivots]
        basis = []
        zero, one = self.field.zero(), self.field.one()
        for fc in free:
            v = [zero] * n
            v[fc] = one
            for k, pc in enumerate(pivots):
                v[pc] = -rows[k][fc]
            basis.append(v)
        return basis

    def inverse(self) -> Matrix:
        n = self.n
        zero, one = self.field.zero(), self.field.one()
        aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((i for i in range(c, n) if aug[i][c]), None)
            if piv is None:
                raise InvalidInput("matrix is singular")
            aug[c], aug[piv] = aug[piv], aug[c]
            inv = aug[c][c].inverse()
            aug[c] = [x * inv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c]:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
        return Matrix(self.field, tuple(tuple(r[n:]) for r in aug))

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[str(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, field: FieldDescriptor, obj: Any) -> Matrix:
        if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
            raise InvalidInput("matrix JSON needs an 'entries' list")
        entries = obj["entries"]
        if any(not isinstance(r, list) for r in entries):
            raise InvalidInput("matrix rows must be lists")
        m = cls.from_rows(field, entries)
        if "n" in obj and obj["n"] != m.n:
            raise LengthMismatch(f"declared n={obj['n']} but {m.n} rows given")
        return m

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"


@dataclass(frozen=True)
class TridiagonalClass:
    tridiagonal: bool
    irreducible: bool
    normalized: bool


@dataclass(frozen=True)
class DiagonalWitness:
    """Diagonal entries of an invertible diagonal matrix ``S``."""

    s: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        if any(not x for x in self.s):
            raise InvalidInput("diagonal witness entries must be nonzero")

    @classmethod
    def of(cls, field: FieldDescriptor, values: Sequence[Any]) -> DiagonalWitness:
        return cls(tuple(field(v) for v in values))

    @classmethod
    def sign(cls, field: FieldDescriptor, n: int) -> DiagonalWitness:
        """The alternating sign matrix with ``(i, i)`` entry ``(-1)^i``."""
        return cls.of(field, [(-1) ** i for i in range(n)])

    def as_matrix(self) -> Matrix:
        return Matrix.diag(self.s[0].field, self.s)


def tridiagonal_class(m: Matrix) -> TridiagonalClass:
    n = m.n
    tri = all(not m[i, j] for i in range(n) for j in range(n) if abs(i - j) > 1)
    irr = tri and all(m[i, i - 1] and m[i - 1, i] for i in range(1, n))
    norm = irr and all(m[i, i - 1] == 1 for i in range(1, n))
    return TridiagonalClass(tri, irr, norm)


def _require_irreducible(m: Matrix) -> None:
    if not tridiagonal_class(m).irreducible:
        raise NotIrreducibleTridiagonal("matrix is not irreducible tridiagonal")


def diag_conjugate(a: Matrix, s: DiagonalWitness) -> Matrix:
    """``S A S^{-1}``, computed entrywise as ``s_i / s_j * A[i][j]``."""
    if len(s.s) != a.n:
        raise LengthMismatch("witness length must match matrix dimension")
    inv = [x.inverse() for x in s.s]
    return Matrix(a.field, tuple(
        tuple(s.s[i] * inv[j] * a[i, j] for j in range(a.n)) for i in range(a.n)))


def diag_equiv_witness(a: Matrix, b: Matrix) -> DiagonalWitness | None:
    """Return ``S`` with ``S a S^{-1} = b``, or ``None`` if no diagonal ``S`` works."""
    _require_irreducible(a)
    _require_irreducible(b)
    if a.n != b.n:
        raise LengthMismatch("dimensions differ")
    if a.diagonal() != b.diagonal():
        return None
    for i in range(1, a.n):
        if a[i, i - 1] * a[i - 1, i] != b[i, i - 1] * b[i - 1, i]:
            return None
    s = [a.field.one()]
    for i in range(1, a.n):
        s.append(s[-1] * b[i, i - 1] / a[i, i - 1])
    w = DiagonalWitness(tuple(s))
    if diag_conjugate(a, w) != b:
        raise NotIrreducibleTridiagonal("witness failed to conjugate")
    return w


@dataclass(frozen=True)
class Normalization:
    normalized: Matrix
    witness: DiagonalWitness


def normalize(a: Matrix) -> Normalization:
    """The unique diagonally equivalent matrix with unit subdiagonal."""
    _require_irreducible(a)
    f = a.field
    target = Matrix.tridiagonal(
        f,
        a.diagonal(),
        [f.one()] * (a.n - 1),
        [a[i, i - 1] * a[i - 1, i] for i in range(1, a.n)],
    )
    w = diag_equiv_witness(a, target)
    assert w is not None
    return Normalization(target, w)


def bond_mate(a: Matrix) -> Matrix:
    """``-S A S^{-1}`` for the alternating sign matrix ``S``: the diagonal is negated."""
    _require_irreducible(a)
    return -diag_conjugate(a, DiagonalWitness.sign(a.field, a.n))


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a
