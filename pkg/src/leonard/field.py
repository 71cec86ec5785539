"""Exact arithmetic over the rationals, GF(p) and GF(p^m).

A :class:`FieldDescriptor` names a field; calling it coerces Python values
into canonical :class:`FieldElement` instances::

    >>> F = FieldDescriptor.prime(13)
    >>> F(8) * F(5)
    FieldElement(GF(13), 1)
    >>> Q = FieldDescriptor.rational()
    >>> str(Q("3/2") + Q("1/6"))
    '5/3'

Extension elements are little-endian coefficient tuples reduced modulo an
explicit monic irreducible polynomial, so ``[c0, c1]`` means ``c0 + c1*t``.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterator
from dataclasses import dataclass
from dataclasses import field as dc_field
from fractions import Fraction
from itertools import product
from typing import Any

from .errors import DivisionByZero, FieldMismatch, InternalInconsistency, InvalidInput

RATIONAL = "rational"
PRIME = "prime"
EXTENSION = "extension"

PRIME_BOUND = 1 << 16
# Largest number of candidate factors tried when certifying a modulus.
FACTOR_SEARCH_CAP = 2_000_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for k in range(3, math.isqrt(n) + 1, 2):
        if n % k == 0:
            return False
    return True


def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_rem(a: list[int], g: list[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo ``g`` over GF(p); ``g`` must be nonzero."""
    a = _poly_trim([x % p for x in a])
    g = _poly_trim([x % p for x in g])
    lead_inv = pow(g[-1], p - 2, p)
    dg = len(g) - 1
    while len(a) - 1 >= dg and a:
        factor = a[-1] * lead_inv % p
        shift = len(a) - 1 - dg
        for k, gk in enumerate(g):
            a[shift + k] = (a[shift + k] - factor * gk) % p
        _poly_trim(a)
    return a


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustive factor search: no monic factor of degree 1..m//2 divides."""
    m = len(modulus) - 1
    if m < 1:
        return False
    budget = sum(p**k for k in range(1, m // 2 + 1))
    if budget > FACTOR_SEARCH_CAP:
        raise InvalidInput(f"modulus degree {m} over GF({p}) is too large to certify")
    for k in range(1, m // 2 + 1):
        for low in product(range(p), repeat=k):
            candidate = list(low) + [1]
            if not _poly_rem(list(modulus), candidate, p):
                return False
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    """Names one of the supported fields.

    Use the :meth:`rational`, :meth:`prime` and :meth:`extension`
    constructors; direct construction is validated the same way.
    """

    kind: str
    p: int | None = None
    modulus: tuple[int, ...] | None = None
    _hash: int = dc_field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind == RATIONAL:
            if self.p is not None or self.modulus is not None:
                raise InvalidInput("rational field takes no p or modulus")
        elif self.kind in (PRIME, EXTENSION):
            if not isinstance(self.p, int) or isinstance(self.p, bool):
                raise InvalidInput("p must be an integer")
            if not 2 <= self.p < PRIME_BOUND or not is_prime(self.p):
                raise InvalidInput(f"p={self.p} is not a prime below {PRIME_BOUND}")
            if self.kind == PRIME:
                if self.modulus is not None:
                    raise InvalidInput("prime field takes no modulus")
            else:
                if self.modulus is None:
                    raise InvalidInput("extension field needs a modulus")
                mod = tuple(int(c) % self.p for c in self.modulus)
                object.__setattr__(self, "modulus", mod)
                if len(mod) < 2 or mod[-1] != 1:
                    raise InvalidInput("modulus must be monic of degree >= 1")
                if not is_irreducible(mod, self.p):
                    raise InvalidInput(f"modulus {list(mod)} is reducible over GF({self.p})")
        else:
            raise InvalidInput(f"unknown field kind {self.kind!r}")
        object.__setattr__(self, "_hash", hash((self.kind, self.p, self.modulus)))

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self) -> tuple:
        # Rebuild on unpickle: the cached hash depends on per-process string hashing.
        return (FieldDescriptor, (self.kind, self.p, self.modulus))

    @classmethod
    def rational(cls) -> FieldDescriptor:
        return cls(RATIONAL)

    @classmethod
    def prime(cls, p: int) -> FieldDescriptor:
        return cls(PRIME, p)

    @classmethod
    def extension(cls, p: int, modulus: list[int] | tuple[int, ...]) -> FieldDescriptor:
        return cls(EXTENSION, p, tuple(modulus))

    # -- structure -------------------------------------------------------

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == RATIONAL else self.p  # type: ignore[return-value]

    @property
    def degree(self) -> int:
        """Extension degree over the prime field (1 for GF(p) and for the rationals)."""
        return len(self.modulus) - 1 if self.kind == EXTENSION else 1  # type: ignore[arg-type]

    @property
    def is_finite(self) -> bool:
        return self.kind != RATIONAL

    @property
    def order(self) -> int | None:
        if self.kind == RATIONAL:
            return None
        return self.p**self.degree  # type: ignore[operator]

    def zero(self) -> FieldElement:
        return self(0)

    def one(self) -> FieldElement:
        return self(1)

    def elements(self) -> Iterator[FieldElement]:
        """All elements in canonical order (finite fields only)."""
        if self.kind == RATIONAL:
            raise InvalidInput("the rational field cannot be enumerated")
        if self.kind == PRIME:
            for v in range(self.p):  # type: ignore[arg-type]
                yield FieldElement(self, v)
        else:
            for rev in product(range(self.p), repeat=self.degree):  # type: ignore[arg-type]
                yield FieldElement(self, tuple(reversed(rev)))

    def embed(self, x: FieldElement) -> FieldElement:
        """Map an element of the prime subfield of another field of the same characteristic into this one."""
        if x.field == self:
            return x
        if x.field.characteristic != self.characteristic or not x.in_prime_field():
            raise FieldMismatch(f"{x} from {x.field} does not embed into {self}")
        if x.field.kind == RATIONAL:
            return self(x.value)
        return self(x.value[0] if x.field.kind == EXTENSION else x.value)

    def generator(self) -> FieldElement:
        """The class of ``t`` in GF(p)[t]/(modulus); for GF(p) this is 1."""
        if self.kind != EXTENSION:
            return self.one()
        m = self.degree
        if m == 1:
            return self(-self.modulus[0])  # type: ignore[index]
        return FieldElement(self, tuple(1 if k == 1 else 0 for k in range(m)))

    # -- coercion and serialization -------------------------------------

    def __call__(self, value: Any) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"element of {value.field} used in {self}")
            return value
        if isinstance(value, bool):
            raise InvalidInput("booleans are not field elements")
        if isinstance(value, int):
            return self._from_int(value)
        if isinstance(value, Fraction):
            num = self._from_int(value.numerator)
            return num / self._from_int(value.denominator)
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (list, tuple)):
            if self.kind != EXTENSION:
                raise InvalidInput(f"coefficient list given for {self}")
            return self._from_coefficients(value)
        raise InvalidInput(f"cannot coerce {value!r} into {self}")

    def _from_int(self, n: int) -> FieldElement:
        if self.kind == RATIONAL:
            return FieldElement(self, Fraction(n))
        if self.kind == PRIME:
            return FieldElement(self, n % self.p)  # type: ignore[operator]
        m = self.degree
        return FieldElement(self, (n % self.p,) + (0,) * (m - 1))  # type: ignore[operator]

    def _from_coefficients(self, coeffs: Any) -> FieldElement:
        try:
            ints = [int(c) if not isinstance(c, str) else int(c.strip()) for c in coeffs]
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"bad coefficient list {coeffs!r}") from exc
        if any(isinstance(c, bool) for c in coeffs):
            raise InvalidInput("booleans are not coefficients")
        rem = _poly_rem(ints, list(self.modulus), self.p) if ints else []  # type: ignore[arg-type]
        m = self.degree
        return FieldElement(self, tuple(rem + [0] * (m - len(rem))))

    def parse(self, text: str) -> FieldElement:
        """Parse the string form produced by ``str(element)``.

        Integers and ``n/d`` fractions are accepted in every field; a
        bracketed coefficient list is accepted in extension fields.
        """
        s = text.strip()
        if s.startswith("["):
            if self.kind != EXTENSION:
                raise InvalidInput(f"coefficient list {s!r} given for {self}")
            try:
                coeffs = json.loads(s)
            except json.JSONDecodeError as exc:
                raise InvalidInput(f"bad coefficient list {s!r}") from exc
            if not isinstance(coeffs, list):
                raise InvalidInput(f"bad coefficient list {s!r}")
            return self._from_coefficients(coeffs)
        try:
            frac = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse {text!r} as an element of {self}") from exc
        if "." in s or "e" in s.lower():
            raise InvalidInput(f"decimal notation {text!r} is not exact input")
        return self(frac)

    def to_json(self) -> dict:
        if self.kind == RATIONAL:
            return {"kind": RATIONAL}
        if self.kind == PRIME:
            return {"kind": PRIME, "p": self.p}
        return {"kind": EXTENSION, "p": self.p, "modulus": list(self.modulus)}  # type: ignore[arg-type]

    @classmethod
    def from_json(cls, obj: Any) -> FieldDescriptor:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InvalidInput(f"bad field descriptor {obj!r}")
        kind = obj["kind"]
        if kind == RATIONAL:
            return cls.rational()
        if kind == PRIME:
            return cls.prime(obj.get("p"))
        if kind == EXTENSION:
            mod = obj.get("modulus")
            if not isinstance(mod, list):
                raise InvalidInput("extension descriptor needs a modulus list")
            return cls.extension(obj.get("p"), mod)
        raise InvalidInput(f"unknown field kind {kind!r}")

    def __str__(self) -> str:
        if self.kind == RATIONAL:
            return "Q"
        if self.kind == PRIME:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.degree})"

    # -- raw arithmetic on canonical values -----------------------------

    def _mul_values(self, a: Any, b: Any) -> Any:
        if self.kind != EXTENSION:
            return a * b if self.kind == RATIONAL else a * b % self.p
        p = self.p
        m = len(a)
        prod = [0] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        mod = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k] % p  # type: ignore[operator]
            if c:
                shift = k - m
                for j in range(m):
                    prod[shift + j] -= c * mod[j]  # type: ignore[index]
            prod[k] = 0
        return tuple(x % p for x in prod[:m])  # type: ignore[operator]


FieldValue = Fraction | int | tuple


class FieldElement:
    """An immutable element of a field named by a :class:`FieldDescriptor`.

    Arithmetic with plain ``int`` or ``Fraction`` operands coerces them into
    the element's field. Equality against an ``int`` compares after coercion.
    """

    __slots__ = ("field", "value")

    field: FieldDescriptor
    value: FieldValue

    def __init__(self, field: FieldDescriptor, value: FieldValue) -> None:
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self) -> tuple:
        return (FieldElement, (self.field, self.value))

    def _other(self, other: Any) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field(other)
        raise FieldMismatch(f"cannot combine {self.field} element with {type(other).__name__}")

    # arithmetic

    def __add__(self, other: Any) -> FieldElement:
        o = self._other(other)
        f = self.field
        if f.kind == RATIONAL:
            return FieldElement(f, self.value + o.value)
        if f.kind == PRIME:
            return FieldElement(f, (self.value + o.value) % f.p)
        return FieldElement(f, tuple((x + y) % f.p for x, y in zip(self.value, o.value)))

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        f = self.field
        if f.kind == RATIONAL:
            return FieldElement(f, -self.value)
        if f.kind == PRIME:
            return FieldElement(f, -self.value % f.p)
        return FieldElement(f, tuple(-x % f.p for x in self.value))

    def __sub__(self, other: Any) -> FieldElement:
        return self + (-self._other(other))

    def __rsub__(self, other: Any) -> FieldElement:
        return self._other(other) + (-self)

    def __mul__(self, other: Any) -> FieldElement:
        o = self._other(other)
        return FieldElement(self.field, self.field._mul_values(self.value, o.value))

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if not self:
            raise DivisionByZero(f"inverse of zero in {self.field}")
        f = self.field
        if f.kind == RATIONAL:
            return FieldElement(f, 1 / self.value)
        if f.kind == PRIME:
            return FieldElement(f, pow(self.value, f.p - 2, f.p))
        return self ** (f.order - 2)  # type: ignore[operator]

    def __truediv__(self, other: Any) -> FieldElement:
        return self * self._other(other).inverse()

    def __rtruediv__(self, other: Any) -> FieldElement:
        return self._other(other) * self.inverse()

    def __pow__(self, n: int) -> FieldElement:
        if not isinstance(n, int):
            raise InvalidInput("exponent must be an integer")
        base = self
        if n < 0:
            base = self.inverse()
            n = -n
        f = self.field
        if f.kind == RATIONAL:
            return FieldElement(f, base.value**n)
        if f.kind == PRIME:
            return FieldElement(f, pow(base.value, n, f.p))
        result = f.one()
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison and hashing

    def __bool__(self) -> bool:
        if self.field.kind == EXTENSION:
            return any(self.value)
        return self.value != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == self.field(other)
        return NotImplemented

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def sort_key(self) -> Any:
        """Total order used for canonical tie-breaking and stable output."""
        return self.value

    def __lt__(self, other: FieldElement) -> bool:
        return self.sort_key() < self._other(other).sort_key()

    # presentation

    def __str__(self) -> str:
        if self.field.kind == RATIONAL:
            v = self.value
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if self.field.kind == PRIME:
            return str(self.value)
        return "[" + ",".join(str(c) for c in self.value) + "]"

    def __repr__(self) -> str:
        return f"FieldElement({self.field}, {self})"

    def in_prime_field(self) -> bool:
        """True when the element lies in the prime subfield (or in Q)."""
        if self.field.kind != EXTENSION:
            return True
        return not any(self.value[1:])

    # convenience wrappers

    def sqrt(self) -> FieldElement | None:
        return sqrt(self)


# -- square roots and quadratics ---------------------------------------------


def _rational_sqrt(a: FieldElement) -> FieldElement | None:
    v: Fraction = a.value  # type: ignore[assignment]
    if v < 0:
        return None
    rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if rn * rn != v.numerator or rd * rd != v.denominator:
        return None
    return FieldElement(a.field, Fraction(rn, rd))


def _tonelli_shanks(a: FieldElement) -> FieldElement | None:
    f = a.field
    q = f.order
    one = f.one()
    minus_one = -one
    half = (q - 1) // 2  # type: ignore[operator]
    if a ** half != one:
        return None
    odd, twos = q - 1, 0  # type: ignore[operator]
    while odd % 2 == 0:
        odd //= 2
        twos += 1
    nonresidue = next(z for z in f.elements() if z and z ** half == minus_one)
    m = twos
    c = nonresidue**odd
    t = a**odd
    r = a ** ((odd + 1) // 2)
    while t != one:
        i, t2 = 0, t
        while t2 != one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (m - i - 1))
        m, c = i, b * b
        t, r = t * c, r * b
    return r


def sqrt(a: FieldElement) -> FieldElement | None:
    """A square root of ``a`` in its own field, or ``None`` when there is none.

    Over Q the nonnegative root is returned. In odd characteristic the root
    with the smaller canonical representative is returned. In characteristic
    2 the root is unique.
    """
    f = a.field
    if not a:
        return a
    if f.kind == RATIONAL:
        return _rational_sqrt(a)
    if f.p == 2:
        r = a
        for _ in range(f.degree - 1):
            r = r * r
        return r
    r = _tonelli_shanks(a)
    if r is None:
        return None
    if r * r != a:
        raise InternalInconsistency("square root check failed")
    return min(r, -r, key=FieldElement.sort_key)


def trace_to_prime_field(a: FieldElement) -> FieldElement:
    """Absolute trace ``a + a^p + ... + a^(p^(m-1))`` (finite fields)."""
    f = a.field
    total, power = a, a
    for _ in range(f.degree - 1):
        power = power ** f.p  # type: ignore[operator]
        total = total + power
    return total


def _artin_schreier_root(a: FieldElement) -> FieldElement | None:
    """A root ``y`` of ``y^2 + y = a`` in GF(2^m), or ``None``."""
    f = a.field
    m = f.degree
    if trace_to_prime_field(a):
        return None
    if m % 2 == 1:
        # half-trace
        y, power = a, a
        for _ in range((m - 1) // 2):
            power = power * power
            power = power * power
            y = y + power
    else:
        delta = next(z for z in f.elements() if trace_to_prime_field(z))
        squares_a = [a]
        squares_d = [delta]
        for _ in range(m - 1):
            squares_a.append(squares_a[-1] * squares_a[-1])
            squares_d.append(squares_d[-1] * squares_d[-1])
        y = f.zero()
        partial = f.zero()
        for i in range(1, m):
            partial = partial + squares_d[i - 1]
            y = y + partial * squares_a[i]
    if y * y + y != a:
        raise InternalInconsistency("Artin-Schreier root check failed")
    return y


def solve_quadratic(b: FieldElement, c: FieldElement) -> frozenset[FieldElement]:
    """All roots of ``x^2 + b x + c`` in the field of ``b`` and ``c``."""
    f = b.field
    c = b._other(c)
    if f.characteristic == 2:
        if not b:
            r = sqrt(c)
            return frozenset() if r is None else frozenset({r})
        y = _artin_schreier_root(c / (b * b))
        if y is None:
            return frozenset()
        return frozenset({b * y, b * (y + 1)})
    disc = b * b - 4 * c
    r = sqrt(disc)
    if r is None:
        return frozenset()
    return frozenset({(-b + r) / 2, (-b - r) / 2})


def sorted_elements(values: Any) -> list[FieldElement]:
    return sorted(values, key=FieldElement.sort_key)
