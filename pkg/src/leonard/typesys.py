"""Type classification and the per-type basic-variable parameterizations.

Every parameter array with ``d >= 3`` has one of the types I, II, III+,
III- or IV, decided by the fundamental constant ``beta``, the field
characteristic and the parity of ``d``. For each type, seven basic variables
(plus ``q`` for type I) determine the array through closed forms. This module
builds arrays from basic sequences and recovers basic sequences from arrays.

Entry order per type:

* I and II: ``(delta, mu, h, delta_star, mu_star, h_star, tau)``
* III+ and III-: ``(delta, s, h, delta_star, s_star, h_star, tau)``
* IV: ``(delta, h, s, delta_star, h_star, s_star, r)``
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import (
    DegreeTooSmall,
    InternalInconsistency,
    InvalidBasicSequence,
    InvalidInput,
    MissingQ,
    MissingRoot,
    TypeMismatch,
    TypeO,
    ZeroScale,
)
from .field import FieldDescriptor, FieldElement, solve_quadratic, sorted_elements, sqrt
from .matrix import Matrix
from .parray import ParameterArray, beta_of, invariants, require_valid, validate


class LeonardType(enum.Enum):
    O = "O"
    I = "I"
    II = "II"
    IIIplus = "III+"
    IIIminus = "III-"
    IV = "IV"

    @classmethod
    def parse(cls, text: str) -> LeonardType:
        aliases = {"IIIplus": "III+", "IIIminus": "III-"}
        try:
            return cls(aliases.get(text, text))
        except ValueError as exc:
            raise InvalidInput(f"unknown type {text!r}") from exc


ENTRY_NAMES: dict[LeonardType, tuple[str, ...]] = {
    LeonardType.I: ("delta", "mu", "h", "delta_star", "mu_star", "h_star", "tau"),
    LeonardType.II: ("delta", "mu", "h", "delta_star", "mu_star", "h_star", "tau"),
    LeonardType.IIIplus: ("delta", "s", "h", "delta_star", "s_star", "h_star", "tau"),
    LeonardType.IIIminus: ("delta", "s", "h", "delta_star", "s_star", "h_star", "tau"),
    LeonardType.IV: ("delta", "h", "s", "delta_star", "h_star", "s_star", "r"),
}


@dataclass(frozen=True)
class BasicSequence:
    type: LeonardType
    entries: tuple[FieldElement, ...]
    q: FieldElement | None = None

    def __post_init__(self) -> None:
        if self.type is LeonardType.O:
            raise TypeO("type O arrays have no basic sequence")
        if len(self.entries) != 7:
            raise InvalidInput("a basic sequence has exactly 7 entries")
        f = self.entries[0].field
        if any(e.field != f for e in self.entries):
            raise InvalidInput("basic sequence entries span several fields")
        if self.type is LeonardType.I:
            if self.q is None:
                raise MissingQ("type I basic sequences need q")
            if self.q.field != f:
                raise InvalidInput("q lies in a different field")
            if not self.q or self.q**4 == 1:
                raise InvalidBasicSequence("q must satisfy q != 0 and q^4 != 1")
        elif self.q is not None:
            raise InvalidInput("q only accompanies type I sequences")

    @classmethod
    def make(cls, t: LeonardType | str, field: FieldDescriptor, entries: Sequence[Any],
             q: Any = None) -> BasicSequence:
        if isinstance(t, str):
            t = LeonardType.parse(t)
        return cls(t, tuple(field(e) for e in entries), None if q is None else field(q))

    @property
    def field(self) -> FieldDescriptor:
        return self.entries[0].field

    @property
    def names(self) -> tuple[str, ...]:
        return ENTRY_NAMES[self.type]

    def named(self) -> dict[str, FieldElement]:
        return dict(zip(self.names, self.entries))

    def __getitem__(self, name: str) -> FieldElement:
        try:
            return self.entries[self.names.index(name)]
        except ValueError as exc:
            raise KeyError(name) from exc

    def replace(self, **changes: Any) -> BasicSequence:
        vals = self.named()
        for k, v in changes.items():
            if k not in vals:
                raise InvalidInput(f"{k!r} is not a basic variable of type {self.type.value}")
            vals[k] = self.field(v)
        return BasicSequence(self.type, tuple(vals[n] for n in self.names), self.q)

    def to_json(self) -> dict:
        out: dict = {"type": self.type.value}
        if self.q is not None:
            out["q"] = str(self.q)
        out["entries"] = [str(e) for e in self.entries]
        return out

    @classmethod
    def from_json(cls, obj: Any, field: FieldDescriptor) -> BasicSequence:
        if not isinstance(obj, dict) or "type" not in obj or not isinstance(obj.get("entries"), list):
            raise InvalidInput("basic sequence JSON needs 'type' and an 'entries' list")
        return cls.make(obj["type"], field, obj["entries"], obj.get("q"))


# -- classification ----------------------------------------------------------


def classify_type(p: ParameterArray) -> LeonardType:
    require_valid(p)
    if p.d <= 2:
        return LeonardType.O
    beta = beta_of(p)
    char = p.field.characteristic
    if beta != 2 and beta != -2:
        t = LeonardType.I
    elif char == 2:
        t = LeonardType.IV
    elif beta == 2:
        t = LeonardType.II
    else:
        t = LeonardType.IIIplus if p.d % 2 == 0 else LeonardType.IIIminus
    _check_characteristic_facts(t, p.d, char, InternalInconsistency)
    return t


def _check_characteristic_facts(t: LeonardType, d: int, char: int, exc: type) -> None:
    """Characteristic and diameter restrictions every array of type ``t`` obeys."""
    if t is LeonardType.II and char and char <= d:
        raise exc(f"type II needs characteristic 0 or greater than d={d}")
    if t is LeonardType.IIIplus and char and 2 * char <= d:
        raise exc(f"type III+ needs characteristic 0 or greater than d/2 (d={d})")
    if t is LeonardType.IIIminus and char and 2 * char <= d - 1:
        raise exc(f"type III- needs characteristic 0 or greater than (d-1)/2 (d={d})")
    if t is LeonardType.IV and d != 3:
        raise exc(f"type IV forces d = 3, got d={d}")


# -- closed forms ------------------------------------------------------------


Arrays = tuple[list[FieldElement], list[FieldElement], list[FieldElement], list[FieldElement]]


def _half(f: FieldDescriptor, n: int) -> FieldElement:
    return f(Fraction(n, 2))


def _eigen_basis(t: LeonardType, d: int, f: FieldDescriptor,
                 q: FieldElement | None) -> list[tuple[FieldElement, FieldElement]]:
    """Functions ``(f_i, g_i)`` with ``theta_i = delta + x f_i + y g_i`` (types I to III)."""
    out = []
    for i in range(d + 1):
        if t is LeonardType.I:
            out.append((q ** (2 * i - d), q ** (d - 2 * i)))  # type: ignore[operator]
        elif t is LeonardType.II:
            out.append((f(i) - _half(f, d), f(i * (d - i))))
        else:
            sign = 1 if i % 2 == 0 else -1
            out.append((f(sign), (f(i) - _half(f, d)) * sign))
    return out


def _theta_from(basis: list[tuple[FieldElement, FieldElement]], delta: FieldElement,
                x: FieldElement, y: FieldElement) -> list[FieldElement]:
    return [delta + x * fi + y * gi for fi, gi in basis]


def _split_type1(d: int, q: FieldElement, mu: FieldElement, h: FieldElement, mus: FieldElement,
                 hs: FieldElement, tau: FieldElement) -> tuple[list[FieldElement], list[FieldElement]]:
    varphi, phi = [], []
    for i in range(1, d + 1):
        pre = (q**i - q ** (-i)) * (q ** (d - i + 1) - q ** (i - d - 1))
        up, down = q ** (2 * i - d - 1), q ** (d - 2 * i + 1)
        varphi.append(pre * (tau - mu * mus * up - h * hs * down))
        phi.append(pre * (tau - h * mus * up - mu * hs * down))
    return varphi, phi


def _split_type2(d: int, f: FieldDescriptor, mu: FieldElement, h: FieldElement, mus: FieldElement,
                 hs: FieldElement, tau: FieldElement) -> tuple[list[FieldElement], list[FieldElement]]:
    varphi, phi = [], []
    for i in range(1, d + 1):
        pre = f(i * (d - i + 1))
        mid = f(i) - _half(f, d + 1)
        tail = h * hs * ((i - 1) * (d - i))
        varphi.append(pre * (tau - mu * mus / 2 + (h * mus + mu * hs) * mid + tail))
        phi.append(pre * (tau + mu * mus / 2 + (h * mus - mu * hs) * mid + tail))
    return varphi, phi


def _split_type3plus(d: int, f: FieldDescriptor, s: FieldElement, h: FieldElement, ss: FieldElement,
                     hs: FieldElement, tau: FieldElement) -> tuple[list[FieldElement], list[FieldElement]]:
    varphi, phi = [], []
    for i in range(1, d + 1):
        mid = h * hs * (f(i) - _half(f, d + 1))
        if i % 2 == 0:
            varphi.append(i * (tau - s * hs - ss * h - mid))
            phi.append(i * (tau - s * hs + ss * h + mid))
        else:
            varphi.append((d - i + 1) * (tau + s * hs + ss * h + mid))
            phi.append((d - i + 1) * (tau + s * hs - ss * h - mid))
    return varphi, phi


def _split_type3minus(d: int, f: FieldDescriptor, s: FieldElement, h: FieldElement, ss: FieldElement,
                      hs: FieldElement, tau: FieldElement) -> tuple[list[FieldElement], list[FieldElement]]:
    varphi, phi = [], []
    for i in range(1, d + 1):
        core = h * hs * (i * (d - i + 1))
        if i % 2 == 0:
            varphi.append(core)
            phi.append(core)
        else:
            lin = 2 * i - d - 1
            varphi.append(tau - 2 * s * ss + core - (s * hs + ss * h) * lin)
            phi.append(tau + 2 * s * ss + core + (s * hs - ss * h) * lin)
    return varphi, phi


def _type4_arrays(e: Sequence[FieldElement]) -> Arrays:
    delta, h, s, deltas, hs, ss, r = e
    theta = [delta, delta + h * (s + 1), delta + h, delta + h * s]
    theta_star = [deltas, deltas + hs * (ss + 1), deltas + hs, deltas + hs * ss]
    k = h * hs
    varphi = [k * r, k, k * (r + s + ss)]
    phi = [k * (r + s + s * ss), k, k * (r + ss + s * ss)]
    return theta, theta_star, varphi, phi


def raw_arrays(b: BasicSequence, d: int) -> Arrays:
    """Evaluate the closed forms without checking any inequality."""
    f = b.field
    t = b.type
    if t is LeonardType.IV:
        return _type4_arrays(b.entries)
    delta, x, y, deltas, xs, ys, tau = b.entries
    basis = _eigen_basis(t, d, f, b.q)
    if t is LeonardType.I:
        # (x, y) = (mu, h) and theta_i = delta + mu q^(2i-d) + h q^(d-2i)
        theta = _theta_from(basis, delta, x, y)
        theta_star = _theta_from(basis, deltas, xs, ys)
        varphi, phi = _split_type1(d, b.q, x, y, xs, ys, tau)  # type: ignore[arg-type]
    elif t is LeonardType.II:
        theta = _theta_from(basis, delta, x, y)
        theta_star = _theta_from(basis, deltas, xs, ys)
        varphi, phi = _split_type2(d, f, x, y, xs, ys, tau)
    else:
        # (x, y) = (s, h)
        theta = _theta_from(basis, delta, x, y)
        theta_star = _theta_from(basis, deltas, xs, ys)
        split = _split_type3plus if t is LeonardType.IIIplus else _split_type3minus
        varphi, phi = split(d, f, x, y, xs, ys, tau)
    return theta, theta_star, varphi, phi


# -- inequality conditions ------------------------------------------------------


def _structural_check(t: LeonardType, d: int, f: FieldDescriptor) -> None:
    char = f.characteristic
    if d < 3:
        raise DegreeTooSmall("basic sequences describe arrays with d >= 3")
    if t in (LeonardType.II, LeonardType.IIIplus, LeonardType.IIIminus) and char == 2:
        raise TypeMismatch(f"type {t.value} needs characteristic other than 2")
    if t is LeonardType.IV and (char != 2 or d != 3):
        raise TypeMismatch("type IV needs characteristic 2 and d = 3")
    if t is LeonardType.IIIplus and d % 2:
        raise TypeMismatch("type III+ needs d even")
    if t is LeonardType.IIIminus and d % 2 == 0:
        raise TypeMismatch("type III- needs d odd")


def inequality_failures(b: BasicSequence, d: int) -> list[str]:
    """Names of the type-specific inequalities that fail.

    An empty list means the closed forms produce distinct eigenvalues and
    nonzero split entries.
    """
    t, f = b.type, b.field
    char = f.characteristic
    fails: list[str] = []

    def need(ok: bool, name: str) -> None:
        if not ok:
            fails.append(name)

    if t is LeonardType.I:
        _, mu, h, _, mus, hs, tau = b.entries
        q = b.q
        for i in range(1, d + 1):
            need(q ** (2 * i) != 1, f"q^(2i) != 1 at i={i}")
        for i in range(1 - d, d):
            need(mu != h * q ** (2 * i), f"mu != h q^(2i) at i={i}")
            need(mus != hs * q ** (2 * i), f"mu* != h* q^(2i) at i={i}")
        for i in range(1, d + 1):
            up, down = q ** (2 * i - d - 1), q ** (d - 2 * i + 1)
            need(tau != mu * mus * up + h * hs * down, f"tau != mu mu* q^(2i-d-1) + h h* q^(d-2i+1) at i={i}")
            need(tau != h * mus * up + mu * hs * down, f"tau != h mu* q^(2i-d-1) + mu h* q^(d-2i+1) at i={i}")
    elif t is LeonardType.II:
        _, mu, h, _, mus, hs, tau = b.entries
        need(char == 0 or char > d, "characteristic is 0 or greater than d")
        if fails:
            return fails
        for i in range(1 - d, d):
            need(mu != h * i, f"mu != h i at i={i}")
            need(mus != hs * i, f"mu* != h* i at i={i}")
        for i in range(1, d + 1):
            mid = f(i) - _half(f, d + 1)
            tail = h * hs * ((i - 1) * (d - i))
            need(tau != mu * mus / 2 - (h * mus + mu * hs) * mid - tail, f"varphi bracket nonzero at i={i}")
            need(tau != -mu * mus / 2 - (h * mus - mu * hs) * mid - tail, f"phi bracket nonzero at i={i}")
    elif t in (LeonardType.IIIplus, LeonardType.IIIminus):
        _, s, h, _, ss, hs, tau = b.entries
        plus = t is LeonardType.IIIplus
        if plus:
            need(char == 0 or 2 * char > d, "characteristic is 0 or greater than d/2")
        else:
            need(char == 0 or 2 * char > d - 1, "characteristic is 0 or greater than (d-1)/2")
        need(bool(h), "h != 0")
        need(bool(hs), "h* != 0")
        if fails:
            return fails
        bad_parity = 1 if plus else 0
        for i in range(1 - d, d):
            if i % 2 == bad_parity:
                need(2 * s != h * i, f"2s != i h at i={i}")
                need(2 * ss != hs * i, f"2s* != i h* at i={i}")
        for i in range(1, d + 1):
            if plus:
                mid = h * hs * (f(i) - _half(f, d + 1))
                if i % 2 == 0:
                    need(tau != s * hs + ss * h + mid, f"tau != s h* + s* h + h h*(i-(d+1)/2) at i={i}")
                    need(tau != s * hs - ss * h - mid, f"tau != s h* - s* h - h h*(i-(d+1)/2) at i={i}")
                else:
                    need(tau != -s * hs - ss * h - mid, f"tau != -s h* - s* h - h h*(i-(d+1)/2) at i={i}")
                    need(tau != -s * hs + ss * h + mid, f"tau != -s h* + s* h + h h*(i-(d+1)/2) at i={i}")
            elif i % 2 == 1:
                core = h * hs * (i * (d - i + 1))
                lin = 2 * i - d - 1
                need(tau != 2 * s * ss - core + (s * hs + ss * h) * lin,
                     f"tau != 2ss* - i(d-i+1)hh* + (sh* + s*h)(2i-d-1) at i={i}")
                need(tau != -2 * s * ss - core - (s * hs - ss * h) * lin,
                     f"tau != -2ss* - i(d-i+1)hh* - (sh* - s*h)(2i-d-1) at i={i}")
    else:
        _, h, s, _, hs, ss, r = b.entries
        for value, name in (
            (h, "h != 0"), (s, "s != 0"), (s + 1, "s + 1 != 0"),
            (hs, "h* != 0"), (ss, "s* != 0"), (ss + 1, "s* + 1 != 0"),
            (r, "r != 0"), (r + s + ss, "r + s + s* != 0"),
            (r + s + s * ss, "r + s + s s* != 0"), (r + ss + s * ss, "r + s* + s s* != 0"),
        ):
            need(bool(value), name)
    return fails


def array_from_basic(b: BasicSequence, d: int) -> ParameterArray:
    """The parameter array given by the type's closed forms.

    Raises :class:`InvalidBasicSequence` naming the first failed inequality.
    The result is independently re-validated; a disagreement between the
    inequality conditions and the direct validity check is an internal error.
    """
    _structural_check(b.type, d, b.field)
    fails = inequality_failures(b, d)
    if fails:
        raise InvalidBasicSequence(fails[0])
    theta, theta_star, varphi, phi = raw_arrays(b, d)
    p = ParameterArray(b.field, d, tuple(theta), tuple(theta_star), tuple(varphi), tuple(phi))
    if not validate(p).valid:
        raise InternalInconsistency("inequalities hold but the array is not valid")
    return p


# -- recovering basic sequences --------------------------------------------------


def q_candidates(p: ParameterArray) -> list[FieldElement]:
    """Every ``q`` in the field with ``q^2 + q^-2 = beta``, in canonical order."""
    beta = beta_of(p)
    f = p.field
    out: set[FieldElement] = set()
    for y in solve_quadratic(-beta, f.one()):
        r = sqrt(y)
        if r is not None and r:
            out.update({r, -r})
    return sorted_elements(out)


def _solve3(rows: list[list[FieldElement]], rhs: list[FieldElement]) -> list[FieldElement]:
    f = rhs[0].field
    try:
        inv = Matrix.from_rows(f, rows).inverse()
    except InvalidInput as exc:
        raise InternalInconsistency("eigenvalue basis is singular") from exc
    return inv.apply(rhs)


def basic_from_array(p: ParameterArray, q: FieldElement | None = None) -> BasicSequence:
    """The unique basic sequence reproducing ``p`` (relative to ``q`` for type I)."""
    t = classify_type(p)
    f = p.field
    if t is LeonardType.O:
        raise TypeO("type O arrays have no basic sequence")
    if t is LeonardType.IV:
        delta, deltas = p.theta[0], p.theta_star[0]
        h, hs = p.theta[2] - delta, p.theta_star[2] - deltas
        s, ss = (p.theta[3] - delta) / h, (p.theta_star[3] - deltas) / hs
        r = p.vphi(1) / (h * hs)
        b = BasicSequence(t, (delta, h, s, deltas, hs, ss, r))
    else:
        if t is LeonardType.I:
            if q is None:
                cands = q_candidates(p)
                if not cands:
                    raise MissingRoot("no q with q^2 + q^-2 = beta in this field")
                q = cands[0]
            else:
                q = f(q)
                if not q or q**2 + q ** (-2) != beta_of(p):
                    raise InvalidInput(f"q={q} does not satisfy q^2 + q^-2 = beta")
        basis = _eigen_basis(t, p.d, f, q)
        rows = [[f.one(), basis[i][0], basis[i][1]] for i in range(3)]
        delta, x, y = _solve3(rows, list(p.theta[:3]))
        deltas, xs, ys = _solve3(rows, list(p.theta_star[:3]))
        zero = f.zero()
        base = BasicSequence(t, (delta, x, y, deltas, xs, ys, zero), q)
        at0 = raw_arrays(base, p.d)[2][0]
        at1 = raw_arrays(base.replace(tau=1), p.d)[2][0]
        slope = at1 - at0
        if not slope:
            raise InternalInconsistency("varphi_1 does not depend on tau")
        b = base.replace(tau=(p.vphi(1) - at0) / slope)
    if array_from_basic(b, p.d) != p:
        raise InternalInconsistency("recovered basic sequence does not reproduce the array")
    return b


# -- relatives, affine transforms, kappa ------------------------------------


def basic_relatives(b: BasicSequence, which: str) -> BasicSequence:
    e = b.named()
    t = b.type
    if which == "vee":
        if t is LeonardType.IV:
            return b
        first, second = ENTRY_NAMES[t][1], ENTRY_NAMES[t][2]
        last = ENTRY_NAMES[t][6]
        return b.replace(delta=-e["delta"], **{first: -e[first], second: -e[second], last: -e[last]})
    if t is LeonardType.I:
        if which == "down":
            return b.replace(mu_star=e["h_star"], h_star=e["mu_star"])
        if which == "Down":
            return b.replace(mu=e["h"], h=e["mu"])
    elif t is LeonardType.II:
        if which == "down":
            return b.replace(mu_star=-e["mu_star"])
        if which == "Down":
            return b.replace(mu=-e["mu"])
    elif t is LeonardType.IIIplus:
        if which == "down":
            return b.replace(h_star=-e["h_star"])
        if which == "Down":
            return b.replace(h=-e["h"])
    elif t is LeonardType.IIIminus:
        # d odd: reversing the index swaps parity classes, which negates s, not h.
        if which == "down":
            return b.replace(s_star=-e["s_star"])
        if which == "Down":
            return b.replace(s=-e["s"])
    else:
        s, ss, r = e["s"], e["s_star"], e["r"]
        if which == "down":
            return b.replace(delta_star=e["delta_star"] + e["h_star"] * ss, r=r + ss + s * ss)
        if which == "Down":
            return b.replace(delta=e["delta"] + e["h"] * s, r=r + s + s * ss)
    raise InvalidInput(f"unknown relative {which!r}; expected down, Down or vee")


def basic_affine(b: BasicSequence, xi: Any, zeta: Any, xi_star: Any, zeta_star: Any) -> BasicSequence:
    f = b.field
    xi, zeta, xi_star, zeta_star = f(xi), f(zeta), f(xi_star), f(zeta_star)
    if not xi or not xi_star:
        raise ZeroScale("xi and xi_star must be nonzero")
    e = b.named()
    if b.type is LeonardType.IV:
        return b.replace(
            delta=xi * e["delta"] + zeta, h=xi * e["h"],
            delta_star=xi_star * e["delta_star"] + zeta_star, h_star=xi_star * e["h_star"],
        )
    n = ENTRY_NAMES[b.type]
    return b.replace(**{
        "delta": xi * e["delta"] + zeta,
        n[1]: xi * e[n[1]],
        n[2]: xi * e[n[2]],
        "delta_star": xi_star * e["delta_star"] + zeta_star,
        n[4]: xi_star * e[n[4]],
        n[5]: xi_star * e[n[5]],
        "tau": xi * xi_star * e["tau"],
    })


def reduce_basic(b: BasicSequence) -> BasicSequence:
    """Shift so that ``delta = delta_star = 0``."""
    return basic_affine(b, 1, -b["delta"], 1, -b["delta_star"])


def kappa_from_basic(b: BasicSequence) -> FieldElement:
    h = b["h"]
    if b.type is LeonardType.I:
        q = b.q
        return b["mu"] * h * (q - q ** (-1)) ** 2 * (q**2 - q ** (-2)) ** 2  # type: ignore[operator]
    if b.type is LeonardType.IV:
        return h * h
    return 4 * h * h


# -- RST coefficients ----------------------------------------------------------


@dataclass(frozen=True)
class RSTCoefficients:
    R: tuple[FieldElement, ...]
    S: tuple[FieldElement, ...]
    T: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {k: [str(x) for x in getattr(self, k)] for k in ("R", "S", "T")}


def rst_coefficients(t: LeonardType, d: int, field: FieldDescriptor,
                     q: FieldElement | None = None) -> RSTCoefficients:
    """Coefficients ``R_i, S_i, T_i`` for ``i = 1..d`` of the three-term identity."""
    if t is LeonardType.O:
        raise TypeO("type O has no RST coefficients")
    if d < 3:
        raise DegreeTooSmall("RST coefficients need d >= 3")
    f = field
    R, S, T = [], [], []
    if t is LeonardType.I:
        if q is None:
            raise MissingQ("type I RST coefficients need q")
        q = f(q)
        br: Callable[[int], FieldElement] = lambda k: q**k - q ** (-k)
        den_rs = br(1) ** 2 * br(d) * br(d - 1)
        den_t = br(1) ** 2 * br(2) ** 2
        if not den_rs or not den_t:
            raise InvalidInput(f"q={q} makes an RST denominator vanish")
        for i in range(1, d + 1):
            R.append(br(i) ** 2 * br(d - i) * br(d - i + 1) / den_rs)
            S.append(br(d - i + 1) ** 2 * br(i) * br(i - 1) / den_rs)
            T.append(br(i) * br(i - 1) * br(d - i) * br(d - i + 1) / den_t)
    elif t is LeonardType.II:
        for i in range(1, d + 1):
            R.append(f(i * i * (d - i) * (d - i + 1)) / (d * (d - 1)))
            S.append(f(i * (i - 1) * (d - i + 1) ** 2) / (d * (d - 1)))
            T.append(f(i * (i - 1) * (d - i) * (d - i + 1)) / 4)
    elif t is LeonardType.IIIplus:
        for i in range(1, d + 1):
            if i % 2 == 0:
                R.append(f.zero())
                S.append(f(i) / d)
                T.append(f(-i * (d - i)) / 4)
            else:
                R.append(f(d - i + 1) / d)
                S.append(f.zero())
                T.append(f(-(i - 1) * (d - i + 1)) / 4)
    elif t is LeonardType.IIIminus:
        for i in range(1, d + 1):
            if i % 2 == 0:
                R.append(f.zero())
                S.append(f.zero())
                T.append(f(i * (d - i + 1)) / 4)
            else:
                R.append(f(d - i) / (d - 1))
                S.append(f(i - 1) / (d - 1))
                T.append(f((i - 1) * (d - i)) / 4)
    else:
        if d != 3:
            raise DegreeTooSmall("type IV has d = 3")
        R, S, T = [f(1), f(0), f(0)], [f(0), f(0), f(1)], [f(0), f(1), f(0)]
    return RSTCoefficients(tuple(R), tuple(S), tuple(T))


def rst_identity_check(p: ParameterArray, q: FieldElement | None = None) -> bool:
    """Evaluate both sides of the three-term identity for every ``i``."""
    t = classify_type(p)
    if t is LeonardType.O:
        raise InvalidInput("the RST identity needs d >= 3")
    if t is LeonardType.I and q is None:
        cands = q_candidates(p)
        if not cands:
            raise MissingRoot("no q with q^2 + q^-2 = beta in this field")
        q = cands[0]
    coeffs = rst_coefficients(t, p.d, p.field, q)
    kappa = invariants(p).kappa
    ts, d = p.theta_star, p.d
    for i in range(1, d + 1):
        lhs = p.vphi(i) * p.ph(i) / ((ts[i - 1] - ts[d]) * (ts[i] - ts[0]))
        rhs = (
            coeffs.R[i - 1] * p.vphi(1) * p.ph(1) / ((ts[i] - ts[0]) * (ts[0] - ts[d]))
            + coeffs.S[i - 1] * p.vphi(d) * p.ph(d) / ((ts[d] - ts[i - 1]) * (ts[0] - ts[d]))
            + coeffs.T[i - 1] * kappa
        )
        if lhs != rhs:
            return False
    return True
