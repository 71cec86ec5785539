"""Parameter arrays: validity, invariants, relatives and matrix realizations.

A parameter array of diameter ``d`` is the data
``(theta_0..theta_d; theta*_0..theta*_d; varphi_1..varphi_d; phi_1..phi_d)``.
The list ``theta`` holds the eigenvalues of ``A``, ``theta_star`` those of
``A*``, and ``varphi``/``phi`` are the first and second split sequences.
Split sequences are stored 0-based in Python lists, so ``varphi[i - 1]`` is
``varphi_i``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .errors import (
    DegreeTooSmall,
    DivisionByZero,
    InternalInconsistency,
    InvalidInput,
    LengthMismatch,
    ZeroCoordinate,
    ZeroScale,
)
from .field import FieldDescriptor, FieldElement
from .matrix import Matrix

RELATIVES = ("star", "down", "Down", "vee")


@dataclass(frozen=True)
class ParameterArray:
    field: FieldDescriptor
    d: int
    theta: tuple[FieldElement, ...]
    theta_star: tuple[FieldElement, ...]
    varphi: tuple[FieldElement, ...]
    phi: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or isinstance(self.d, bool):
            raise InvalidInput("d must be an integer")
        if self.d < 1:
            raise InvalidInput("d must be at least 1")
        d = self.d
        for name, seq, size in (
            ("theta", self.theta, d + 1),
            ("theta_star", self.theta_star, d + 1),
            ("varphi", self.varphi, d),
            ("phi", self.phi, d),
        ):
            if len(seq) != size:
                raise LengthMismatch(f"{name} has length {len(seq)}, expected {size}")
            for x in seq:
                if x.field != self.field:
                    raise InvalidInput(f"{name} entry {x} is not in {self.field}")

    @classmethod
    def make(
        cls,
        field: FieldDescriptor,
        theta: Sequence[Any],
        theta_star: Sequence[Any],
        varphi: Sequence[Any],
        phi: Sequence[Any],
    ) -> ParameterArray:
        """Coerce plain values into ``field``; ``d`` is inferred from ``theta``."""
        conv = lambda seq: tuple(field(x) for x in seq)
        return cls(field, len(theta) - 1, conv(theta), conv(theta_star), conv(varphi), conv(phi))

    @classmethod
    def from_eigenvalues(
        cls,
        theta: Sequence[FieldElement],
        theta_star: Sequence[FieldElement],
        varphi_1: FieldElement,
    ) -> ParameterArray:
        """Complete the split sequences from both eigenvalue sequences and ``varphi_1``.

        The two sum identities determine every ``varphi_i`` and ``phi_i``
        once ``varphi_1`` is chosen. The result still has to be validated:
        nothing here checks nonvanishing or the ratio condition.
        """
        field = varphi_1.field
        d = len(theta) - 1
        if d < 1:
            raise InvalidInput("d must be at least 1")
        th, ts = list(theta), list(theta_star)
        phi_1 = varphi_1 - (ts[1] - ts[0]) * (th[0] - th[d])
        ratios = _prefix_ratios(th)
        varphi = [phi_1 * ratios[i] + (ts[i] - ts[0]) * (th[i - 1] - th[d]) for i in range(1, d + 1)]
        phi = [varphi_1 * ratios[i] + (ts[i] - ts[0]) * (th[d - i + 1] - th[0]) for i in range(1, d + 1)]
        return cls(field, d, tuple(th), tuple(ts), tuple(varphi), tuple(phi))

    # 1-based accessors matching the usual subscripts
    def vphi(self, i: int) -> FieldElement:
        return self.varphi[i - 1]

    def ph(self, i: int) -> FieldElement:
        return self.phi[i - 1]

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "d": self.d,
            "theta": [str(x) for x in self.theta],
            "theta_star": [str(x) for x in self.theta_star],
            "varphi": [str(x) for x in self.varphi],
            "phi": [str(x) for x in self.phi],
        }

    @classmethod
    def from_json(cls, obj: Any, field: FieldDescriptor | None = None) -> ParameterArray:
        if not isinstance(obj, dict):
            raise InvalidInput("parameter array JSON must be an object")
        if field is None:
            if "field" not in obj:
                raise InvalidInput("parameter array JSON needs a 'field'")
            field = FieldDescriptor.from_json(obj["field"])
        for key in ("theta", "theta_star", "varphi", "phi"):
            if not isinstance(obj.get(key), list):
                raise InvalidInput(f"parameter array JSON needs a '{key}' list")
        p = cls.make(field, obj["theta"], obj["theta_star"], obj["varphi"], obj["phi"])
        if "d" in obj and obj["d"] != p.d:
            raise LengthMismatch(f"declared d={obj['d']} but theta has {p.d + 1} entries")
        return p


def _prefix_ratios(theta: Sequence[FieldElement]) -> list[FieldElement]:
    """``ratios[i] = sum_{l<i} (theta_l - theta_{d-l}) / (theta_0 - theta_d)`` for ``i = 0..d``."""
    d = len(theta) - 1
    denom = theta[0] - theta[d]
    if not denom:
        raise DivisionByZero("theta_0 equals theta_d")
    out = [denom.field.zero()]
    for ell in range(d):
        out.append(out[-1] + (theta[ell] - theta[d - ell]) / denom)
    return out


# -- validation -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    condition: str
    index: int | None = None

    def to_json(self) -> dict:
        out: dict = {"condition": self.condition}
        if self.index is not None:
            out["index"] = self.index
        return out


@dataclass(frozen=True)
class Validation:
    valid: bool
    violations: tuple[Violation, ...]

    def to_json(self) -> dict:
        out: dict = {"valid": self.valid}
        if not self.valid:
            out["violations"] = [v.to_json() for v in self.violations]
        return out


def _distinct_violations(seq: Sequence[FieldElement], tag: str) -> list[Violation]:
    seen: dict[FieldElement, int] = {}
    out = []
    for i, x in enumerate(seq):
        if x in seen:
            out.append(Violation(tag, i))
        else:
            seen[x] = i
    return out


def index_ratio(seq: Sequence[FieldElement], i: int) -> FieldElement:
    """``(s_{i-2} - s_{i+1}) / (s_{i-1} - s_i)``."""
    return (seq[i - 2] - seq[i + 1]) / (seq[i - 1] - seq[i])


def validate(p: ParameterArray) -> Validation:
    """Check the five conditions characterizing parameter arrays.

    Condition tags: ``i`` distinct eigenvalues (index refers to ``theta``,
    ``i*`` to ``theta_star``), ``ii`` nonzero split entries (``varphi``) and
    ``ii'`` (``phi``), ``iii``/``iv`` the two sum identities, ``v`` the shared
    constant ratio. The sum and ratio conditions are only evaluated when the
    eigenvalues are distinct, since they divide by eigenvalue differences.
    """
    d = p.d
    v: list[Violation] = []
    v += _distinct_violations(p.theta, "i")
    v += _distinct_violations(p.theta_star, "i*")
    v += [Violation("ii", i) for i in range(1, d + 1) if not p.vphi(i)]
    v += [Violation("ii'", i) for i in range(1, d + 1) if not p.ph(i)]
    if any(x.condition in ("i", "i*") for x in v):
        return Validation(False, tuple(v))
    th, ts = p.theta, p.theta_star
    ratios = _prefix_ratios(th)
    for i in range(1, d + 1):
        want = p.ph(1) * ratios[i] + (ts[i] - ts[0]) * (th[i - 1] - th[d])
        if p.vphi(i) != want:
            v.append(Violation("iii", i))
        want = p.vphi(1) * ratios[i] + (ts[i] - ts[0]) * (th[d - i + 1] - th[0])
        if p.ph(i) != want:
            v.append(Violation("iv", i))
    if d >= 3:
        first = index_ratio(th, 2)
        for i in range(2, d):
            r, rs = index_ratio(th, i), index_ratio(ts, i)
            if r != rs or r != first:
                v.append(Violation("v", i))
    return Validation(not v, tuple(v))


def require_valid(p: ParameterArray) -> None:
    result = validate(p)
    if not result.valid:
        tags = ", ".join(f"{x.condition}@{x.index}" for x in result.violations)
        raise InvalidInput(f"not a valid parameter array ({tags})")


# -- invariants -----------------------------------------------------------


@dataclass(frozen=True)
class InvariantData:
    beta: FieldElement
    gamma: FieldElement
    varrho: FieldElement
    kappa: FieldElement

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("beta", "gamma", "varrho", "kappa")}


def kappa_at(theta: Sequence[FieldElement], beta: FieldElement, i: int) -> FieldElement:
    """``(theta_{i-1} - theta_{i+1})^2 + (beta + 2)(theta_i - theta_{i-1})(theta_i - theta_{i+1})``."""
    a, b, c = theta[i - 1], theta[i], theta[i + 1]
    return (a - c) ** 2 + (beta + 2) * (b - a) * (b - c)


def beta_of(p: ParameterArray) -> FieldElement:
    if p.d < 3:
        raise DegreeTooSmall("the fundamental constant needs d >= 3")
    return index_ratio(p.theta, 2) - 1


def invariants(p: ParameterArray) -> InvariantData:
    if p.d < 3:
        raise DegreeTooSmall("invariants need d >= 3")
    require_valid(p)
    th = p.theta
    beta = beta_of(p)
    gammas = {th[i - 1] - beta * th[i] + th[i + 1] for i in range(1, p.d)}
    if len(gammas) != 1:
        raise InternalInconsistency("gamma depends on i")
    (gamma,) = gammas
    rhos = {
        th[i - 1] ** 2 - beta * th[i - 1] * th[i] + th[i] ** 2 - gamma * (th[i - 1] + th[i])
        for i in range(1, p.d + 1)
    }
    if len(rhos) != 1:
        raise InternalInconsistency("varrho depends on i")
    (varrho,) = rhos
    kappa = gamma**2 + (2 - beta) * varrho
    for i in range(1, p.d):
        if kappa_at(th, beta, i) != kappa:
            raise InternalInconsistency(f"the two kappa formulas disagree at i={i}")
    return InvariantData(beta, gamma, varrho, kappa)


# -- relatives and affine transforms ---------------------------------------


def relatives(p: ParameterArray, which: str) -> ParameterArray:
    """The parameter array of the star, down, Down or vee relative."""
    require_valid(p)
    rev = lambda s: tuple(reversed(s))
    neg = lambda s: tuple(-x for x in s)
    if which == "star":
        args = (p.theta_star, p.theta, p.varphi, rev(p.phi))
    elif which == "down":
        args = (p.theta, rev(p.theta_star), rev(p.phi), rev(p.varphi))
    elif which == "Down":
        args = (rev(p.theta), p.theta_star, p.phi, p.varphi)
    elif which == "vee":
        args = (neg(p.theta), p.theta_star, neg(p.varphi), neg(p.phi))
    else:
        raise InvalidInput(f"unknown relative {which!r}; expected one of {RELATIVES}")
    return ParameterArray(p.field, p.d, *args)


def affine(p: ParameterArray, xi: Any, zeta: Any, xi_star: Any, zeta_star: Any) -> ParameterArray:
    """Apply ``A -> xi A + zeta``, ``A* -> xi* A* + zeta*``."""
    f = p.field
    xi, zeta, xi_star, zeta_star = f(xi), f(zeta), f(xi_star), f(zeta_star)
    if not xi or not xi_star:
        raise ZeroScale("xi and xi_star must be nonzero")
    require_valid(p)
    s = xi * xi_star
    return ParameterArray(
        f,
        p.d,
        tuple(xi * t + zeta for t in p.theta),
        tuple(xi_star * t + zeta_star for t in p.theta_star),
        tuple(s * x for x in p.varphi),
        tuple(s * x for x in p.phi),
    )


# -- realization -----------------------------------------------------------


@dataclass(frozen=True)
class LeonardRealization:
    """Normalized tridiagonal ``A`` with diagonal ``A*``.

    ``a`` is the diagonal of ``A`` and ``x[i-1] = A[i-1][i]`` the
    superdiagonal; the subdiagonal is all ones. ``theta`` carries the
    eigenvalue sequence the realization was built from.
    """

    a_matrix: Matrix
    a_star: Matrix
    a: tuple[FieldElement, ...]
    x: tuple[FieldElement, ...]
    theta: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {
            "A": self.a_matrix.to_json(),
            "A_star": self.a_star.to_json(),
            "a": [str(v) for v in self.a],
            "x": [str(v) for v in self.x],
        }


def _div(num: FieldElement, den: FieldElement) -> FieldElement:
    if not den:
        raise InternalInconsistency("zero denominator in a realization formula")
    return num / den


def diagonal_from_varphi(p: ParameterArray) -> list[FieldElement]:
    th, ts, d = p.theta, p.theta_star, p.d
    a = [th[0] + _div(p.vphi(1), ts[0] - ts[1])]
    for i in range(1, d):
        a.append(th[i] + _div(p.vphi(i), ts[i] - ts[i - 1]) + _div(p.vphi(i + 1), ts[i] - ts[i + 1]))
    a.append(th[d] + _div(p.vphi(d), ts[d] - ts[d - 1]))
    return a


def diagonal_from_phi(p: ParameterArray) -> list[FieldElement]:
    th, ts, d = p.theta, p.theta_star, p.d
    a = [th[d] + _div(p.ph(1), ts[0] - ts[1])]
    for i in range(1, d):
        a.append(th[d - i] + _div(p.ph(i), ts[i] - ts[i - 1]) + _div(p.ph(i + 1), ts[i] - ts[i + 1]))
    a.append(th[0] + _div(p.ph(d), ts[d] - ts[d - 1]))
    return a


def last_diagonal_from_first(p: ParameterArray, a0: FieldElement) -> FieldElement:
    """``a_d`` expressed through ``a_0`` and three eigenvalues of each kind."""
    th, ts, d = p.theta, p.theta_star, p.d
    num = a0 * (ts[0] - ts[1]) + th[d] * (ts[1] - ts[d - 1]) + th[d - 1] * (ts[d] - ts[0])
    return _div(num, ts[d] - ts[d - 1])


def _tau_star(ts: Sequence[FieldElement], k: int, x: FieldElement) -> FieldElement:
    out = x.field.one()
    for j in range(k):
        out = out * (x - ts[j])
    return out


def _eta_star(ts: Sequence[FieldElement], k: int, x: FieldElement) -> FieldElement:
    d = len(ts) - 1
    out = x.field.one()
    for j in range(k):
        out = out * (x - ts[d - j])
    return out


def superdiagonal_products(p: ParameterArray) -> list[FieldElement]:
    """``x_1..x_d`` from the split sequences and the dual eigenvalues."""
    ts, d = p.theta_star, p.d
    out = []
    for i in range(1, d + 1):
        num = p.vphi(i) * p.ph(i) * _tau_star(ts, i - 1, ts[i - 1]) * _eta_star(ts, d - i, ts[i])
        den = _tau_star(ts, i, ts[i]) * _eta_star(ts, d - i + 1, ts[i - 1])
        out.append(_div(num, den))
    return out


def realize(p: ParameterArray) -> LeonardRealization:
    require_valid(p)
    f, d = p.field, p.d
    a = diagonal_from_varphi(p)
    if diagonal_from_phi(p) != a:
        raise InternalInconsistency("the varphi and phi diagonal formulas disagree")
    if d >= 2 and last_diagonal_from_first(p, a[0]) != a[d]:
        raise InternalInconsistency("a_d does not match its expression through a_0")
    if sum(a, f.zero()) != sum(p.theta, f.zero()):
        raise InternalInconsistency("trace of A differs from the eigenvalue sum")
    x = superdiagonal_products(p)
    if any(not v for v in x):
        raise InternalInconsistency("zero superdiagonal entry")
    am = Matrix.tridiagonal(f, a, [f.one()] * d, x)
    return LeonardRealization(am, Matrix.diag(f, p.theta_star), tuple(a), tuple(x), p.theta)


@dataclass(frozen=True)
class SplitRealization:
    a_split: Matrix
    a_star_split: Matrix

    def to_json(self) -> dict:
        return {"A_split": self.a_split.to_json(), "A_star_split": self.a_star_split.to_json()}


def split_realize(p: ParameterArray) -> SplitRealization:
    """Lower bidiagonal ``A`` (diagonal theta) and upper bidiagonal ``A*`` (superdiagonal varphi)."""
    require_valid(p)
    f, d = p.field, p.d
    z = [f.zero()] * d
    return SplitRealization(
        Matrix.tridiagonal(f, p.theta, [f.one()] * d, z),
        Matrix.tridiagonal(f, p.theta_star, z, p.varphi),
    )


# -- intersection numbers --------------------------------------------------


@dataclass(frozen=True)
class DualBasisData:
    b: tuple[FieldElement, ...]
    c: tuple[FieldElement, ...]
    eigvec0: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {
            "b": [str(v) for v in self.b],
            "c": [str(v) for v in self.c],
            "eigvec0": [str(v) for v in self.eigvec0],
        }


def dual_basis_data(r: LeonardRealization, theta0: FieldElement | None = None) -> DualBasisData:
    """Intersection numbers ``b_i``, ``c_i`` from a ``theta_0``-eigenvector of ``A``.

    The eigenvector is scaled so ``u_0 = 1``. A vanishing coordinate means
    the input was not the realization of a parameter array.
    """
    f = r.a_matrix.field
    t0 = r.theta[0] if theta0 is None else f(theta0)
    a, x = r.a, r.x
    d = len(a) - 1
    u = [f.one()]
    prev = f.zero()
    for i in range(d):
        nxt = -(prev + (a[i] - t0) * u[i]) / x[i]
        prev = u[i]
        u.append(nxt)
        if not nxt:
            raise ZeroCoordinate(f"eigenvector coordinate u_{i + 1} vanishes")
    last = (u[d - 1] if d >= 1 else f.zero()) + (a[d] - t0) * u[d]
    if last:
        raise InvalidInput(f"{t0} is not an eigenvalue of A")
    b = tuple(x[i] * u[i + 1] / u[i] for i in range(d))
    c = tuple(u[i - 1] / u[i] for i in range(1, d + 1))
    for i in range(d + 1):
        ci = c[i - 1] if i >= 1 else f.zero()
        bi = b[i] if i < d else f.zero()
        if ci + a[i] + bi != t0:
            raise InternalInconsistency(f"row sum {i} differs from theta_0")
    for i in range(1, d + 1):
        if b[i - 1] * c[i - 1] != x[i - 1]:
            raise InternalInconsistency(f"b_{i - 1} c_{i} differs from x_{i}")
    return DualBasisData(b, c, tuple(u))


def is_bipartite(r: LeonardRealization) -> bool:
    return all(not v for v in r.a)


@dataclass(frozen=True)
class EndpointIdentities:
    """The three diameter-independent differences between split entries."""

    varphi1_minus_phi1: bool
    varphid_minus_phi1: bool
    phid_minus_varphi1: bool

    def all(self) -> bool:
        return self.varphi1_minus_phi1 and self.varphid_minus_phi1 and self.phid_minus_varphi1

    def to_json(self) -> dict:
        return {
            "varphi1_minus_phi1": self.varphi1_minus_phi1,
            "varphid_minus_phi1": self.varphid_minus_phi1,
            "phid_minus_varphi1": self.phid_minus_varphi1,
        }


def one_d_identities(p: ParameterArray) -> EndpointIdentities:
    th, ts, d = p.theta, p.theta_star, p.d
    return EndpointIdentities(
        p.vphi(1) - p.ph(1) == (ts[1] - ts[0]) * (th[0] - th[d]),
        p.vphi(d) - p.ph(1) == (ts[d] - ts[0]) * (th[d - 1] - th[d]),
        p.ph(d) - p.vphi(1) == (ts[d] - ts[0]) * (th[1] - th[0]),
    )
