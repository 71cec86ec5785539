"""Compatibility of two Leonard pairs sharing ``A*`` and their companions.

Two normalized realizations ``A`` and ``B`` built over the same dual
eigenvalue sequence are compatible when ``[A, A*] = [B, A*]``; then
``K = A - B`` is diagonal and is called a companion of ``A``. Three
independent tests for compatibility are provided and cross-checked:

* split products: ``varphi_i phi_i`` agree for every ``i``;
* endpoints: the products at ``i = 1`` and ``i = d`` agree and, for
  ``d >= 3``, so do the invariant values ``kappa``;
* direct: the commutators agree as matrices.

For arrays given by basic sequences, the compatible partners form finitely
many solution families. :func:`companion_families` lists them and
:func:`materialize_family` builds the partner, the companion and, when a
closed form for ``K`` is known, checks it entrywise against ``A - B``.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from dataclasses import field as dc_field
from fractions import Fraction
from itertools import product as cartesian
from typing import Any

from .errors import (
    ConstraintViolated,
    FieldMismatch,
    InternalInconsistency,
    InvalidBasicSequence,
    InvalidInput,
    LengthMismatch,
    LeonardError,
    MissingRoot,
    NotCompatible,
    ThetaStarMismatch,
    TypeMismatch,
    TypeO,
    WrongDegree,
)
from .field import FieldDescriptor, FieldElement, solve_quadratic, sqrt
from .matrix import Matrix, bond_mate, commutator, tridiagonal_class
from .parray import (
    ParameterArray,
    invariants,
    realize,
    require_valid,
    superdiagonal_products,
)
from .typesys import (
    BasicSequence,
    LeonardType,
    array_from_basic,
    inequality_failures,
)


@dataclass(frozen=True)
class CompatInput:
    """Two parameter arrays over one field with the same ``d`` and ``theta_star``."""

    p: ParameterArray
    p_prime: ParameterArray

    def __post_init__(self) -> None:
        if self.p.field != self.p_prime.field:
            raise FieldMismatch("the two arrays live over different fields")
        if self.p.d != self.p_prime.d:
            raise LengthMismatch("the two arrays have different diameters")
        if self.p.theta_star != self.p_prime.theta_star:
            raise ThetaStarMismatch("the two arrays have different dual eigenvalues")

    @property
    def d(self) -> int:
        return self.p.d

    def to_json(self) -> dict:
        return {"p": self.p.to_json(), "p_prime": self.p_prime.to_json()}

    @classmethod
    def from_json(cls, obj: Any) -> CompatInput:
        if not isinstance(obj, dict) or "p" not in obj or "p_prime" not in obj:
            raise InvalidInput("compatibility input needs 'p' and 'p_prime'")
        default = FieldDescriptor.from_json(obj["field"]) if "field" in obj else None
        p = ParameterArray.from_json(obj["p"], None if "field" in obj["p"] else default)
        pp = ParameterArray.from_json(obj["p_prime"], None if "field" in obj["p_prime"] else default)
        return cls(p, pp)


# -- three compatibility tests ---------------------------------------------


def _products(p: ParameterArray) -> list[FieldElement]:
    return [p.vphi(i) * p.ph(i) for i in range(1, p.d + 1)]


def compatible_by_products(c: CompatInput) -> bool:
    require_valid(c.p)
    require_valid(c.p_prime)
    by_products = _products(c.p) == _products(c.p_prime)
    by_x = superdiagonal_products(c.p) == superdiagonal_products(c.p_prime)
    if by_products != by_x:
        raise InternalInconsistency("split products and superdiagonals disagree on compatibility")
    return by_products


def compatible_by_endpoints(c: CompatInput) -> bool:
    require_valid(c.p)
    require_valid(c.p_prime)
    p, q, d = c.p, c.p_prime, c.d
    ends = [1] if d == 1 else [1, d]
    ok = all(p.vphi(i) * p.ph(i) == q.vphi(i) * q.ph(i) for i in ends)
    if d >= 3:
        ok = ok and invariants(p).kappa == invariants(q).kappa
    # Same endpoint test phrased through the diagonal of the realizations.
    a, a2 = realize(p).a, realize(q).a
    via_a = (
        (a[0] - p.theta[0]) * (a[0] - p.theta[d]) == (a2[0] - q.theta[0]) * (a2[0] - q.theta[d])
        and (a[d] - p.theta[d]) * (a[d] - p.theta[0]) == (a2[d] - q.theta[d]) * (a2[d] - q.theta[0])
    )
    if d >= 3:
        via_a = via_a and invariants(p).kappa == invariants(q).kappa
    if via_a != ok:
        raise InternalInconsistency("endpoint products and diagonal endpoints disagree")
    return ok


def compatible_direct(c: CompatInput) -> bool:
    ra, rb = realize(c.p), realize(c.p_prime)
    return commutator(ra.a_matrix, ra.a_star) == commutator(rb.a_matrix, rb.a_star)


def compatible(c: CompatInput) -> bool:
    """Run all three tests and insist that they agree."""
    results = {compatible_by_products(c), compatible_by_endpoints(c), compatible_direct(c)}
    if len(results) != 1:
        raise InternalInconsistency("the three compatibility tests disagree")
    return results.pop()


# -- companions ----------------------------------------------------------------


@dataclass(frozen=True)
class CompanionResult:
    k: Matrix
    b: Matrix
    b_array: ParameterArray
    family: str | None = None
    closed_form: str | None = None
    b_basic: BasicSequence | None = dc_field(default=None, compare=False)
    branch_root: FieldElement | None = dc_field(default=None, compare=False)

    @property
    def k_diagonal(self) -> list[FieldElement]:
        return self.k.diagonal()

    def to_json(self) -> dict:
        out: dict = {
            "K": [str(x) for x in self.k.diagonal()],
            "B": self.b.to_json(),
            "B_array": self.b_array.to_json(),
        }
        if self.family is not None:
            out["family"] = self.family
        if self.b_basic is not None:
            out["B_basic"] = self.b_basic.to_json()
        if self.closed_form is not None:
            out["closed_form"] = self.closed_form
        return out


def companion_of(c: CompatInput) -> CompanionResult:
    if not compatible(c):
        raise NotCompatible("the arrays are not compatible")
    ra, rb = realize(c.p), realize(c.p_prime)
    k = ra.a_matrix - rb.a_matrix
    if not k.is_diagonal():
        raise InternalInconsistency("A - B is not diagonal for a compatible pair")
    if k.diagonal() != [x - y for x, y in zip(ra.a, rb.a)]:
        raise InternalInconsistency("K differs from the difference of diagonals")
    # -K is a companion of B: B - (-K) must be A again, a normalized member of the same set.
    back = rb.a_matrix + k
    if back != ra.a_matrix or not tridiagonal_class(back).normalized:
        raise InternalInconsistency("-K fails to be a companion of B")
    return CompanionResult(k, rb.a_matrix, c.p_prime)


def detect_shift(c: CompatInput) -> FieldElement | None:
    """``zeta`` with ``B = A + zeta I`` when the split sequences match (possibly swapped)."""
    p, q, d = c.p, c.p_prime, c.d
    if (q.varphi, q.phi) == (p.varphi, p.phi):
        zeta = q.theta[d] - p.theta[d]
    elif (q.varphi, q.phi) == (p.phi, p.varphi):
        zeta = q.theta[d] - p.theta[0]
    else:
        return None
    if realize(q).a_matrix != realize(p).a_matrix.shift(zeta):
        raise InternalInconsistency("split sequences match but B is not a shift of A")
    return zeta


def detect_bond_shift(c: CompatInput) -> FieldElement | None:
    """``zeta`` with ``B = A^vee + zeta I`` when the split sequences match up to sign."""
    p, q, d = c.p, c.p_prime, c.d
    neg = lambda s: tuple(-x for x in s)
    if (q.varphi, q.phi) == (neg(p.varphi), neg(p.phi)):
        zeta = q.theta[d] + p.theta[d]
    elif (q.varphi, q.phi) == (neg(p.phi), neg(p.varphi)):
        zeta = q.theta[d] + p.theta[0]
    else:
        return None
    if realize(q).a_matrix != bond_mate(realize(p).a_matrix).shift(zeta):
        raise InternalInconsistency("split sequences match up to sign but B is not a bond shift of A")
    return zeta


def companion_entries_typeO(c: CompatInput) -> list[FieldElement]:
    """Diagonal of ``K`` for ``d = 1`` or ``d = 2`` from eigenvalues and ``a_0``."""
    d = c.d
    if d not in (1, 2):
        raise WrongDegree("closed-form companions for small diameter need d = 1 or d = 2")
    if not compatible(c):
        raise NotCompatible("the arrays are not compatible")
    th, tp, ts = c.p.theta, c.p_prime.theta, c.p.theta_star
    a0, b0 = realize(c.p).a[0], realize(c.p_prime).a[0]
    if d == 1:
        entries = [a0 - b0, th[0] + th[1] - a0 - tp[0] - tp[1] + b0]
    else:
        den = ts[1] - ts[2]
        entries = [
            a0 - b0,
            th[0] + th[2] - a0 - tp[0] - tp[2] + b0 + (a0 - b0 - th[1] + tp[1]) * (ts[0] - ts[1]) / den,
            ((th[1] - tp[1]) * (ts[0] - ts[2]) - (a0 - b0) * (ts[0] - ts[1])) / den,
        ]
    if entries != companion_of(c).k.diagonal():
        raise InternalInconsistency("small-diameter closed form disagrees with A - B")
    return entries


# -- basic-variable compatibility conditions ----------------------------------


_STARRED = {
    LeonardType.I: ("delta_star", "mu_star", "h_star"),
    LeonardType.II: ("delta_star", "mu_star", "h_star"),
    LeonardType.IIIplus: ("delta_star", "s_star", "h_star"),
    LeonardType.IIIminus: ("delta_star", "s_star", "h_star"),
    LeonardType.IV: ("delta_star", "h_star", "s_star"),
}


def _check_pair(b: BasicSequence, bp: BasicSequence) -> None:
    if b.type is not bp.type:
        raise TypeMismatch(f"types {b.type.value} and {bp.type.value} differ")
    if b.field != bp.field:
        raise FieldMismatch("basic sequences live over different fields")
    if b.q != bp.q:
        raise TypeMismatch("type I sequences must use the same q")
    if any(b[n] != bp[n] for n in _STARRED[b.type]):
        raise TypeMismatch("the starred basic variables must agree")


def basic_conditions(b: BasicSequence, bp: BasicSequence, d: int) -> bool:
    """The three polynomial equations in the basic variables, evaluated exactly."""
    _check_pair(b, bp)
    e, f = b.named(), bp.named()
    t = b.type
    if t is LeonardType.I:
        mu, h, tau, mu2, h2, tau2 = e["mu"], e["h"], e["tau"], f["mu"], f["h"], f["tau"]
        m = e["mu_star"] * e["h_star"]
        return (
            mu * h == mu2 * h2
            and tau * (mu + h) == tau2 * (mu2 + h2)
            and tau**2 + (mu + h) ** 2 * m == tau2**2 + (mu2 + h2) ** 2 * m
        )
    if t is LeonardType.II:
        mu, h, tau, mu2, h2, tau2 = e["mu"], e["h"], e["tau"], f["mu"], f["h"], f["tau"]
        hs, ms = e["h_star"], e["mu_star"]
        w = ms**2 + (d - 1) ** 2 * hs**2
        return (
            h**2 == h2**2
            and 2 * h * tau + mu**2 * hs == 2 * h2 * tau2 + mu2**2 * hs
            and 4 * tau**2 - mu**2 * w == 4 * tau2**2 - mu2**2 * w
        )
    if t is LeonardType.IIIplus:
        s, h, tau, s2, h2, tau2 = e["s"], e["h"], e["tau"], f["s"], f["h"], f["tau"]
        hs = e["h_star"]
        return (
            h**2 == h2**2
            and (tau + s * hs) ** 2 == (tau2 + s2 * hs) ** 2
            and (tau - s * hs) ** 2 == (tau2 - s2 * hs) ** 2
        )
    if t is LeonardType.IIIminus:
        s, h, tau, s2, h2, tau2 = e["s"], e["h"], e["tau"], f["s"], f["h"], f["tau"]
        hs, ss = e["h_star"], e["s_star"]
        w = 4 * ss**2 + (d + 1) ** 2 * hs**2
        return (
            h**2 == h2**2
            and h * tau + 2 * hs * s**2 == h2 * tau2 + 2 * hs * s2**2
            and 2 * hs * tau**2 + w * h * tau == 2 * hs * tau2**2 + w * h2 * tau2
        )
    s, h, r, s2, h2, r2 = e["s"], e["h"], e["r"], f["s"], f["h"], f["r"]
    ss = e["s_star"]
    return (
        h == h2
        and s * (1 + s + ss) == s2 * (1 + s2 + ss)
        and r * (r + s + s * ss) == r2 * (r2 + s2 + s2 * ss)
    )


def compat_conditions_basic(b: BasicSequence, bp: BasicSequence, d: int) -> bool:
    """Evaluate the basic-variable equations and cross-check against split products."""
    verdict = basic_conditions(b, bp, d)
    try:
        c = CompatInput(array_from_basic(b, d), array_from_basic(bp, d))
    except LeonardError:
        return verdict
    if compatible_by_products(c) != verdict:
        raise InternalInconsistency("basic-variable equations disagree with split products")
    return verdict


# -- solution families -----------------------------------------------------------


@dataclass(frozen=True)
class CompanionFamily:
    """One family of compatible partners, described symbolically.

    ``constraints`` are human-readable assignments for the primed variables;
    ``free_parameters`` name the bindings the caller may (or must) supply.
    ``delta_prime`` is always an optional binding defaulting to ``delta``.
    """

    family_id: str
    constraints: tuple[str, ...]
    free_parameters: tuple[str, ...] = ()
    requires_sqrt: bool = False

    def to_json(self) -> dict:
        return {
            "family": self.family_id,
            "constraints": list(self.constraints),
            "free_parameters": list(self.free_parameters),
            "requires_sqrt": self.requires_sqrt,
        }


def companion_families(b: BasicSequence, d: int) -> list[CompanionFamily]:
    t, e = b.type, b.named()
    char2 = b.field.characteristic == 2
    fams: list[CompanionFamily] = []
    if t is LeonardType.I:
        m = e["mu_star"] * e["h_star"]
        if char2:
            fams.append(CompanionFamily("type1sol1b", ("tau' = tau", "(mu', h') is a permutation of (mu, h)")))
            if m:
                fams.append(CompanionFamily("type1sol3b", (
                    "mu' h' = mu h", "mu' + h' = tau (mu* h*)^(-1/2)", "tau' = (mu + h)(mu* h*)^(1/2)"),
                    requires_sqrt=True))
            elif not e["tau"]:
                fams.append(CompanionFamily("type1sol5b", ("tau' = 0", "mu' h' = mu h"),
                                            ("mu_prime", "h_prime")))
        else:
            fams.append(CompanionFamily("type1sol1", ("tau' = tau", "(mu', h') is a permutation of (mu, h)")))
            fams.append(CompanionFamily("type1sol2", ("tau' = -tau", "(mu', h') is a permutation of (-mu, -h)")))
            if m:
                fams.append(CompanionFamily("type1sol3", (
                    "mu' h' = mu h", "mu' + h' = tau (mu* h*)^(-1/2)", "tau' = (mu + h)(mu* h*)^(1/2)"),
                    requires_sqrt=True))
                fams.append(CompanionFamily("type1sol4", (
                    "mu' h' = mu h", "mu' + h' = -tau (mu* h*)^(-1/2)", "tau' = -(mu + h)(mu* h*)^(1/2)"),
                    requires_sqrt=True))
            elif not e["tau"]:
                fams.append(CompanionFamily("type1sol5", ("tau' = 0", "mu' h' = mu h"),
                                            ("mu_prime", "h_prime")))
    elif t is LeonardType.II:
        h, hs = e["h"], e["h_star"]
        fams.append(CompanionFamily("type2sol1", ("h' = h", "tau' = tau", "mu'^2 = mu^2")))
        fams.append(CompanionFamily("type2sol2", ("h' = -h", "tau' = -tau", "mu'^2 = mu^2")))
        if hs and h:
            fams.append(CompanionFamily("type2sol3", (
                "h' = h", "tau' = -tau - h/(2h*) (mu*^2 + (d-1)^2 h*^2)",
                "mu'^2 = mu^2 + h/h*^2 (4 h* tau + h (mu*^2 + (d-1)^2 h*^2))"), requires_sqrt=True))
            fams.append(CompanionFamily("type2sol4", (
                "h' = -h", "tau' = tau + h/(2h*) (mu*^2 + (d-1)^2 h*^2)",
                "mu'^2 = mu^2 + h/h*^2 (4 h* tau + h (mu*^2 + (d-1)^2 h*^2))"), requires_sqrt=True))
        if not hs and not h:
            fams.append(CompanionFamily("type2sol5", ("h' = 0", "4(tau^2 - tau'^2) = (mu^2 - mu'^2) mu*^2"),
                                        ("tau_prime", "mu_prime"), requires_sqrt=True))
    elif t is LeonardType.IIIplus:
        fams.append(CompanionFamily("type3+sol1", ("s' = s", "tau' = tau", "h'^2 = h^2")))
        fams.append(CompanionFamily("type3+sol2", ("s' = -s", "tau' = -tau", "h'^2 = h^2")))
        fams.append(CompanionFamily("type3+sol3", ("s' = tau/h*", "tau' = s h*", "h'^2 = h^2")))
        fams.append(CompanionFamily("type3+sol4", ("s' = -tau/h*", "tau' = -s h*", "h'^2 = h^2")))
    elif t is LeonardType.IIIminus:
        fams.append(CompanionFamily("type3-sol1", ("h' = h", "tau' = tau", "s'^2 = s^2")))
        fams.append(CompanionFamily("type3-sol2", ("h' = -h", "tau' = -tau", "s'^2 = s^2")))
        fams.append(CompanionFamily("type3-sol3", (
            "h' = h", "tau' = -tau - 2hh*((s*/h*)^2 + ((d+1)/2)^2)",
            "s'^2 = s^2 + (h/h*) tau + h^2 ((s*/h*)^2 + ((d+1)/2)^2)"), requires_sqrt=True))
        fams.append(CompanionFamily("type3-sol4", (
            "h' = -h", "tau' = tau + 2hh*((s*/h*)^2 + ((d+1)/2)^2)",
            "s'^2 = s^2 + (h/h*) tau + h^2 ((s*/h*)^2 + ((d+1)/2)^2)"), requires_sqrt=True))
    elif t is LeonardType.IV:
        fams.append(CompanionFamily("type4sol1", ("h' = h", "s' = s", "r' = r or r' = r + s + s s*")))
        fams.append(CompanionFamily("type4sol3", (
            "h' = h", "s' = 1 + s + s*",
            "(r + r')/(1 + s*) + r'(1 + s*)/(r + r') = s", "r + r' != 0")))
    else:
        raise TypeO("type O arrays have no solution families")
    return fams


def _family(b: BasicSequence, family_id: str, d: int) -> CompanionFamily:
    for fam in companion_families(b, d):
        if fam.family_id == family_id:
            return fam
    raise ConstraintViolated(f"family {family_id!r} does not apply to this basic sequence")


def _plus_minus_roots(x: FieldElement) -> list[FieldElement]:
    r = sqrt(x)
    if r is None:
        return []
    return [r] if r == -r else [r, -r]


Branch = dict[str, FieldElement]


def _branches(b: BasicSequence, family_id: str, d: int, bind: dict[str, FieldElement]) -> tuple[list[Branch], bool]:
    """Primed basic variables for each branch, plus whether a needed root was missing."""
    e = b.named()
    f = b.field
    missing = False
    out: list[Branch] = []
    t = b.type
    if t is LeonardType.I:
        mu, h, tau = e["mu"], e["h"], e["tau"]
        m = e["mu_star"] * e["h_star"]
        if family_id in ("type1sol1", "type1sol1b"):
            out = [{"mu": mu, "h": h, "tau": tau}, {"mu": h, "h": mu, "tau": tau}]
        elif family_id == "type1sol2":
            out = [{"mu": -mu, "h": -h, "tau": -tau}, {"mu": -h, "h": -mu, "tau": -tau}]
        elif family_id in ("type1sol3", "type1sol4", "type1sol3b"):
            sign = -1 if family_id == "type1sol4" else 1
            rhos = _plus_minus_roots(m)
            missing = not rhos
            for rho in rhos:
                total = sign * tau / rho
                roots = solve_quadratic(-total, mu * h)
                if not roots:
                    missing = True
                for z in roots:
                    out.append({"mu": z, "h": total - z, "tau": sign * (mu + h) * rho, "_rho": rho})
        elif family_id in ("type1sol5", "type1sol5b"):
            if "mu_prime" not in bind:
                raise ConstraintViolated("this family needs the binding mu_prime")
            mu2 = bind["mu_prime"]
            if "h_prime" in bind:
                h2 = bind["h_prime"]
            elif mu2:
                h2 = mu * h / mu2
            else:
                raise ConstraintViolated("h_prime is required when mu_prime = 0")
            if mu2 * h2 != mu * h:
                raise ConstraintViolated("mu' h' must equal mu h")
            out = [{"mu": mu2, "h": h2, "tau": f.zero()}]
    elif t is LeonardType.II:
        mu, h, tau = e["mu"], e["h"], e["tau"]
        ms, hs = e["mu_star"], e["h_star"]
        w = ms**2 + (d - 1) ** 2 * hs**2
        if family_id == "type2sol1":
            out = [{"h": h, "tau": tau, "mu": m2} for m2 in {mu, -mu}]
        elif family_id == "type2sol2":
            out = [{"h": -h, "tau": -tau, "mu": m2} for m2 in {mu, -mu}]
        elif family_id in ("type2sol3", "type2sol4"):
            sq = mu**2 + h / hs**2 * (4 * hs * tau + h * w)
            if family_id == "type2sol3":
                h2, tau2 = h, -tau - h / (2 * hs) * w
            else:
                h2, tau2 = -h, tau + h / (2 * hs) * w
            roots = _plus_minus_roots(sq)
            missing = not roots
            out = [{"h": h2, "tau": tau2, "mu": m2} for m2 in roots]
        elif family_id == "type2sol5":
            if "tau_prime" not in bind and "mu_prime" not in bind:
                raise ConstraintViolated("this family needs tau_prime or mu_prime")
            if "tau_prime" in bind and "mu_prime" in bind:
                pairs = [(bind["tau_prime"], bind["mu_prime"])]
            elif "tau_prime" in bind:
                tau2 = bind["tau_prime"]
                roots = _plus_minus_roots(mu**2 - 4 * (tau**2 - tau2**2) / ms**2)
                missing = not roots
                pairs = [(tau2, m2) for m2 in roots]
            else:
                mu2 = bind["mu_prime"]
                roots = _plus_minus_roots(tau**2 - (mu**2 - mu2**2) * ms**2 / 4)
                missing = not roots
                pairs = [(t2, mu2) for t2 in roots]
            for tau2, mu2 in pairs:
                if 4 * (tau**2 - tau2**2) != (mu**2 - mu2**2) * ms**2:
                    raise ConstraintViolated("4(tau^2 - tau'^2) must equal (mu^2 - mu'^2) mu*^2")
                out.append({"h": f.zero(), "tau": tau2, "mu": mu2})
    elif t is LeonardType.IIIplus:
        s, h, tau, hs = e["s"], e["h"], e["tau"], e["h_star"]
        pick = {
            "type3+sol1": (s, tau), "type3+sol2": (-s, -tau),
            "type3+sol3": (tau / hs, s * hs), "type3+sol4": (-tau / hs, -s * hs),
        }
        s2, tau2 = pick[family_id]
        out = [{"s": s2, "tau": tau2, "h": h2} for h2 in {h, -h}]
    elif t is LeonardType.IIIminus:
        s, h, tau = e["s"], e["h"], e["tau"]
        hs, ss = e["h_star"], e["s_star"]
        c = (ss / hs) ** 2 + f(Fraction(d + 1, 2)) ** 2
        if family_id == "type3-sol1":
            out = [{"h": h, "tau": tau, "s": x} for x in {s, -s}]
        elif family_id == "type3-sol2":
            out = [{"h": -h, "tau": -tau, "s": x} for x in {s, -s}]
        else:
            if family_id == "type3-sol3":
                h2, tau2 = h, -tau - 2 * h * hs * c
            else:
                h2, tau2 = -h, tau + 2 * h * hs * c
            roots = _plus_minus_roots(s**2 + h / hs * tau + h**2 * c)
            missing = not roots
            out = [{"h": h2, "tau": tau2, "s": x} for x in roots]
    elif t is LeonardType.IV:
        s, h, r, ss = e["s"], e["h"], e["r"], e["s_star"]
        if family_id == "type4sol1":
            out = [{"h": h, "s": s, "r": x} for x in {r, r + s + s * ss}]
        else:
            one_ss = 1 + ss
            for u in solve_quadratic(one_ss * (1 + s + ss), r * one_ss**2):
                if u:
                    out.append({"h": h, "s": 1 + s + ss, "r": r + u})
            missing = not out
    return out, missing


def _ordered_branches(branches: list[Branch]) -> list[Branch]:
    key = lambda br: tuple((k, br[k].sort_key()) for k in sorted(br))
    return sorted(branches, key=key)


# -- closed forms for K ---------------------------------------------------------


def _closed_form_reduced(b: BasicSequence, bp: BasicSequence, family_id: str, d: int,
                         rho: FieldElement | None) -> tuple[str, list[FieldElement]] | None:
    """Closed-form diagonal of ``K`` for reduced sequences (``delta = delta' = delta* = 0``).

    Returns ``(name, entries)`` or ``None`` when no closed form is known for
    the family. The constant ``delta - delta'`` is added by the caller.
    """
    f = b.field
    e, ep = b.named(), bp.named()
    t = b.type
    zero = [f.zero()] * (d + 1)
    if family_id in ("type1sol1", "type1sol1b", "type2sol1", "type3+sol1", "type3-sol1"):
        return "shift", zero
    if family_id in ("type1sol2", "type2sol2", "type3+sol2", "type3-sol2"):
        reduced = b.replace(delta=0, delta_star=0)
        a = realize(array_from_basic(reduced, d)).a
        return "bond", [2 * x for x in a]
    if t is LeonardType.I:
        q = b.q
        if family_id in ("type1sol3", "type1sol4", "type1sol3b"):
            # Rescale A* so that mu* h* = 1; this leaves A and B unchanged.
            ms = e["mu_star"] / rho
            tau = e["tau"] / rho
            total = e["mu"] + e["h"]
            if family_id == "type1sol3":
                sgn, num, name = -1, total - tau, "type1-sqrt-family"
            else:
                sgn, num = 1, total + tau
                name = "type1-sqrt-family-char2" if family_id == "type1sol3b" else "type1-negated-sqrt-family"
            k = [q**d * (ms + sgn * q ** (-d - 1)) * num / (ms + sgn * q ** (d - 1))]
            for i in range(1, d):
                k.append(
                    q ** (d - 2 * i) * (ms + sgn * q ** (-d - 1)) * (ms + sgn * q ** (d + 1)) * num
                    / ((ms + sgn * q ** (d - 2 * i - 1)) * (ms + sgn * q ** (d - 2 * i + 1)))
                )
            k.append(q ** (-d) * (ms + sgn * q ** (d + 1)) * num / (ms + sgn * q ** (1 - d)))
            return name, k
        if family_id in ("type1sol5", "type1sol5b"):
            diff = e["mu"] + e["h"] - ep["mu"] - ep["h"]
            if not e["mu_star"]:
                return "type1-degenerate-family", [q ** (2 * i - d) * diff for i in range(d + 1)]
            return "type1-degenerate-family", [q ** (d - 2 * i) * diff for i in range(d + 1)]
    if t is LeonardType.II:
        h, hs, ms, tau = e["h"], e["h_star"], e["mu_star"], e["tau"]
        if family_id == "type2sol3":
            w = 4 * hs * tau + h * (ms**2 + (d - 1) ** 2 * hs**2)
            k = [-d * w / (2 * hs * (ms + (d - 1) * hs))]
            for i in range(1, d):
                k.append(-((d - 2 * i) * ms + (d * (d + 1) - 2 * i * (d - i)) * hs) * w
                         / (2 * hs * (ms + (d - 2 * i - 1) * hs) * (ms + (d - 2 * i + 1) * hs)))
            k.append(-d * w / (2 * hs * (-ms + (d - 1) * hs)))
            return "type2-first-sqrt-family", k
        if family_id == "type2sol4":
            k = [d * h * (ms + (d - 1) * hs) / (2 * hs)]
            for i in range(1, d):
                k.append(h * ((d - 2 * i) * ms + (d * (d - 1) - 2 * i * (d - i)) * hs) / (2 * hs))
            k.append(d * h * (-ms + (d - 1) * hs) / (2 * hs))
            return "type2-second-sqrt-family", k
        if family_id == "type2sol5":
            return "type2-degenerate-family", [-(d - 2 * i) * (tau - ep["tau"]) / ms for i in range(d + 1)]
    if t is LeonardType.IIIplus:
        s, tau, hs, ss = e["s"], e["tau"], e["h_star"], e["s_star"]
        if family_id == "type3+sol3":
            c = (s - tau / hs) * (2 * ss - (d + 1) * hs)
            k = [s - tau / hs]
            for i in range(1, d + 1):
                if i % 2 == 0:
                    k.append(c / (2 * ss - (d - 2 * i + 1) * hs))
                else:
                    k.append(-c / (2 * ss - (d - 2 * i - 1) * hs))
            return "type3plus-swap-family", k
        if family_id == "type3+sol4":
            c = (s + tau / hs) * (2 * ss + (d + 1) * hs)
            k = []
            for i in range(d):
                if i % 2 == 0:
                    k.append(c / (2 * ss - (d - 2 * i - 1) * hs))
                else:
                    k.append(-c / (2 * ss - (d - 2 * i + 1) * hs))
            k.append(s + tau / hs)
            return "type3plus-negated-swap-family", k
    if t is LeonardType.IIIminus:
        h, tau, hs, ss = e["h"], e["tau"], e["h_star"], e["s_star"]
        half_up, half_down = f(Fraction(d + 1, 2)), f(Fraction(d - 1, 2))
        if family_id == "type3-sol3":
            n = tau + h * hs * ((ss / hs) ** 2 + half_up**2)
            k = []
            for i in range(d + 1):
                if i % 2 == 0:
                    k.append(n / (ss - (half_down - i) * hs))
                else:
                    k.append(-n / (ss - (half_up - i) * hs))
            return "type3minus-first-sqrt-family", k
        if family_id == "type3-sol4":
            m = h * hs * ((ss / hs) ** 2 - half_up**2)
            k = [-h * (ss / hs + half_up)]
            for i in range(1, d):
                if i % 2 == 0:
                    k.append(-m / (ss - (half_up - i) * hs))
                else:
                    k.append(m / (ss - (half_down - i) * hs))
            k.append(h * (ss / hs - half_up))
            return "type3minus-second-sqrt-family", k
    return None


def _type4_closed_form(b: BasicSequence, bp: BasicSequence) -> list[FieldElement]:
    e, ep = b.named(), bp.named()
    h, ss = e["h"], e["s_star"]
    c = (e["r"] + ep["r"]) / (ss + 1)
    base = e["delta"] - ep["delta"]
    return [base + h * c, base + h * (1 + ss + c), base + h * (1 + c), base + h * (ss + c)]


# -- materialization -------------------------------------------------------------


def _coerce_bindings(b: BasicSequence, bindings: dict[str, Any] | None) -> dict[str, FieldElement]:
    allowed = {"delta_prime", "mu_prime", "h_prime", "tau_prime"}
    out = {}
    for k, v in (bindings or {}).items():
        if k not in allowed:
            raise InvalidInput(f"unknown binding {k!r}")
        out[k] = b.field(v)
    return out


def materialize_family(
    b: BasicSequence,
    family: CompanionFamily | str,
    bindings: dict[str, Any] | None = None,
    d: int = 3,
    check_closed_form: bool = True,
) -> list[CompanionResult]:
    """Build every partner in one family and its companion ``K = A - B``.

    Families with two-valued choices (a permutation, a sign, a square root)
    yield one result per branch; results are deduplicated by ``B`` and
    returned in a deterministic order. Branches whose partner violates the
    type's inequalities are dropped. When every branch is dropped the
    reason is raised: :class:`MissingRoot` if a needed root is absent from
    the field, :class:`InvalidBasicSequence` otherwise.
    """
    family_id = family if isinstance(family, str) else family.family_id
    fam = _family(b, family_id, d)
    bind = _coerce_bindings(b, bindings)
    p = array_from_basic(b, d)
    delta2 = bind.get("delta_prime", b["delta"])
    branches, missing = _branches(b, fam.family_id, d, bind)
    results: dict[Matrix, CompanionResult] = {}
    failures: list[str] = []
    for br in _ordered_branches(branches):
        rho = br.pop("_rho", None)
        bp = b.replace(delta=delta2, **br)
        fails = inequality_failures(bp, d)
        if fails:
            failures.append(fails[0])
            continue
        if not basic_conditions(b, bp, d):
            raise InternalInconsistency(f"family {family_id} produced a partner violating the equations")
        pp = array_from_basic(bp, d)
        comp = companion_of(CompatInput(p, pp))
        name = None
        if check_closed_form:
            name = _check_closed_form(b, bp, fam.family_id, d, rho, comp)
        res = CompanionResult(comp.k, comp.b, pp, fam.family_id, name, bp, rho)
        results.setdefault(comp.b, res)
    if not results:
        if missing and not failures:
            raise MissingRoot(f"family {family_id} needs a square root or quadratic root absent from the field")
        if failures:
            raise InvalidBasicSequence(f"every partner in {family_id} violates: {failures[0]}")
        raise MissingRoot(f"family {family_id} has no partner over this field")
    return list(results.values())


def closed_form_companion(b: BasicSequence, bp: BasicSequence, family_id: str, d: int,
                          root: FieldElement | None = None) -> tuple[str, list[FieldElement]] | None:
    """Diagonal of ``K`` from the family's closed form, or ``None`` if none is known.

    ``root`` is the square root of ``mu* h*`` chosen by the branch; it is
    needed only by the type I square-root families.
    """
    if family_id == "type4sol1":
        # Type IV eigenvalues are not centred, so the reversed branch moves by h s.
        const = b["delta"] - bp["delta"] + (b["h"] * b["s"] if bp["r"] != b["r"] else 0)
        return "shift", [const] * (d + 1)
    if family_id == "type4sol3":
        return "type4-second-family", _type4_closed_form(b, bp)
    found = _closed_form_reduced(b, bp, family_id, d, root)
    if found is None:
        return None
    name, entries = found
    shift = b["delta"] - bp["delta"]
    return name, [x + shift for x in entries]


def _check_closed_form(b: BasicSequence, bp: BasicSequence, family_id: str, d: int,
                       rho: FieldElement | None, comp: CompanionResult) -> str | None:
    found = closed_form_companion(b, bp, family_id, d, rho)
    if found is None:
        return None
    name, entries = found
    if entries != comp.k.diagonal():
        raise InternalInconsistency(f"closed form {name} for K disagrees with A - B")
    return name


def binding_space(b: BasicSequence, family: CompanionFamily) -> Iterator[dict[str, FieldElement]]:
    """Every assignment of the family's free parameters over a finite field."""
    if not family.free_parameters:
        yield {}
        return
    f = b.field
    if family.family_id in ("type1sol5", "type1sol5b"):
        prod = b["mu"] * b["h"]
        for m2 in f.elements():
            if m2:
                yield {"mu_prime": m2}
            elif not prod:
                for h2 in f.elements():
                    yield {"mu_prime": m2, "h_prime": h2}
    elif family.family_id == "type2sol5":
        for t2 in f.elements():
            yield {"tau_prime": t2}
    else:
        names = family.free_parameters
        for combo in cartesian(list(f.elements()), repeat=len(names)):
            yield dict(zip(names, combo))


def all_family_companions(b: BasicSequence, d: int) -> list[CompanionResult]:
    """Every companion produced by every family, enumerating free parameters (finite fields)."""
    out: dict[Matrix, CompanionResult] = {}
    for fam in companion_families(b, d):
        for bind in binding_space(b, fam):
            try:
                results = materialize_family(b, fam, bind, d)
            except (MissingRoot, InvalidBasicSequence, ConstraintViolated):
                continue
            for r in results:
                out.setdefault(r.b, r)
    return list(out.values())
