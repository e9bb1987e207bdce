"""Unit-modulus 2-cocycles on a groupoid and the twisted structure deciders.

A cocycle assigns a phase to every composable pair of arrows, subject to the
associativity identity  w(x,yz) w(y,z) = w(xy,z) w(x,y).  Phases are stored
either as complex numbers or, in exact mode, as rational turns t representing
exp(2*pi*i*t); exact mode makes every comparison an equality of fractions,
which is convenient when all inputs are roots of unity.

The twisted factoriality decider looks for a "central" subset of the
isotropy: a conjugation-invariant set supporting a nowhere-zero function that
transforms under conjugation by the cocycle's phases.  Existence is decided
per conjugation orbit by spanning-tree phase propagation: fix the value 1 at
a root, push values along tree edges, and test every remaining edge.  A loop
with holonomy different from 1 rules the orbit out.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .groupoid import GroupoidError, MeasuredGroupoid
from .conjugacy import _require_isotropy

UNIT_MODULUS_TOL = 1e-12
IDENTITY_TOL = 1e-10
HOLONOMY_TOL = 1e-9

Phase = Union[complex, Fraction]


class NotUnitModulus(GroupoidError):
    pass


class CocycleIdentityViolated(GroupoidError):
    pass


# -- phase arithmetic (complex numbers or rational turns) -------------------

def pmul(a: Phase, b: Phase) -> Phase:
    if isinstance(a, Fraction):
        return (a + b) % 1
    return a * b


def pconj(a: Phase) -> Phase:
    if isinstance(a, Fraction):
        return (-a) % 1
    return a.conjugate()


def phalf(a: Phase) -> Phase:
    """Principal square root: halve the angle taken in (-pi, pi]."""
    if isinstance(a, Fraction):
        rep = a if a <= Fraction(1, 2) else a - 1
        return (rep / 2) % 1
    return cmath.exp(0.5j * cmath.phase(complex(a)))

def pone(exact: bool) -> Phase:
    return Fraction(0) if exact else complex(1.0)


def as_complex(a: Phase) -> complex:
    if isinstance(a, Fraction):
        return cmath.exp(2j * cmath.pi * a)
    return complex(a)


def phase_close(a: Phase, b: Phase, tol: float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(as_complex(a) - as_complex(b)) <= tol


@dataclass(frozen=True)
class Cocycle:
    values: dict[tuple[str, str], Phase]  # keyed by every composable pair
    exact: bool
    normalized: bool

    def __call__(self, g: str, h: str) -> Phase:
        return self.values[(g, h)]

    def conjugate_cocycle(self) -> "Cocycle":
        return Cocycle(
            {k: pconj(v) for k, v in self.values.items()},
            exact=self.exact,
            normalized=self.normalized,
        )


@dataclass(frozen=True)
class CentralSetCertificate:
    """A conjugation-invariant isotropy set with a compatible phase function.

    ``f`` is nowhere zero on the support and satisfies, for every h in the
    support and every positive-target arrow g with s(g) = s(h),

        f(g h g^-1) = conj(w(g h g^-1, g)) * w(g, h) * f(h).
    """

    support: frozenset[str]
    f: dict[str, complex]
    max_defect: float


@dataclass(frozen=True)
class RegularityVerdict:
    regular: bool
    witness: Optional[tuple[str, str, str]] = None  # (g, x, y) violating triple


@dataclass(frozen=True)
class KleppnerVerdict:
    holds: bool
    witness: Optional[str] = None  # phase-symmetric isotropy arrow


@dataclass(frozen=True)
class TwistedIccVerdict:
    icc: bool
    certificate: Optional[CentralSetCertificate] = None


def _is_normalized(g: MeasuredGroupoid, values: Mapping[tuple[str, str], Phase],
                   tol: float) -> bool:
    one = pone(isinstance(next(iter(values.values()), Fraction(0)), Fraction))
    for x in g.arrow_order:
        right_unit = g.unit_arrow[g.src[x]]
        left_unit = g.unit_arrow[g.tgt[x]]
        if not phase_close(values[(x, right_unit)], one, tol):
            return False
        if not phase_close(values[(left_unit, x)], one, tol):
            return False
        if not phase_close(values[(x, g.inverse[x])], one, tol):
            return False
    return True


def validate_cocycle(
    g: MeasuredGroupoid,
    values: Mapping[tuple[str, str], Phase],
    *,
    exact: bool = False,
) -> Cocycle:
    """Check unit modulus and the cocycle identity on all composable triples.

    In exact mode every value must be a rational turn t standing for
    exp(2*pi*i*t); otherwise values are arbitrary unit-modulus complex
    numbers.
    """
    g._require_validated()
    table: dict[tuple[str, str], Phase] = {}
    for pair in g.composable_pairs():
        if pair not in values:
            raise CocycleIdentityViolated(
                f"cocycle value missing for composable pair {pair!r}", pair
            )
        v = values[pair]
        if exact:
            if not isinstance(v, Fraction):
                v = Fraction(v)
            v = v % 1
        else:
            v = complex(v)
            if abs(abs(v) - 1.0) > UNIT_MODULUS_TOL:
                raise NotUnitModulus(
                    f"|w{pair!r}| = {abs(v)!r} is not 1", pair
                )
        table[pair] = v
    extra = set(values) - set(table)
    if extra:
        raise CocycleIdentityViolated(
            "cocycle defined on non-composable pairs", sorted(extra)[0]
        )

    for (y, z), yz in g.compose.items():
        for x in g.by_source(g.tgt[y]):
            lhs = pmul(table[(x, yz)], table[(y, z)])
            rhs = pmul(table[(g.compose[(x, y)], z)], table[(x, y)])
            if not phase_close(lhs, rhs, IDENTITY_TOL):
                raise CocycleIdentityViolated(
                    f"cocycle identity fails on triple ({x!r},{y!r},{z!r})",
                    (x, y, z),
                )
    return Cocycle(table, exact=exact,
                   normalized=_is_normalized(g, table, UNIT_MODULUS_TOL))


def trivial_cocycle(g: MeasuredGroupoid, *, exact: bool = False) -> Cocycle:
    g._require_validated()
    one = pone(exact)
    return Cocycle({pair: one for pair in g.composable_pairs()},
                   exact=exact, normalized=True)


def apply_coboundary(
    g: MeasuredGroupoid, w: Cocycle, rho: Mapping[str, Phase]
) -> Cocycle:
    """The cohomologous cocycle  w'(x,y) = rho(x) rho(y) conj(rho(xy)) w(x,y)."""
    g._require_validated()
    values = {}
    for (x, y), v in w.values.items():
        xy = g.compose[(x, y)]
        values[(x, y)] = pmul(pmul(rho[x], pmul(rho[y], pconj(rho[xy]))), v)
    return Cocycle(values, exact=w.exact,
                   normalized=_is_normalized(g, values, UNIT_MODULUS_TOL))


def normalize_cocycle(g: MeasuredGroupoid, w: Cocycle) -> Cocycle:
    """Apply the two explicit coboundary corrections yielding a cocycle with
    phase 1 on every pair involving a unit arrow and on every (x, x^-1)."""
    g._require_validated()
    rho1 = {
        x: pconj(w.values[(x, g.unit_arrow[g.src[x]])]) for x in g.arrow_order
    }
    step1 = apply_coboundary(g, w, rho1)
    # one half-phase per inverse pair, taken at a canonical representative:
    # rho(x) rho(x^-1) then squares to the exact conjugate phase no matter
    # which branch the square root picks (the values at x and x^-1 agree only
    # up to rounding, which matters exactly on the branch cut)
    rho2: dict[str, Phase] = {}
    for x in g.arrow_order:
        rep = min(x, g.inverse[x], key=g.arrow_index)
        rho2[x] = phalf(pconj(step1.values[(rep, g.inverse[rep])]))
    step2 = apply_coboundary(g, step1, rho2)
    if not step2.normalized:
        raise CocycleIdentityViolated("normalization failed; invalid cocycle")
    return step2


def _conjugation_moves(g: MeasuredGroupoid, h: str) -> Iterable[tuple[str, str]]:
    """(g, ghg^-1) pairs for positive-target conjugators with s(g) = s(h)."""
    for a in g.by_source(g.src[h]):
        if g.mass[g.tgt[a]] <= 0.0:
            continue
        c = g.conjugate(a, h)
        if c is not None:
            yield a, c


def _edge_phase(w: Cocycle, a: str, h: str, c: str) -> Phase:
    # transport factor of f along h -> c = a h a^-1
    return pmul(pconj(w.values[(c, a)]), w.values[(a, h)])


def central_set_search(
    g: MeasuredGroupoid, w: Cocycle, tol: float = HOLONOMY_TOL
) -> Optional[CentralSetCertificate]:
    """Find a central isotropy set off the units, or report none exists.

    Scans each conjugation orbit of positive-mass non-unit isotropy arrows.
    On an orbit, any compatible f is determined up to scale by transport
    along a spanning tree, so the orbit carries a certificate exactly when
    every off-tree move closes up (loop holonomy 1 within ``tol``).
    """
    g._require_validated()
    if not w.normalized:
        w = normalize_cocycle(g, w)
    nodes = [
        h
        for h in g.arrow_order
        if g.src[h] == g.tgt[h]
        and h not in g.unit_arrow_set
        and g.mass[g.src[h]] > 0.0
    ]
    unvisited = set(nodes)
    for root in nodes:
        if root not in unvisited:
            continue
        # breadth-first transport of f from f(root) = 1
        f: dict[str, Phase] = {root: pone(w.exact)}
        order = [root]
        queue = [root]
        while queue:
            h = queue.pop(0)
            for a, c in _conjugation_moves(g, h):
                if c not in f:
                    f[c] = pmul(_edge_phase(w, a, h, c), f[h])
                    order.append(c)
                    queue.append(c)
        unvisited -= set(f)
        consistent = True
        max_defect = 0.0
        for h in order:
            for a, c in _conjugation_moves(g, h):
                lhs = f[c]
                rhs = pmul(_edge_phase(w, a, h, c), f[h])
                defect = abs(as_complex(lhs) - as_complex(rhs))
                max_defect = max(max_defect, defect)
                if not phase_close(lhs, rhs, tol):
                    consistent = False
                    break
            if not consistent:
                break
        if consistent:
            return CentralSetCertificate(
                support=frozenset(order),
                f={h: as_complex(v) for h, v in f.items()},
                max_defect=max_defect,
            )
    return None


def verify_central_certificate(
    g: MeasuredGroupoid,
    w: Cocycle,
    cert: CentralSetCertificate,
    tol: float = HOLONOMY_TOL,
) -> None:
    """Re-check a certificate against the defining transformation rule."""
    g._require_validated()
    if not w.normalized:
        w = normalize_cocycle(g, w)
    for h in cert.support:
        if g.src[h] != g.tgt[h] or h in g.unit_arrow_set:
            raise GroupoidError("certificate support is not isotropy off units", [h])
        if g.mass[g.src[h]] <= 0.0:
            raise GroupoidError("certificate support touches a null unit", [h])
        if cert.f[h] == 0:
            raise GroupoidError("certificate function vanishes on support", [h])
        for a, c in _conjugation_moves(g, h):
            if c not in cert.support:
                raise GroupoidError(
                    "certificate support is not conjugation invariant", [h, a]
                )
            expected = as_complex(_edge_phase(w, a, h, c)) * cert.f[h]
            if abs(cert.f[c] - expected) > tol:
                raise GroupoidError(
                    "certificate function breaks the transport rule", [h, a]
                )


def is_omega_regular(
    g: MeasuredGroupoid,
    w: Cocycle,
    ids: Iterable[str],
    tol: float = HOLONOMY_TOL,
) -> RegularityVerdict:
    """Phase symmetry of a bisection inside the isotropy:
    w(y, g) == w(g, x) whenever g x g^-1 = y with x, y in the set.

    Evaluated on the normalized representative of the cocycle.
    """
    g._require_validated()
    if not w.normalized:
        w = normalize_cocycle(g, w)
    ids = _require_isotropy(g, ids)
    if not g.is_bisection(ids):
        raise GroupoidError("phase regularity is defined for bisections")
    for x in g.sort_arrows(ids):
        for a in g.by_source(g.src[x]):
            y = g.conjugate(a, x)
            if y is None or y not in ids:
                continue
            if not phase_close(w.values[(y, a)], w.values[(a, x)], tol):
                return RegularityVerdict(False, witness=(a, x, y))
    return RegularityVerdict(True)


def kleppner_holds(
    g: MeasuredGroupoid, w: Cocycle, tol: float = HOLONOMY_TOL
) -> KleppnerVerdict:
    """Decide the phase-symmetry obstruction over singleton bisections.

    The condition fails exactly when some positive-mass non-unit isotropy
    arrow h satisfies w(h, g) = w(g, h) for every g conjugating h to itself:
    such a singleton is itself a non-null phase-regular bisection (its class
    has finite measure at finite scale), and conversely any offending
    bisection forces the self-condition on each of its positive singletons.
    """
    g._require_validated()
    if not w.normalized:
        w = normalize_cocycle(g, w)
    for h in g.arrow_order:
        if g.src[h] != g.tgt[h] or h in g.unit_arrow_set:
            continue
        if g.mass[g.src[h]] <= 0.0:
            continue
        symmetric = True
        for a in g.by_source(g.src[h]):
            if g.conjugate(a, h) != h:
                continue
            if not phase_close(w.values[(h, a)], w.values[(a, h)], tol):
                symmetric = False
                break
        if symmetric:
            return KleppnerVerdict(False, witness=h)
    return KleppnerVerdict(True)


def twisted_icc(
    g: MeasuredGroupoid, w: Cocycle, tol: float = HOLONOMY_TOL
) -> TwistedIccVerdict:
    """Twisted analogue of the icc decider: no central set may exist."""
    cert = central_set_search(g, w, tol)
    return TwistedIccVerdict(icc=cert is None, certificate=cert)
