"""Finite discrete measured groupoids as explicit composition tables.

A groupoid here is a finite set of arrows with source/target maps into a
finite weighted unit space, a stored composition table, a stored inversion
table, and an embedding of units as identity arrows.  Everything is id-based:
units and arrows are referenced by plain string identifiers, which keeps
instances serializable and diffable.

All mass bookkeeping treats zero-mass ("null") units as structurally present
but measure-theoretically invisible: measure computations weight arrows by the
mass of their source (or target) unit, so null-based arrows contribute
nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

MASS_TOL = 1e-12


class GroupoidError(ValueError):
    """A groupoid table violates one of the defining axioms.

    ``ids`` lists the offending arrow (or unit) identifiers.
    """

    def __init__(self, message: str, ids: Sequence[str] = ()):
        super().__init__(message)
        self.ids = tuple(ids)


class BadUnit(GroupoidError):
    pass


class DanglingReference(GroupoidError):
    pass


class BadInverse(GroupoidError):
    pass


class NonAssociative(GroupoidError):
    pass


class EmptyRestriction(GroupoidError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    src: str
    tgt: str


@dataclass(frozen=True)
class ValidationFlags:
    """Measure-theoretic facts recorded by validation, not axioms."""

    nonsingular: bool  # mass(s(g)) == 0 iff mass(t(g)) == 0, for every arrow
    pmp: bool          # mass(s(g)) == mass(t(g)) for every arrow
    mass_normalized: bool


@dataclass(frozen=True)
class Fullness:
    borel_full: bool
    mu_full: bool


@dataclass(frozen=True)
class ErgodicityVerdict:
    ergodic: bool
    # two distinct positive-mass orbits when not ergodic
    witness: Optional[tuple[frozenset[str], frozenset[str]]] = None


class MeasuredGroupoid:
    """A finite groupoid with a weighted unit space.

    Parameters
    ----------
    units:        ordered unit identifiers.
    mass:         unit id -> nonnegative float (probability atoms).
    arrows:       ordered (arrow id, src unit, tgt unit) triples.
    compose:      (g, h) -> gh, defined exactly when tgt(h) == src(g);
                  the product runs h first, then g.
    inverse:      arrow id -> arrow id.
    unit_arrows:  unit id -> its identity arrow.
    exact_mass:   optional unit id -> Fraction, for exact measure checks.
    unnormalized: allow total mass != 1.

    Construction only stores the tables; call :func:`validate_groupoid` (or
    ``.validate()``) before using any other operation.
    """

    def __init__(
        self,
        units: Sequence[str],
        mass: Mapping[str, float],
        arrows: Sequence[tuple[str, str, str]],
        compose: Mapping[tuple[str, str], str],
        inverse: Mapping[str, str],
        unit_arrows: Mapping[str, str],
        *,
        exact_mass: Optional[Mapping[str, Fraction]] = None,
        unnormalized: bool = False,
    ):
        self.units = tuple(units)
        self.mass = {u: float(mass[u]) for u in self.units}
        self.exact_mass = dict(exact_mass) if exact_mass is not None else None
        self.unnormalized = bool(unnormalized)
        self.arrows = tuple(Arrow(a, s, t) for (a, s, t) in arrows)
        self.arrow_order = tuple(a.id for a in self.arrows)
        self.src = {a.id: a.src for a in self.arrows}
        self.tgt = {a.id: a.tgt for a in self.arrows}
        self.compose = dict(compose)
        self.inverse = dict(inverse)
        self.unit_arrow = dict(unit_arrows)
        self.validated = False
        self.flags: Optional[ValidationFlags] = None
        self._unit_arrow_ids = frozenset(self.unit_arrow.values())
        self._index = {g: i for i, g in enumerate(self.arrow_order)}
        self._by_source: dict[str, tuple[str, ...]] = {}
        self._by_target: dict[str, tuple[str, ...]] = {}
        self._orbits: Optional[tuple[frozenset[str], ...]] = None

    # -- basic accessors -------------------------------------------------

    def arrow_index(self, g: str) -> int:
        return self._index[g]

    def sort_arrows(self, ids: Iterable[str]) -> tuple[str, ...]:
        """Arrow ids in storage order (the canonical order everywhere)."""
        return tuple(sorted(ids, key=self._index.__getitem__))

    def by_source(self, x: str) -> tuple[str, ...]:
        return self._by_source.get(x, ())

    def by_target(self, x: str) -> tuple[str, ...]:
        return self._by_target.get(x, ())

    @property
    def unit_arrow_set(self) -> frozenset[str]:
        return self._unit_arrow_ids

    @property
    def positive_units(self) -> frozenset[str]:
        return frozenset(u for u in self.units if self.mass[u] > 0.0)

    def is_unit_arrow(self, g: str) -> bool:
        return g in self._unit_arrow_ids

    def composable(self, g: str, h: str) -> bool:
        return self.tgt[h] == self.src[g]

    def mul(self, g: str, h: str) -> Optional[str]:
        """Product gh (h first), or None when not composable."""
        return self.compose.get((g, h))

    def conjugate(self, g: str, h: str) -> Optional[str]:
        """g h g^-1, or None when not composable."""
        gh = self.compose.get((g, h))
        if gh is None:
            return None
        return self.compose.get((gh, self.inverse[g]))

    def composable_pairs(self) -> Iterable[tuple[str, str]]:
        for h in self.arrow_order:
            for g in self._by_source.get(self.tgt[h], ()):
                yield (g, h)

    # -- validation ------------------------------------------------------

    def validate(self) -> "MeasuredGroupoid":
        unit_set = set(self.units)
        if len(unit_set) != len(self.units):
            dupes = [u for u in unit_set if self.units.count(u) > 1]
            raise BadUnit("duplicate unit identifiers", dupes)
        if len(self._index) != len(self.arrows):
            seen: set[str] = set()
            dupes = []
            for a in self.arrow_order:
                if a in seen:
                    dupes.append(a)
                seen.add(a)
            raise DanglingReference("duplicate arrow identifiers", dupes)

        for u in self.units:
            if self.mass[u] < 0.0:
                raise BadUnit(f"negative mass at unit {u!r}", [u])
        if self.exact_mass is not None:
            if set(self.exact_mass) != unit_set:
                raise BadUnit("exact masses must cover exactly the units")
            for u in self.units:
                if abs(float(self.exact_mass[u]) - self.mass[u]) > MASS_TOL:
                    raise BadUnit(f"exact and float mass disagree at {u!r}", [u])
            normalized = sum(self.exact_mass.values()) == 1
        else:
            normalized = abs(math.fsum(self.mass.values()) - 1.0) <= MASS_TOL
        if not normalized and not self.unnormalized:
            raise BadUnit(
                "unit masses do not sum to 1 (pass unnormalized=True to allow)"
            )

        for a in self.arrows:
            if a.src not in unit_set or a.tgt not in unit_set:
                raise DanglingReference(
                    f"arrow {a.id!r} references unknown unit", [a.id]
                )

        if set(self.unit_arrow) != unit_set:
            missing = sorted(unit_set - set(self.unit_arrow))
            raise BadUnit("unit_arrows must be defined for every unit", missing)
        for x, e in self.unit_arrow.items():
            if e not in self._index:
                raise DanglingReference(
                    f"unit arrow {e!r} of {x!r} is not an arrow", [e]
                )
            if self.src[e] != x or self.tgt[e] != x:
                raise BadUnit(f"unit arrow {e!r} is not a loop at {x!r}", [e])
        self._unit_arrow_ids = frozenset(self.unit_arrow.values())
        if len(self._unit_arrow_ids) != len(self.units):
            raise BadUnit("distinct units share a unit arrow")

        by_source: dict[str, list[str]] = {u: [] for u in self.units}
        by_target: dict[str, list[str]] = {u: [] for u in self.units}
        for a in self.arrows:
            by_source[a.src].append(a.id)
            by_target[a.tgt].append(a.id)
        self._by_source = {u: tuple(v) for u, v in by_source.items()}
        self._by_target = {u: tuple(v) for u, v in by_target.items()}

        # composition table: keyed exactly by the composable pairs
        for (g, h), gh in self.compose.items():
            for a in (g, h, gh):
                if a not in self._index:
                    raise DanglingReference(
                        f"compose entry ({g!r},{h!r})->{gh!r} uses unknown arrow",
                        [a],
                    )
            if self.tgt[h] != self.src[g]:
                raise BadUnit(
                    f"compose({g!r},{h!r}) defined but tgt(h) != src(g)", [g, h]
                )
            if self.src[gh] != self.src[h] or self.tgt[gh] != self.tgt[g]:
                raise BadUnit(
                    f"product {gh!r} of ({g!r},{h!r}) has wrong endpoints",
                    [g, h, gh],
                )
        for h in self.arrow_order:
            for g in self._by_source[self.tgt[h]]:
                if (g, h) not in self.compose:
                    raise DanglingReference(
                        f"missing composition for composable pair ({g!r},{h!r})",
                        [g, h],
                    )

        # inversion: involution producing the unit arrows
        if set(self.inverse) != set(self._index):
            missing = sorted(set(self._index) - set(self.inverse))
            raise BadInverse("inverse must be defined for every arrow", missing)
        for g, gi in self.inverse.items():
            if gi not in self._index:
                raise DanglingReference(f"inverse of {g!r} is unknown", [g, gi])
            if self.inverse[gi] != g:
                raise BadInverse(f"inverse is not an involution at {g!r}", [g, gi])
            if self.src[gi] != self.tgt[g] or self.tgt[gi] != self.src[g]:
                raise BadInverse(f"inverse of {g!r} has wrong endpoints", [g, gi])
            if self.compose.get((g, gi)) != self.unit_arrow[self.tgt[g]]:
                raise BadInverse(f"g * g^-1 is not the unit at tgt({g!r})", [g])
            if self.compose.get((gi, g)) != self.unit_arrow[self.src[g]]:
                raise BadInverse(f"g^-1 * g is not the unit at src({g!r})", [g])

        for g in self.arrow_order:
            if self.compose.get((g, self.unit_arrow[self.src[g]])) != g:
                raise BadUnit(f"unit arrow not right-neutral at {g!r}", [g])
            if self.compose.get((self.unit_arrow[self.tgt[g]], g)) != g:
                raise BadUnit(f"unit arrow not left-neutral at {g!r}", [g])

        # associativity over every composable triple
        for (g, h), gh in self.compose.items():
            for k in self._by_target[self.src[h]]:
                hk = self.compose[(h, k)]
                if self.compose[(gh, k)] != self.compose[(g, hk)]:
                    raise NonAssociative(
                        f"(g h) k != g (h k) for ({g!r},{h!r},{k!r})", [g, h, k]
                    )

        nonsingular = all(
            (self.mass[a.src] == 0.0) == (self.mass[a.tgt] == 0.0)
            for a in self.arrows
        )
        if self.exact_mass is not None:
            pmp = all(
                self.exact_mass[a.src] == self.exact_mass[a.tgt]
                for a in self.arrows
            )
        else:
            pmp = all(
                abs(self.mass[a.src] - self.mass[a.tgt]) <= MASS_TOL
                for a in self.arrows
            )
        self.flags = ValidationFlags(
            nonsingular=nonsingular, pmp=pmp, mass_normalized=normalized
        )
        self.validated = True
        return self

    def _require_validated(self):
        if not self.validated:
            raise GroupoidError("groupoid has not been validated")

    # -- structural operations --------------------------------------------

    def iso_subgroupoid(self) -> frozenset[str]:
        """Arrows with equal source and target (includes all unit arrows)."""
        self._require_validated()
        return frozenset(a.id for a in self.arrows if a.src == a.tgt)

    def orbits(self) -> tuple[frozenset[str], ...]:
        """Partition of units generated by (src, tgt) pairs, in unit order."""
        self._require_validated()
        if self._orbits is not None:
            return self._orbits
        parent = {u: u for u in self.units}

        def find(u: str) -> str:
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for a in self.arrows:
            ru, rv = find(a.src), find(a.tgt)
            if ru != rv:
                parent[rv] = ru
        groups: dict[str, list[str]] = {}
        for u in self.units:
            groups.setdefault(find(u), []).append(u)
        first = {r: min(self.units.index(u) for u in g) for r, g in groups.items()}
        ordered = sorted(groups.values(), key=lambda g: first[find(g[0])])
        self._orbits = tuple(frozenset(g) for g in ordered)
        return self._orbits

    def is_ergodic(self) -> ErgodicityVerdict:
        """True when a single orbit carries all the positive mass."""
        self._require_validated()
        positive = [
            o for o in self.orbits() if any(self.mass[u] > 0.0 for u in o)
        ]
        if len(positive) <= 1:
            return ErgodicityVerdict(True)
        return ErgodicityVerdict(False, witness=(positive[0], positive[1]))

    def arrow_measure(self, ids: Iterable[str], side: str = "source") -> float:
        """Mass of an arrow set: sum of unit masses at each arrow's base."""
        self._require_validated()
        if side == "source":
            base = self.src
        elif side == "target":
            base = self.tgt
        else:
            raise ValueError(f"side must be 'source' or 'target', got {side!r}")
        return math.fsum(self.mass[base[g]] for g in ids)

    def restrict(self, keep: Iterable[str]) -> tuple["MeasuredGroupoid", float]:
        """Subgroupoid over a unit subset, with mass renormalized.

        Returns (restricted groupoid, renormalization factor); masses were
        divided by the factor, i.e. factor == mass kept.
        """
        self._require_validated()
        keep_set = set(keep)
        unknown = keep_set - set(self.units)
        if unknown:
            raise DanglingReference("restriction units not in groupoid",
                                    sorted(unknown))
        total = math.fsum(self.mass[u] for u in keep_set)
        if total <= 0.0:
            raise EmptyRestriction("restriction carries zero mass")
        units = tuple(u for u in self.units if u in keep_set)
        kept = [a for a in self.arrows
                if a.src in keep_set and a.tgt in keep_set]
        kept_ids = {a.id for a in kept}
        compose = {
            (g, h): gh
            for (g, h), gh in self.compose.items()
            if g in kept_ids and h in kept_ids
        }
        exact = None
        if self.exact_mass is not None:
            etotal = sum(self.exact_mass[u] for u in keep_set)
            if etotal > 0:
                exact = {u: self.exact_mass[u] / etotal for u in units}
        sub = MeasuredGroupoid(
            units,
            {u: self.mass[u] / total for u in units},
            [(a.id, a.src, a.tgt) for a in kept],
            compose,
            {g: self.inverse[g] for g in kept_ids},
            {u: self.unit_arrow[u] for u in units},
            exact_mass=exact,
        )
        return sub.validate(), total

    def is_full(self, keep: Iterable[str]) -> Fullness:
        """Whether every unit (resp. positive-mass unit) is reachable from K."""
        self._require_validated()
        keep_set = set(keep)
        reachable = {
            a.tgt for a in self.arrows if a.src in keep_set
        }
        borel = all(u in reachable for u in self.units)
        mu = all(u in reachable for u in self.units if self.mass[u] > 0.0)
        return Fullness(borel_full=borel, mu_full=mu)

    # -- arrow-set algebra -------------------------------------------------

    def mul_sets(self, left: Iterable[str], right: Iterable[str]) -> frozenset[str]:
        """Pointwise product set {gh | g in left, h in right, composable}."""
        self._require_validated()
        out = set()
        left = list(left)
        for h in right:
            x = self.tgt[h]
            for g in left:
                if self.src[g] == x:
                    out.add(self.compose[(g, h)])
        return frozenset(out)

    def inv_set(self, ids: Iterable[str]) -> frozenset[str]:
        return frozenset(self.inverse[g] for g in ids)

    def is_bisection(self, ids: Iterable[str]) -> bool:
        """Source and target both injective on the set."""
        self._require_validated()
        ids = list(ids)
        srcs = {self.src[g] for g in ids}
        tgts = {self.tgt[g] for g in ids}
        return len(srcs) == len(ids) and len(tgts) == len(ids)


def validate_groupoid(g: MeasuredGroupoid) -> MeasuredGroupoid:
    """Check every groupoid axiom on the stored tables; returns the input.

    Raises :class:`BadUnit`, :class:`DanglingReference`, :class:`BadInverse`
    or :class:`NonAssociative` naming the offending identifiers.  Whether
    (G, mu) is nonsingular or pmp is recorded in ``g.flags``, not raised.
    """
    return g.validate()


def compose_many(g: MeasuredGroupoid, ids: Sequence[str]) -> Optional[str]:
    """Left-to-right fold of the composition table; None when undefined."""
    g._require_validated()
    if not ids:
        return None
    acc = ids[0]
    if acc not in g.src:
        return None
    for nxt in ids[1:]:
        prod = g.compose.get((acc, nxt))
        if prod is None:
            return None
        acc = prod
    return acc


def check_isomorphism(
    a: MeasuredGroupoid,
    b: MeasuredGroupoid,
    unit_map: Mapping[str, str],
    arrow_map: Mapping[str, str],
    *,
    check_mass: bool = False,
    mass_tol: float = MASS_TOL,
) -> bool:
    """Verify that explicit unit/arrow bijections form a groupoid isomorphism."""
    a._require_validated()
    b._require_validated()
    if sorted(unit_map) != sorted(a.units) or sorted(unit_map.values()) != sorted(b.units):
        return False
    if sorted(arrow_map) != sorted(a.arrow_order):
        return False
    if sorted(arrow_map.values()) != sorted(b.arrow_order):
        return False
    for g in a.arrow_order:
        if b.src[arrow_map[g]] != unit_map[a.src[g]]:
            return False
        if b.tgt[arrow_map[g]] != unit_map[a.tgt[g]]:
            return False
        if arrow_map[a.inverse[g]] != b.inverse[arrow_map[g]]:
            return False
    for (g, h), gh in a.compose.items():
        if b.compose.get((arrow_map[g], arrow_map[h])) != arrow_map[gh]:
            return False
    if check_mass:
        for u in a.units:
            if abs(a.mass[u] - b.mass[unit_map[u]]) > mass_tol:
                return False
    return True
