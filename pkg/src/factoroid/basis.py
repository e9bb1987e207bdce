"""Decomposition of a groupoid into disjoint bisections.

A *basis* is a partition of the arrow set into bisections, one of which is
exactly the set of unit arrows.  In a *symmetric* basis the inverse of every
block is again a block.  The decomposition is computed greedily in arrow
storage order, so it is a pure function of the stored tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .groupoid import GroupoidError, MeasuredGroupoid


@dataclass(frozen=True)
class Basis:
    """Ordered bisection blocks partitioning an arrow set.

    ``unit_block`` is the index of the block equal to the unit arrows (or the
    conjugated unit arrows, for a basis of a subgroupoid).
    """

    blocks: tuple[tuple[str, ...], ...]
    symmetric: bool
    unit_block: int

    def block_sets(self) -> tuple[frozenset[str], ...]:
        return tuple(frozenset(b) for b in self.blocks)

    def all_arrows(self) -> frozenset[str]:
        return frozenset(g for b in self.blocks for g in b)


def _greedy_blocks(
    g: MeasuredGroupoid, pool: list[str], symmetric: bool
) -> list[tuple[str, ...]]:
    """Partition ``pool`` into bisections, greedily in storage order.

    In symmetric mode each extracted block either consists entirely of
    self-inverse arrows (the block is then its own inverse) or contains no
    arrow together with its inverse; in the latter case the exact inverse set
    is emitted as the following block.  This splitting is what makes the
    resulting partition closed under inversion.
    """
    blocks: list[tuple[str, ...]] = []
    remaining = list(pool)
    remaining_set = set(remaining)
    while remaining:
        g0 = remaining[0]
        self_inv0 = g.inverse[g0] == g0
        used_src: set[str] = set()
        used_tgt: set[str] = set()
        block: list[str] = []
        block_set: set[str] = set()
        for a in remaining:
            if symmetric:
                if (g.inverse[a] == a) != self_inv0:
                    continue
                if not self_inv0 and g.inverse[a] in block_set:
                    continue
            if g.src[a] in used_src or g.tgt[a] in used_tgt:
                continue
            block.append(a)
            block_set.add(a)
            used_src.add(g.src[a])
            used_tgt.add(g.tgt[a])
        blocks.append(tuple(block))
        remaining_set -= block_set
        if symmetric and not self_inv0:
            inv_block = g.sort_arrows(g.inverse[a] for a in block)
            blocks.append(inv_block)
            remaining_set -= set(inv_block)
        remaining = [a for a in remaining if a in remaining_set]
    return blocks


def build_basis(g: MeasuredGroupoid, symmetric: bool = True) -> Basis:
    """Partition all arrows into bisections, with the unit arrows first."""
    g._require_validated()
    unit_block = g.sort_arrows(g.unit_arrow_set)
    pool = [a for a in g.arrow_order if a not in g.unit_arrow_set]
    blocks = [unit_block] + _greedy_blocks(g, pool, symmetric)
    basis = Basis(tuple(blocks), symmetric=symmetric, unit_block=0)
    check_basis(g, basis)
    return basis


def conjugate_basis(g: MeasuredGroupoid, basis: Basis, window: Iterable[str]) -> Basis:
    """Transport a basis along conjugation by a bisection C: blocks C B C^-1.

    The result is a basis of the subgroupoid C G C^-1, whose unit space is
    the target set of C.  Blocks that conjugate to the empty set are dropped.
    """
    g._require_validated()
    window = list(window)
    if not g.is_bisection(window):
        raise GroupoidError("conjugating set must be a bisection")
    window_inv = [g.inverse[c] for c in window]
    blocks: list[tuple[str, ...]] = []
    unit_index: Optional[int] = None
    for i, block in enumerate(basis.blocks):
        conj = g.mul_sets(g.mul_sets(window, block), window_inv)
        if not conj:
            continue
        if i == basis.unit_block:
            unit_index = len(blocks)
        blocks.append(g.sort_arrows(conj))
    if unit_index is None:
        raise GroupoidError("conjugation of the unit block vanished")
    return Basis(tuple(blocks), symmetric=basis.symmetric, unit_block=unit_index)


def extend_iso_basis(g: MeasuredGroupoid, iso_basis: Basis) -> Basis:
    """Extend a basis of the isotropy subgroupoid to a basis of all of G.

    The complement of the isotropy is partitioned greedily into bisections
    disjoint from the given blocks.
    """
    g._require_validated()
    iso = g.iso_subgroupoid()
    if iso_basis.all_arrows() != iso:
        raise GroupoidError("given blocks do not partition the isotropy")
    pool = [a for a in g.arrow_order if a not in iso]
    extra = _greedy_blocks(g, pool, iso_basis.symmetric)
    basis = Basis(
        iso_basis.blocks + tuple(extra),
        symmetric=iso_basis.symmetric,
        unit_block=iso_basis.unit_block,
    )
    check_basis(g, basis)
    return basis


def check_basis(
    g: MeasuredGroupoid, basis: Basis, arrows: Optional[frozenset[str]] = None
) -> None:
    """Assert the basis axioms; ``arrows`` defaults to the whole arrow set."""
    g._require_validated()
    if arrows is None:
        arrows = frozenset(g.arrow_order)
    seen: set[str] = set()
    for block in basis.blocks:
        if not block:
            raise GroupoidError("empty basis block")
        if not g.is_bisection(block):
            raise GroupoidError("basis block is not a bisection", block)
        bset = set(block)
        if seen & bset:
            raise GroupoidError("basis blocks are not disjoint", sorted(seen & bset))
        seen |= bset
    if seen != arrows:
        raise GroupoidError("basis blocks do not cover the arrow set")
    unit_block = frozenset(basis.blocks[basis.unit_block])
    expected_units = frozenset(u for u in arrows if g.src[u] == g.tgt[u]
                               and u in g.unit_arrow_set)
    if unit_block != expected_units:
        raise GroupoidError("designated unit block is not the unit arrows")
    if basis.symmetric:
        sets = {frozenset(b) for b in basis.blocks}
        for b in basis.blocks:
            if frozenset(g.inverse[a] for a in b) not in sets:
                raise GroupoidError("symmetric basis not closed under inversion", b)
