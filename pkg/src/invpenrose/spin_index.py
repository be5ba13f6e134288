"""Multi-index algebra of the spin module.

A basis vector of the spin module of ``R^{2n}`` is written ``theta_I`` for a
strictly increasing ``I`` drawn from ``1..n``.  Arbitrary sequences over
``1..2n`` name Clifford products ``e_{i_1} * ... * e_{i_k} * theta_()`` and
reduce to a unit times a basis vector.  The dual basis ``Z^I`` reduces with
conjugate units.

Units are stored as exponents ``k`` of ``i**k`` (``0 -> 1, 1 -> i, 2 -> -1,
3 -> -i``), so unit multiplication is addition mod 4.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

ReducedIndex = tuple[int, ...]

UNIT_ONE, UNIT_I, UNIT_NEG, UNIT_NEG_I = 0, 1, 2, 3

EVEN, ODD = 0, 1


class MultiIndexError(ValueError):
    """Entry of a multi-index outside ``1..2n``."""


def unit_mul(u: int, v: int) -> int:
    return (u + v) & 3


def unit_conj(u: int) -> int:
    return (-u) & 3


def unit_value(u: int) -> tuple[int, int]:
    """(re, im) of ``i**u``."""
    return ((1, 0), (0, 1), (-1, 0), (0, -1))[u & 3]


def unit_str(u: int) -> str:
    return ("+1", "+i", "-1", "-i")[u & 3]


@dataclass(frozen=True)
class ScaledIndex:
    """``unit * theta_index``; ``unit is None`` encodes the zero vector."""

    unit: int | None
    index: ReducedIndex = ()

    @property
    def is_zero(self) -> bool:
        return self.unit is None

    def scale(self, u: int | None) -> "ScaledIndex":
        if self.unit is None or u is None:
            return ZERO
        return ScaledIndex(unit_mul(self.unit, u), self.index)

    def __repr__(self) -> str:
        if self.unit is None:
            return "ScaledIndex(0)"
        return f"ScaledIndex({unit_str(self.unit)}, {self.index})"


ZERO = ScaledIndex(None)


def _mask(idx: Iterable[int]) -> int:
    m = 0
    for i in idx:
        m |= 1 << (i - 1)
    return m


def _unmask(m: int) -> ReducedIndex:
    out = []
    i = 1
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def _check(seq: Sequence[int], n: int) -> None:
    if n < 2:
        raise MultiIndexError(f"n must be >= 2, got {n}")
    for a in seq:
        if not 1 <= a <= 2 * n:
            raise MultiIndexError(f"index entry {a} outside 1..{2 * n}")


def _prepend_real(i: int, unit: int, mask: int) -> tuple[int, int]:
    """Apply ``e_i`` (``1 <= i <= n``) to ``unit * theta_mask``."""
    below = mask & ((1 << (i - 1)) - 1)
    if bin(below).count("1") & 1:
        unit = unit_mul(unit, UNIT_NEG)
    bit = 1 << (i - 1)
    if mask & bit:
        # theta_{iiJ} = -theta_J
        unit = unit_mul(unit, UNIT_NEG)
    return unit, mask ^ bit


def _prepend(a: int, n: int, unit: int, mask: int, dual: bool) -> tuple[int, int]:
    if a <= n:
        return _prepend_real(a, unit, mask)
    i = a - n
    inside = bool(mask & (1 << (i - 1)))
    # theta: +i if i not in I, -i if i in I; the dual rules are conjugate.
    factor = UNIT_NEG_I if inside else UNIT_I
    if dual:
        factor = unit_conj(factor)
    return _prepend_real(i, unit_mul(unit, factor), mask)


def _reduce(seq: Sequence[int], n: int, dual: bool) -> ScaledIndex:
    _check(seq, n)
    unit, mask = UNIT_ONE, 0
    for a in reversed(seq):
        unit, mask = _prepend(a, n, unit, mask, dual)
    return ScaledIndex(unit, _unmask(mask))


def reduce_theta(seq: Sequence[int], n: int) -> ScaledIndex:
    """Reduce ``theta_seq`` to ``unit * theta_I`` with ``I`` reduced."""
    return _reduce(seq, n, dual=False)


def reduce_dual(seq: Sequence[int], n: int) -> ScaledIndex:
    """Reduce ``Z^seq``; units are the conjugates of :func:`reduce_theta`."""
    return _reduce(seq, n, dual=True)


def reduce_theta_left(seq: Sequence[int], n: int) -> ScaledIndex:
    """Alternative strategy: multiply the Clifford word out left to right.

    The word is accumulated as a sorted blade over ``1..2n`` (using
    ``e_a e_a = -1`` and anticommutation), and only the final blade is
    applied to ``theta_()``.
    """
    _check(seq, n)
    unit = UNIT_ONE
    blade: list[int] = []
    for a in seq:
        # blade * e_a: move e_a left past every larger generator
        larger = sum(1 for b in blade if b > a)
        if larger & 1:
            unit = unit_mul(unit, UNIT_NEG)
        if a in blade:
            blade.remove(a)
            unit = unit_mul(unit, UNIT_NEG)
        else:
            blade.append(a)
            blade.sort()
    res = _reduce(blade, n, dual=False)
    return res.scale(unit)


def reduce_theta_random(seq: Sequence[int], n: int, rng: random.Random) -> ScaledIndex:
    """Alternative strategy: apply rewrite rules at random positions.

    Moves: cancel an adjacent equal pair, swap an adjacent descending pair,
    or rewrite ``n+i`` to ``i`` where the suffix is already reduced.  Each
    move decreases (#entries > n, length, inversions) lexicographically.
    """
    _check(seq, n)
    word = list(seq)
    unit = UNIT_ONE
    while True:
        moves: list[tuple[str, int]] = []
        for p in range(len(word) - 1):
            if word[p] == word[p + 1]:
                moves.append(("cancel", p))
            elif word[p] > word[p + 1]:
                moves.append(("swap", p))
        for p in range(len(word)):
            if word[p] > n:
                tail = word[p + 1:]
                if all(t <= n for t in tail) and all(
                    tail[k] < tail[k + 1] for k in range(len(tail) - 1)
                ):
                    moves.append(("lower", p))
        if not moves:
            break
        kind, p = rng.choice(moves)
        if kind == "cancel":
            del word[p:p + 2]
            unit = unit_mul(unit, UNIT_NEG)
        elif kind == "swap":
            word[p], word[p + 1] = word[p + 1], word[p]
            unit = unit_mul(unit, UNIT_NEG)
        else:
            i = word[p] - n
            inside = i in word[p + 1:]
            unit = unit_mul(unit, UNIT_NEG_I if inside else UNIT_I)
            word[p] = i
    return ScaledIndex(unit, tuple(word))


def parity(idx: Sequence[int]) -> int:
    return len(idx) & 1


def sym_diff(a: Sequence[int], b: Sequence[int]) -> ReducedIndex:
    return tuple(sorted(set(a) ^ set(b)))


def spin_basis(n: int, p: int) -> list[ReducedIndex]:
    """All reduced indices of parity ``p``, ordered by length then lexicographically."""
    if n < 2:
        raise MultiIndexError(f"n must be >= 2, got {n}")
    out = [_unmask(m) for m in range(1 << n) if bin(m).count("1") % 2 == p]
    out.sort(key=lambda t: (len(t), t))
    return out


def all_reduced(n: int) -> list[ReducedIndex]:
    return spin_basis(n, EVEN) + spin_basis(n, ODD)


def parse_parity(p: str | int) -> int:
    if p in ("+", "even", 0, "0"):
        return EVEN
    if p in ("-", "odd", 1, "1"):
        return ODD
    raise ValueError(f"unknown parity {p!r}")


def parity_str(p: int) -> str:
    return "+" if p == EVEN else "-"
