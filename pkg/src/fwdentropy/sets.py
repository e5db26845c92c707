"""Subsets of variable indices as bitmasks."""

from __future__ import annotations

import numbers
from itertools import combinations
from typing import Iterable, Iterator

from .exceptions import InputError, OverlappingSets, UniverseTooLarge

#: Widest bitmask a :class:`VariableSet` may use.
MAX_VARIABLES = 63

#: Largest set whose full power set we are willing to enumerate.
MAX_ENUMERATION = 25


class VariableSet(int):
    """A subset of ``{0, ..., 62}`` stored as an integer bitmask.

    ``VariableSet([0, 2])`` is the set ``{0, 2}`` (bitmask ``0b101``). Use
    :meth:`from_bits` to wrap a raw mask. Instances hash and compare as
    their mask, so they can key ordinary dictionaries, and the usual set
    operators ``| & - ^`` and ``<=`` (subset) are available.

    Examples
    --------
    >>> a = VariableSet([0, 1])
    >>> sorted(a | VariableSet([3]))
    [0, 1, 3]
    >>> len(list(a.subsets()))
    4
    """

    __slots__ = ()

    def __new__(cls, members: Iterable[int] = ()):
        bits = 0
        for i in members:
            i = int(i)
            if not 0 <= i < MAX_VARIABLES:
                raise InputError(f"variable index {i} outside 0..{MAX_VARIABLES - 1}")
            bits |= 1 << i
        return super().__new__(cls, bits)

    @classmethod
    def from_bits(cls, bits: int) -> "VariableSet":
        bits = int(bits)
        if bits < 0 or bits >> MAX_VARIABLES:
            raise InputError(f"bitmask {bits:#x} outside the supported width")
        return int.__new__(cls, bits)

    @classmethod
    def full(cls, p: int) -> "VariableSet":
        """The set ``{0, ..., p-1}``."""
        if not 0 <= p <= MAX_VARIABLES:
            raise InputError(f"p={p} outside 0..{MAX_VARIABLES}")
        return cls.from_bits((1 << p) - 1)

    @property
    def bits(self) -> int:
        return int(self)

    def __reduce__(self):
        return (VariableSet.from_bits, (int(self),))

    def __iter__(self) -> Iterator[int]:
        bits = int(self)
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self) -> int:
        return bin(int(self)).count("1")

    def __contains__(self, i) -> bool:
        return bool(int(self) >> int(i) & 1)

    def __or__(self, other):
        return VariableSet.from_bits(int(self) | int(other))

    __ror__ = __or__

    def __and__(self, other):
        return VariableSet.from_bits(int(self) & int(other))

    __rand__ = __and__

    def __xor__(self, other):
        return VariableSet.from_bits(int(self) ^ int(other))

    __rxor__ = __xor__

    def __sub__(self, other):
        return VariableSet.from_bits(int(self) & ~int(other))

    def __le__(self, other):
        return int(self) & ~int(other) == 0

    def __ge__(self, other):
        return int(other) & ~int(self) == 0

    def __lt__(self, other):
        return self <= other and int(self) != int(other)

    def __gt__(self, other):
        return self >= other and int(self) != int(other)

    def issubset(self, other) -> bool:
        return self <= other

    def isdisjoint(self, other) -> bool:
        return int(self) & int(other) == 0

    def add(self, i: int) -> "VariableSet":
        return self | VariableSet([i])

    def remove(self, i: int) -> "VariableSet":
        return self - VariableSet([i])

    def subsets(self, min_size: int = 0, max_size: int | None = None) -> Iterator["VariableSet"]:
        """Yield subsets ordered by size, then lexicographically by members."""
        members = list(self)
        top = len(members) if max_size is None else min(max_size, len(members))
        if top > MAX_ENUMERATION:
            raise UniverseTooLarge(
                f"refusing to enumerate subsets of size up to {top} (limit {MAX_ENUMERATION})"
            )
        for r in range(min_size, top + 1):
            for combo in combinations(members, r):
                yield VariableSet(combo)

    def label(self, names=None, sep: str = ":") -> str:
        if names is None:
            return sep.join(str(i) for i in self) or "{}"
        return sep.join(str(names[i]) for i in self) or "{}"

    def __repr__(self) -> str:
        return "VariableSet({" + ", ".join(str(i) for i in self) + "})"

    __str__ = __repr__


EMPTY = VariableSet()


def as_set(value) -> VariableSet:
    """Coerce an index, an iterable of indices or a VariableSet."""
    if isinstance(value, VariableSet):
        return value
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return VariableSet([value])
    return VariableSet(value)


def set_key(s: VariableSet) -> tuple:
    """Sort key: size first, then members lexicographically.

    ``VariableSet`` overrides ``<`` as proper-subset (like ``frozenset``), so
    sorting collections of sets needs an explicit key.
    """
    return (len(s), tuple(s))


def check_disjoint(*sets: VariableSet) -> None:
    seen = 0
    for s in sets:
        if seen & int(s):
            raise OverlappingSets(f"sets {[repr(x) for x in sets]} are not pairwise disjoint")
        seen |= int(s)
