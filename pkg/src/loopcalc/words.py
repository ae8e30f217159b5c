"""Cyclic-word canonicalization and the letter/integer encoding.

Free homotopy classes of loops are stored as cyclically reduced cyclic
words over directed gate letters.  The reduction kernel works on integer
letters (inverse of ``x`` is ``x ^ 1``); :class:`LetterTable` translates
between integers and ``(gate, direction)`` pairs.

Backend selection: the compiled kernel ``loopcalc._wordcore`` is used when
available, unless ``LOOPCALC_WORD_BACKEND=pure`` is set.  Both backends
expose ``reduce_word``, ``cyclic_reduce``, ``least_rotation`` and
``canonical``.
"""

from __future__ import annotations

import os
from typing import Hashable, Iterable, Sequence

from loopcalc import _wordpure

if os.environ.get("LOOPCALC_WORD_BACKEND") == "pure":
    _impl = _wordpure
else:
    try:
        from loopcalc import _wordcore as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _wordpure

BACKEND: str = "pure" if _impl is _wordpure else "cython"

reduce_word = _impl.reduce_word
cyclic_reduce = _impl.cyclic_reduce
least_rotation = _impl.least_rotation
canonical = _impl.canonical

#: Direction of a letter relative to its star (or to the surface core in a
#: raw gate configuration): IN enters, OUT leaves.
IN = 0
OUT = 1


class LetterTable:
    """Bijection between directed gate letters and small integers.

    Gates are any sortable hashable keys; the table sorts them once and
    encodes ``(gate, IN)`` as ``2 * index`` and ``(gate, OUT)`` as
    ``2 * index + 1``.  Integer order therefore matches the lexicographic
    order on ``(gate, direction)``, which makes minimal rotations canonical
    across every word built from the same table.
    """

    __slots__ = ("gates", "_index")

    def __init__(self, gates: Iterable[Hashable]):
        self.gates = tuple(sorted(set(gates)))
        self._index = {g: i for i, g in enumerate(self.gates)}

    def encode(self, gate: Hashable, direction: int) -> int:
        return 2 * self._index[gate] + direction

    def decode(self, code: int) -> tuple[Hashable, int]:
        return self.gates[code // 2], code % 2

    def decode_word(self, word: Sequence[int]) -> tuple[tuple[Hashable, int], ...]:
        return tuple(self.decode(c) for c in word)

    def encode_word(self, letters: Sequence[tuple[Hashable, int]]) -> tuple[int, ...]:
        return tuple(self.encode(g, d) for g, d in letters)

    def __len__(self) -> int:
        return len(self.gates)

    def __contains__(self, gate: Hashable) -> bool:
        return gate in self._index
