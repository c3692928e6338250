"""Element tables: which heavy atoms exist and how many bonds they make.

A table is just an ordered mapping symbol -> valence.  Two tables are
shipped: the default organic set used for small-molecule datasets, and an
extended set for halogen/sulfur chemistry.  Anything outside the active
table is a parse error, which keeps every downstream valence lookup total.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ChemError(Exception):
    """Base class for chemistry-level errors."""


class UnknownElementError(ChemError):
    pass


@dataclass(frozen=True)
class ElementTable:
    """Ordered set of allowed elements with their fixed valences."""

    valences: tuple[tuple[str, int], ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", dict(self.valences))

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.valences)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def valence(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownElementError(
                f"element {symbol!r} is not in the configured set "
                f"{{{', '.join(self.symbols)}}}"
            ) from None

    def order(self, symbol: str) -> int:
        """Position of ``symbol`` in the configured ordering."""
        self.valence(symbol)
        return self.symbols.index(symbol)


DEFAULT_TABLE = ElementTable((("C", 4), ("N", 3), ("O", 2), ("F", 1)))
EXTENDED_TABLE = ElementTable(
    (("C", 4), ("N", 3), ("O", 2), ("F", 1), ("S", 2), ("Cl", 1), ("Br", 1))
)
