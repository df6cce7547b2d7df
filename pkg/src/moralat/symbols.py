"""Bidirectional symbol tables with the reserved epsilon slot at id 0."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator

from .errors import FormatError

EPSILON_SYMBOL = "<eps>"
BLANK_SYMBOL = "<blank>"
UNKNOWN_SYMBOL = "<unk>"


class SymbolTable:
    """Injective symbol <-> id map; id 0 is always the empty label."""

    def __init__(self, symbols: Iterable[str] = ()):
        self._sym2id: dict[str, int] = {EPSILON_SYMBOL: 0}
        self._id2sym: dict[int, str] = {0: EPSILON_SYMBOL}
        self._next_id = 1
        for sym in symbols:
            self.add(sym)

    def add(self, symbol: str, symbol_id: int | None = None) -> int:
        """Register a symbol, returning its id (existing symbols keep theirs)."""
        if symbol in self._sym2id:
            existing = self._sym2id[symbol]
            if symbol_id is not None and symbol_id != existing:
                raise FormatError(
                    f"conflicting ids for symbol {symbol!r}: {existing} vs {symbol_id}"
                )
            return existing
        if symbol_id is None:
            symbol_id = self._next_id
        if symbol_id in self._id2sym:
            raise FormatError(
                f"id {symbol_id} already bound to {self._id2sym[symbol_id]!r}"
            )
        self._sym2id[symbol] = symbol_id
        self._id2sym[symbol_id] = symbol
        self._next_id = max(self._next_id, symbol_id + 1)
        return symbol_id

    def id(self, symbol: str) -> int:
        return self._sym2id[symbol]

    def symbol(self, symbol_id: int) -> str:
        return self._id2sym[symbol_id]

    def resolve(self, symbol: str) -> int:
        """Id of the symbol, falling back to <unk> when registered."""
        found = self._sym2id.get(symbol)
        if found is not None:
            return found
        unk = self._sym2id.get(UNKNOWN_SYMBOL)
        if unk is not None:
            return unk
        raise KeyError(symbol)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._sym2id

    def __len__(self) -> int:
        return len(self._sym2id)

    def items(self) -> Iterator[tuple[str, int]]:
        for symbol_id in sorted(self._id2sym):
            yield self._id2sym[symbol_id], symbol_id

    def copy(self) -> "SymbolTable":
        out = SymbolTable()
        out._sym2id = dict(self._sym2id)
        out._id2sym = dict(self._id2sym)
        out._next_id = self._next_id
        return out

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for symbol, symbol_id in self.items():
                f.write(f"{symbol}\t{symbol_id}\n")

    @classmethod
    def read(cls, path: str | Path) -> "SymbolTable":
        table = cls()
        with open(path, encoding="utf-8") as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise FormatError("expected 'symbol<TAB>id'", str(path), lineno)
                symbol, id_text = fields
                try:
                    symbol_id = int(id_text)
                except ValueError:
                    raise FormatError(f"bad id {id_text!r}", str(path), lineno) from None
                if symbol_id == 0:
                    if symbol != EPSILON_SYMBOL:
                        raise FormatError(
                            f"id 0 must be {EPSILON_SYMBOL}, got {symbol!r}",
                            str(path),
                            lineno,
                        )
                    continue
                table.add(symbol, symbol_id)
        return table
