"""Katakana mora tokens with pitch-accent marks, and character text tokens.

A mora token is one katakana mora (base kana, optionally fused with a small
kana such as キュ or ファ) plus an accent flag rendered as a trailing
apostrophe. The long-vowel mark is never stored: during tokenization it is
rewritten to an unaccented copy of the preceding mora's vowel, so キュー
becomes キュ ウ and キュ'ー becomes キュ' ウ.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import TokenizeError

ACCENT_MARK = "'"
LONG_VOWEL_MARK = "ー"

SMALL_KANA = frozenset("ャュョァィゥェォヮ")
# stand-alone morae: never combine with a small kana, carry no vowel
SOLO_KANA = frozenset("ンッ")

_VOWEL_ROWS = {
    "ア": "アカガサザタダナハバパマヤラワァャヮ",
    "イ": "イキギシジチヂニヒビピミリヰィ",
    "ウ": "ウクグスズツヅヌフブプムユルヴゥュ",
    "エ": "エケゲセゼテデネヘベペメレヱェ",
    "オ": "オコゴソゾトドノホボポモヨロヲォョ",
}
VOWEL_OF = {kana: vowel for vowel, row in _VOWEL_ROWS.items() for kana in row}

BASE_KANA = frozenset(k for k in VOWEL_OF if k not in SMALL_KANA)


def _is_valid_mora(kana: str) -> bool:
    if len(kana) == 1:
        return kana in BASE_KANA or kana in SOLO_KANA
    if len(kana) == 2:
        return kana[0] in BASE_KANA and kana[1] in SMALL_KANA
    return False


@dataclass(frozen=True)
class MoraToken:
    kana: str
    accented: bool = False

    def __post_init__(self):
        if not _is_valid_mora(self.kana):
            raise TokenizeError(f"not a valid mora: {self.kana!r}")

    def render(self) -> str:
        return self.kana + (ACCENT_MARK if self.accented else "")

    def vowel(self) -> str | None:
        """Vowel kana of this mora, None for ン and ッ."""
        return VOWEL_OF.get(self.kana[-1])

    def without_accent(self) -> "MoraToken":
        return MoraToken(self.kana) if self.accented else self

    @classmethod
    def parse(cls, text: str) -> "MoraToken":
        tokens = tokenize_pa(text)
        if len(tokens) != 1:
            raise TokenizeError(f"expected one mora, got {len(tokens)} in {text!r}")
        return tokens[0]

    def __str__(self) -> str:
        return self.render()


def tokenize_pa(text: str) -> list[MoraToken]:
    """Segment katakana (plus apostrophes and ー) into mora tokens.

    Raises :class:`TokenizeError` with the offending position for anything
    that is not katakana, for marks with no mora to attach to, and for ー
    after ン or ッ (no vowel to copy).
    """
    morae: list[list] = []  # [kana, accented] pairs under construction
    for i, ch in enumerate(text):
        if ch == ACCENT_MARK:
            if not morae:
                raise TokenizeError("accent mark with no preceding mora", i)
            if morae[-1][1]:
                raise TokenizeError("double accent mark", i)
            morae[-1][1] = True
        elif ch == LONG_VOWEL_MARK:
            if not morae:
                raise TokenizeError("long-vowel mark with no preceding mora", i)
            vowel = VOWEL_OF.get(morae[-1][0][-1])
            if vowel is None:
                raise TokenizeError(
                    f"long-vowel mark after {morae[-1][0]!r} has no vowel to copy", i
                )
            morae.append([vowel, False])
        elif ch in SMALL_KANA:
            if not morae:
                raise TokenizeError("small kana with no preceding mora", i)
            kana, accented = morae[-1]
            if accented:
                raise TokenizeError("small kana after an accent mark", i)
            if len(kana) > 1 or kana in SOLO_KANA or kana not in BASE_KANA:
                raise TokenizeError(f"small kana cannot attach to {kana!r}", i)
            morae[-1][0] = kana + ch
        elif ch in BASE_KANA or ch in SOLO_KANA:
            morae.append([ch, False])
        else:
            raise TokenizeError(f"not katakana: {ch!r}", i)
    return [MoraToken(kana, accented) for kana, accented in morae]


def render_pa(tokens: list[MoraToken] | tuple[MoraToken, ...]) -> str:
    """Concatenated rendered forms; inverse of tokenize_pa on ー-free text."""
    return "".join(t.render() for t in tokens)


def tokenize_tt(text: str) -> list[str]:
    """NFKC-normalize and split into code points."""
    return list(unicodedata.normalize("NFKC", text))
