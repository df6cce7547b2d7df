"""Edit-distance scoring over mora tokens and text characters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .tokens import MoraToken, tokenize_tt


@dataclass(frozen=True)
class AlignmentResult:
    substitutions: int
    insertions: int
    deletions: int
    ref_len: int

    @property
    def total_errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def error_rate(self) -> float:
        return self.total_errors / self.ref_len


def _align(ref: Sequence[str], hyp: Sequence[str]) -> AlignmentResult:
    """Unit-cost Levenshtein alignment with error-type counts.

    Backtrace preference among equal-cost steps is match/substitution, then
    deletion, then insertion; the total is unique, the split deterministic.
    """
    m, n = len(ref), len(hyp)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i
    for j in range(1, n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            sub = dp[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1])
            dele = dp[i - 1][j] + 1
            ins = dp[i][j - 1] + 1
            dp[i][j] = min(sub, dele, ins)
    subs = dels = inss = 0
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            subs += ref[i - 1] != hyp[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return AlignmentResult(subs, inss, dels, m)


def mler(
    ref: Sequence[MoraToken],
    hyp: Sequence[MoraToken],
    count_accent: bool = True,
) -> AlignmentResult:
    """Mora-label error rate alignment.

    With ``count_accent`` false, accent flags are stripped from both sides
    before aligning, so キ and キ' compare equal.
    """
    if not ref:
        raise ValueError("mler: empty reference")
    if count_accent:
        return _align([t.render() for t in ref], [t.render() for t in hyp])
    return _align([t.kana for t in ref], [t.kana for t in hyp])


def cer(ref: str, hyp: str) -> AlignmentResult:
    """Character error rate over NFKC-normalized code points."""
    ref_chars = tokenize_tt(ref)
    if not ref_chars:
        raise ValueError("cer: empty reference")
    return _align(ref_chars, tokenize_tt(hyp))


def corpus_aggregate(results: Sequence[AlignmentResult]) -> float:
    """Micro-averaged corpus rate: total errors over total reference length."""
    if not results:
        raise ValueError("corpus_aggregate: empty result list")
    errors = sum(r.total_errors for r in results)
    length = sum(r.ref_len for r in results)
    return errors / length
