"""Brute-force language oracle and factor-complexity profile.

The oracle expands ``tau_0 o ... o tau_j (seed)`` letter by letter for every
``j <= K`` and reads factors off by a direct sliding window. It only reads the
image tables of the substitutions, so it shares nothing with the pair-tracking
generator it is meant to audit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .subshift import BudgetExceeded, Language, LanguageError, default_budget


def _images(seq, n: int) -> tuple[tuple[int, ...], ...]:
    subs = seq.seq if hasattr(seq, "seq") else [seq]
    return subs[min(n, len(subs) - 1)].images


def expand(seq, seed: int, depth: int, budget: int | None = None) -> list[int]:
    """``tau_0 o ... o tau_depth (seed)`` as an explicit list."""
    budget = default_budget() if budget is None else budget
    word = [seed]
    for n in range(depth, -1, -1):
        images = _images(seq, n)
        size = sum(len(images[a]) for a in word)
        if size > budget:
            raise BudgetExceeded(f"explicit expansion at level {n} needs {size} letters, budget {budget}")
        nxt: list[int] = []
        for a in word:
            nxt.extend(images[a])
        word = nxt
    return word


def oracle_language(seq, seed: int, max_len: int, depth: int, budget: int | None = None) -> Language:
    if max_len < 1 or depth < 0:
        raise LanguageError("oracle needs max_len >= 1 and depth >= 0")
    alphabet = len(_images(seq, 0))
    if not 0 <= seed < alphabet:
        raise LanguageError(f"seed letter {seed} outside alphabet")
    strata: dict[int, set[tuple[int, ...]]] = {ell: set() for ell in range(1, max_len + 1)}
    for j in range(depth + 1):
        w = expand(seq, seed, j, budget)
        for ell in range(1, max_len + 1):
            for i in range(len(w) - ell + 1):
                strata[ell].add(tuple(w[i : i + ell]))
    return Language.from_sets(strata, max_len, {"seed": seed, "depth": depth, "oracle": True})


@dataclass(frozen=True)
class ComplexityProfile:
    counts: tuple[int, ...]
    drops: tuple[int, ...]  # lengths l with p(l + 1) < p(l)

    @property
    def nondecreasing(self) -> bool:
        return not self.drops

    def note(self) -> str:
        if self.nondecreasing:
            return "nondecreasing"
        return "drops at lengths " + ", ".join(map(str, self.drops)) + " (generation-horizon artifact)"


def complexity_profile(lang: Language) -> ComplexityProfile:
    counts = tuple(lang.counts())
    drops = tuple(ell for ell in range(1, len(counts)) if counts[ell] < counts[ell - 1])
    return ComplexityProfile(counts, drops)
