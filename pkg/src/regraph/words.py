"""Cyclically reduced words over a symmetric alphabet and their equivalence classes.

Letters are generator symbols ``pi_1, ..., pi_d`` and their inverses.  A letter
is stored as a small integer code ``2*(i-1) + inv`` where ``i`` is the
generator index (1-based) and ``inv`` is 1 for an inverted letter.  This makes
the inverse a single XOR and puts the letters in the order
``pi_1 < pi_1^-1 < pi_2 < pi_2^-1 < ...`` used for canonical representatives.

Words are tuples of letter codes.  Two words are equivalent when one is a
cyclic rotation of the other or of its inverted reversal; a class is named by
the lexicographically smallest word in the orbit.

Text form: lowercase letters ``a b c ...`` for generators, uppercase for their
inverses, separated by spaces (``"a A b"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidInputError, ResourceLimitError

Word = tuple[int, ...]

# ---------------------------------------------------------------------------
# letters


def letter_code(index: int, inverted: bool = False) -> int:
    """Encode generator ``pi_index`` (1-based), possibly inverted."""
    if index < 1:
        raise InvalidInputError(f"generator index must be >= 1, got {index}")
    return 2 * (index - 1) + (1 if inverted else 0)


def letter_inverse(code: int) -> int:
    return code ^ 1


def letter_index(code: int) -> int:
    return code // 2 + 1


def letter_is_inverted(code: int) -> bool:
    return bool(code & 1)


def letter_name(code: int) -> str:
    ch = chr(ord("a") + code // 2)
    return ch.upper() if code & 1 else ch


def parse_letter(text: str) -> int:
    if len(text) != 1 or not text.isalpha():
        raise InvalidInputError(f"bad letter {text!r}")
    idx = ord(text.lower()) - ord("a") + 1
    return letter_code(idx, text.isupper())


def parse_word(text: str) -> Word:
    """Parse a space-separated word such as ``"a A b B"``."""
    parts = text.split()
    if not parts:
        raise InvalidInputError("empty word")
    return tuple(parse_letter(p) for p in parts)


def format_word(word: Word) -> str:
    return " ".join(letter_name(c) for c in word)


# ---------------------------------------------------------------------------
# words


def is_cyclically_reduced(word: Word) -> bool:
    """True when no letter is followed (cyclically) by its inverse."""
    if len(word) == 0:
        raise InvalidInputError("empty word")
    k = len(word)
    if k == 1:
        return True
    return all(word[(i + 1) % k] != letter_inverse(word[i]) for i in range(k))


def inverted_reversal(word: Word) -> Word:
    return tuple(letter_inverse(c) for c in reversed(word))


def canonical_form(word: Word) -> Word:
    """Lexicographically smallest rotation of ``word`` or of its inverted reversal."""
    k = len(word)
    best = word
    for w in (word, inverted_reversal(word)):
        doubled = w + w
        for i in range(k):
            cand = doubled[i : i + k]
            if cand < best:
                best = cand
    return best


def word_period_quotient(word: Word) -> int:
    """Largest m such that the word is a repetition ``u^m`` of a subword."""
    k = len(word)
    for p in range(1, k + 1):
        if k % p:
            continue
        if all(word[i] == word[(i + p) % k] for i in range(k)):
            return k // p
    return 1  # unreachable


def doubled_letter_count(word: Word) -> int:
    """Number of cyclic positions i with letter i equal to letter i+1.

    A single-letter word has none by convention.
    """
    k = len(word)
    if k == 1:
        return 0
    return sum(word[i] == word[(i + 1) % k] for i in range(k))


# ---------------------------------------------------------------------------
# word classes


@dataclass(frozen=True)
class WordClass:
    """An equivalence class of cyclically reduced words.

    ``letters`` is the canonical representative.  ``h`` is the repetition
    order (largest m with the word a power u^m), ``c`` the number of cyclic
    double-letter positions; the orbit of the class has size ``2k/h``.
    """

    letters: Word
    h: int = field(init=False)
    c: int = field(init=False)

    def __post_init__(self) -> None:
        if not is_cyclically_reduced(self.letters):
            raise InvalidInputError(f"word {format_word(self.letters)!r} is not cyclically reduced")
        if self.letters != canonical_form(self.letters):
            raise InvalidInputError(
                f"word {format_word(self.letters)!r} is not a canonical representative"
            )
        object.__setattr__(self, "h", word_period_quotient(self.letters))
        object.__setattr__(self, "c", doubled_letter_count(self.letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def orbit_size(self) -> int:
        return 2 * self.length // self.h

    @property
    def mu(self) -> Fraction:
        """Immigration weight (length - c) / h of the class."""
        return Fraction(self.length - self.c, self.h)

    def orbit(self) -> set[Word]:
        """All words equivalent to this class."""
        k = self.length
        out: set[Word] = set()
        for w in (self.letters, inverted_reversal(self.letters)):
            doubled = w + w
            for i in range(k):
                out.add(doubled[i : i + k])
        return out

    def __str__(self) -> str:
        return format_word(self.letters)


def canonicalize(word: Word) -> WordClass:
    if not is_cyclically_reduced(word):
        raise InvalidInputError(f"word {format_word(word)!r} is not cyclically reduced")
    return WordClass(canonical_form(word))


def word_stats(word: Word) -> tuple[int, int, int]:
    """Return (length, h, c) for a cyclically reduced word."""
    if not is_cyclically_reduced(word):
        raise InvalidInputError(f"word {format_word(word)!r} is not cyclically reduced")
    return (len(word), word_period_quotient(word), doubled_letter_count(word))


# ---------------------------------------------------------------------------
# counting and enumeration


def count_reduced_words(d: int, k: int) -> int:
    """Number of cyclically reduced words of length k over d generators."""
    if d < 1:
        raise InvalidInputError(f"need d >= 1, got {d}")
    if k < 0:
        raise InvalidInputError(f"need k >= 0, got {k}")
    if k == 0:
        return 0
    if k % 2 == 0:
        return (2 * d - 1) ** k - 1 + 2 * d
    return (2 * d - 1) ** k + 1


@lru_cache(maxsize=None)
def _enumerate_classes_cached(d: int, k: int, budget: int) -> tuple[WordClass, ...]:
    total = (2 * d) ** k
    if total > budget:
        raise ResourceLimitError(
            f"enumerating words with d={d}, k={k} needs ~{total} sequences (budget {budget})"
        )
    alphabet = list(range(2 * d))
    canon: set[Word] = set()
    word = [0] * k

    def extend(pos: int) -> None:
        if pos == k:
            if k == 1 or word[0] != letter_inverse(word[k - 1]):
                canon.add(canonical_form(tuple(word)))
            return
        if pos == 0:
            for c in alphabet:
                word[0] = c
                extend(1)
        else:
            banned = letter_inverse(word[pos - 1])
            for c in alphabet:
                if c != banned:
                    word[pos] = c
                    extend(pos + 1)

    extend(0)
    classes = tuple(WordClass(w) for w in sorted(canon))
    # Orbit sizes must tile the full set of reduced words.
    assert sum(wc.orbit_size for wc in classes) == count_reduced_words(d, k)
    return classes


def enumerate_word_classes(d: int, k: int, budget: int = 10**7) -> list[WordClass]:
    """All equivalence classes of cyclically reduced words of length k.

    Raises ResourceLimitError when the raw search space (2d)^k exceeds
    ``budget``.
    """
    if d < 1 or k < 1:
        raise InvalidInputError(f"need d >= 1 and k >= 1, got d={d}, k={k}")
    return list(_enumerate_classes_cached(d, k, budget))


# ---------------------------------------------------------------------------
# doubling and halving moves


def double_letter(wc: WordClass, position: int) -> WordClass:
    """Repeat the letter at 1-based ``position`` of the canonical word."""
    k = wc.length
    if not 1 <= position <= k:
        raise InvalidInputError(f"position {position} out of range 1..{k}")
    w = wc.letters
    i = position - 1
    return canonicalize(w[: i + 1] + (w[i],) + w[i + 1 :])


def halvings(wc: WordClass) -> dict[WordClass, int]:
    """Classes reachable by deleting one letter of a cyclic double-letter pair.

    The returned multiplicities sum to ``c`` of the class.
    """
    w = wc.letters
    k = wc.length
    out: dict[WordClass, int] = {}
    for i in range(k):
        if k > 1 and w[i] == w[(i + 1) % k]:
            shorter = w[:i] + w[i + 1 :]
            child = canonicalize(shorter)
            out[child] = out.get(child, 0) + 1
    return out


def mu_rate(wc: WordClass) -> Fraction:
    return wc.mu
