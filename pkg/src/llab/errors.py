"""Exception hierarchy shared by every llab module.

The CLI maps these onto its exit-code contract: InputError -> 1,
CapExceeded -> 2, PropertyViolation -> 3.
"""

from __future__ import annotations


class LlabError(Exception):
    """Base class for all llab errors."""


class InputError(LlabError):
    """Malformed or inconsistent user input (bad file, bad flag, bad group)."""


class CapExceeded(LlabError):
    """An enumeration outgrew its configured cap."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} exceeded cap of {limit}")
        self.what = what
        self.limit = limit


class PropertyViolation(LlabError):
    """A fact the construction guarantees failed to hold.

    Raising this signals a bug in the implementation (or corrupted input
    masquerading as a valid structure), never a user mistake. The witness
    carries enough data to reproduce.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainError(LlabError):
    """A partial product was requested outside the domain.

    prefix_len is the length of the shortest leading prefix of the word
    that already fails to be in the domain.
    """

    def __init__(self, word, prefix_len: int):
        super().__init__(
            f"word of length {len(word)} is not in the product domain; "
            f"first failing prefix has length {prefix_len}"
        )
        self.word = tuple(word)
        self.prefix_len = prefix_len
