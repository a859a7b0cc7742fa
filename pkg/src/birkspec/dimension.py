"""Hausdorff dimensions of block-generated subsets of the binary full shift."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .shift_core import PreconditionError, word, word_str


@dataclass(frozen=True)
class BlockAlphabet:
    """Free concatenations of ``blocks``.

    The blocks must be distinct and either share one length or form a
    prefix-free set, so that every concatenation parses uniquely.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(word(b) for b in self.blocks)
        if not blocks:
            raise PreconditionError("block alphabet is empty")
        if any(len(b) == 0 for b in blocks):
            raise PreconditionError("blocks must be nonempty")
        if len(set(blocks)) != len(blocks):
            raise PreconditionError("blocks must be pairwise distinct")
        if len({len(b) for b in blocks}) > 1 and not _prefix_free(blocks):
            raise PreconditionError("blocks of mixed length must be prefix-free")
        object.__setattr__(self, "blocks", blocks)

    @property
    def lengths(self):
        return [len(b) for b in self.blocks]

    @classmethod
    def from_json(cls, obj) -> "BlockAlphabet":
        try:
            return cls(tuple(obj["blocks"]))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed blocks JSON: {exc}") from None

    @classmethod
    def load(cls, path) -> "BlockAlphabet":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise PreconditionError(f"malformed JSON in {path}: {exc}") from None
        return cls.from_json(obj)

    def to_json(self) -> dict:
        return {"blocks": [word_str(b) for b in self.blocks]}


def _prefix_free(blocks) -> bool:
    ordered = sorted(blocks)
    return all(b[: len(a)] != a for a, b in zip(ordered, ordered[1:]))


def moran_dimension(blocks) -> float:
    """Solve ``sum_i 2**(-|w_i| s) = 1`` for ``s``."""
    if not isinstance(blocks, BlockAlphabet):
        blocks = BlockAlphabet(tuple(blocks))
    lengths = blocks.lengths
    if len(lengths) == 1:
        return 0.0

    def excess(s):
        return math.fsum(2.0 ** (-n * s) for n in lengths) - 1.0

    hi = 1.0 + math.log2(len(lengths))
    return brentq(excess, 0.0, hi, xtol=1e-16, rtol=1e-15)


def eggleston_dimension(alpha: float) -> float:
    """Dimension of the sequences whose frequency of 1s is ``alpha``."""
    if not 0.0 <= alpha <= 1.0:
        raise PreconditionError(f"alpha={alpha} outside [0, 1]")
    h = 0.0
    for p in (alpha, 1.0 - alpha):
        if p > 0:
            h -= p * math.log(p)
    return h / math.log(2.0)
