"""Words in the half-twist generators.

A word is a tuple of (generator index, exponent +-1) letters in
composition order: the leftmost letter acts last, matching the
`s_i.s_k = s_i o s_k` convention.  Application therefore walks the
tuple right to left.
"""

from ..errors import RangeError
from .arcdata import ArcData


class TwistWord:
    __slots__ = ("letters",)

    def __init__(self, letters=()):
        letters = tuple((int(k), int(e)) for k, e in letters)
        if any(e not in (1, -1) for _, e in letters):
            raise ValueError("exponents must be +1 or -1")
        object.__setattr__(self, "letters", letters)

    def __setattr__(self, *_):
        raise AttributeError("TwistWord is immutable")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, TwistWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other):
        """Composition: (self * other) acts by other first."""
        return TwistWord(self.letters + other.letters)

    def inverse(self):
        return TwistWord(tuple((k, -e) for k, e in reversed(self.letters)))

    def reversed_order(self):
        return TwistWord(tuple(reversed(self.letters)))

    def power(self, n: int):
        if n >= 0:
            return TwistWord(self.letters * n)
        return self.inverse().power(-n)

    def __repr__(self):
        return export_word(self)


def word(*tokens):
    """Convenience builder: word((1,1),(0,-1)) or word('s_1','S_0')."""
    letters = []
    for t in tokens:
        if isinstance(t, str):
            name, idx = t.split("_")
            letters.append((int(idx), 1 if name == "s" else -1))
        else:
            letters.append(t)
    return TwistWord(letters)


def apply_word(w: TwistWord, data: ArcData, disk) -> ArcData:
    """Image arc data under the word (rightmost letter first)."""
    for k, e in reversed(w.letters):
        if not (0 <= k < disk.n - 1):
            raise RangeError(f"generator s_{k} out of range on {disk.n} punctures")
        data = disk.apply_twist(data, k, e)
    return data


def palindrome(i: int) -> TwistWord:
    """Band word dragging puncture i+1 once around the block 0..i:
    s_i . s_{i-1} ... s_1 . s_0 . s_0 . s_1 ... s_i (composition order)."""
    if i < 0:
        raise ValueError("stage must be nonnegative")
    down = [(k, 1) for k in range(i, -1, -1)]
    up = [(k, 1) for k in range(0, i + 1)]
    return TwistWord(down + up)


def lift_word(w: TwistWord, stage: int) -> TwistWord:
    """Lift a word over the block contraction at `stage`.

    Generators beyond the contracted block lift to themselves; the full
    twist about the contracted pair (encoded as two consecutive equal
    letters with index `stage`) lifts to one band word around the block.
    A lone letter at the block index cannot be lifted.
    """
    out = []
    letters = list(w.letters)
    pos = 0
    pal = palindrome(stage)
    while pos < len(letters):
        k, e = letters[pos]
        if k > stage:
            out.append((k, e))
            pos += 1
        elif k == stage:
            if pos + 1 < len(letters) and letters[pos + 1] == (k, e):
                out.extend(pal.letters if e > 0 else pal.inverse().letters)
                pos += 2
            else:
                raise ValueError("odd power of the contracted generator cannot lift")
        else:
            raise ValueError(f"generator s_{k} below the contraction stage {stage}")
    return TwistWord(out)


def twist_correction(i: int, k: int) -> TwistWord:
    """Block-winding correction word at stage i: the band word around
    the block to the k-th power (empty when k = 0)."""
    return palindrome(i).power(k)


def f_squared_word(g: TwistWord) -> TwistWord:
    """Word for the square of the tracked map: the inverse of g in
    reversed order composed with g in reversed order."""
    return g.inverse() * g.reversed_order()


def export_word(w: TwistWord, convention: str = "left") -> str:
    """Token stream 's_3.S_8...' (uppercase = inverse).

    convention='right' mirrors the chirality by inverting every
    exponent (conjugate mapping classes, same entropy).
    """
    flip = -1 if convention == "right" else 1
    toks = []
    for k, e in w.letters:
        ee = e * flip
        toks.append(f"{'s' if ee > 0 else 'S'}_{k}")
    return ".".join(toks)


def parse_word(text: str) -> TwistWord:
    text = text.strip()
    if not text:
        return TwistWord()
    letters = []
    for tok in text.split("."):
        name, idx = tok.split("_")
        letters.append((int(idx), 1 if name == "s" else -1))
    return TwistWord(letters)
