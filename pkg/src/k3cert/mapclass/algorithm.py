"""The staged half-twist word algorithm.

Stage 0 drags the far endpoint of the first tracked arc back to the
base arc, reading one half-twist per trailing crossing.  Stage i first
contracts the already-fixed chain of base arcs to a single marked
point, extracts a word there (where the contracted point may only be
twisted by full twists), lifts it back, and finally corrects by the
winding of the stage arc around the contracted block.
"""

from ..errors import ExtractionError, StageError
from .arcdata import ArcData, class_word, reduced, same_class, straight
from .disk import MarkedDisk
from .words import TwistWord, apply_word, palindrome

MAX_DRAG_STEPS = 400


def _drag_letter(data: ArcData):
    """Twist consuming the last crossing, per the backward drag."""
    j, s = data.events[-1]
    e = data.end
    if j == e - 1:
        return (e - 1, 1 if s > 0 else -1)
    if j == e + 1:
        return (e, -1 if s > 0 else 1)
    raise ExtractionError(f"last event line {j} not adjacent to endpoint {e}")


def _transport_letter(data: ArcData, lo_target):
    """Shift a straight arc one slot toward the target pair."""
    lo = min(data.start, data.end)
    if lo > lo_target:
        return (lo - 1, 1)
    return (lo + 1, 1)


def drag_word(data: ArcData, disk: MarkedDisk, target_lo: int,
              star_pair: bool = False):
    """Half-twist letters (application order) taking `data` to the
    straight arc (target_lo, target_lo + 1).

    With star_pair=True the generator 0 may only appear as a full
    twist; those are emitted as ('T', sign) tokens.
    """
    data = reduced(data)
    target = straight(target_lo)
    letters = []
    for _ in range(MAX_DRAG_STEPS):
        if data.matches_unoriented(target):
            return letters, data
        if data.events:
            k, e = _drag_letter(data)
            if star_pair and k == 0:
                # the contracted point may only be twisted fully; try
                # both chiralities of the full twist and keep whichever
                # shrinks the crossing list
                for sign in (e, -e):
                    cand = disk.apply_twist(disk.apply_twist(data, 0, sign), 0, sign)
                    if len(cand.events) < len(data.events):
                        letters.append(("T", sign))
                        data = cand
                        break
                else:
                    raise ExtractionError("full twist at the contracted point stalls")
                continue
            letters.append((k, e))
            data = disk.apply_twist(data, k, e)
        else:
            k, e = _transport_letter(data, target_lo)
            if star_pair and k == 0:
                raise ExtractionError("transport across the contracted point")
            letters.append((k, e))
            data = disk.apply_twist(data, k, e)
    raise ExtractionError("drag did not terminate")


def word_from_arcdata(data: ArcData, disk: MarkedDisk, target_lo: int = 0) -> TwistWord:
    """Word g with g(data) = the straight arc at target_lo; verified."""
    letters, final = drag_word(data, disk, target_lo)
    w = TwistWord(tuple(reversed(letters)))
    check = apply_word(w, reduced(data), disk)
    if not check.matches_unoriented(straight(target_lo)):
        raise ExtractionError("extracted word fails to trivialize its arc")
    return w


def contract_data(data: ArcData, stage: int) -> ArcData:
    """Arc data in the disk with punctures 0..stage collapsed to the
    marked point at position `stage` (valid for arcs that avoid the
    collapsed chain, which stage arcs do)."""
    evs = [(j - stage, s) for j, s in data.events if j >= stage]
    start = max(data.start - stage, 0)
    end = max(data.end - stage, 0)
    return reduced(ArcData(start, end, evs))


def contracted_disk(disk: MarkedDisk, stage: int) -> MarkedDisk:
    return MarkedDisk(disk.points[stage:])


def lift_letters(letters, stage: int):
    """Lift local drag letters through the contraction: local s_m with
    m >= 1 becomes s_{m+stage}; a full twist of the contracted pair
    becomes one band word around the block."""
    out = []
    pal = palindrome(stage)
    for tok in letters:
        k, e = tok
        if k == "T":
            out.extend(pal.letters if e > 0 else pal.inverse().letters)
        elif k >= 1:
            out.append((k + stage, e))
        else:
            raise ExtractionError("lone contracted generator cannot lift")
    return out


def find_winding(candidate: ArcData, target: ArcData, stage: int,
                 disk: MarkedDisk, max_k: int = 8):
    """Power of the band word around the block matching candidate to
    target (the stage arcs agree up to such a twist)."""
    pal = palindrome(stage)
    for k in range(0, max_k + 1):
        for sk in ((k,) if k == 0 else (k, -k)):
            w = pal.power(sk)
            if apply_word(w, candidate, disk).matches_unoriented(target):
                return sk
    raise StageError(stage, "no block winding matches the stage arc")


class StageReport:
    def __init__(self, stage, raw_word, winding, word):
        self.stage = stage
        self.raw_word = raw_word
        self.winding = winding
        self.word = word


def compute_g(arc_datas, disk: MarkedDisk, verify: bool = True):
    """Word g with g(f'(p_m)) = p_m for every tracked arc.

    Returns (g, stage reports).  Each stage is checked on all arcs it
    is supposed to fix; failures raise StageError.
    """
    n = disk.n
    if len(arc_datas) != n - 1:
        raise ValueError(f"expected {n - 1} tracked arcs")
    current = [reduced(d) for d in arc_datas]
    reports = []
    total = TwistWord()
    for i in range(n - 1):
        alpha = current[i]
        if i == 0:
            g_i = word_from_arcdata(alpha, disk, 0)
            reports.append(StageReport(0, g_i, 0, g_i))
        else:
            if alpha.start != i:
                if alpha.end == i:
                    alpha = alpha.reversed()
                else:
                    raise StageError(i, f"stage arc does not start at the block ({alpha})")
            local = contract_data(alpha, i)
            ldisk = contracted_disk(disk, i)
            letters, _ = drag_word(local, ldisk, 0, star_pair=True)
            lifted = lift_letters(letters, i)
            g_prime = TwistWord(tuple(reversed(lifted)))
            beta = apply_word(g_prime, alpha, disk)
            k = find_winding(beta, straight(i), i, disk)
            g_i = palindrome(i).power(k) * g_prime
            reports.append(StageReport(i, g_prime, k, g_i))
        current = [apply_word(g_i, d, disk) for d in current]
        if verify:
            for m in range(i + 1):
                if not current[m].matches_unoriented(straight(m)):
                    raise StageError(i, f"arc {m} not fixed after stage {i}: {current[m]}")
        total = g_i * total
    return total, reports


def verify_word(g: TwistWord, arc_datas, disk: MarkedDisk) -> bool:
    """g applied to every tracked arc yields the matching base arc."""
    for m, d in enumerate(arc_datas):
        img = apply_word(g, reduced(d), disk)
        if not img.matches_unoriented(straight(m)):
            return False
    return True
