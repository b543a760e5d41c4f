"""Mapping-class pipeline: arc tracking, arc data, half-twist words."""

from .arcdata import OVER, UNDER, ArcData, class_word, format_arcdata, parse_arcdata, reduced, straight
from .disk import MarkedDisk
from .words import (
    TwistWord,
    apply_word,
    export_word,
    f_squared_word,
    lift_word,
    palindrome,
    parse_word,
    twist_correction,
    word,
)
from .algorithm import compute_g, contract_data, verify_word, word_from_arcdata

__all__ = [
    "ArcData", "MarkedDisk", "TwistWord", "OVER", "UNDER",
    "apply_word", "class_word", "compute_g", "contract_data",
    "export_word", "f_squared_word", "format_arcdata", "lift_word",
    "palindrome", "parse_arcdata", "parse_word", "reduced", "straight",
    "twist_correction", "verify_word", "word", "word_from_arcdata",
]


def real_orbit_words(A=10.0, prec=256, arc_datas=None):
    """Track the bundled orbit's arcs and compute the words for the
    tracked map and its square.

    The twist algebra runs in a standardized evenly spaced disk: arc
    data is a complete combinatorial invariant, so only the left-right
    structure matters, and mild twist supports keep the geometry tame.
    Returns (g, f2, stage_reports, tracked_data).
    """
    from .algorithm import compute_g, verify_word
    from .tracking import orbit_marked_disk, tracked_arc_data
    from .words import f_squared_word

    if arc_datas is None:
        disk, proj, succ, _ = orbit_marked_disk(A, prec)
        arc_datas = [tracked_arc_data(disk, proj, succ, k, A) for k in range(disk.n - 1)]
        n = disk.n
    else:
        n = max(max(d.start, d.end) for d in arc_datas) + 1
    algebra_disk = MarkedDisk.collinear(n)
    g, reports = compute_g(arc_datas, algebra_disk)
    if not verify_word(g, arc_datas, algebra_disk):
        raise RuntimeError("computed word failed final verification")
    return g, f_squared_word(g), reports, arc_datas
