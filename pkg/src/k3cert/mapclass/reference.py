"""Known-good words for the bundled orbit, and word comparisons.

The stage words below were derived by hand for this orbit and serve as
a cross-check of the whole tracking-plus-extraction pipeline.  Words
are compared token for token and, where only the order of commuting
generators differs, under the commutation normal form.
"""

from .words import TwistWord, parse_word

REFERENCE_STAGE_WORDS = {
    0: "s_1.s_2.s_0.s_1.s_3.s_4.S_5.S_6.S_7.S_8.S_8.s_7.s_6.S_5",
    1: "s_2.s_3.s_4.s_5.S_6.S_7.S_8.S_8.s_7",
    2: "s_3.s_4.s_5.s_6.S_7.S_8",
    3: "s_4.s_5.s_6.S_7.S_7.S_6.S_5.S_4.S_3.S_2.S_1.S_0.S_0.S_1.S_2.S_3.S_4",
    4: "s_5.s_6.s_7.S_8.S_8.S_7.S_6.S_5.S_4.S_3.S_2.S_1.S_0.S_0.S_1.S_2.S_3.S_4.S_5.S_6.S_7.S_8",
    5: "s_6.s_7.S_8.S_8.S_7.S_6.S_5.S_4.S_3.S_2.S_1.S_0.S_0.S_1.S_2.S_3.S_4.S_5.S_6.s_7",
    6: "s_7.S_8.S_8.S_7.S_6.S_5.S_4.S_3.S_2.S_1.S_0.S_0.S_1.S_2.S_3.S_4.S_5.S_6.S_7",
    7: "S_8.S_8.S_7.S_6.S_5.S_4.S_3.S_2.S_1.S_0.S_0.S_1.S_2.S_3.S_4.S_5.S_6.S_7",
    8: "",
}


def commutation_normal_form(w: TwistWord) -> TwistWord:
    """Bubble-sort adjacent letters on distant strands (|i - j| >= 2)
    into ascending index order; a canonical form within the commutation
    class of the word."""
    letters = list(w.letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 1):
            (a, ea), (b, eb) = letters[i], letters[i + 1]
            if abs(a - b) >= 2 and b < a:
                letters[i], letters[i + 1] = letters[i + 1], letters[i]
                changed = True
    return TwistWord(letters)


def compare_stage_words(reports):
    """Per-stage comparison against the reference: 'exact' for a token
    match, 'commuting' when only distant generators are reordered,
    'mismatch' otherwise."""
    out = {}
    for r in reports:
        ref = parse_word(REFERENCE_STAGE_WORDS.get(r.stage, ""))
        if r.word == ref:
            out[r.stage] = "exact"
        elif commutation_normal_form(r.word) == commutation_normal_form(ref):
            out[r.stage] = "commuting"
        else:
            out[r.stage] = "mismatch"
    return out
