"""Combinatorial arc data: crossings of the vertical rays at punctures.

An arc between punctures is recorded as its ordered crossing events
with the vertical lines through the punctures, each classified over
(above the puncture) or under.  Free reduction removes backtracking
pairs and unwinds crossings of an endpoint's own line next to that
endpoint; the reduced word is treated as the normal form of the
homotopy class rel endpoints.
"""

OVER = 1
UNDER = -1


class ArcData:
    __slots__ = ("start", "end", "events")

    def __init__(self, start: int, end: int, events=()):
        object.__setattr__(self, "start", int(start))
        object.__setattr__(self, "end", int(end))
        object.__setattr__(self, "events", tuple((int(j), int(s)) for j, s in events))

    def __setattr__(self, *_):
        raise AttributeError("ArcData is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, ArcData)
            and self.start == other.start
            and self.end == other.end
            and self.events == other.events
        )

    def __hash__(self):
        return hash((self.start, self.end, self.events))

    def reversed(self):
        return ArcData(self.end, self.start, tuple(reversed(self.events)))

    def matches_unoriented(self, other):
        return self == other or self.reversed() == other

    def __repr__(self):
        return format_arcdata(self)


def reduce_events(start, end, events):
    """Cancel adjacent equal events and strip endpoint-line crossings
    next to the endpoints, to a fixed point."""
    evs = list(events)
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(evs):
            if evs[i] == evs[i + 1]:
                del evs[i : i + 2]
                changed = True
                i = max(i - 1, 0)
            else:
                i += 1
        while evs and evs[0][0] == start:
            evs.pop(0)
            changed = True
        while evs and evs[-1][0] == end:
            evs.pop()
            changed = True
    return tuple(evs)


def reduced(data: ArcData) -> ArcData:
    return ArcData(data.start, data.end, reduce_events(data.start, data.end, data.events))


def straight(k: int) -> ArcData:
    """The base arc from puncture k to k+1."""
    return ArcData(k, k + 1, ())


def walk_slabs(data: ArcData):
    """Slab sequence of a reduced arc; raises ValueError when the event
    sequence cannot be realized.  Slab s lies between lines s and s+1."""
    a, b, evs = data.start, data.end, data.events
    if not evs:
        if abs(a - b) != 1:
            raise ValueError("eventless arc must join adjacent punctures")
        return [min(a, b)]
    first = evs[0][0]
    if first == a - 1:
        slab = a - 1
    elif first == a + 1:
        slab = a
    elif first == a:
        raise ValueError("unreduced leading event")
    else:
        raise ValueError(f"first event line {first} unreachable from puncture {a}")
    slabs = [slab]
    for j, _ in evs:
        if j == slab:
            slab = slab - 1
        elif j == slab + 1:
            slab = slab + 1
        else:
            raise ValueError(f"event line {j} does not bound slab {slab}")
        slabs.append(slab)
    if slab not in (b - 1, b):
        raise ValueError(f"arc cannot end at puncture {b} from slab {slab}")
    return slabs


def class_word(data: ArcData):
    """Complete invariant of the arc class: the free-group word of
    up-ray crossings, as a double-coset normal form.

    Crossing above puncture j left-to-right contributes x_j, right to
    left its inverse; crossings below contribute nothing (the plane cut
    along the upward rays is simply connected).  Winding at an endpoint
    multiplies by that endpoint's own letter, so leading start-letters
    and trailing end-letters are stripped.
    """
    data = reduced(data)
    slabs = walk_slabs(data)
    letters = []
    for m, (j, s) in enumerate(data.events):
        if s == OVER:
            letters.append((j, 1 if slabs[m + 1] > slabs[m] else -1))
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(letters):
            if letters[i][0] == letters[i + 1][0] and letters[i][1] == -letters[i + 1][1]:
                del letters[i : i + 2]
                changed = True
                i = max(i - 1, 0)
            else:
                i += 1
        while letters and letters[0][0] == data.start:
            letters.pop(0)
            changed = True
        while letters and letters[-1][0] == data.end:
            letters.pop()
            changed = True
    return (data.start, data.end, tuple(letters))


def same_class(a: ArcData, b: ArcData, unoriented=True) -> bool:
    if class_word(a) == class_word(b):
        return True
    return unoriented and class_word(a.reversed()) == class_word(b)


def format_arcdata(data: ArcData) -> str:
    evs = "".join(f"({j},{'O' if s > 0 else 'U'})" for j, s in data.events)
    return f"start={data.start} end={data.end} events={evs}"


def parse_arcdata(text: str) -> ArcData:
    import re

    m = re.match(r"start=(\d+)\s+end=(\d+)\s+events=((?:\(\d+,[OU]\))*)$", text.strip())
    if not m:
        raise ValueError(f"malformed arc data: {text!r}")
    events = [
        (int(j), OVER if s == "O" else UNDER)
        for j, s in re.findall(r"\((\d+),([OU])\)", m.group(3))
    ]
    return ArcData(int(m.group(1)), int(m.group(2)), events)
