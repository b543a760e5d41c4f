import pytest

from k3cert.mapclass.arcdata import ArcData, reduced, walk_slabs


@pytest.fixture(scope="session")
def real_orbit_pipeline():
    from k3cert.mapclass import real_orbit_words

    return real_orbit_words()


def enumerate_arc_data(n, max_events):
    """All reduced, walk-valid arc data with at most `max_events`
    crossings over n punctures."""
    out = []
    for a in range(n):
        def go(slab, events):
            for b in (slab, slab + 1):
                if 0 <= b < n:
                    d = ArcData(a, b, events)
                    if reduced(d) == d and (events or a != b):
                        try:
                            walk_slabs(d)
                            out.append(d)
                        except ValueError:
                            pass
            if len(events) == max_events:
                return
            for line in (slab, slab + 1):
                if 0 <= line < n:
                    for s in (1, -1):
                        if events and events[-1] == (line, s):
                            continue
                        if not events and line == a:
                            continue
                        go(slab - 1 if line == slab else slab + 1, events + [(line, s)])
        for slab0 in (a - 1, a):
            if -1 <= slab0 <= n - 1:
                go(slab0, [])
    return list(dict.fromkeys(out))
