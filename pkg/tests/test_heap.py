import random

from hypothesis import given, strategies as st

from dynkc.heap import IndexedMinHeap


@given(st.lists(st.tuples(st.integers(0, 30), st.floats(0, 10, allow_nan=False)), max_size=60))
def test_matches_sorted_reference(ops):
    h = IndexedMinHeap()
    ref = {}
    for item, key in ops:
        if item in ref:
            h.remove(item)
            del ref[item]
        else:
            h.push(item, (key, item))
            ref[item] = (key, item)
        h.check()
        if ref:
            want = min(ref.values())
            assert h.min() == (want, want[1])
            two = sorted(ref.values())[:2]
            assert [k for k, _ in h.two_smallest()] == two
        else:
            assert h.min() is None


def test_ties_go_to_smaller_item():
    h = IndexedMinHeap()
    for c in (7, 3, 5):
        h.push(c, (1.0, c))
    assert h.min()[1] == 3
    h.discard(3)
    h.discard(3)
    assert h.min()[1] == 5 and 3 not in h and len(h) == 2


def test_random_churn_keeps_heap_order():
    r = random.Random(0)
    h = IndexedMinHeap()
    for step in range(2000):
        if h and r.random() < 0.4:
            h.remove(r.choice(list(h.pos)))
        else:
            x = step
            h.push(x, (r.random(), x))
    h.check()
