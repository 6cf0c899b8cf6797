import pytest
from hypothesis import given, strategies as st

from dynkc.stream import (AdversaryConfig, StreamParseError, StreamValidationError,
                          delete, generate_stream, insert, parse_stream, read_stream,
                          serialize_stream, validate_events)


def test_parse_basic():
    evs = parse_stream("+ 0 1.0 2.0\n+ 1 3.0 4.0\n- 0\n")
    assert [e.op for e in evs] == ["+", "+", "-"]
    assert evs[1].coords == (3.0, 4.0)


def test_header_sets_dimension():
    sf = read_stream("#dim 3\n+ 0 1 2 3\n")
    assert sf.dim == 3
    with pytest.raises(StreamParseError):
        read_stream("#dim 3\n+ 0 1 2\n")


def test_matrix_header():
    sf = read_stream("#matrix m.txt\n+ 0\n+ 1\n- 0\n")
    assert sf.matrix == "m.txt" and sf.events[0].coords is None
    with pytest.raises(StreamParseError):
        read_stream("#matrix m.txt\n+ 0 1.0\n")


def test_delete_before_insert_rejected():
    with pytest.raises(StreamValidationError):
        parse_stream("- 5\n")


def test_id_reuse_rejected():
    with pytest.raises(StreamValidationError):
        parse_stream("+ 0 1\n- 0\n+ 0 1\n")
    with pytest.raises(StreamValidationError):
        validate_events([insert(3, [0.0]), insert(2, [0.0])])


@pytest.mark.parametrize("text, line", [
    ("+ 0 1\n* 1\n", 2),
    ("+ 0 x\n", 1),
    ("+ 0 1\n- 0 4\n", 2),
    ("+ -1 2\n", 1),
    ("+ 0 1\n#dim 1\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(StreamParseError) as e:
        parse_stream(text)
    assert e.value.lineno == line


coords = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=20), st.data())
def test_roundtrip_is_exact(pts, data):
    evs = [insert(i, p) for i, p in enumerate(pts)]
    dels = data.draw(st.lists(st.sampled_from(range(len(pts))), unique=True))
    evs += [delete(i) for i in dels]
    text = serialize_stream(evs, dim=2)
    back = read_stream(text)
    assert back.events == evs
    assert serialize_stream(back.events, dim=2) == text


def test_oblivious_is_reproducible():
    cfg = AdversaryConfig("oblivious_random", seed=7, n_init=50, n_updates=200)
    a, b = generate_stream(cfg), generate_stream(cfg)
    assert a == b and len(a) == 250
    validate_events(a)


def test_adaptive_needs_an_algorithm():
    with pytest.raises(ValueError):
        generate_stream(AdversaryConfig("churn"))


def test_adaptive_deletes_hit_the_visible_solution():
    cfg = AdversaryConfig("adaptive_delete_center", seed=1, n_init=5, n_updates=60,
                          delete_fraction=0.8)
    shown = {"S": set()}
    live = set()
    hits = []

    def fn(ev):
        if ev.is_insert:
            live.add(ev.id)
        else:
            hits.append(ev.id in shown["S"])
            live.remove(ev.id)
        shown["S"] = {max(live)} if live else set()  # a toy "solution"
        return shown["S"]

    generate_stream(cfg, fn)
    assert hits and all(hits)


def test_churn_alternates_and_inserts_far():
    cfg = AdversaryConfig("churn", seed=2, n_init=10, n_updates=20)
    evs = generate_stream(cfg, lambda ev: set())
    tail = evs[10:]
    # nothing visible, so every churn step is an insert placed outside the box
    assert all(e.is_insert for e in tail)
    assert max(max(abs(c) for c in e.coords) for e in tail) > cfg.box


def test_config_validation():
    with pytest.raises(ValueError):
        AdversaryConfig("bogus")
    with pytest.raises(ValueError):
        AdversaryConfig(delete_fraction=1.5)
