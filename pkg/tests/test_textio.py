import numpy as np
import pytest

from mgg.errors import ParseError
from mgg.sequence import coherence
from mgg.textio import (
    dump_graph,
    dump_matrix,
    load,
    parse_circuit,
    parse_grammar,
    parse_graph,
    parse_productions,
    parse_sequence,
    parse_tm,
)

from helpers import COPY_ROWS, FIXTURES, random_graph


def test_graph_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = random_graph(rng, "".join(rng.choice(list("AB"), int(rng.integers(0, 6)))))
        text = dump_graph(g)
        h = parse_graph(text)
        assert h.same_graph(g)
        assert dump_graph(h) == text


def test_graph_order_insensitive():
    a = parse_graph("edge x y\nnode y B\nnode x A\n")
    b = parse_graph("node x A\n# comment\n\nnode y B   # trailing\nedge x y\n")
    assert dump_graph(a) == dump_graph(b) == "node x A\nnode y B\nedge x y\n"


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("node a A\nedge a b\n", 2, 8),
        ("node a A\nnode a B\n", 2, 6),
        ("node a\n", 1, 6),
        ("node a A\n  vertex b\n", 2, 3),
        ("node a A\nedge a a\nedge a a\n", 3, 6),
    ],
)
def test_graph_errors(text, line, col):
    with pytest.raises(ParseError) as exc:
        parse_graph(text, "g.txt")
    assert (exc.value.path, exc.value.line, exc.value.column) == ("g.txt", line, col)
    assert str(exc.value).startswith(f"g.txt:{line}:{col}:")


def test_productions_with_map():
    text = """
prod swap
lhs:
  node a A
  node b A
  edge a b
rhs:
  node p A
  node q A
  edge q p
map a p
map b q
"""
    (p,) = parse_productions(text)
    assert p.e[0, 1] and p.r[1, 0]
    with pytest.raises(ParseError) as exc:
        parse_productions(text.replace("map b q", "map b z"))
    assert exc.value.line == 12 and exc.value.column == 7


def test_production_errors():
    with pytest.raises(ParseError) as exc:
        parse_productions("prod p\nnode a A\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError) as exc:
        parse_productions("prod p\nlhs:\nnode a A\nprod p\nlhs:\nnode a A\n")
    assert exc.value.line == 4 and exc.value.column == 6
    with pytest.raises(ParseError):
        parse_productions("prod p\nlhs:\nnode a A\nrhs:\nnode a B\n")


def test_grammar_file():
    gr = load(FIXTURES / "toggle.gram", parse_grammar)
    assert gr.mode == "nodeless" and [p.name for p in gr.productions] == ["on"]
    assert gr.initial.node_ids == ("s1", "l1")
    with pytest.raises(ParseError):
        parse_grammar("mode sideways\ninitial:\nnode a A\n")


def test_sequence_file():
    sf = load(FIXTURES / "double_add.seq", parse_sequence)
    assert len(sf.sequence) == 2 and sf.sequence.node_ids == ("1", "2")
    assert coherence(sf.sequence)[0, 1]
    assert sf.host is None


def test_sequence_host_block():
    text = """
prod keep
lhs:
  node u A
  node v A
  edge u v
rhs:
  node u A
  node v A
  edge u v
universe:
  node 1 A
  node 2 A
  node 3 A
step keep u=2 v=3
host:
  node 2 A
  node 3 A
  edge 2 3
"""
    sf = parse_sequence(text)
    assert sf.sequence.effective[0].L[1, 2]
    assert sf.host.present() == [1, 2] and sf.host.edges[1, 2]


@pytest.mark.parametrize(
    "bad, line, col",
    [
        ("step link u=1 v=9", 12, 15),
        ("step link u=1 w=2", 12, 15),
        ("step nope u=1", 12, 6),
        ("step link u1", 12, 11),
    ],
)
def test_sequence_errors(bad, line, col):
    text = (FIXTURES / "double_add.seq").read_text().splitlines()
    idx = next(i for i, s in enumerate(text) if s.startswith("step"))
    text[idx] = bad
    with pytest.raises(ParseError) as exc:
        parse_sequence("\n".join(text))
    assert (exc.value.line, exc.value.column) == (idx + 1, col)


def test_tm_file():
    spec = load(FIXTURES / "copy.tm", parse_tm)
    assert spec.blank == "0" and spec.start == "s1"
    assert [(r.state, r.symbol, r.write, r.move, r.next_state) for r in spec.rows] == list(COPY_ROWS)


@pytest.mark.parametrize(
    "text, line",
    [
        ("row s1 0 1 HL s2\n", 1),
        ("tm t blank=0\n", 1),
        ("tm t blank=0 start=a\nrow a 0 1 UP a\n", 2),
        ("tm t blank=0 start=a color=red\n", 1),
        ("", 1),
    ],
)
def test_tm_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_tm(text)
    assert exc.value.line == line


def test_circuit_file():
    spec = load(FIXTURES / "xy.bc", parse_circuit)
    assert spec.inputs == ("x", "y") and spec.output == "out" and len(spec.gates) == 3
    with pytest.raises(ParseError) as exc:
        parse_circuit("input x\ngate nand y x x\noutput y\n")
    assert exc.value.line == 2 and exc.value.column == 6
    with pytest.raises(ParseError):
        parse_circuit("input x\n")


def test_dump_matrix():
    m = np.zeros((3, 3), bool)
    m[2, 0] = m[0, 1] = True
    assert dump_matrix(m, ("a", "b", "c")) == "edge a b\nedge c a\n"


def test_missing_file():
    with pytest.raises(ParseError):
        load(FIXTURES / "nope.graph", parse_graph)
