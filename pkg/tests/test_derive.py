import numpy as np
import pytest

from mgg.boolalg import permute_action
from mgg.derive import (
    FreshIds,
    Grammar,
    Match,
    Strategy,
    derive,
    derive_full,
    enumerate_matches,
    format_trace,
    has_match,
    is_valid_match,
    run,
    step,
)
from mgg.errors import BudgetExceeded, DanglingEdgeError, IllFormedProductionError
from mgg.graph import SimpleDigraph, is_compatible
from mgg.production import Production, from_static, identity_production, relabel, to_swap
from mgg.textio import load, parse_graph, parse_grammar, parse_productions

from helpers import (
    FIXTURES,
    brute_force_matches,
    from_actions,
    graph,
    random_graph,
    random_label_perm,
    random_nodeless,
    random_production,
)


def as_tuples(ms):
    return [tuple(j for _, j in m.pairs) for m in ms]


def prod(nodes, lhs_edges, rhs_edges, name="p", rhs_nodes=None):
    lhs = SimpleDigraph.build(nodes, lhs_edges)
    rhs = SimpleDigraph.build(rhs_nodes if rhs_nodes is not None else nodes, rhs_edges)
    f = {i: rhs.node_ids.index(x) for i, x in enumerate(lhs.node_ids) if x in rhs.node_ids}
    return from_static(lhs, rhs, f, name)


class TestMatching:
    def test_relabeling_example(self):
        # keeps (1,1) and (1,3), deletes (1,2), adds (2,1); all nodes share one type
        nodes = [("1", "N"), ("2", "N"), ("3", "N")]
        p = prod(nodes, [("1", "1"), ("1", "3"), ("1", "2")], [("1", "1"), ("1", "3"), ("2", "1")])
        host = SimpleDigraph.build(
            nodes, [("1", "1"), ("1", "2"), ("1", "3"), ("3", "3"), ("3", "2"), ("3", "1")]
        )
        lhs_only = Production("l", p.lhs, np.zeros((3, 3)), np.zeros(3), np.zeros((3, 3)), np.zeros(3))
        candidates = as_tuples(enumerate_matches(lhs_only, host))
        assert candidates == [(0, 1, 2), (0, 2, 1), (2, 0, 1), (2, 1, 0)]
        # the second and fourth identifications would add an edge that is already there
        assert as_tuples(enumerate_matches(p, host)) == [(0, 1, 2), (2, 1, 0)]

    def test_empty_lhs(self):
        p = identity_production(SimpleDigraph.empty())
        g = random_graph(np.random.default_rng(0), "AB")
        ms = enumerate_matches(p, g)
        assert ms == [Match(())]
        assert derive(p, ms[0], g) == g

    def test_label_filter(self):
        p = prod([("x", "A")], [], [])
        g = graph(np.zeros((3, 3)), "BAB")
        assert as_tuples(enumerate_matches(p, g)) == [(1,)]

    def test_no_match(self):
        p = prod([("x", "A"), ("y", "A")], [("x", "y")], [])
        assert enumerate_matches(p, graph(np.zeros((2, 2)), "AA")) == []
        assert not has_match(p, graph(np.zeros((2, 2)), "AA"))

    def test_absent_host_nodes_ignored(self):
        p = prod([("x", "A")], [], [])
        g = graph(np.zeros((2, 2)), "AA", [0, 1])
        assert as_tuples(enumerate_matches(p, g)) == [(1,)]

    def test_order_by_host_ids(self):
        g = SimpleDigraph.build([("n10", "A"), ("n2", "A"), ("n1", "A")])
        p = prod([("x", "A")], [], [])
        assert [m.describe(p, g)[0][1] for m in enumerate_matches(p, g)] == ["n1", "n2", "n10"]

    def test_brute_force_random(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            k, n = int(rng.integers(1, 5)), int(rng.integers(1, 6))
            p = random_production(rng, "".join(rng.choice(list("AB"), k)))
            g = random_graph(rng, "".join(rng.choice(list("AB"), n)), float(rng.uniform(0.2, 0.8)))
            ms = enumerate_matches(p, g)
            assert as_tuples(ms) == brute_force_matches(p, g)
            assert all(is_valid_match(p, m, g) for m in ms)
            assert has_match(p, g) == bool(ms)

    def test_is_valid_match_rejects(self):
        p = prod([("x", "A"), ("y", "A")], [("x", "y")], [("x", "y")])
        g = graph([[0, 1], [0, 0]], "AA")
        assert is_valid_match(p, Match(((0, 0), (1, 1))), g)
        assert not is_valid_match(p, Match(((0, 1), (1, 0))), g)
        assert not is_valid_match(p, Match(((0, 0),)), g)


class TestDerive:
    def test_start_process_on_plant(self):
        p = load(FIXTURES / "start_process.prod", parse_productions)[0]
        g = load(FIXTURES / "plant.graph", parse_graph)
        ms = enumerate_matches(p, g)
        assert len(ms) == 1
        assert ms[0].describe(p, g) == [("1", "c1"), ("2", "m1"), ("3", "o1"), ("4", "pc1")]
        h = derive(p, ms[0], g)
        want = SimpleDigraph.build(
            [("c1", "Conveyor"), ("c2", "Conveyor"), ("m1", "Machine"), ("o1", "Operator")],
            [("c1", "m1"), ("m1", "c2"), ("o1", "m1"), ("m1", "m1"), ("o1", "o1")],
        )
        assert h.same_graph(want)

    def test_busy_machine_blocks(self):
        p = load(FIXTURES / "start_process.prod", parse_productions)[0]
        g = load(FIXTURES / "busy_plant.graph", parse_graph)
        assert enumerate_matches(p, g) == []

    def test_identity(self):
        g = random_graph(np.random.default_rng(2), "ABC")
        p = identity_production(g)
        for m in enumerate_matches(p, g):
            assert derive(p, m, g) == g

    def test_nodeless_matches_swap_form(self):
        rng = np.random.default_rng(3)
        done = 0
        while done < 200:
            p = random_nodeless(rng, "AAB")
            s = random_label_perm(rng, p.labels)
            ps = relabel(p, s)
            g = random_graph(rng, "AAB")
            g = g.with_parts(edges=(g.edges | ps.L) & ~ps.K)
            m = Match(tuple((i, s.inverse()(i)) for i in range(3)))
            assert is_valid_match(p, m, g)
            h = derive(p, m, g)
            flips = permute_action(s, to_swap(p).value).imag
            assert np.array_equal(h.edges, g.edges ^ flips)
            assert is_compatible(h)
            done += 1

    def test_fresh_ids(self):
        p = prod([("x", "A")], [], [("x", "y")], rhs_nodes=[("x", "A"), ("y", "B")])
        g = SimpleDigraph.build([("v1", "A")])
        fresh = FreshIds()
        h, alloc = derive_full(p, enumerate_matches(p, g)[0], g, fresh)
        assert alloc == {1: "v2"}
        assert h.edge_ids() == [("v1", "v2")] and h.labels == ("A", "B")

    def test_dangling(self):
        p = prod([("x", "A")], [], [], rhs_nodes=[])
        g = graph([[0, 1], [0, 0]], "AB")
        with pytest.raises(DanglingEdgeError):
            derive(p, enumerate_matches(p, g)[0], g)

    def test_deleting_node_with_its_edges(self):
        p = prod([("x", "A"), ("y", "B")], [("x", "y")], [], rhs_nodes=[("y", "B")])
        g = graph([[0, 1], [0, 0]], "AB")
        h = derive(p, enumerate_matches(p, g)[0], g)
        assert h.node_ids == ("2",) and not h.edges.any()

    def test_unmatched_rewrite_rejected(self):
        p = from_actions([[0, 3], [0, 0]], "AB")
        lhs = p.lhs.with_parts(nodes=[1, 0])
        q = Production("q", lhs, p.e, p.erase_nodes, p.r, p.add_nodes)
        g = graph([[0]], "A")
        with pytest.raises(IllFormedProductionError):
            derive(q, Match(((0, 0),)), g)


def _toggle():
    return load(FIXTURES / "toggle.gram", parse_grammar)


class TestRun:
    def test_no_productions(self):
        g = random_graph(np.random.default_rng(4), "AB")
        res = run(Grammar((), g), Strategy(), 10)
        assert res.trace == [] and res.final == g and res.halted

    def test_self_disabling(self):
        res = run(_toggle(), Strategy(), 10)
        assert res.names == ["on"]
        assert res.final.edge_ids() == [("s1", "l1")]
        assert format_trace(res.trace) == "1 on s:s1 l:l1"

    def test_budget(self):
        nodes = [("x", "A")]
        up = prod(nodes, [], [("x", "x")], "up")
        down = prod(nodes, [("x", "x")], [], "down")
        gr = Grammar((up, down), SimpleDigraph.build(nodes))
        with pytest.raises(BudgetExceeded) as exc:
            run(gr, Strategy(), 5)
        assert exc.value.result.names == ["up", "down", "up", "down", "up"]
        with pytest.raises(ValueError):
            run(gr, Strategy(), -1)
        with pytest.raises(ValueError):
            run(gr, Strategy("all", "first"), 3)

    def test_step_all_counts(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            prods = tuple(random_nodeless(rng, "AA", f"p{k}") for k in range(3))
            g = random_graph(rng, "AAA")
            gr = Grammar(prods, g)
            apps = step(gr, g, Strategy("all", "all"))
            assert len(apps) == sum(len(enumerate_matches(p, g)) for p in prods)

    def test_step_first_and_halt(self):
        gr = _toggle()
        apps = step(gr, gr.initial, Strategy())
        assert len(apps) == 1 and apps[0].production == "on"
        assert step(gr, apps[0].graph, Strategy()) == []

    def test_priority(self):
        nodes = [("x", "A")]
        a = prod(nodes, [], [("x", "x")], "a")
        b = prod(nodes, [], [("x", "x")], "b")
        gr = Grammar((a, b), SimpleDigraph.build(nodes))
        assert run(gr, Strategy("priority", "first", 0, ("b",)), 5).names == ["b"]
        with pytest.raises(ValueError):
            step(gr, gr.initial, Strategy("priority", "first", 0, ("zzz",)))

    def test_seed_reproducible(self):
        rng = np.random.default_rng(6)
        prods = tuple(random_nodeless(rng, "AAA", f"p{k}") for k in range(4))
        gr = Grammar(prods, random_graph(rng, "AAAAA"))
        traces = []
        for seed in (7, 7, 8):
            try:
                res = run(gr, Strategy("random", "random", seed), 30)
            except BudgetExceeded as exc:
                res = exc.result
            traces.append([t.line() for t in res.trace])
        assert traces[0] == traces[1]

    def test_mode_checks(self):
        adder = prod([("x", "A")], [], [], rhs_nodes=[("x", "A"), ("y", "A")])
        with pytest.raises(IllFormedProductionError):
            Grammar((adder,), SimpleDigraph.empty(), "nodeless")
        Grammar((adder,), SimpleDigraph.empty(), "node-adding")
        eraser = prod([("x", "A")], [], [], rhs_nodes=[])
        with pytest.raises(IllFormedProductionError):
            Grammar((eraser,), SimpleDigraph.empty(), "node-adding")
        Grammar((eraser,), SimpleDigraph.empty(), "full")
        with pytest.raises(ValueError):
            Grammar((adder, adder), SimpleDigraph.empty(), "full")
        with pytest.raises(ValueError):
            Grammar((), SimpleDigraph.empty(), "weird")
        with pytest.raises(ValueError):
            Grammar((adder,), SimpleDigraph.empty(), "full", frozenset({"B"}))

    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            Strategy("best")
        with pytest.raises(ValueError):
            Strategy("first", "priority")

    def test_node_adding_trace_records_fresh(self):
        adder = prod([("x", "A")], [("x", "x")], [("x", "y")], "grow", rhs_nodes=[("x", "A"), ("y", "A")])
        gr = Grammar((adder,), SimpleDigraph.build([("a", "A")], [("a", "a")]), "node-adding")
        res = run(gr, Strategy(), 5)
        assert res.trace[0].line() == "1 grow x:a y:v1"
