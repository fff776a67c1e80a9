import pytest
from hypothesis import given
from hypothesis import strategies as st

from continuum_conductor.discovery import (
    DirectlyFollowsGraph,
    Place,
    Relation,
    alpha_net,
    dfg_from_log,
    fitness,
    footprint,
    footprint_grid,
    kpis,
    merge_dfg,
    net_to_dot,
)
from continuum_conductor.errors import DegenerateLog
from continuum_conductor.events import EventLog, HighLevelEvent


def make_log(traces):
    events = []
    for ci, acts in enumerate(traces):
        for ai, (act, t) in enumerate(acts):
            events.append(
                HighLevelEvent(f"e{ci}-{ai}", float(t), act, f"case:{ci}", 1)
            )
    return EventLog.from_events(events)


def textbook_log():
    return make_log(
        [
            [("a", 0), ("b", 10), ("c", 20), ("d", 30)],
            [("a", 0), ("c", 10), ("b", 20), ("d", 30)],
            [("a", 0), ("e", 10), ("d", 20)],
        ]
    )


class TestDfg:
    def test_edges_and_endpoints(self):
        dfg = dfg_from_log(textbook_log())
        assert dfg.activities == ("a", "b", "c", "d", "e")
        assert dict(dfg.edge_counts) == {
            ("a", "b"): 1,
            ("a", "c"): 1,
            ("a", "e"): 1,
            ("b", "c"): 1,
            ("b", "d"): 1,
            ("c", "b"): 1,
            ("c", "d"): 1,
            ("e", "d"): 1,
        }
        assert dict(dfg.start_counts) == {"a": 3}
        assert dict(dfg.end_counts) == {"d": 3}
        assert dfg.num_traces() == 3
        assert dfg.count("a", "b") == 1
        assert dfg.count("d", "a") == 0

    def test_repeated_edge_is_counted(self):
        dfg = dfg_from_log(make_log([[("a", 0), ("b", 1)], [("a", 0), ("b", 1)]]))
        assert dfg.count("a", "b") == 2

    def test_single_event_trace(self):
        dfg = dfg_from_log(make_log([[("a", 0)]]))
        assert dict(dfg.edge_counts) == {}
        assert dict(dfg.start_counts) == {"a": 1}
        assert dict(dfg.end_counts) == {"a": 1}


class TestMerge:
    def test_partitioned_log_merges_to_central_dfg(self):
        traces = [
            [("a", 0), ("b", 10), ("c", 20), ("d", 30)],
            [("a", 0), ("c", 10), ("b", 20), ("d", 30)],
            [("a", 0), ("e", 10), ("d", 20)],
        ]
        central = dfg_from_log(make_log(traces))
        parts = [
            dfg_from_log(
                EventLog.from_events(
                    [
                        HighLevelEvent(f"e{ci}-{ai}", float(t), act, f"case:{ci}", 1)
                        for ai, (act, t) in enumerate(acts)
                    ]
                )
            )
            for ci, acts in enumerate(traces)
        ]
        assert merge_dfg(parts) == central

    def test_identity_and_commutativity(self):
        d1 = dfg_from_log(make_log([[("a", 0), ("b", 10)]]))
        d2 = dfg_from_log(make_log([[("b", 0), ("c", 10)]]))
        empty = merge_dfg([])
        assert empty == DirectlyFollowsGraph()
        assert merge_dfg([d1, empty]) == d1
        assert merge_dfg([d1, d2]) == merge_dfg([d2, d1])

    def test_associativity(self):
        d1 = dfg_from_log(make_log([[("a", 0), ("b", 10)]]))
        d2 = dfg_from_log(make_log([[("b", 0), ("c", 10)]]))
        d3 = dfg_from_log(make_log([[("a", 0), ("c", 10)]]))
        assert merge_dfg([merge_dfg([d1, d2]), d3]) == merge_dfg(
            [d1, merge_dfg([d2, d3])]
        )


class TestFootprint:
    def test_relations(self):
        fp = footprint(dfg_from_log(textbook_log()))
        assert fp.relation("a", "b") is Relation.CAUSALITY
        assert fp.relation("b", "a") is Relation.REVERSE
        assert fp.relation("b", "c") is Relation.PARALLEL
        assert fp.relation("c", "b") is Relation.PARALLEL
        assert fp.relation("a", "d") is Relation.CHOICE
        assert fp.relation("a", "a") is Relation.CHOICE

    def test_permits_follows_causality_or_parallel(self):
        fp = footprint(dfg_from_log(textbook_log()))
        assert fp.permits("a", "b")
        assert fp.permits("b", "c")
        assert not fp.permits("b", "a")
        assert not fp.permits("a", "d")

    def test_min_count_drops_rare_edges(self):
        log = make_log(
            [[("a", 0), ("b", 10)], [("a", 0), ("b", 10)], [("b", 0), ("a", 10)]]
        )
        loose = footprint(dfg_from_log(log))
        assert loose.relation("a", "b") is Relation.PARALLEL
        strict = footprint(dfg_from_log(log), min_count=2)
        assert strict.relation("a", "b") is Relation.CAUSALITY

    def test_grid_rendering(self):
        grid = footprint_grid(footprint(dfg_from_log(textbook_log())))
        lines = grid.splitlines()
        assert len(lines) == 6
        assert lines[0].split() == ["a", "b", "c", "d", "e"]
        assert "||" in grid and "->" in grid and "#" in grid


class TestAlphaNet:
    def test_textbook_places(self):
        dfg = dfg_from_log(textbook_log())
        net = alpha_net(footprint(dfg), dfg)
        assert net.transitions == ("a", "b", "c", "d", "e")
        got = {(tuple(sorted(p.inputs)), tuple(sorted(p.outputs))) for p in net.places}
        assert got == {
            (("a",), ("b", "e")),
            (("a",), ("c", "e")),
            (("b", "e"), ("d",)),
            (("c", "e"), ("d",)),
        }
        assert net.source == Place(frozenset(), frozenset({"a"}))
        assert net.sink == Place(frozenset({"d"}), frozenset())

    def test_sequence_net(self):
        dfg = dfg_from_log(make_log([[("a", 0), ("b", 10), ("c", 20)]]))
        net = alpha_net(footprint(dfg), dfg)
        got = {(tuple(sorted(p.inputs)), tuple(sorted(p.outputs))) for p in net.places}
        assert got == {(("a",), ("b",)), (("b",), ("c",))}

    def test_empty_log_is_degenerate(self):
        with pytest.raises(DegenerateLog):
            dfg = dfg_from_log(EventLog())
            alpha_net(footprint(dfg), dfg)

    def test_dot_output_mentions_every_transition(self):
        dfg = dfg_from_log(textbook_log())
        dot = net_to_dot(alpha_net(footprint(dfg), dfg))
        assert dot.startswith("digraph")
        for name in "abcde":
            assert name in dot


class TestFitness:
    def test_perfect_and_zero_and_half(self):
        fp = footprint(dfg_from_log(textbook_log()))
        assert fitness(textbook_log(), fp) == 1.0
        assert fitness(make_log([[("d", 0), ("a", 10)]]), fp) == 0.0
        half = make_log(
            [[("a", 0), ("b", 10), ("d", 20)], [("d", 0), ("c", 5), ("a", 10)]]
        )
        assert fitness(half, fp) == 0.5

    def test_empty_log_is_perfectly_fitting(self):
        fp = footprint(dfg_from_log(textbook_log()))
        assert fitness(EventLog(), fp) == 1.0


class TestKpis:
    def test_throughput_per_case(self):
        k = kpis(textbook_log())
        assert dict(k.throughput) == {"case:0": 30, "case:1": 30, "case:2": 20}
        assert k.throughput_mean() == pytest.approx(80 / 3)

    def test_service_and_waiting_split(self):
        k = kpis(make_log([[("a", 0), ("b", 10)]]), activity_durations={"a": 4.0})
        assert k.activity_stats["a"].service_mean == 4.0
        assert k.activity_stats["a"].waiting_mean == 0.0
        assert k.activity_stats["b"].waiting_mean == 6.0

    def test_service_capped_at_gap(self):
        k = kpis(make_log([[("a", 0), ("b", 10)]]), activity_durations={"a": 15.0})
        assert k.activity_stats["a"].service_mean == 10.0
        assert k.activity_stats["b"].waiting_mean == 0.0

    def test_observation_counts(self):
        k = kpis(textbook_log())
        assert k.activity_stats["a"].observations == 3
        assert k.activity_stats["e"].observations == 1

    def test_fitness_passthrough(self):
        k = kpis(textbook_log(), fitness_value=0.75)
        assert k.fitness == 0.75


ACTIVITY_NAMES = st.sampled_from(["a", "b", "c", "d", "e", "f"])


@st.composite
def random_trace_sets(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    traces = []
    for _ in range(n):
        length = draw(st.integers(min_value=1, max_value=5))
        acts = draw(
            st.lists(ACTIVITY_NAMES, min_size=length, max_size=length, unique=True)
        )
        traces.append([(a, i * 10) for i, a in enumerate(acts)])
    return traces


class TestMergeProperty:
    @given(random_trace_sets())
    def test_distributed_equals_central(self, traces):
        central = dfg_from_log(make_log(traces))
        parts = []
        for ci, acts in enumerate(traces):
            parts.append(
                dfg_from_log(
                    EventLog.from_events(
                        [
                            HighLevelEvent(
                                f"e{ci}-{ai}", float(t), act, f"case:{ci}", 1
                            )
                            for ai, (act, t) in enumerate(acts)
                        ]
                    )
                )
            )
        assert merge_dfg(parts) == central

    @given(random_trace_sets())
    def test_log_fits_its_own_footprint(self, traces):
        log = make_log(traces)
        fp = footprint(dfg_from_log(log))
        assert fitness(log, fp) == 1.0
