import networkx as nx
import numpy as np
import pytest

from core.errors import ConfigurationError, IntegrityError, ParameterError, ProtocolError, TransportError
from core.max_cover import Solution, brute_force_max_cover, lazy_greedy_max_cover
from core.run_config import SeedConfig
from core.runtime import (
    _CLOSED, Mailbox, RecordingChannel, distributed_select, interleave, partition_vertices,
    run_receiver, run_round, run_sender, sample_slice, select_final, shuffle_covering_sets,
)
from core.sampling import CoveringSet, SampleStore, build_covering_sets
from core.wire import SeedMessage, TerminationMessage
from tests.helpers import covering_from_lists, from_networkx, random_covering


def _random_graph(n: int, edges: int, seed: int, p: float = 0.2):
    return from_networkx(nx.gnm_random_graph(n, edges, seed=seed, directed=True), "ic", p=p)


def _local_sets(store: SampleStore, m: int, theta: int) -> dict[int, dict[int, CoveringSet]]:
    return {rank: build_covering_sets(store.range(*sample_slice(rank, m, theta)))
            for rank in range(m)}


def _sequential_coverage(graph, config, theta: int, k: int) -> int:
    store = SampleStore(graph, config.model, config.seeds.sampling)
    return lazy_greedy_max_cover(theta, build_covering_sets(store.ensure(theta)), k).coverage


# ── 정점 분할 ──

def test_two_workers_put_every_vertex_on_rank_one():
    assignment = partition_vertices(10, 2, seed=3)
    assert assignment.owner.tolist() == [1] * 10
    assert assignment.counts() == {1: 10}


def test_partition_needs_two_workers():
    with pytest.raises(ConfigurationError):
        partition_vertices(10, 1, seed=0)


def test_partition_is_deterministic_and_in_range():
    a = partition_vertices(500, 5, seed=8)
    b = partition_vertices(500, 5, seed=8)
    assert np.array_equal(a.owner, b.owner)
    assert a.owner.min() >= 1 and a.owner.max() <= 4
    assert sum(a.counts().values()) == 500


def test_partition_is_uniform():
    n, m = 100_000, 9
    counts = partition_vertices(n, m, seed=12).counts()
    p = 1 / (m - 1)
    sigma = np.sqrt(n * p * (1 - p))
    assert all(abs(c - n * p) <= 4 * sigma for c in counts.values())


def test_sample_slices_tile_the_universe():
    for m in (2, 3, 7):
        bounds = [sample_slice(rank, m, 100) for rank in range(m)]
        assert bounds[0][0] == 0 and bounds[-1][1] == 100
        assert all(hi == lo for (_, hi), (lo, _) in zip(bounds, bounds[1:]))


# ── 셔플 ──

def test_shuffle_merges_partial_sets():
    local = {0: covering_from_lists({0: [0]}), 1: covering_from_lists({0: [2], 1: [3]})}
    owned = shuffle_covering_sets(local, partition_vertices(3, 2, seed=0))
    assert owned[1][0].tolist() == [0, 2]
    assert owned[1][1].tolist() == [3]
    assert owned[1][2].tolist() == []


def test_shuffle_rejects_overlapping_ids():
    local = {0: covering_from_lists({0: [0]}), 1: covering_from_lists({1: [0]})}
    with pytest.raises(IntegrityError):
        shuffle_covering_sets(local, partition_vertices(2, 2, seed=0))


@pytest.mark.parametrize("m", [2, 4, 8])
def test_shuffle_reconstructs_full_covering_sets(m):
    g = _random_graph(60, 240, seed=m)
    store = SampleStore(g, "ic", 5)
    theta = 300
    owned = shuffle_covering_sets(_local_sets(store, m, theta), partition_vertices(g.n, m, seed=1))
    reference = build_covering_sets(store.ensure(theta))
    merged = {v: cs for sets in owned.values() for v, cs in sets.items()}
    assert set(merged) == set(range(g.n))
    for v in range(g.n):
        expected = reference[v].tolist() if v in reference else []
        assert merged[v].tolist() == expected
    union = np.unique(np.concatenate([cs.samples for cs in merged.values()]))
    assert union.tolist() == list(range(theta))


# ── 송신자 ──

def test_sender_streams_truncated_prefix_then_reports(abc_sets):
    outbox = RecordingChannel(1)
    solution = run_sender(1, abc_sets, 3, 2, 0.5, outbox)
    assert solution.seeds == (0, 1)
    assert outbox.closed
    seed_msgs = [msg for msg in outbox.messages if isinstance(msg, SeedMessage)]
    assert [(msg.order_index, msg.seed) for msg in seed_msgs] == [(0, 0)]
    assert seed_msgs[0].covering.tolist() == [0, 1]
    assert isinstance(outbox.messages[-1], TerminationMessage)
    assert outbox.messages[-1].local_solution == solution


def test_sender_with_nothing_to_offer_only_terminates():
    outbox = RecordingChannel(2)
    solution = run_sender(2, {4: CoveringSet.of(4, [])}, 5, 3, 1.0, outbox)
    assert solution.seeds == ()
    assert len(outbox.messages) == 1
    assert isinstance(outbox.messages[0], TerminationMessage)


def test_sender_on_closed_channel_fails(abc_sets):
    outbox = RecordingChannel(1)
    outbox.close()
    with pytest.raises(TransportError):
        run_sender(1, abc_sets, 3, 2, 1.0, outbox)


def test_mailbox_preserves_per_sender_order(abc_sets):
    mailbox = Mailbox([1, 2])
    run_sender(1, abc_sets, 3, 2, 1.0, mailbox.channel(1))
    run_sender(2, covering_from_lists({5: [0, 1, 2]}), 3, 2, 1.0, mailbox.channel(2))
    events = list(mailbox.events())
    from_one = [msg for rank, msg in events if rank == 1 and isinstance(msg, SeedMessage)]
    assert [msg.order_index for msg in from_one] == [0, 1]
    with pytest.raises(TransportError):
        mailbox.channel(1).send(None)


# ── 수신자 ──

def _seed(rank, order, vertex, ids):
    return SeedMessage(rank, order, vertex, CoveringSet.of(vertex, ids))


def _term(rank, seeds=(), marginals=()):
    return TerminationMessage(rank, Solution(tuple(seeds), tuple(marginals), sum(marginals), 4, 2,
                                             f"sender {rank}"))


def test_receiver_builds_global_solution():
    events = [
        (1, _seed(1, 0, 0, [0, 1])), (2, _seed(2, 0, 3, [2, 3])),
        (1, _term(1, (0,), (2,))), (1, _CLOSED),
        (2, _term(2, (3,), (2,))), (2, _CLOSED),
    ]
    result = run_receiver(events, [1, 2], k=2, delta=0.1, universe_size=4)
    assert result.global_solution.coverage == 4
    assert set(result.global_solution.seeds) == {0, 3}
    assert result.diagnostics["lower_bound"] == 2
    assert result.diagnostics["messages_received"] == {1: 2, 2: 2}
    assert result.diagnostics["log_length"] == 2
    assert sorted(result.reports) == [1, 2]


def test_receiver_with_only_terminations_uses_unit_lower_bound():
    events = [(1, _term(1)), (1, _CLOSED)]
    result = run_receiver(events, [1], k=2, delta=0.1, universe_size=4)
    assert result.diagnostics["lower_bound"] == 1
    assert result.global_solution.coverage == 0


@pytest.mark.parametrize("events, rank", [
    ([(5, _seed(5, 0, 0, [0]))], 5),
    ([(1, _CLOSED)], 1),
    ([(1, _term(1)), (1, _seed(1, 0, 0, [0]))], 1),
    ([(1, _seed(1, 1, 0, [0])), (1, _seed(1, 0, 2, [1]))], 1),
    ([], 1),
    ([(1, _seed(1, 0, 0, [0]))], 1),
])
def test_receiver_protocol_violations(events, rank):
    with pytest.raises(ProtocolError) as exc:
        run_receiver(events, [1], k=2, delta=0.1, universe_size=4)
    assert exc.value.rank == rank


# ── 최종 선택 ──

def test_select_final_prefers_global_on_tie():
    glob = Solution((1,), (3,), 3, 5, 1, "global")
    local = Solution((2,), (3,), 3, 5, 1, "sender 1")
    assert select_final(glob, {1: local}).origin == "global"


def test_select_final_prefers_lowest_rank_among_senders():
    glob = Solution((1,), (2,), 2, 5, 1, "global")
    reports = {2: Solution((3,), (4,), 4, 5, 1, "sender 2"), 1: Solution((4,), (4,), 4, 5, 1, "sender 1")}
    assert select_final(glob, reports).origin == "sender 1"


def test_select_final_needs_a_candidate():
    with pytest.raises(ParameterError):
        select_final(None, [])


# ── 라운드 ──

def test_zero_samples_give_empty_round(make_config):
    g = _random_graph(10, 20, seed=0)
    result = run_round(g, "ic", 0, 3, 2, make_config())
    assert result.solution.seeds == ()
    assert result.universe_size == 0


def test_round_needs_two_workers(make_config):
    with pytest.raises(ConfigurationError):
        run_round(_random_graph(10, 20, seed=0), "ic", 10, 3, 1, make_config(mode="sequential", m=1))


def test_final_dominates_every_candidate(make_config):
    g = _random_graph(16, 48, seed=4, p=0.3)
    config = make_config(m=4)
    result = run_round(g, "ic", 64, 3, 4, config)
    assert result.solution.coverage >= result.global_solution.coverage
    assert all(result.solution.coverage >= s.coverage for s in result.sender_solutions.values())
    assert result.universe_size == 64
    assert set(result.timings) >= {"sampling", "shuffle", "sender_select", "receiver_select"}


def test_two_workers_match_sequential_greedy(make_config):
    for seed in range(20):
        g = _random_graph(40, 160, seed=seed)
        config = make_config(m=2, seeds=SeedConfig.from_master(seed))
        result = run_round(g, "ic", 200, 3, 2, config)
        assert result.solution.coverage == _sequential_coverage(g, config, 200, 3)


def test_expected_quality_over_partitions(make_config):
    g = _random_graph(16, 64, seed=9, p=0.3)
    theta, k, m = 64, 3, 5
    store = SampleStore(g, "ic", 2)
    local = _local_sets(store, m, theta)
    opt = brute_force_max_cover(theta, build_covering_sets(store.ensure(theta)), k).coverage
    coverages = []
    for seed in range(50):
        config = make_config(m=m, seeds=SeedConfig.from_master(seed))
        assignment = partition_vertices(g.n, m, seed)
        coverages.append(distributed_select(local, assignment, theta, k, config).solution.coverage)
    ratio = (1 - np.exp(-1)) * (0.5 - 0.077) / ((1 - np.exp(-1)) + (0.5 - 0.077))
    assert np.mean(coverages) >= ratio * opt


def test_sender_failure_is_chained(make_config):
    local = {0: {}, 1: covering_from_lists({0: [7]})}
    with pytest.raises(ProtocolError) as exc:
        distributed_select(local, partition_vertices(1, 2, seed=0), 2, 1, make_config())
    assert isinstance(exc.value.__cause__, ParameterError)


# ── 스케줄 퍼징 ──

def test_receiver_is_consistent_under_any_interleaving(rng):
    universe, sets = random_covering(rng, 18, 60, density=0.15)
    owners = rng.integers(1, 4, size=len(sets))
    recorders = {}
    for rank in (1, 2, 3):
        owned = {v: cs for v, cs in sets.items() if owners[v] == rank}
        recorders[rank] = RecordingChannel(rank)
        run_sender(rank, owned, universe, 4, 1.0, recorders[rank])
    seed_messages = sum(isinstance(msg, SeedMessage) for ch in recorders.values() for msg in ch.messages)

    for schedule in range(100):
        result = run_receiver(interleave(recorders, schedule), [1, 2, 3], k=4, delta=0.1,
                              universe_size=universe)
        sketch = result.sketch
        assert sketch.applied_counts() == [seed_messages] * len(sketch)
        assert sketch.processed_count == seed_messages
        for b, bucket in enumerate(sketch.buckets):
            assert sketch.recount(b) == bucket.covered_count
        final = select_final(result.global_solution, result.reports)
        assert all(final.coverage >= s.coverage for s in result.reports.values())
        assert final.coverage >= result.global_solution.coverage

        parallel = run_receiver(interleave(recorders, schedule), [1, 2, 3], k=4, delta=0.1,
                                universe_size=universe, bucket_workers=3)
        assert parallel.global_solution == result.global_solution
        assert parallel.diagnostics["bucket_occupancy"] == result.diagnostics["bucket_occupancy"]


# ── 전송 방식 ──

@pytest.mark.parametrize("transport", ["thread", "process"])
def test_live_transports_match_deterministic_run(make_config, transport):
    g = _random_graph(30, 120, seed=3)
    theta = 150
    store = SampleStore(g, "ic", 4)
    local = _local_sets(store, 2, theta)
    assignment = partition_vertices(g.n, 2, seed=1)
    expected = distributed_select(local, assignment, theta, 3, make_config())
    live = distributed_select(local, assignment, theta, 3,
                              make_config(deterministic=False, transport=transport))
    assert live.solution.coverage == expected.solution.coverage
    assert live.global_solution.seeds == expected.global_solution.seeds
    assert live.diagnostics["messages_sent"] == expected.diagnostics["messages_sent"]


def test_threaded_cluster_with_many_senders(make_config):
    g = _random_graph(50, 200, seed=6)
    theta = 200
    store = SampleStore(g, "ic", 4)
    local = _local_sets(store, 5, theta)
    result = distributed_select(local, partition_vertices(g.n, 5, seed=2), theta, 4,
                                make_config(m=5, deterministic=False, bucket_workers=2))
    assert sorted(result.sender_solutions) == [1, 2, 3, 4]
    assert all(result.solution.coverage >= s.coverage for s in result.sender_solutions.values())
    assert result.diagnostics["bucket_workers"] == 2
