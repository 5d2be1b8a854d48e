"""모의 클러스터: 정점 분할, covering set 셔플, 송신자 greedy 스트리밍, 수신자 버킷 집계.

rank 0은 수신자(정점 소유 없음), rank 1..m-1은 송신자다.
송신자와 수신자는 순서가 보장되는 버퍼 채널로만 통신한다.
"""

from __future__ import annotations

import multiprocessing
import queue
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from config import TRANSPORT_PROCESS
from core.errors import ConfigurationError, IntegrityError, ParameterError, ProtocolError, TransportError
from core.graph import Graph
from core.max_cover import Solution, StreamingSketch, iter_greedy, truncated_count
from core.rng import stream, uniform_by_index
from core.run_config import RunConfig
from core.sampling import CoveringSet, SampleStore, build_covering_sets
from core.wire import SeedMessage, TerminationMessage, decode_message, encode_message, split_frames
from utils.log_utils import get_logger

logger = get_logger("runtime")

RECEIVER_RANK = 0


# ────────────────────────────────────────
# 정점 분할
# ────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class PartitionAssignment:
    m: int
    owner: np.ndarray               # 정점별 송신자 rank (1..m-1)
    seed: int

    def vertices_of(self, rank: int) -> np.ndarray:
        return np.nonzero(self.owner == rank)[0]

    def counts(self) -> dict[int, int]:
        counts = np.bincount(self.owner, minlength=self.m)
        return {rank: int(counts[rank]) for rank in range(1, self.m)}


def partition_vertices(n: int, m: int, seed: int) -> PartitionAssignment:
    """정점마다 독립·균등하게 송신자 rank [1, m-1]을 배정. (seed, 정점 id)의 순수 함수."""
    if m < 2:
        raise ConfigurationError(f"워커가 2개 이상 필요 (송신자 1 + 수신자): m={m}")
    u = uniform_by_index(seed, np.arange(n, dtype=np.int64))
    owner = 1 + np.minimum((u * (m - 1)).astype(np.int64), m - 2)
    return PartitionAssignment(m=m, owner=owner, seed=seed)


def sample_slice(rank: int, m: int, theta: int) -> tuple[int, int]:
    """rank p의 샘플 id 구간 [p·θ/m, (p+1)·θ/m)."""
    return rank * theta // m, (rank + 1) * theta // m


# ────────────────────────────────────────
# all-to-all 셔플
# ────────────────────────────────────────

def shuffle_covering_sets(local_sets: dict[int, dict[int, CoveringSet]],
                          assignment: PartitionAssignment) -> dict[int, dict[int, CoveringSet]]:
    """각 rank의 부분 𝒮ₚ(u)를 모아 소유자에게 완전한 𝒮(u)를 만든다.

    rank 0도 자기 샘플의 부분 집합을 보내지만 받는 것은 없다.

    Returns:
        {송신자 rank: {정점: CoveringSet}}: 소유 정점 전부 포함 (샘플에 없으면 빈 목록)
    """
    seen_ids = [
        np.unique(np.concatenate([cs.samples for cs in sets.values()]))
        for sets in local_sets.values() if sets
    ]
    if seen_ids:
        all_ids = np.concatenate(seen_ids)
        if len(np.unique(all_ids)) != len(all_ids):
            raise IntegrityError("rank 간 샘플 id 구간이 겹침")

    parts: dict[int, list[np.ndarray]] = {}
    for rank in sorted(local_sets):
        for v, cs in local_sets[rank].items():
            parts.setdefault(v, []).append(cs.samples)

    empty = np.empty(0, dtype=np.int64)
    merged: dict[int, dict[int, CoveringSet]] = {}
    for rank in range(1, assignment.m):
        owned = {}
        for v in assignment.vertices_of(rank).tolist():
            arrays = parts.get(v)
            samples = np.sort(np.concatenate(arrays)) if arrays else empty
            owned[v] = CoveringSet(v, samples)
        merged[rank] = owned
    return merged


# ────────────────────────────────────────
# 채널
# ────────────────────────────────────────

_CLOSED = object()


class Channel:
    """송신자 → 수신자 단방향 버퍼 채널. send는 절대 막히지 않는다."""

    def __init__(self, rank: int, sink: "queue.Queue"):
        self.rank = rank
        self._sink = sink
        self._closed = False
        self._lock = threading.Lock()
        self.sent = 0

    @property
    def closed(self) -> bool:
        return self._closed

    def send(self, message) -> None:
        with self._lock:
            if self._closed:
                raise TransportError(f"rank {self.rank}: 닫힌 채널에 전송 시도")
            self._sink.put((self.rank, message))
            self.sent += 1

    def close(self) -> None:
        with self._lock:
            if not self._closed:
                self._closed = True
                self._sink.put((self.rank, _CLOSED))


class Mailbox:
    """여러 송신자 채널이 공유하는 수신함. 송신자별 FIFO는 보존된다."""

    def __init__(self, ranks: Iterable[int]):
        self.ranks = sorted(ranks)
        self._sink: queue.Queue = queue.Queue()
        self.channels = {rank: Channel(rank, self._sink) for rank in self.ranks}

    def channel(self, rank: int) -> Channel:
        return self.channels[rank]

    def events(self) -> Iterator[tuple[int, object]]:
        """모든 채널이 닫힐 때까지 (rank, 메시지 | 닫힘) 이벤트."""
        open_ranks = set(self.ranks)
        while open_ranks:
            rank, message = self._sink.get()
            if message is _CLOSED:
                open_ranks.discard(rank)
            yield rank, message


class RecordingChannel:
    """결정적 모드용: 메시지를 목록에 쌓아 두었다가 스케줄러가 섞어 내보낸다."""

    def __init__(self, rank: int):
        self.rank = rank
        self.messages: list = []
        self.closed = False

    @property
    def sent(self) -> int:
        return len(self.messages)

    def send(self, message) -> None:
        if self.closed:
            raise TransportError(f"rank {self.rank}: 닫힌 채널에 전송 시도")
        self.messages.append(message)

    def close(self) -> None:
        self.closed = True


def interleave(channels: dict[int, RecordingChannel], seed: int) -> Iterator[tuple[int, object]]:
    """시드 고정 스케줄러: 매 단계 남은 송신자 중 하나를 골라 다음 메시지를 내보낸다."""
    rng = stream(seed, 0)
    pending = {rank: deque(ch.messages) for rank, ch in channels.items()}
    active = sorted(pending)
    while active:
        rank = active[int(rng.integers(len(active)))]
        if pending[rank]:
            yield rank, pending[rank].popleft()
        if not pending[rank]:
            active.remove(rank)
            if channels[rank].closed:
                yield rank, _CLOSED


# ────────────────────────────────────────
# 송신자
# ────────────────────────────────────────

def run_sender(rank: int, owned_sets: dict[int, CoveringSet], universe_size: int, k: int,
               alpha: float, outbox) -> Solution:
    """로컬 lazy greedy를 돌리며 시드가 정해지는 즉시 전송한다.

    ⌈α·k⌉개를 보낸 뒤에는 전송만 멈추고 k개까지 계속 선택한다.
    마지막에 전체 로컬 해를 담은 종료 메시지를 보낸다.
    """
    limit = truncated_count(k, alpha)
    seeds, marginals = [], []
    try:
        for order, (v, gain) in enumerate(iter_greedy(universe_size, owned_sets, k)):
            if order < limit:
                outbox.send(SeedMessage(rank, order, v, owned_sets[v]))
            seeds.append(v)
            marginals.append(gain)
        solution = Solution(tuple(seeds), tuple(marginals), int(sum(marginals)),
                            universe_size, k, f"sender {rank}")
        outbox.send(TerminationMessage(rank, solution))
    finally:
        outbox.close()
    logger.debug("rank %d: 시드 %d개 선택, %d개 전송", rank, len(seeds), min(limit, len(seeds)))
    return solution


# ────────────────────────────────────────
# 수신자
# ────────────────────────────────────────

class SharedLog:
    """추가 전용 로그. 읽는 쪽은 게시 플래그가 선 항목만 소비한다."""

    def __init__(self):
        self._entries: list[SeedMessage] = []
        self._published: list[bool] = []
        self._closed = False
        self._cond = threading.Condition()

    def __len__(self) -> int:
        return len(self._entries)

    def append(self, entry: SeedMessage) -> None:
        with self._cond:
            self._entries.append(entry)
            self._published.append(True)
            self._cond.notify_all()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    def wait(self, index: int) -> SeedMessage | None:
        """index 항목이 게시될 때까지 대기. 로그가 닫히고 더 없으면 None."""
        with self._cond:
            while index >= len(self._entries) and not self._closed:
                self._cond.wait()
            if index < len(self._entries) and self._published[index]:
                return self._entries[index]
            return None


def _bucket_ranges(count: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, count))
    step = -(-count // workers)
    return [(lo, min(lo + step, count)) for lo in range(0, count, step)]


@dataclass
class ReceiverResult:
    global_solution: Solution
    reports: dict[int, Solution]
    sketch: StreamingSketch | None
    diagnostics: dict = field(default_factory=dict)


def run_receiver(events: Iterable[tuple[int, object]], senders: Iterable[int], k: int,
                 delta: float, universe_size: int, bucket_workers: int = 1,
                 buckets: int | None = None) -> ReceiverResult:
    """수신자: 1단계: 송신자마다 첫 메시지를 모아 l을 정하고 스케치 생성.
    2단계: 통신 역할이 로그에 추가하고, 버킷 워커들이 자기 버킷 구간에 적용.

    Returns:
        ReceiverResult (전역 해, 송신자별 로컬 해, 진단 정보)
    """
    senders = sorted(senders)
    it = iter(events)
    held: list[SeedMessage] = []
    first_gain: dict[int, int] = {}
    reports: dict[int, Solution] = {}
    last_order: dict[int, int] = {}
    received = {rank: 0 for rank in senders}
    closed: set[int] = set()

    def _accept(rank: int, message) -> SeedMessage | None:
        if rank not in received:
            raise ProtocolError("알 수 없는 송신자", rank=rank)
        if message is _CLOSED:
            if rank not in reports:
                raise ProtocolError("종료 메시지 없이 채널이 닫힘", rank=rank)
            closed.add(rank)
            return None
        if rank in reports:
            raise ProtocolError("종료 후 메시지 수신", rank=rank)
        received[rank] += 1
        if isinstance(message, TerminationMessage):
            reports[rank] = message.local_solution
            first_gain.setdefault(rank, 0)
            return None
        if message.order_index <= last_order.get(rank, -1):
            raise ProtocolError(f"순서 위반: order_index {message.order_index}", rank=rank)
        last_order[rank] = message.order_index
        # 첫 시드의 이득 = covering set 전체 크기
        first_gain.setdefault(rank, len(message.covering))
        return message

    # ── 1단계 ──
    for rank, message in it:
        entry = _accept(rank, message)
        if entry is not None:
            held.append(entry)
        if len(first_gain) == len(senders):
            break
    else:
        if len(first_gain) < len(senders):
            missing = [r for r in senders if r not in first_gain]
            raise ProtocolError("첫 메시지 없이 수신 종료", rank=missing[0])

    lower_bound = max([g for g in first_gain.values() if g > 0], default=1)
    sketch = StreamingSketch(k, delta, lower_bound, universe_size, buckets)
    log = SharedLog()
    ranges = _bucket_ranges(len(sketch), bucket_workers)
    logger.debug("수신자: l=%d, 버킷 %d개, 워커 %d개", lower_bound, len(sketch), len(ranges))

    def _bucket_worker(lo: int, hi: int) -> int:
        index = 0
        while (entry := log.wait(index)) is not None:
            sketch.insert_into(entry.seed, entry.covering, lo, hi)
            index += 1
        return index

    def _publish(entry: SeedMessage) -> None:
        log.append(entry)
        sketch.processed_count += 1
        if len(ranges) == 1:
            sketch.insert_into(entry.seed, entry.covering, *ranges[0])

    # ── 2단계 ──
    pool = ThreadPoolExecutor(max_workers=len(ranges)) if len(ranges) > 1 else None
    futures = [pool.submit(_bucket_worker, lo, hi) for lo, hi in ranges] if pool else []
    try:
        for entry in held:
            _publish(entry)
        for rank, message in it:
            entry = _accept(rank, message)
            if entry is not None:
                _publish(entry)
        for rank in senders:
            if rank not in reports:
                raise ProtocolError("종료 메시지 없이 수신 종료", rank=rank)
    finally:
        log.close()
        if pool:
            for fut in futures:
                fut.result()
            pool.shutdown()

    global_solution = sketch.finalize()
    diagnostics = {
        "lower_bound": lower_bound,
        "buckets": len(sketch),
        "bucket_workers": len(ranges),
        "messages_received": received,
        "log_length": len(log),
        "bucket_occupancy": sketch.occupancy(),
        "duplicates_skipped": sketch.duplicate_count(),
    }
    return ReceiverResult(global_solution, dict(sorted(reports.items())), sketch, diagnostics)


def select_final(global_solution: Solution | None, sender_reports) -> Solution:
    """전역 해와 송신자 로컬 해 중 커버 최대. 동점이면 전역, 다음은 작은 rank."""
    if isinstance(sender_reports, dict):
        sender_reports = [sender_reports[r] for r in sorted(sender_reports)]
    candidates = ([global_solution] if global_solution is not None else []) + list(sender_reports)
    if not candidates:
        raise ParameterError("비교할 해가 없음")
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.coverage > best.coverage:
            best = cand
    return best


# ────────────────────────────────────────
# 프로세스 전송 (파이프 바이트 스트림)
# ────────────────────────────────────────

class _PipeChannel:
    def __init__(self, rank: int, conn):
        self.rank = rank
        self._conn = conn
        self.closed = False

    def send(self, message) -> None:
        if self.closed:
            raise TransportError(f"rank {self.rank}: 닫힌 채널에 전송 시도")
        self._conn.send_bytes(encode_message(message))

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            self._conn.close()


def _sender_process(rank: int, owned: dict[int, np.ndarray], universe_size: int, k: int,
                    alpha: float, conn) -> None:
    sets = {v: CoveringSet(v, samples) for v, samples in owned.items()}
    run_sender(rank, sets, universe_size, k, alpha, _PipeChannel(rank, conn))


def _pump(reader, channel: Channel, universe_size: int, k: int) -> None:
    """파이프에서 프레임을 읽어 디코딩한 뒤 수신함 채널로 넘긴다."""
    buffer = b""
    try:
        while True:
            try:
                chunk = reader.recv_bytes()
            except EOFError:
                break
            frames, buffer = split_frames(buffer + chunk)
            for frame in frames:
                channel.send(decode_message(frame, universe_size, k))
    finally:
        reader.close()
        channel.close()


# ────────────────────────────────────────
# 라운드
# ────────────────────────────────────────

@dataclass
class RoundResult:
    solution: Solution
    global_solution: Solution
    sender_solutions: dict[int, Solution]
    universe_size: int
    timings: dict[str, float] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def distributed_select(local_sets: dict[int, dict[int, CoveringSet]], assignment: PartitionAssignment,
                       universe_size: int, k: int, config: RunConfig) -> RoundResult:
    """셔플 후 송신자와 수신자를 동시에 돌리고 최종 해를 고른다."""
    t0 = time.perf_counter()
    owned = shuffle_covering_sets(local_sets, assignment)
    t_shuffle = time.perf_counter() - t0

    senders = list(range(1, assignment.m))
    sender_time: dict[int, float] = {}
    sender_errors: dict[int, BaseException] = {}

    def _timed_sender(rank: int, outbox) -> Solution | None:
        start = time.perf_counter()
        try:
            return run_sender(rank, owned[rank], universe_size, k, config.alpha, outbox)
        except Exception as exc:
            sender_errors[rank] = exc
            logger.exception("rank %d 송신자 실패", rank)
            return None
        finally:
            sender_time[rank] = time.perf_counter() - start

    receive_kwargs = dict(
        senders=senders, k=k, delta=config.delta, universe_size=universe_size,
        bucket_workers=config.bucket_workers, buckets=config.bucket_override,
    )
    t0 = time.perf_counter()
    try:
        if config.deterministic:
            recorders = {rank: RecordingChannel(rank) for rank in senders}
            for rank in senders:
                _timed_sender(rank, recorders[rank])
            sent = {rank: ch.sent for rank, ch in recorders.items()}
            result = run_receiver(interleave(recorders, config.seeds.scheduler), **receive_kwargs)
        elif config.transport == TRANSPORT_PROCESS:
            result, sent = _receive_from_processes(owned, senders, universe_size, k, config,
                                                   receive_kwargs, sender_time)
        else:
            mailbox = Mailbox(senders)
            with ThreadPoolExecutor(max_workers=len(senders)) as pool:
                for rank in senders:
                    pool.submit(_timed_sender, rank, mailbox.channel(rank))
                result = run_receiver(mailbox.events(), **receive_kwargs)
            sent = {rank: mailbox.channel(rank).sent for rank in senders}
    except ProtocolError as err:
        cause = sender_errors.get(err.rank)
        if cause is not None:
            raise err from cause
        raise
    t_receive = time.perf_counter() - t0

    final = select_final(result.global_solution, result.reports)
    cuts = {
        rank: len(sol) - min(len(sol), truncated_count(k, config.alpha))
        for rank, sol in result.reports.items()
    }
    diagnostics = dict(result.diagnostics)
    diagnostics.update({
        "messages_sent": sent,
        "truncation_cuts": cuts,
        "partition_sizes": assignment.counts(),
        "final_origin": final.origin,
    })
    logger.info("라운드 선택: 전역 %d, 로컬 최대 %d → %s (%d)",
                result.global_solution.coverage,
                max((s.coverage for s in result.reports.values()), default=0),
                final.origin, final.coverage)
    return RoundResult(
        solution=final,
        global_solution=result.global_solution,
        sender_solutions=result.reports,
        universe_size=universe_size,
        timings={
            "shuffle": t_shuffle,
            "sender_select": max(sender_time.values(), default=0.0),
            "receiver_select": t_receive,
        },
        diagnostics=diagnostics,
    )


def _receive_from_processes(owned, senders, universe_size, k, config, receive_kwargs, sender_time):
    ctx = multiprocessing.get_context()
    mailbox = Mailbox(senders)
    procs, pumps = [], []
    start = time.perf_counter()
    for rank in senders:
        reader, writer = ctx.Pipe(duplex=False)
        plain = {v: cs.samples for v, cs in owned[rank].items()}
        proc = ctx.Process(target=_sender_process,
                           args=(rank, plain, universe_size, k, config.alpha, writer), daemon=True)
        proc.start()
        writer.close()
        pump = threading.Thread(target=_pump, args=(reader, mailbox.channel(rank), universe_size, k),
                                daemon=True)
        pump.start()
        procs.append(proc)
        pumps.append(pump)
    try:
        result = run_receiver(mailbox.events(), **receive_kwargs)
    finally:
        for proc in procs:
            proc.join()
        for pump in pumps:
            pump.join()
    elapsed = time.perf_counter() - start
    for rank in senders:
        sender_time[rank] = elapsed
    sent = {rank: mailbox.channel(rank).sent for rank in senders}
    return result, sent


def run_round(graph: Graph, model: str, theta_hat: int, k: int, m: int, config: RunConfig,
              store: SampleStore | None = None) -> RoundResult:
    """한 라운드. 모든 rank(수신자 포함)가 자기 id 구간의 샘플을 만든 뒤 distributed_select."""
    if m < 2:
        raise ConfigurationError(f"워커가 2개 이상 필요: m={m}")
    if theta_hat <= 0:
        empty = Solution(universe_size=0, budget=k, origin="global")
        return RoundResult(empty, empty, {}, 0)

    store = store or SampleStore(graph, model, config.seeds.sampling)
    t0 = time.perf_counter()
    local_sets = {}
    for rank in range(m):
        lo, hi = sample_slice(rank, m, theta_hat)
        local_sets[rank] = build_covering_sets(store.range(lo, hi))
    t_sampling = time.perf_counter() - t0

    assignment = partition_vertices(graph.n, m, config.seeds.partition)
    result = distributed_select(local_sets, assignment, theta_hat, k, config)
    result.timings["sampling"] = t_sampling
    return result
