"""메시지 와이어 포맷: 길이 접두 프레임 (리틀엔디언).

kind 1 (seed):      u8 kind | u32 sender_rank | u32 order_index | u32 seed_vertex
                    | u32 covering_len | u32[] sample_ids
kind 2 (terminate): u8 kind | u32 sender_rank | u32 count | (u32 vertex, u64 marginal)*count
프레임 앞에는 u32 본문 길이가 붙는다.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from core.errors import ProtocolError
from core.max_cover import Solution
from core.sampling import CoveringSet

KIND_SEED = 1
KIND_TERMINATE = 2

_LEN = struct.Struct("<I")
_SEED_HEAD = struct.Struct("<BIIII")
_TERM_HEAD = struct.Struct("<BII")
_PAIR = np.dtype([("vertex", "<u4"), ("marginal", "<u8")])


@dataclass(frozen=True)
class SeedMessage:
    sender_rank: int
    order_index: int
    seed: int
    covering: CoveringSet


@dataclass(frozen=True)
class TerminationMessage:
    sender_rank: int
    local_solution: Solution


Message = SeedMessage | TerminationMessage


def encode_message(message: Message) -> bytes:
    """메시지 → 길이 접두 프레임."""
    if isinstance(message, SeedMessage):
        samples = message.covering.samples.astype("<u4")
        body = _SEED_HEAD.pack(KIND_SEED, message.sender_rank, message.order_index,
                               message.seed, len(samples)) + samples.tobytes()
    else:
        sol = message.local_solution
        pairs = np.zeros(len(sol.seeds), dtype=_PAIR)
        pairs["vertex"] = sol.seeds
        pairs["marginal"] = sol.marginals
        body = _TERM_HEAD.pack(KIND_TERMINATE, message.sender_rank, len(sol.seeds)) + pairs.tobytes()
    return _LEN.pack(len(body)) + body


def _need(body: bytes, head: int, count: int, item: int) -> None:
    if len(body) < head + count * item:
        raise ProtocolError(f"프레임 본문 부족: {len(body)}바이트, 필요 {head + count * item}")


def decode_message(frame: bytes, universe_size: int = 0, budget: int = 0) -> Message:
    """프레임 → 메시지. 종료 메시지의 Solution에는 universe_size/budget을 채운다."""
    if len(frame) < _LEN.size:
        raise ProtocolError("프레임이 너무 짧음")
    (length,) = _LEN.unpack_from(frame)
    body = frame[_LEN.size:]
    if len(body) != length:
        raise ProtocolError(f"프레임 길이 불일치: 헤더 {length}, 실제 {len(body)}")
    if not body:
        raise ProtocolError("빈 프레임 본문")
    kind = body[0]
    if kind == KIND_SEED:
        _need(body, _SEED_HEAD.size, 0, 0)
        _, rank, order, seed, count = _SEED_HEAD.unpack_from(body)
        _need(body, _SEED_HEAD.size, count, 4)
        samples = np.frombuffer(body, dtype="<u4", count=count, offset=_SEED_HEAD.size)
        return SeedMessage(rank, order, seed, CoveringSet(seed, samples.astype(np.int64)))
    if kind == KIND_TERMINATE:
        _need(body, _TERM_HEAD.size, 0, 0)
        _, rank, count = _TERM_HEAD.unpack_from(body)
        _need(body, _TERM_HEAD.size, count, _PAIR.itemsize)
        pairs = np.frombuffer(body, dtype=_PAIR, count=count, offset=_TERM_HEAD.size)
        marginals = tuple(int(x) for x in pairs["marginal"])
        solution = Solution(
            seeds=tuple(int(x) for x in pairs["vertex"]), marginals=marginals,
            coverage=sum(marginals), universe_size=universe_size, budget=budget,
            origin=f"sender {rank}",
        )
        return TerminationMessage(rank, solution)
    raise ProtocolError(f"알 수 없는 프레임 종류: {kind}")


def split_frames(buffer: bytes) -> tuple[list[bytes], bytes]:
    """바이트 스트림에서 완성된 프레임들과 남은 꼬리를 분리."""
    frames = []
    pos = 0
    while len(buffer) - pos >= _LEN.size:
        (length,) = _LEN.unpack_from(buffer, pos)
        end = pos + _LEN.size + length
        if end > len(buffer):
            break
        frames.append(buffer[pos:end])
        pos = end
    return frames, buffer[pos:]
