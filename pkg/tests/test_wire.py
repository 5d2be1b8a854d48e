import struct

import pytest

from core.errors import ProtocolError
from core.max_cover import Solution
from core.sampling import CoveringSet
from core.wire import SeedMessage, TerminationMessage, decode_message, encode_message, split_frames


def test_seed_frame_carries_covering_set():
    frame = encode_message(SeedMessage(3, 7, 42, CoveringSet.of(42, [9, 1, 5])))
    decoded = decode_message(frame)
    assert (decoded.sender_rank, decoded.order_index, decoded.seed) == (3, 7, 42)
    assert decoded.covering.tolist() == [1, 5, 9]


def test_termination_frame_restores_local_solution():
    sol = Solution((4, 2), (6, 1), 7, 20, 5, "sender 2")
    decoded = decode_message(encode_message(TerminationMessage(2, sol)), universe_size=20, budget=5)
    assert decoded.local_solution == sol


def test_split_frames_keeps_partial_tail():
    a = encode_message(SeedMessage(1, 0, 0, CoveringSet.of(0, [0, 1])))
    b = encode_message(TerminationMessage(1, Solution((0,), (2,), 2)))
    frames, rest = split_frames(a + b[:5])
    assert frames == [a]
    assert rest == b[:5]
    frames, rest = split_frames(rest + b[5:])
    assert frames == [b] and rest == b""


def test_corrupt_frames_are_rejected():
    frame = encode_message(SeedMessage(1, 0, 0, CoveringSet.of(0, [0])))
    with pytest.raises(ProtocolError):
        decode_message(frame[:-1])
    with pytest.raises(ProtocolError):
        decode_message(frame[:4] + b"\x09" + frame[5:])
    with pytest.raises(ProtocolError):
        decode_message(b"\x01")


def _framed(body: bytes) -> bytes:
    return struct.pack("<I", len(body)) + body


@pytest.mark.parametrize("frame", [
    b"\x00\x00\x00\x00",                                    # 빈 본문
    _framed(b"\x01\x02\x00"),                               # seed 헤더 잘림
    _framed(struct.pack("<BIIII", 1, 1, 0, 0, 9)),         # id 9개 주장, 실제 0개
    _framed(struct.pack("<BIIII", 1, 1, 0, 0, 2) + b"\x00" * 4),
    _framed(struct.pack("<BII", 2, 1, 3)),                 # 종료 쌍 3개 주장, 실제 0개
])
def test_short_payloads_are_protocol_errors(frame):
    with pytest.raises(ProtocolError):
        decode_message(frame)
