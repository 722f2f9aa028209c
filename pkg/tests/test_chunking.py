import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stegograph.chunking import Chunk, format_positions, merge_chunks, split_chunks
from stegograph.errors import ConfigurationError, CorruptionError, IncompletePayloadError, StegoError


def test_split_lengths():
    assert [len(c) for c in split_chunks(bytes(1300), 512)] == [512, 512, 276]
    assert [len(c) for c in split_chunks(bytes(512), 512)] == [512]


def test_split_numbers_positions_per_payload():
    chunks = split_chunks(bytes(10), 4, payload_id=3)
    assert [(c.payload_id, c.graph_position) for c in chunks] == [(3, 0), (3, 1), (3, 2)]


def test_split_rejects_empty_payload_and_bad_size():
    with pytest.raises(StegoError):
        split_chunks(b"", 512)
    with pytest.raises(ConfigurationError):
        split_chunks(b"abc", 0)


@settings(max_examples=200, deadline=None)
@given(st.binary(min_size=1, max_size=20000), st.integers(1, 4096))
def test_split_concatenation_oracle(data, size):
    chunks = split_chunks(data, size)
    assert b"".join(c.data for c in sorted(chunks, key=lambda c: c.graph_position)) == data
    assert len(chunks) == -(-len(data) // size)
    assert sum(len(c) for c in chunks) == len(data)
    assert all(len(c) == size for c in chunks[:-1])
    assert 1 <= len(chunks[-1]) <= size


def test_merge_sorts_by_position():
    chunks = [Chunk(0, 1, b"CD"), Chunk(0, 0, b"AB")]
    assert merge_chunks(chunks, 2) == b"ABCD"


def test_merge_reports_missing_positions():
    with pytest.raises(IncompletePayloadError) as info:
        merge_chunks([Chunk(0, 0, b"AB")], 2)
    assert info.value.missing == (1,)
    assert "1" in str(info.value)


def test_merge_conflicting_duplicate_is_corruption():
    with pytest.raises(CorruptionError):
        merge_chunks([Chunk(0, 0, b"AB"), Chunk(0, 0, b"XY")], 1)


def test_merge_tolerates_identical_duplicate():
    assert merge_chunks([Chunk(0, 0, b"AB"), Chunk(0, 0, b"AB")], 1) == b"AB"


def test_merge_rejects_mixed_payloads():
    with pytest.raises(StegoError):
        merge_chunks([Chunk(0, 0, b"A"), Chunk(1, 1, b"B")], 2)


@settings(max_examples=100, deadline=None)
@given(st.binary(min_size=1, max_size=5000), st.integers(1, 700), st.randoms(use_true_random=False))
def test_merge_inverts_shuffled_split(data, size, rnd):
    chunks = split_chunks(data, size)
    rnd.shuffle(chunks)
    assert merge_chunks(chunks, -(-len(data) // size)) == data


def test_chunk_invariants():
    with pytest.raises(ValueError):
        Chunk(0, 0, b"")
    with pytest.raises(ValueError):
        Chunk(-1, 0, b"x")


def test_format_positions():
    assert format_positions([0, 1, 2, 3, 7, 9, 10]) == "0-3, 7, 9-10"
    assert format_positions([5]) == "5"
    assert format_positions([]) == ""
