"""Artifact cache: serialization, hash checks and recovery from corruption."""
import json

import pytest
from hypothesis import given, strategies as st

from h4algebra.artifacts import Artifacts
from h4algebra.cache import CacheCorrupted, CacheEntry, CacheStore, canonical_json, input_hash

json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=8),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=5), inner, max_size=4),
    max_leaves=12)


@given(json_values)
def test_entry_round_trip(payload):
    entry = CacheEntry("tau", "abc", payload)
    assert CacheEntry.parse(entry.serialize()) == entry


@given(json_values)
def test_canonical_json_is_stable(payload):
    text = canonical_json(payload)
    assert canonical_json(json.loads(text)) == text


def test_input_hash_depends_on_kind_and_inputs():
    assert input_hash("tau", {"a": 1}) != input_hash("group", {"a": 1})
    assert input_hash("tau", {"a": 1}) != input_hash("tau", {"a": 2})
    assert input_hash("tau", {"a": 1, "b": 2}) == input_hash("tau", {"b": 2, "a": 1})


def test_store_load_save(tmp_path):
    store = CacheStore(tmp_path)
    assert store.load("group", "h") is None
    store.save("group", "h", {"order": 1})
    assert store.load("group", "h") == {"order": 1}
    assert store.load("group", "other") is None


def test_tampered_body_is_detected(tmp_path):
    store = CacheStore(tmp_path)
    path = store.save("group", "h", {"order": 14400})
    path.write_text(path.read_text().replace("14400", "14401"))
    with pytest.raises(CacheCorrupted):
        store.load("group", "h")


def test_truncated_file_is_detected(tmp_path):
    store = CacheStore(tmp_path)
    path = store.save("group", "h", {"order": 14400})
    path.write_text(path.read_text().splitlines()[0])
    with pytest.raises(CacheCorrupted):
        store.load("group", "h")


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        CacheStore(tmp_path).path("spectrum")


def test_warm_cache_gives_identical_group(tmp_path):
    first = Artifacts(CacheStore(tmp_path)).group()
    warm = Artifacts(CacheStore(tmp_path))
    assert warm.group() == first
    assert warm.events == ["group: cache hit"]


def test_spot_identity_catches_consistent_corruption(tmp_path):
    store = CacheStore(tmp_path)
    art = Artifacts(store)
    good = art.group()
    ihash = art._hash("group")
    entry = CacheEntry.parse(store.path("group").read_text())
    payload = entry.payload
    payload["orbit_w1"][0] = ["7", "0", "0", "0"]  # rehashed, so only the spot identity can tell
    store.save("group", ihash, payload)
    with pytest.raises(CacheCorrupted):
        store.load("group", ihash, lambda p: False)
    again = Artifacts(store)
    assert again.group() == good
    assert any("corrupted" in e for e in again.events)
    assert Artifacts(store).group() == good  # the recomputed artifact was written back
