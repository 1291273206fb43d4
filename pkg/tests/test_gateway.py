from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hearth import vectors
from hearth.diarization import Role, SegmentEmbedding, SpeakerRegistry
from hearth.gateway import (
    CorpusSearchClient,
    EgressGate,
    EmptyQuery,
    PiiCategory,
    PiiLexicon,
    RedactedQuery,
    anonymize_query,
    deanonymize_text,
    web_search,
)
from hearth.memory import HashEmbeddingProvider, MemoryStore, Source, VectorBase, BaseKind

T0 = datetime(2026, 3, 1, 12, 0)
D = 64


def registry_with(*names):
    rng = np.random.default_rng(0)
    registry = SpeakerRegistry(D)
    roles = [Role.OWNER] + [Role.GUEST] * 10
    for name, role in zip(names, roles):
        v = vectors.random_unit(rng, D)
        registry.enroll(name, role, [SegmentEmbedding(v, 0, 1, "s")])
    return registry


class TestAnonymize:
    def test_clean_text_unchanged(self):
        rq = anonymize_query("weather in Paris", registry_with())
        assert rq.text == "weather in Paris"
        assert rq.map.entries == ()

    def test_registered_name_redacted(self):
        rq = anonymize_query("medication for John Smith", registry_with("John Smith"))
        assert rq.text == "medication for ⟨PERSON_1⟩"
        assert rq.map.entries[0].original == "John Smith"
        assert rq.map.entries[0].category is PiiCategory.PERSON

    def test_longest_match_first(self):
        registry = registry_with("John", "John Smith")
        rq = anonymize_query("ask John Smith about John", registry)
        assert rq.text == "ask ⟨PERSON_1⟩ about ⟨PERSON_2⟩"
        originals = [e.original for e in rq.map.entries]
        assert originals == ["John Smith", "John"]

    def test_case_insensitive_with_exact_inversion(self):
        registry = registry_with("Ann")
        rq = anonymize_query("ANN met ann and Ann", registry)
        assert "ANN" not in rq.text and "ann" not in rq.text and "Ann" not in rq.text
        assert deanonymize_text(rq.text, rq.map) == "ANN met ann and Ann"

    def test_dates_and_digit_runs(self):
        rq = anonymize_query(
            "appointment on 2026-03-10 or 3/10/26, insurance 123456789", registry_with()
        )
        assert "2026-03-10" not in rq.text
        assert "3/10/26" not in rq.text
        assert "123456789" not in rq.text
        cats = {e.category for e in rq.map.entries}
        assert cats == {PiiCategory.DATE, PiiCategory.IDENTIFIER}

    def test_location_lexicon(self):
        lexicon = PiiLexicon(locations=("Maple Street", "Lyon"))
        rq = anonymize_query("directions from Maple Street to lyon", registry_with(), lexicon)
        assert rq.text == "directions from ⟨LOCATION_1⟩ to ⟨LOCATION_2⟩"

    def test_empty_query(self):
        with pytest.raises(EmptyQuery):
            anonymize_query("", registry_with())

    def test_substring_scan_fuzz(self):
        rng = np.random.default_rng(42)
        names = ["John Smith", "Maria-Luisa d'Aragona", "Bob", "Xiu Ying"]
        registry = registry_with(*names)
        fillers = ["please find", "what is", "the story of", "directions to", "recipe for"]
        leaked = 0
        for _ in range(2000):
            name = names[int(rng.integers(0, len(names)))]
            case = int(rng.integers(0, 3))
            shown = name.upper() if case == 0 else name.lower() if case == 1 else name
            text = (
                f"{fillers[int(rng.integers(0, len(fillers)))]} {shown} "
                f"{fillers[int(rng.integers(0, len(fillers)))]} {int(rng.integers(0, 10 ** 9))}"
            )
            rq = anonymize_query(text, registry)
            low = rq.text.casefold()
            if any(n.casefold() in low for n in names):
                leaked += 1
        assert leaked == 0


class TestDeanonymize:
    def test_no_placeholders_unchanged(self):
        from hearth.gateway import RedactionMap

        assert deanonymize_text("plain text", RedactionMap()) == "plain text"

    def test_unknown_placeholder_left_intact(self):
        from hearth.gateway import RedactionMap

        text = "hello ⟨PERSON_9⟩"
        assert deanonymize_text(text, RedactionMap()) == text

    def test_round_trip(self):
        registry = registry_with("John Smith", "Ann")
        q = "John Smith asked Ann about 2026-01-02 and 9999999"
        rq = anonymize_query(q, registry)
        assert deanonymize_text(rq.text, rq.map) == q

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.sampled_from(["John Smith", "Ann", "Paris", "2026-03-10", "repeat", "x123456789"]),
            min_size=1,
            max_size=12,
        )
    )
    def test_round_trip_property(self, words):
        registry = registry_with("John Smith", "Ann")
        lexicon = PiiLexicon(locations=("Paris",))
        q = " ".join(words)
        rq = anonymize_query(q, registry, lexicon)
        assert deanonymize_text(rq.text, rq.map) == q


class TestWebSearch:
    def _memory(self, tmp_path):
        provider = HashEmbeddingProvider(D, seed=1)
        store = MemoryStore(tmp_path, provider)
        ws = VectorBase(BaseKind.WORKSPACE)
        return store, ws

    def test_offline_is_empty_success(self, tmp_path):
        store, ws = self._memory(tmp_path)
        gate = EgressGate(offline=True, audit_dir=tmp_path)
        client = CorpusSearchClient(tmp_path)  # would match, but offline wins
        items = web_search(
            "anything", registry_with(), None, gate, client, store, ws, T0,
            ttl=timedelta(days=7),
        )
        assert items == []
        assert gate.invocations == 0
        assert gate.audit_records() == []

    def test_corpus_client_ingests_chunks(self, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "hist.txt").write_text("the siege of Alesia happened long ago", encoding="utf-8")
        (corpus / "misc.txt").write_text("irrelevant content", encoding="utf-8")
        store, ws = self._memory(tmp_path / "mem")
        gate = EgressGate(offline=False, audit_dir=tmp_path)
        items = web_search(
            "siege of Alesia", registry_with(), None, gate, CorpusSearchClient(corpus),
            store, ws, T0, ttl=timedelta(days=7),
        )
        assert len(items) == 1
        assert items[0].source is Source.WEB_DOC
        assert items[0].item_id in ws
        assert gate.invocations == 1

    def test_failing_client_surfaces_empty(self, tmp_path):
        class Boom:
            def search(self, query):
                raise RuntimeError("socket burst")

        store, ws = self._memory(tmp_path)
        gate = EgressGate(offline=False, audit_dir=tmp_path)
        items = web_search(
            "q", registry_with(), None, gate, Boom(), store, ws, T0, ttl=timedelta(days=7)
        )
        assert items == []
        assert gate.invocations == 1  # the attempt is still audited

    def test_audit_log_contains_no_registry_names(self, tmp_path):
        names = ["John Smith", "Ann"]
        registry = registry_with(*names)
        store, ws = self._memory(tmp_path / "mem")
        gate = EgressGate(offline=False, audit_dir=tmp_path)
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        rng = np.random.default_rng(3)
        for i in range(200):
            name = names[int(rng.integers(0, 2))]
            web_search(
                f"question {i} about {name}", registry, None, gate,
                CorpusSearchClient(corpus), store, ws, T0, ttl=timedelta(days=7),
            )
        for record in gate.audit_records():
            line = "\t".join(record).casefold()
            assert all(n.casefold() not in line for n in names)


class TestRedactedQueryGate:
    def test_client_interface_requires_redacted_query(self, tmp_path):
        # CorpusSearchClient consumes RedactedQuery.text; handing it a bare
        # string is a type error at the boundary.
        client = CorpusSearchClient(tmp_path)
        with pytest.raises(AttributeError):
            client.search("raw string")  # type: ignore[arg-type]
        rq = anonymize_query("fine", registry_with())
        assert isinstance(rq, RedactedQuery)
        assert client.search(rq) == []
