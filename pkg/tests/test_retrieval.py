import json

import numpy as np
import pytest

from consultkit.errors import DanglingEdge, DuplicateBlock, EmptyQuery, MissingQuery
from consultkit.retrieval import (
    Anchor, HashedTrigramEmbedder, IndexConfig, KnowledgeObject, QrelEntry,
    build_index, mrr_at_k, ndcg_at_k, object_and_path_hits, objectify, recall_at_k,
    retrieve, tokenize,
)


def block(doc, bid, text, kind="symptom_unit", edges=(), page=1):
    return {"document_id": doc, "page_no": page, "block_id": bid, "text": text,
            "kind_hint": kind, "tags": [], "edges": [list(e) for e in edges]}


def toy_objects():
    return objectify([
        block("d", "b1", "chest tightness on exertion", "symptom_unit",
              edges=[("suggests", "d/b2")]),
        block("d", "b2", "cardiac ischemia diagnosis", "diagnosis_unit",
              edges=[("confirmed_by", "d/b3")]),
        block("d", "b3", "resting heart tracing examination", "exam_unit"),
        block("d", "b4", "reflux burning after meals", "diagnosis_unit"),
        block("d", "b5", "chest wall strain tenderness", "diagnosis_unit"),
    ])


class TestObjectify:
    def test_empty(self):
        assert objectify([]) == []

    def test_kind_and_anchor_span(self):
        objs = objectify([block("doc", "x", "watch for stomach bleeding", "risk_rule_unit")])
        assert objs[0].kind == "risk_rule_unit"
        assert objs[0].anchor.span == (0, len("watch for stomach bleeding"))
        assert objs[0].anchor.page_no == 1

    def test_three_blocks_one_document(self):
        objs = objectify([block("doc", f"b{i}", f"text {i}") for i in range(3)])
        assert {o.anchor.document_id for o in objs} == {"doc"}
        assert len({o.anchor.block_id for o in objs}) == 3

    def test_duplicate_block(self):
        with pytest.raises(DuplicateBlock):
            objectify([block("d", "b", "one"), block("d", "b", "two")])

    def test_tag_lexicon(self):
        objs = objectify([block("d", "b", "sudden fever appeared")], tag_lexicon={"fever": "sym:fever"})
        assert "sym:fever" in objs[0].tags


class TestBuildIndex:
    def test_single_object_vector_norm(self):
        idx = build_index(objectify([block("d", "b", "hello world")]))
        assert np.linalg.norm(idx.vectors["d/b"]) == pytest.approx(1.0, abs=1e-9)

    def test_dangling_edge(self):
        with pytest.raises(DanglingEdge):
            build_index(objectify([block("d", "b", "x", edges=[("to", "d/missing")])]))

    def test_identical_text_identical_vectors(self):
        idx = build_index(objectify([block("d", "a", "same words"), block("d", "b", "same words")]))
        assert np.array_equal(idx.vectors["d/a"], idx.vectors["d/b"])

    def test_index_save_load_round_trip(self, tmp_path):
        idx = build_index(toy_objects())
        path = tmp_path / "index.json"
        idx.save(path)
        loaded = type(idx).load(path)
        assert loaded.order == idx.order
        assert loaded.content_hash() == idx.content_hash()

    def test_embedder_determinism(self):
        e = HashedTrigramEmbedder(dim=64)
        assert np.array_equal(e.embed("chest pain"), e.embed("chest pain"))


class TestRetrieve:
    def test_exact_text_ranks_first_both_modes(self):
        idx = build_index(toy_objects())
        for mode in ("chunk_only", "hybrid"):
            ranked = retrieve(idx, "reflux burning after meals", k=3, mode=mode)
            assert ranked[0][0] == "d/b4"

    def test_k_larger_than_corpus(self):
        idx = build_index(toy_objects())
        assert len(retrieve(idx, "chest", k=50)) == 5

    def test_empty_query(self):
        idx = build_index(toy_objects())
        with pytest.raises(EmptyQuery):
            retrieve(idx, "   ", k=3)

    def test_index_not_mutated_by_retrieval(self):
        idx = build_index(toy_objects())
        before = idx.content_hash()
        retrieve(idx, "chest tightness exertion", k=5, mode="hybrid")
        assert idx.content_hash() == before

    def test_determinism(self):
        idx = build_index(toy_objects())
        a = retrieve(idx, "chest tightness", k=5, mode="hybrid")
        b = retrieve(idx, "chest tightness", k=5, mode="hybrid")
        assert a == b

    def test_graph_bonus_lifts_connected_object(self):
        # The exam unit shares no query vocabulary but sits one hop from the
        # lexical seeds; hybrid must rank it above its chunk-only position.
        idx = build_index(toy_objects())
        query = "chest tightness on exertion cardiac ischemia"
        chunk = [oid for oid, _s, _a in retrieve(idx, query, k=5, mode="chunk_only")]
        hybrid = [oid for oid, _s, _a in retrieve(idx, query, k=5, mode="hybrid")]
        assert hybrid.index("d/b3") < chunk.index("d/b3")

    def test_scores_normalized_to_unit_interval(self):
        idx = build_index(toy_objects())
        ranked = retrieve(idx, "chest tightness", k=5, mode="hybrid")
        scores = [s for _o, s, _a in ranked]
        assert max(scores) == pytest.approx(1.0)
        assert all(0.0 <= s <= 1.0 for s in scores)

    def test_hybrid_equals_exhaustive_oracle_on_random_corpora(self):
        # Exhaustive fused scoring of every object, recomputed independently.
        rng = np.random.default_rng(2024)
        vocab = ["chest", "pain", "fever", "cough", "joint", "scan", "film",
                 "tight", "burning", "night", "stairs", "rest", "dizzy"]
        cfg = IndexConfig()
        for trial in range(200):
            n = int(rng.integers(2, 9))
            blocks = []
            for i in range(n):
                words = rng.choice(vocab, size=rng.integers(2, 7))
                blocks.append(block("d", f"b{i}", " ".join(words)))
            # random edges among existing blocks
            for i in range(n):
                if rng.random() < 0.4:
                    j = int(rng.integers(0, n))
                    if j != i:
                        blocks[i]["edges"].append(["rel", f"d/b{j}"])
            idx = build_index(objectify(blocks), cfg)
            query = " ".join(rng.choice(vocab, size=3))
            got = retrieve(idx, query, k=n, mode="hybrid")

            lex = idx.lexical_scores(query)
            max_lex = max(lex.values())
            seeds = [o for o in sorted(lex, key=lambda o: (-lex[o], o))[:cfg.seed_count]
                     if lex[o] > 0]
            depth = idx.depth_from(seeds, cfg.max_depth)
            qv = idx.embed_query(query)
            fused = {}
            for oid in idx.order:
                nl = lex[oid] / max_lex if max_lex > 0 else 0.0
                cos = max(0.0, float(np.dot(qv, idx.vectors[oid])))
                d = depth.get(oid, 0)
                bonus = cfg.path_bonus / d if 1 <= d <= cfg.max_depth else 0.0
                fused[oid] = cfg.w_lex * nl + cfg.w_vec * cos + cfg.w_graph * bonus
            top = max(fused.values())
            if top > 0:
                fused = {o: s / top for o, s in fused.items()}
            want = sorted(idx.order, key=lambda o: (-fused[o], o))
            assert [oid for oid, _s, _a in got] == want
            for oid, score, _a in got:
                assert score == pytest.approx(fused[oid], abs=1e-12)


def qrel(qid, relevant, paths=()):
    return QrelEntry(query_id=qid, query=qid, relevant_objects=frozenset(relevant),
                     relevant_paths=tuple(tuple(p) for p in paths))


class TestRankingMetrics:
    def test_recall_paper_counts(self):
        results = {}
        qrels = {}
        for i in range(300):
            qid = f"q{i}"
            qrels[qid] = qrel(qid, [f"obj{i}"])
            hit = i < 261
            results[qid] = [f"obj{i}" if hit else "other"] + ["x", "y", "z", "w"]
        rate, hits, total = recall_at_k(results, qrels, k=5)
        assert (hits, total) == (261, 300)
        assert rate == pytest.approx(0.870, abs=0.0005)

    def test_recall_all_hit(self):
        results = {"q": ["a"]}
        assert recall_at_k(results, {"q": qrel("q", ["a"])}, k=5)[0] == 1.0

    def test_rank_six_not_a_hit(self):
        results = {"q": ["x1", "x2", "x3", "x4", "x5", "rel"]}
        rate, hits, total = recall_at_k(results, {"q": qrel("q", ["rel"])}, k=5)
        assert hits == 0

    def test_missing_query(self):
        with pytest.raises(MissingQuery):
            recall_at_k({}, {"q": qrel("q", ["a"])}, k=5)

    def test_mrr_rank_one_and_three(self):
        assert mrr_at_k({"q": ["rel", "b", "c"]}, {"q": qrel("q", ["rel"])}) == 1.0
        assert mrr_at_k({"q": ["a", "b", "rel"]}, {"q": qrel("q", ["rel"])}) == pytest.approx(1 / 3)

    def test_mrr_two_query_hand_oracle(self):
        results = {"q1": ["a", "rel"], "q2": ["a", "b", "c"]}
        qrels = {"q1": qrel("q1", ["rel"]), "q2": qrel("q2", ["zzz"])}
        assert mrr_at_k(results, qrels, k=5) == pytest.approx(0.25)

    def test_ndcg_perfect(self):
        results = {"q": ["a", "b"]}
        assert ndcg_at_k(results, {"q": qrel("q", ["a", "b"])}, k=2) == pytest.approx(1.0)

    def test_ndcg_brute_force_oracle(self):
        # relevance pattern (1, 0, 1) with two relevant total
        results = {"q": ["rel1", "junk", "rel2"]}
        qrels = {"q": qrel("q", ["rel1", "rel2"])}
        dcg = 1.0 + 1.0 / np.log2(4)
        idcg = 1.0 + 1.0 / np.log2(3)
        assert ndcg_at_k(results, qrels, k=3) == pytest.approx(dcg / idcg, abs=1e-12)
        assert ndcg_at_k(results, qrels, k=3) == pytest.approx(0.9198, abs=1e-3)

    def test_ndcg_no_relevant_in_top_k(self):
        results = {"q": ["junk1", "junk2"]}
        assert ndcg_at_k(results, {"q": qrel("q", ["rel"])}, k=2) == 0.0


class TestObjectAndPathHits:
    def adjacency(self):
        return {"a": {"b"}, "b": {"a", "c"}, "c": {"b"}, "x": set()}

    def test_paper_counts(self):
        results = {}
        qrels = {}
        for i in range(300):
            qid = f"q{i}"
            obj_hit = i < 249
            path_hit = i < 219
            qrels[qid] = qrel(qid, ["a"], paths=[("a", "b")])
            top = ["a" if obj_hit else "z"]
            top.append("b" if path_hit else "y")
            results[qid] = top + ["f1", "f2", "f3"]
        stats = object_and_path_hits(results, qrels, self.adjacency(), k=5)
        assert (stats["object_hits"], stats["object_total"]) == (249, 300)
        assert (stats["path_hits"], stats["path_total"]) == (219, 300)
        assert stats["object_hit_rate"] == pytest.approx(0.83, abs=0.0005)
        assert stats["path_hit_rate"] == pytest.approx(0.73, abs=0.0005)

    def test_two_object_path_hit(self):
        results = {"q": ["a", "b", "z"]}
        qrels = {"q": qrel("q", ["a"], paths=[("a", "b")])}
        stats = object_and_path_hits(results, qrels, self.adjacency(), k=5)
        assert stats["path_hits"] == 1

    def test_non_adjacent_path_misses(self):
        results = {"q": ["a", "x"]}
        qrels = {"q": qrel("q", ["a"], paths=[("a", "x")])}
        stats = object_and_path_hits(results, qrels, self.adjacency(), k=5)
        assert stats["path_hits"] == 0

    def test_no_paths_declared_convention(self):
        results = {"q": ["a"]}
        qrels = {"q": qrel("q", ["a"])}
        stats = object_and_path_hits(results, qrels, self.adjacency(), k=5)
        assert stats["path_hit_rate"] == 0.0
        assert stats["path_total"] == 0
