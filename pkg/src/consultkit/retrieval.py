"""Objectified knowledge store with hybrid retrieval and ranking metrics.

Blocks of pre-parsed corpus text become typed knowledge objects, each
carrying a provenance anchor (document_id, page_no, block_id, span).
Retrieval fuses a tf-idf lexical score, a deterministic hashed-trigram
cosine, and a graph-proximity bonus; corpora are desk-scale so every
object is scored exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DanglingEdge, DuplicateBlock, EmptyQuery, MissingQuery

OBJECT_KINDS = ("symptom_unit", "exam_unit", "diagnosis_unit", "risk_rule_unit", "case_summary")

INDEX_FORMAT_VERSION = 1

_TOKEN_RE = re.compile(r"[a-z0-9']+")


@dataclass(frozen=True)
class Anchor:
    document_id: str
    page_no: int
    block_id: str
    span: tuple[int, int]  # (start_char, end_char) into the block text

    def __post_init__(self):
        if self.page_no < 1:
            raise ValueError("page_no must be >= 1")
        if self.span[1] <= self.span[0]:
            raise ValueError("span end must exceed start")

    def to_dict(self) -> dict:
        return {"document_id": self.document_id, "page_no": self.page_no,
                "block_id": self.block_id, "span": list(self.span)}

    @staticmethod
    def from_dict(d: dict) -> "Anchor":
        return Anchor(d["document_id"], d["page_no"], d["block_id"], tuple(d["span"]))


@dataclass(frozen=True)
class KnowledgeObject:
    object_id: str
    kind: str
    text: str
    tags: frozenset[str]
    anchor: Anchor
    edges: tuple[tuple[str, str], ...] = ()  # (relation, target object_id)

    def to_dict(self) -> dict:
        return {"object_id": self.object_id, "kind": self.kind, "text": self.text,
                "tags": sorted(self.tags), "anchor": self.anchor.to_dict(),
                "edges": [list(e) for e in self.edges]}

    @staticmethod
    def from_dict(d: dict) -> "KnowledgeObject":
        return KnowledgeObject(
            object_id=d["object_id"], kind=d["kind"], text=d["text"],
            tags=frozenset(d.get("tags", [])), anchor=Anchor.from_dict(d["anchor"]),
            edges=tuple((r, t) for r, t in d.get("edges", [])),
        )


@dataclass(frozen=True)
class QrelEntry:
    query_id: str
    query: str
    relevant_objects: frozenset[str]
    relevant_paths: tuple[tuple[str, ...], ...] = ()
    fields: tuple[str, ...] = ()  # schema fields this query is built from

    def __post_init__(self):
        if not self.relevant_objects:
            raise ValueError(f"query {self.query_id!r} has no relevant objects")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class HashedTrigramEmbedder:
    """Deterministic character-trigram hashing embedder (unit-norm output)."""

    def __init__(self, dim: int = 256):
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        padded = f" {text.lower()} "
        v = np.zeros(self.dim)
        for i in range(len(padded) - 2):
            tri = padded[i:i + 3]
            h = hashlib.blake2b(tri.encode("utf-8"), digest_size=8).digest()
            v[int.from_bytes(h, "big") % self.dim] += 1.0
        norm = float(np.linalg.norm(v))
        return v / norm if norm > 0 else v


@dataclass(frozen=True)
class IndexConfig:
    w_lex: float = 0.5
    w_vec: float = 0.35
    w_graph: float = 1.0
    pool_size: int = 50
    k1: float = 1.2
    b: float = 0.75
    embed_dim: int = 256
    seed_count: int = 3       # lexical seeds feeding the path bonus
    path_bonus: float = 0.15
    max_depth: int = 2

    @staticmethod
    def from_dict(d: dict) -> "IndexConfig":
        return IndexConfig(**d)


def objectify(blocks: list, tag_lexicon: dict[str, str] | None = None) -> list[KnowledgeObject]:
    """One knowledge object per reconstructed block.

    Blocks are (document_id, page_no, block_id, text, kind_hint) tuples or
    dicts with the same keys (plus optional tags/edges). The anchor spans
    the full block text; extra tags come from the optional tag lexicon.
    """
    seen: set[tuple[str, str]] = set()
    objects: list[KnowledgeObject] = []
    for blk in blocks:
        if isinstance(blk, dict):
            doc, page, bid, text, hint = (blk["document_id"], blk["page_no"], blk["block_id"],
                                          blk["text"], blk.get("kind_hint", "case_summary"))
            tags = set(blk.get("tags", []))
            edges = tuple((r, t) for r, t in blk.get("edges", []))
        else:
            doc, page, bid, text, hint = blk
            tags, edges = set(), ()
        if (doc, bid) in seen:
            raise DuplicateBlock(doc, bid)
        seen.add((doc, bid))
        kind = hint if hint in OBJECT_KINDS else "case_summary"
        if tag_lexicon:
            for word in tokenize(text):
                if word in tag_lexicon:
                    tags.add(tag_lexicon[word])
        objects.append(KnowledgeObject(
            object_id=f"{doc}/{bid}", kind=kind, text=text, tags=frozenset(tags),
            anchor=Anchor(document_id=doc, page_no=page, block_id=bid, span=(0, len(text))),
            edges=edges,
        ))
    return objects


class RetrievalIndex:
    """Immutable lexical + vector + graph index over knowledge objects."""

    def __init__(self, objects: list[KnowledgeObject], cfg: IndexConfig,
                 embedder: HashedTrigramEmbedder | None = None):
        self.cfg = cfg
        self.objects: dict[str, KnowledgeObject] = {o.object_id: o for o in objects}
        self.order: tuple[str, ...] = tuple(sorted(self.objects))
        self._embedder = embedder or HashedTrigramEmbedder(cfg.embed_dim)

        self.doc_tokens: dict[str, list[str]] = {oid: tokenize(self.objects[oid].text) for oid in self.order}
        self.doc_len = {oid: len(toks) for oid, toks in self.doc_tokens.items()}
        self.avg_len = (sum(self.doc_len.values()) / len(self.order)) if self.order else 0.0
        self.postings: dict[str, dict[str, int]] = {}
        for oid, toks in self.doc_tokens.items():
            for tok in toks:
                self.postings.setdefault(tok, {})
                self.postings[tok][oid] = self.postings[tok].get(oid, 0) + 1

        self.vectors = {oid: self._embedder.embed(self.objects[oid].text) for oid in self.order}

        self.adjacency: dict[str, set[str]] = {oid: set() for oid in self.order}
        for o in objects:
            for _rel, target in o.edges:
                if target not in self.objects:
                    raise DanglingEdge(o.object_id, target)
                self.adjacency[o.object_id].add(target)
                self.adjacency[target].add(o.object_id)

    def __len__(self) -> int:
        return len(self.order)

    def embed_query(self, query: str) -> np.ndarray:
        return self._embedder.embed(query)

    def lexical_scores(self, query: str) -> dict[str, float]:
        """tf-idf scoring with document-length normalization."""
        n = len(self.order)
        scores = {oid: 0.0 for oid in self.order}
        for term in tokenize(query):
            hits = self.postings.get(term)
            if not hits:
                continue
            df = len(hits)
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            for oid, tf in hits.items():
                denom = tf + self.cfg.k1 * (1.0 - self.cfg.b + self.cfg.b * self.doc_len[oid] / self.avg_len)
                scores[oid] += idf * tf * (self.cfg.k1 + 1.0) / denom
        return scores

    def depth_from(self, seeds: list[str], max_depth: int) -> dict[str, int]:
        """Breadth-first depth (undirected) from the seed set."""
        depth = {s: 0 for s in seeds}
        frontier = list(seeds)
        for d in range(1, max_depth + 1):
            nxt = []
            for oid in frontier:
                for nb in sorted(self.adjacency.get(oid, ())):
                    if nb not in depth:
                        depth[nb] = d
                        nxt.append(nb)
            frontier = nxt
        return depth

    def content_hash(self) -> str:
        payload = json.dumps([self.objects[oid].to_dict() for oid in self.order], sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {
            "format_version": INDEX_FORMAT_VERSION,
            "config": self.cfg.__dict__,
            "objects": [self.objects[oid].to_dict() for oid in self.order],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")

    @staticmethod
    def load(path: str | Path) -> "RetrievalIndex":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("format_version") != INDEX_FORMAT_VERSION:
            raise ValueError(f"unsupported index format_version {data.get('format_version')!r}")
        cfg = IndexConfig.from_dict(data["config"])
        return RetrievalIndex([KnowledgeObject.from_dict(o) for o in data["objects"]], cfg)


def build_index(objects: list[KnowledgeObject], cfg: IndexConfig | None = None,
                embedder: HashedTrigramEmbedder | None = None) -> RetrievalIndex:
    return RetrievalIndex(objects, cfg or IndexConfig(), embedder=embedder)


def retrieve(index: RetrievalIndex, query: str, k: int, mode: str = "hybrid"
             ) -> list[tuple[str, float, Anchor]]:
    """Ranked (object_id, fused_score, anchor) list.

    chunk_only ranks by the lexical score alone; hybrid fuses lexical,
    cosine, and a graph bonus for objects within depth 2 of the top
    lexical seeds. Scores are normalized to [0,1] per query and ties break
    by ascending object_id.
    """
    if not query or not query.strip():
        raise EmptyQuery("query is empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode not in ("chunk_only", "hybrid"):
        raise ValueError(f"unknown retrieval mode {mode!r}")
    if not index.order:
        return []

    lex = index.lexical_scores(query)
    if mode == "chunk_only":
        fused = dict(lex)
    else:
        max_lex = max(lex.values())
        qv = index.embed_query(query)
        seeds = [oid for oid in sorted(lex, key=lambda o: (-lex[o], o))[:index.cfg.seed_count]
                 if lex[oid] > 0]
        depth = index.depth_from(seeds, index.cfg.max_depth)
        fused = {}
        for oid in index.order:
            norm_lex = lex[oid] / max_lex if max_lex > 0 else 0.0
            cos = max(0.0, float(np.dot(qv, index.vectors[oid])))
            d = depth.get(oid, 0)
            bonus = index.cfg.path_bonus / d if 1 <= d <= index.cfg.max_depth else 0.0
            fused[oid] = index.cfg.w_lex * norm_lex + index.cfg.w_vec * cos + index.cfg.w_graph * bonus

    top = max(fused.values())
    if top > 0:
        fused = {oid: s / top for oid, s in fused.items()}
    ranked = sorted(index.order, key=lambda o: (-fused[o], o))[:min(k, len(index.order))]
    return [(oid, fused[oid], index.objects[oid].anchor) for oid in ranked]


# --- ranking metrics ---

def _ranked_ids(results: dict[str, list], query_id: str) -> list[str]:
    if query_id not in results:
        raise MissingQuery(query_id)
    out = []
    for item in results[query_id]:
        out.append(item[0] if isinstance(item, (tuple, list)) else item)
    return out


def recall_at_k(results: dict[str, list], qrels: dict[str, QrelEntry], k: int = 5
                ) -> tuple[float, int, int]:
    """(rate, hits, total): a query is a hit when any relevant object is in
    the top k."""
    hits = 0
    for qid, entry in qrels.items():
        top = set(_ranked_ids(results, qid)[:k])
        if top & entry.relevant_objects:
            hits += 1
    total = len(qrels)
    return (hits / total if total else 0.0, hits, total)


def mrr_at_k(results: dict[str, list], qrels: dict[str, QrelEntry], k: int = 5) -> float:
    total = 0.0
    for qid, entry in qrels.items():
        ranked = _ranked_ids(results, qid)[:k]
        for rank, oid in enumerate(ranked, start=1):
            if oid in entry.relevant_objects:
                total += 1.0 / rank
                break
    return total / len(qrels) if qrels else 0.0


def ndcg_at_k(results: dict[str, list], qrels: dict[str, QrelEntry], k: int = 5) -> float:
    """Binary-relevance nDCG with gain 1/log2(rank+1)."""
    total = 0.0
    for qid, entry in qrels.items():
        ranked = _ranked_ids(results, qid)[:k]
        dcg = sum(1.0 / math.log2(rank + 1) for rank, oid in enumerate(ranked, start=1)
                  if oid in entry.relevant_objects)
        ideal_hits = min(k, len(entry.relevant_objects))
        idcg = sum(1.0 / math.log2(rank + 1) for rank in range(1, ideal_hits + 1))
        total += dcg / idcg if idcg > 0 else 0.0
    return total / len(qrels) if qrels else 0.0


def object_and_path_hits(results: dict[str, list], qrels: dict[str, QrelEntry],
                         adjacency: dict[str, set[str]], k: int = 5) -> dict:
    """Object hits as in recall; a path hits when every object of some
    relevant path is in the top k and consecutive pairs are adjacent.

    The path rate is over the subset of queries that declare paths; when no
    query does, the rate is reported as 0.0 with a scored count of 0.
    """
    object_hits = 0
    path_hits = 0
    path_total = 0
    for qid, entry in qrels.items():
        top = set(_ranked_ids(results, qid)[:k])
        if top & entry.relevant_objects:
            object_hits += 1
        if entry.relevant_paths:
            path_total += 1
            for path in entry.relevant_paths:
                if all(oid in top for oid in path) and all(
                        b in adjacency.get(a, set()) for a, b in zip(path, path[1:])):
                    path_hits += 1
                    break
    total = len(qrels)
    return {
        "object_hit_rate": object_hits / total if total else 0.0,
        "object_hits": object_hits,
        "object_total": total,
        "path_hit_rate": path_hits / path_total if path_total else 0.0,
        "path_hits": path_hits,
        "path_total": path_total,
    }


def load_qrels(path: str | Path) -> dict[str, QrelEntry]:
    entries: dict[str, QrelEntry] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        entries[d["query_id"]] = QrelEntry(
            query_id=d["query_id"], query=d["query"],
            relevant_objects=frozenset(d["relevant_objects"]),
            relevant_paths=tuple(tuple(p) for p in d.get("relevant_paths", [])),
            fields=tuple(d.get("fields", [])),
        )
    return entries


def load_corpus(path: str | Path) -> list[KnowledgeObject]:
    blocks = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            blocks.append(json.loads(line))
    return objectify(blocks)
