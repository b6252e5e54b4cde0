"""Build one textual forma mentis network per transcript.

Edges come from two sources: pairs of non-stopword alpha tokens whose
dependency-tree distance is at most k (kind "syntactic"), and pairs of
nodes sharing a synonym set (kind "synonym"). Nodes carry valence and
emotion tags looked up in the lexicons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .conllu import SentenceTree, Transcript, all_tree_distances
from .errors import EmptyNetwork
from .graphs import Graph
from .lexicons import EmotionLexicon, SynonymLexicon, ValenceLexicon

SYNTACTIC = "syntactic"
SYNONYM = "synonym"


@dataclass
class Tfmn:
    """Undirected simple graph of lemmas with typed edges and node tags."""

    transcript_id: str
    k: int
    nodes: list[str] = field(default_factory=list)
    edge_kinds: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    node_tags: dict[str, tuple[str, frozenset[str]]] = field(default_factory=dict)

    @staticmethod
    def _key(u: str, v: str) -> tuple[str, str]:
        return (u, v) if u <= v else (v, u)

    def add_edge(self, u: str, v: str, kind: str) -> None:
        if u == v:
            raise ValueError(f"self-loop rejected: {u!r}")
        key = self._key(u, v)
        kinds = self.edge_kinds.get(key, frozenset())
        self.edge_kinds[key] = kinds | {kind}

    def has_edge(self, u: str, v: str) -> bool:
        return self._key(u, v) in self.edge_kinds

    @property
    def n_edges(self) -> int:
        return len(self.edge_kinds)

    def edges(self, kinds: frozenset[str] | None = None) -> list[tuple[str, str]]:
        if kinds is None:
            return sorted(self.edge_kinds)
        return sorted(k for k, v in self.edge_kinds.items() if v & kinds)

    def to_graph(self, include_synonym_edges: bool = True) -> Graph:
        """Flatten to an untyped graph for metric extraction."""
        g = Graph(nodes=self.nodes)
        for (u, v), kinds in sorted(self.edge_kinds.items()):
            if include_synonym_edges or SYNTACTIC in kinds:
                g.add_edge(u, v)
        return g


def _eligible(sentence: SentenceTree):
    return [t for t in sentence.tokens if not t.is_stopword and t.is_alpha and t.upos != "PUNCT"]


def build_syntactic(t: Transcript, k: int) -> Tfmn:
    """Connect lemma pairs whose syntactic distance is <= k, merged across sentences."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not t.sentences:
        raise EmptyNetwork(f"{t.transcript_id}: no valid sentences")
    net = Tfmn(transcript_id=t.transcript_id, k=k)
    node_seen: dict[str, None] = {}
    for sentence in t.sentences:
        cand = _eligible(sentence)
        for tok in cand:
            node_seen.setdefault(tok.lemma, None)
        if len(cand) < 2:
            continue
        dist = all_tree_distances(sentence)
        for a in range(len(cand)):
            for b in range(a + 1, len(cand)):
                ti, tj = cand[a], cand[b]
                if ti.lemma == tj.lemma:
                    continue
                if dist[(ti.id, tj.id)] <= k:
                    net.add_edge(ti.lemma, tj.lemma, SYNTACTIC)
    net.nodes = sorted(node_seen)
    if not net.edge_kinds:
        raise EmptyNetwork(f"{t.transcript_id}: no eligible token pairs at k={k}")
    return net


def distance_cdf(corpus: list[Transcript]) -> dict[int, float]:
    """Cumulative fraction of eligible token pairs at syntactic distance <= k.

    The pair population matches the edge rule: non-stopword alpha token
    pairs, same-lemma pairs excluded.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    counts: dict[int, int] = {}
    total = 0
    for t in corpus:
        for sentence in t.sentences:
            cand = _eligible(sentence)
            if len(cand) < 2:
                continue
            dist = all_tree_distances(sentence)
            for a in range(len(cand)):
                for b in range(a + 1, len(cand)):
                    ti, tj = cand[a], cand[b]
                    if ti.lemma == tj.lemma:
                        continue
                    d = dist[(ti.id, tj.id)]
                    counts[d] = counts.get(d, 0) + 1
                    total += 1
    if total == 0:
        return {}
    cdf: dict[int, float] = {}
    running = 0
    for d in range(1, max(counts) + 1):
        running += counts.get(d, 0)
        cdf[d] = running / total
    return cdf


def enrich_synonyms(net: Tfmn, syn: SynonymLexicon, scope: str = "present") -> Tfmn:
    """Add synonym-kind edges between nodes sharing a synset.

    scope "present" links any pair of network nodes; "adjacent" only adds
    the synonym kind to already-existing edges. Idempotent; never adds nodes.
    """
    if scope not in ("present", "adjacent"):
        raise ValueError(f"unknown synonym scope {scope!r}")
    nodes = net.nodes
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            u, v = nodes[i], nodes[j]
            if not syn.are_synonyms(u, v):
                continue
            if scope == "adjacent" and not net.has_edge(u, v):
                continue
            net.add_edge(u, v, SYNONYM)
    return net


def tag_nodes(net: Tfmn, emo: EmotionLexicon, val: ValenceLexicon) -> Tfmn:
    """Attach (valence, emotion set) to every node; unknown lemmas get (neutral, {})."""
    for node in net.nodes:
        net.node_tags[node] = (val.valence_of(node), emo.emotions_of(node))
    return net


def export_edge_list(net: Tfmn) -> str:
    """Edge list as `u<TAB>v<TAB>kinds`, kinds sorted and joined with `+`."""
    lines = []
    for (u, v) in net.edges():
        kinds = "+".join(sorted(net.edge_kinds[(u, v)]))
        lines.append(f"{u}\t{v}\t{kinds}")
    return "\n".join(lines) + ("\n" if lines else "")


def export_node_tags(net: Tfmn) -> str:
    """Node sidecar as `lemma<TAB>valence<TAB>emotions` (emotions comma-joined)."""
    lines = []
    for node in net.nodes:
        valence, emotions = net.node_tags.get(node, ("neutral", frozenset()))
        lines.append(f"{node}\t{valence}\t{','.join(sorted(emotions))}")
    return "\n".join(lines) + ("\n" if lines else "")


def network_to_dict(net: Tfmn) -> dict:
    """Plain-JSON form of the graph document."""
    return {
        "transcript_id": net.transcript_id,
        "k": net.k,
        "nodes": [
            {
                "id": n,
                "valence": net.node_tags.get(n, ("neutral", frozenset()))[0],
                "emotions": sorted(net.node_tags.get(n, ("neutral", frozenset()))[1]),
            }
            for n in net.nodes
        ],
        "edges": [
            {"source": u, "target": v, "kinds": sorted(net.edge_kinds[(u, v)])}
            for (u, v) in net.edges()
        ],
    }


def network_from_dict(doc: dict) -> Tfmn:
    net = Tfmn(transcript_id=doc["transcript_id"], k=doc["k"])
    for node in doc["nodes"]:
        net.nodes.append(node["id"])
        net.node_tags[node["id"]] = (node["valence"], frozenset(node["emotions"]))
    for edge in doc["edges"]:
        net.edge_kinds[Tfmn._key(edge["source"], edge["target"])] = frozenset(edge["kinds"])
    return net


def export_json(net: Tfmn) -> str:
    """JSON graph document for downstream plotting."""
    return json.dumps(network_to_dict(net), indent=2, sort_keys=True) + "\n"
