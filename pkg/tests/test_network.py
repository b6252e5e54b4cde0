"""Network construction: the distance-k edge rule, enrichment, tagging, CDF."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import DATA_DIR
from tfmnet.conllu import SentenceTree, Token, all_tree_distances, parse_conllu_file
from tfmnet.errors import EmptyNetwork
from tfmnet.lexicons import (
    EmotionLexicon,
    SynonymLexicon,
    ValenceLexicon,
    default_stopwords,
)
from tfmnet.network import (
    build_syntactic,
    distance_cdf,
    enrich_synonyms,
    export_edge_list,
    export_node_tags,
    network_from_dict,
    network_to_dict,
    tag_nodes,
)
from tfmnet.conllu import Transcript

STOP = default_stopwords()


def tok(i, lemma, head, upos="NOUN", stop=None, alpha=None):
    return Token(
        id=i, surface=lemma, lemma=lemma, upos=upos, head=head, deprel="dep",
        is_stopword=(lemma in STOP) if stop is None else stop,
        is_alpha=lemma.isalpha() if alpha is None else alpha,
    )


def chain_transcript(lemmas, tid="t"):
    """Tokens in a head chain: token i+1 attaches to token i; distances equal offsets."""
    toks = [tok(1, lemmas[0], 0)]
    for i, lemma in enumerate(lemmas[1:], start=2):
        toks.append(tok(i, lemma, i - 1))
    return Transcript(tid, [SentenceTree(f"{tid}-s1", toks)])


def test_edges_follow_tree_distance_not_word_order():
    t = chain_transcript(["dog", "cat", "bird", "fish", "frog", "newt"])
    net = build_syntactic(t, k=2)
    assert net.has_edge("dog", "cat")
    assert net.has_edge("dog", "bird")
    assert not net.has_edge("dog", "fish")  # distance 3
    assert net.has_edge("bird", "frog")


def test_k_monotonicity():
    t = chain_transcript(["dog", "cat", "bird", "fish", "frog", "newt"])
    prev: set = set()
    for k in range(1, 6):
        edges = set(build_syntactic(t, k=k).edges())
        assert prev <= edges
        prev = edges
    assert len(prev) == 15  # k=5 connects every pair of the 6-chain


def test_stopwords_and_punctuation_excluded():
    toks = [
        tok(1, "the", 2, upos="DET"),
        tok(2, "dog", 3),
        tok(3, "run", 0, upos="VERB"),
        tok(4, ".", 3, upos="PUNCT", alpha=False),
    ]
    t = Transcript("t", [SentenceTree("s", toks)])
    net = build_syntactic(t, k=4)
    assert sorted(net.nodes) == ["dog", "run"]
    assert net.edges() == [("dog", "run")]


def test_numeric_lemmas_excluded():
    toks = [tok(1, "dog", 2), tok(2, "see", 0, upos="VERB"), tok(3, "42", 2, alpha=False)]
    t = Transcript("t", [SentenceTree("s", toks)])
    net = build_syntactic(t, k=4)
    assert "42" not in net.nodes


def test_same_lemma_pairs_never_linked():
    toks = [tok(1, "dog", 2), tok(2, "see", 0, upos="VERB"), tok(3, "dog", 2)]
    t = Transcript("t", [SentenceTree("s", toks)])
    net = build_syntactic(t, k=4)
    assert not net.has_edge("dog", "dog")
    assert net.nodes.count("dog") == 1


def test_edges_merge_across_sentences():
    s1 = SentenceTree("s1", [tok(1, "dog", 2), tok(2, "run", 0, upos="VERB")])
    s2 = SentenceTree("s2", [tok(1, "dog", 2), tok(2, "sleep", 0, upos="VERB")])
    net = build_syntactic(Transcript("t", [s1, s2]), k=1)
    assert net.has_edge("dog", "run") and net.has_edge("dog", "sleep")
    assert net.nodes.count("dog") == 1


def test_all_stopword_transcript_raises():
    toks = [tok(1, "the", 2, upos="DET"), tok(2, "and", 0, upos="CCONJ")]
    t = Transcript("t", [SentenceTree("s", toks)])
    with pytest.raises(EmptyNetwork):
        build_syntactic(t, k=4)


def test_k_below_one_rejected():
    t = chain_transcript(["dog", "cat"])
    with pytest.raises(ValueError):
        build_syntactic(t, k=0)


def test_i_sick_long_range_link():
    """Subject and complement eleven words apart still link: their tree
    path is two edges, while the fillers in between hang elsewhere."""
    ts = parse_conllu_file(str(DATA_DIR / "i_sick.conllu"), STOP)
    net1 = build_syntactic(ts[0], k=1)
    assert not net1.has_edge("i", "sick")
    net2 = build_syntactic(ts[0], k=2)
    assert net2.has_edge("i", "sick")
    net4 = build_syntactic(ts[0], k=4)
    assert net4.has_edge("i", "sick")
    for stopword in ("so", "very"):
        assert stopword not in net4.nodes
    for kept in ("i", "you", "feel", "sick", "today", "know", "well"):
        assert kept in net4.nodes


# ---------------------------------------------------------------------------
# synonym enrichment


SYN = SynonymLexicon({
    "happy": frozenset({"syn.glad"}),
    "glad": frozenset({"syn.glad"}),
    "dog": frozenset({"syn.dog"}),
    "hound": frozenset({"syn.dog"}),
})


def test_synonyms_link_present_nodes():
    t = chain_transcript(["happy", "cat", "bird", "fish", "frog", "glad"])
    net = build_syntactic(t, k=1)
    assert not net.has_edge("happy", "glad")
    enrich_synonyms(net, SYN, scope="present")
    assert net.has_edge("happy", "glad")
    assert net.edge_kinds[("glad", "happy")] == frozenset({"synonym"})


def test_adjacent_scope_only_annotates_existing_edges():
    t = chain_transcript(["happy", "glad", "bird", "fish", "frog", "dog"])
    net = build_syntactic(t, k=1)
    enrich_synonyms(net, SYN, scope="adjacent")
    assert net.edge_kinds[("glad", "happy")] == frozenset({"syntactic", "synonym"})
    assert not net.has_edge("dog", "hound")  # hound absent from the text
    # the distant dog node gains no new partner
    assert not net.has_edge("frog", "dog") or "synonym" not in net.edge_kinds.get(("dog", "frog"), ())


def test_enrichment_is_idempotent_and_adds_no_nodes():
    t = chain_transcript(["happy", "cat", "glad"])
    net = build_syntactic(t, k=1)
    enrich_synonyms(net, SYN)
    once = dict(net.edge_kinds)
    nodes_once = list(net.nodes)
    enrich_synonyms(net, SYN)
    assert net.edge_kinds == once
    assert net.nodes == nodes_once
    assert "hound" not in net.nodes


def test_unknown_scope_rejected():
    t = chain_transcript(["dog", "cat"])
    net = build_syntactic(t, k=1)
    with pytest.raises(ValueError):
        enrich_synonyms(net, SYN, scope="everywhere")


# ---------------------------------------------------------------------------
# node tags and exports


def test_tag_nodes_and_exports():
    emo = EmotionLexicon({"dog": frozenset({"joy", "trust"})})
    val = ValenceLexicon({"dog": "positive", "cat": "negative"})
    t = chain_transcript(["dog", "cat", "bird"])
    net = tag_nodes(build_syntactic(t, k=1), emo, val)
    assert net.node_tags["dog"] == ("positive", frozenset({"joy", "trust"}))
    assert net.node_tags["bird"] == ("neutral", frozenset())
    edge_text = export_edge_list(net)
    assert "bird\tcat\tsyntactic" in edge_text
    tags_text = export_node_tags(net)
    assert "dog\tpositive\tjoy,trust" in tags_text
    assert "bird\tneutral\t" in tags_text


def test_network_dict_round_trip():
    emo = EmotionLexicon({"dog": frozenset({"joy"})})
    val = ValenceLexicon({"dog": "positive"})
    t = chain_transcript(["happy", "dog", "bird", "glad"])
    net = tag_nodes(enrich_synonyms(build_syntactic(t, k=2), SYN), emo, val)
    doc = network_to_dict(net)
    back = network_from_dict(doc)
    assert back.transcript_id == net.transcript_id
    assert back.k == net.k
    assert back.nodes == net.nodes
    assert back.edge_kinds == net.edge_kinds
    assert back.node_tags == net.node_tags


# ---------------------------------------------------------------------------
# distance CDF


def test_distance_cdf_hand_case():
    # chain of 4 content words: distances 1,1,1 (adjacent), 2,2, 3
    t = chain_transcript(["dog", "cat", "bird", "fish"])
    cdf = distance_cdf([t])
    assert cdf[1] == pytest.approx(3 / 6)
    assert cdf[2] == pytest.approx(5 / 6)
    assert cdf[3] == pytest.approx(1.0)


def test_distance_cdf_is_monotone_and_caps_at_one():
    rng = np.random.default_rng(8)
    lemma_pool = ["dog", "cat", "bird", "fish", "frog", "newt", "bear", "wolf"]
    ts = []
    for i in range(5):
        k = int(rng.integers(3, 8))
        lemmas = [lemma_pool[int(j)] for j in rng.choice(len(lemma_pool), size=k, replace=False)]
        ts.append(chain_transcript(lemmas, tid=f"t{i}"))
    cdf = distance_cdf(ts)
    values = [cdf[k] for k in sorted(cdf)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0)


def test_distance_cdf_ignores_stopword_pairs():
    toks = [
        tok(1, "the", 2, upos="DET"),
        tok(2, "dog", 3),
        tok(3, "run", 0, upos="VERB"),
    ]
    cdf = distance_cdf([Transcript("t", [SentenceTree("s", toks)])])
    assert cdf == {1: 1.0}


def test_distance_cdf_empty_corpus_rejected():
    with pytest.raises(ValueError):
        distance_cdf([])
