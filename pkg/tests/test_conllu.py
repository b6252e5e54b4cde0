"""CoNLL-U reader: structure, validation, metadata, tree distances."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import DATA_DIR
from tfmnet.conllu import (
    SentenceTree,
    Token,
    all_tree_distances,
    parse_conllu,
    parse_conllu_file,
    to_conllu,
    tree_distance,
)
from tfmnet.errors import MalformedLine, MultipleRoots, NoRoot, UnknownToken

STOP = {"the", "a", "and", "so", "very", "to", "be"}

DOC = """\
# newdoc id = t1
# age = 9.5
# sex = F
# sent_id = t1-s1
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tbarks\tbark\tVERB\t_\t_\t0\troot\t_\t_
4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_

# sent_id = t1-s2
1\tCats\tcat\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\tsleep\tsleep\tVERB\t_\t_\t0\troot\t_\t_

# newdoc id = t2
# age = 12
# sex = m
1\tBirds\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\tsing\tsing\tVERB\t_\t_\t0\troot\t_\t_
"""


def test_parse_two_transcripts():
    ts = parse_conllu(DOC, STOP)
    assert [t.transcript_id for t in ts] == ["t1", "t2"]
    assert len(ts[0].sentences) == 2
    assert ts[0].demographics == {"age": 9.5, "sex": "f"}
    assert ts[1].demographics == {"age": 12.0, "sex": "m"}


def test_token_fields_and_flags():
    ts = parse_conllu(DOC, STOP)
    s1 = ts[0].sentences[0]
    assert s1.sentence_id == "t1-s1"
    first = s1.tokens[0]
    assert (first.surface, first.lemma, first.upos) == ("The", "the", "DET")
    assert first.is_stopword and first.is_alpha
    bark = s1.tokens[2]
    assert bark.lemma == "bark" and bark.head == 0 and not bark.is_stopword
    dot = s1.tokens[3]
    assert not dot.is_alpha and dot.upos == "PUNCT"


def test_missing_lemma_falls_back_to_lowercased_surface():
    ts = parse_conllu(DOC, STOP)
    assert ts[1].sentences[0].tokens[0].lemma == "birds"


def test_unnamed_sentences_get_sequential_ids():
    ts = parse_conllu(DOC, STOP)
    assert ts[1].sentences[0].sentence_id == "t2-s1"


def test_ranges_and_empty_nodes_are_skipped():
    doc = (
        "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
        "2\tnot\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
        "3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n"
        "3.1\tskip\tskip\tVERB\t_\t_\t_\t_\t_\t_\n"
    )
    ts = parse_conllu(doc, STOP)
    assert [t.id for t in ts[0].sentences[0].tokens] == [1, 2, 3]


def test_wrong_column_count_raises_with_line_number():
    bad = "1\tonly\tfour\tcolumns\n"
    with pytest.raises(MalformedLine) as err:
        parse_conllu(bad, STOP)
    assert "1" in str(err.value)


def test_rootless_sentence_dropped_with_warning(caplog):
    doc = (
        "# sent_id = bad\n"
        "1\ta\ta\tDET\t_\t_\t2\tdet\t_\t_\n"
        "2\tdog\tdog\tNOUN\t_\t_\t1\tnsubj\t_\t_\n"
        "\n"
        "1\tok\tok\tADJ\t_\t_\t0\troot\t_\t_\n"
    )
    with caplog.at_level("WARNING"):
        ts = parse_conllu(doc, STOP)
    assert len(ts[0].sentences) == 1
    assert ts[0].sentences[0].tokens[0].lemma == "ok"
    assert any("bad" in r.message for r in caplog.records)


def test_two_roots_dropped():
    doc = (
        "1\trun\trun\tVERB\t_\t_\t0\troot\t_\t_\n"
        "2\tjump\tjump\tVERB\t_\t_\t0\troot\t_\t_\n"
    )
    ts = parse_conllu(doc, STOP)
    assert ts == [] or not ts[0].sentences


def test_empty_stopword_set_rejected():
    with pytest.raises(ValueError):
        parse_conllu(DOC, set())


def test_parse_file_matches_parse_string(tmp_path):
    p = tmp_path / "doc.conllu"
    p.write_text(DOC, encoding="utf-8")
    from_file = parse_conllu_file(str(p), STOP)
    from_str = parse_conllu(DOC, STOP)
    assert [t.transcript_id for t in from_file] == [t.transcript_id for t in from_str]
    assert from_file[0].sentences[0].tokens == from_str[0].sentences[0].tokens


def test_serialise_round_trip():
    ts = parse_conllu(DOC, STOP)
    again = parse_conllu(to_conllu(ts), STOP)
    assert len(again) == len(ts)
    for a, b in zip(again, ts):
        assert a.transcript_id == b.transcript_id
        assert a.demographics == b.demographics
        assert [s.tokens for s in a.sentences] == [s.tokens for s in b.sentences]


# ---------------------------------------------------------------------------
# token and tree invariants


def _tok(i, head, lemma="word"):
    return Token(id=i, surface=lemma, lemma=lemma, upos="NOUN", head=head,
                 deprel="dep", is_stopword=False, is_alpha=True)


def test_token_invariants():
    with pytest.raises(ValueError):
        _tok(0, 1)
    with pytest.raises(ValueError):
        _tok(2, 2)  # self-headed
    with pytest.raises(ValueError):
        Token(id=1, surface="X", lemma="X", upos="NOUN", head=0,
              deprel="dep", is_stopword=False, is_alpha=True)  # uppercase lemma


def test_sentence_tree_root_validation():
    with pytest.raises(MultipleRoots):
        SentenceTree("s", [_tok(1, 0), _tok(2, 0)])
    with pytest.raises(NoRoot):
        SentenceTree("s", [_tok(1, 2), _tok(2, 1)])
    with pytest.raises(NoRoot):
        SentenceTree("s", [_tok(1, 0), _tok(2, 9)])  # dangling head


def test_tree_distance_hand_values():
    # chain 3 <- 2 <- 1 with 4 hanging off 3:   1-2-3-4
    s = SentenceTree("s", [_tok(1, 2), _tok(2, 3), _tok(3, 0), _tok(4, 3)])
    assert tree_distance(s, 1, 1) == 0
    assert tree_distance(s, 1, 2) == 1
    assert tree_distance(s, 1, 4) == 3
    assert tree_distance(s, 2, 4) == 2
    with pytest.raises(UnknownToken):
        tree_distance(s, 1, 99)


def test_all_tree_distances_agrees_with_pairwise(caplog):
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(2, 10))
        # random tree: token i attaches to a random earlier token (or root)
        toks = [_tok(1, 0)]
        for i in range(2, n + 1):
            toks.append(_tok(i, int(rng.integers(0, i - 1)) + 1 if i > 1 else 0))
        # ensure exactly one root: others all head an earlier id
        s = SentenceTree("s", toks)
        full = all_tree_distances(s)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assert full[(i, j)] == tree_distance(s, i, j)
                assert full[(i, j)] == full[(j, i)]


def test_i_sick_fixture_parses_clean():
    ts = parse_conllu_file(str(DATA_DIR / "i_sick.conllu"), STOP)
    assert len(ts) == 1
    sent = ts[0].sentences[0]
    lemmas = {t.lemma: t.id for t in sent.tokens}
    assert tree_distance(sent, lemmas["i"], lemmas["sick"]) == 2
