"""CoNLL-U ingestion: tokens, sentence trees, transcripts, and tree distances.

The reader accepts standard 10-column CoNLL-U. Multiword-token ranges
("3-4") and empty nodes ("5.1") are skipped. `# newdoc id` starts a new
transcript, `# sent_id` names a sentence, and optional `# age` / `# sex`
comments attach demographics to the current transcript.
"""

from __future__ import annotations

import io
import logging
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import MalformedLine, MultipleRoots, NoRoot, UnknownToken

log = logging.getLogger(__name__)

_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")
_HAS_LETTER = re.compile(r"[^\W\d_]", re.UNICODE)
_HAS_DIGIT = re.compile(r"\d")


@dataclass(frozen=True)
class Token:
    """One syntactic word of a parsed sentence."""

    id: int
    surface: str
    lemma: str
    upos: str
    head: int
    deprel: str
    is_stopword: bool
    is_alpha: bool

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"token id must be >= 1, got {self.id}")
        if self.head < 0 or self.head == self.id:
            raise ValueError(f"bad head {self.head} for token {self.id}")
        if not self.lemma or self.lemma != self.lemma.lower():
            raise ValueError(f"lemma must be non-empty lowercase, got {self.lemma!r}")


@dataclass
class SentenceTree:
    """A rooted dependency tree over an ordered token list."""

    sentence_id: str
    tokens: list[Token]
    _adj: dict[int, list[int]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ids = {t.id for t in self.tokens}
        roots = [t.id for t in self.tokens if t.head == 0]
        if len(roots) > 1:
            raise MultipleRoots(f"{self.sentence_id}: roots at {roots}")
        if not roots:
            raise NoRoot(f"{self.sentence_id}: no token with head 0")
        for t in self.tokens:
            if t.head != 0 and t.head not in ids:
                raise NoRoot(f"{self.sentence_id}: head {t.head} of token {t.id} missing")
        adj: dict[int, list[int]] = {t.id: [] for t in self.tokens}
        for t in self.tokens:
            if t.head != 0:
                adj[t.id].append(t.head)
                adj[t.head].append(t.id)
        self._adj = adj
        # head pointers must reach the root without cycling
        root = roots[0]
        by_id = self.token_map()
        for t in self.tokens:
            cur, steps = t.id, 0
            while cur != root:
                cur = by_id[cur].head
                steps += 1
                if steps > len(self.tokens):
                    raise NoRoot(f"{self.sentence_id}: head cycle at token {t.id}")

    def token_map(self) -> dict[int, Token]:
        return {t.id: t for t in self.tokens}

    @property
    def root_id(self) -> int:
        return next(t.id for t in self.tokens if t.head == 0)


@dataclass
class Transcript:
    """All parsed sentences of one interview plus demographics."""

    transcript_id: str
    sentences: list[SentenceTree]
    demographics: dict[str, object] = field(default_factory=dict)


def _is_alpha_lemma(lemma: str) -> bool:
    return bool(_HAS_LETTER.search(lemma)) and not _HAS_DIGIT.search(lemma)


def tree_distance(s: SentenceTree, i: int, j: int) -> int:
    """Number of edges between tokens i and j in the undirected dependency tree."""
    if i not in s._adj:
        raise UnknownToken(f"{s.sentence_id}: token {i}")
    if j not in s._adj:
        raise UnknownToken(f"{s.sentence_id}: token {j}")
    if i == j:
        return 0
    seen = {i: 0}
    q = deque([i])
    while q:
        u = q.popleft()
        for v in s._adj[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                if v == j:
                    return seen[v]
                q.append(v)
    raise UnknownToken(f"{s.sentence_id}: no path {i}..{j}")  # unreachable on valid trees


def all_tree_distances(s: SentenceTree) -> dict[tuple[int, int], int]:
    """BFS from every token; returns distances for ordered id pairs."""
    out: dict[tuple[int, int], int] = {}
    for t in s.tokens:
        seen = {t.id: 0}
        q = deque([t.id])
        while q:
            u = q.popleft()
            for v in s._adj[u]:
                if v not in seen:
                    seen[v] = seen[u] + 1
                    q.append(v)
        for j, d in seen.items():
            out[(t.id, j)] = d
    return out


def _parse_demographic(key: str, value: str) -> object:
    if key == "age":
        return float(value)
    if key == "sex":
        return value.strip().lower()
    return value.strip()


def parse_conllu(stream, stopwords: set[str], default_transcript_id: str = "doc") -> list[Transcript]:
    """Parse a CoNLL-U byte or text stream into transcripts.

    Sentences with zero or multiple roots are dropped with a warning;
    a token line with the wrong field count rejects the whole file.
    """
    if not stopwords:
        raise ValueError("stopword set must be non-empty")
    if isinstance(stream, bytes):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        stream = io.StringIO(stream)
    elif hasattr(stream, "read") and isinstance(stream.read(0), bytes):
        stream = io.TextIOWrapper(stream, encoding="utf-8")

    transcripts: list[Transcript] = []
    current: Transcript | None = None
    sent_lines: list[tuple[int, str]] = []
    sent_meta: dict[str, str] = {}
    auto_sent = 0

    def ensure_transcript() -> Transcript:
        nonlocal current
        if current is None:
            current = Transcript(default_transcript_id, [])
            transcripts.append(current)
        return current

    def flush_sentence():
        nonlocal auto_sent, sent_lines, sent_meta
        if not sent_lines:
            sent_meta = {}
            return
        t = ensure_transcript()
        auto_sent += 1
        sid = sent_meta.get("sent_id", f"{t.transcript_id}-s{auto_sent}")
        tokens = []
        for lineno, line in sent_lines:
            fields = line.split("\t")
            if len(fields) != 10:
                raise MalformedLine(lineno, line)
            tok_id = fields[0]
            if _RANGE_ID.match(tok_id) or _EMPTY_ID.match(tok_id):
                continue
            lemma = fields[2].lower()
            if lemma in ("", "_"):
                lemma = fields[1].lower() or "_"
            tokens.append(
                Token(
                    id=int(tok_id),
                    surface=fields[1],
                    lemma=lemma,
                    upos=fields[3],
                    head=int(fields[6]),
                    deprel=fields[7],
                    is_stopword=lemma in stopwords,
                    is_alpha=_is_alpha_lemma(lemma),
                )
            )
        sent_lines = []
        sent_meta = {}
        if not tokens:
            return
        try:
            t.sentences.append(SentenceTree(sid, tokens))
        except (MultipleRoots, NoRoot) as exc:
            log.warning("dropping sentence %s: %s", sid, exc)

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if line == "":
            flush_sentence()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                key = key.strip()
                value = value.strip()
                if key == "newdoc id":
                    flush_sentence()
                    current = Transcript(value, [])
                    transcripts.append(current)
                    auto_sent = 0
                elif key == "sent_id":
                    sent_meta["sent_id"] = value
                elif key in ("age", "sex"):
                    ensure_transcript().demographics[key] = _parse_demographic(key, value)
            elif body == "newdoc":
                flush_sentence()
                current = Transcript(default_transcript_id, [])
                transcripts.append(current)
                auto_sent = 0
            continue
        sent_lines.append((lineno, line))
    flush_sentence()
    return [t for t in transcripts if t.sentences or t.demographics]


def to_conllu(transcripts: list[Transcript]) -> str:
    """Serialize transcripts back to CoNLL-U (round-trips with parse_conllu)."""
    out: list[str] = []
    for t in transcripts:
        out.append(f"# newdoc id = {t.transcript_id}")
        for key in ("age", "sex"):
            if key in t.demographics:
                value = t.demographics[key]
                if key == "age" and float(value) == int(float(value)):
                    value = int(float(value))
                out.append(f"# {key} = {value}")
        for s in t.sentences:
            out.append(f"# sent_id = {s.sentence_id}")
            for tok in s.tokens:
                out.append(
                    "\t".join(
                        [
                            str(tok.id),
                            tok.surface,
                            tok.lemma,
                            tok.upos,
                            "_",
                            "_",
                            str(tok.head),
                            tok.deprel,
                            "_",
                            "_",
                        ]
                    )
                )
            out.append("")
    return "\n".join(out) + ("\n" if out else "")


def parse_conllu_file(path, stopwords: set[str]) -> list[Transcript]:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_conllu(data, stopwords, default_transcript_id=_stem(path))


def _stem(path) -> str:
    name = str(path).replace("\\", "/").rsplit("/", 1)[-1]
    return name.rsplit(".", 1)[0] if "." in name else name
