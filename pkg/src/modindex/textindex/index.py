from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from modindex.textindex.query import And, Node, Not, Or, Term, positive_terms, tokenize


class IndexFormatError(ValueError):
    """Bad corpus or malformed index file."""


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class Hit:
    doc_id: str
    score: int


@dataclass
class InvertedIndex:
    """term -> {doc_id: tf}; terms and each postings map are kept in sorted order."""

    terms: dict[str, dict[str, int]] = field(default_factory=dict)
    doc_count: int = 0
    total_terms: int = 0

    def postings(self, term: str) -> list[tuple[str, int]]:
        return list(self.terms.get(term, {}).items())

    def doc_ids(self) -> set[str]:
        ids: set[str] = set()
        for plist in self.terms.values():
            ids.update(plist)
        return ids

    def to_dict(self) -> dict:
        return {
            "doc_count": self.doc_count,
            "total_terms": self.total_terms,
            "terms": {t: [[d, tf] for d, tf in p.items()] for t, p in self.terms.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InvertedIndex":
        try:
            doc_count = data["doc_count"]
            total_terms = data["total_terms"]
            raw_terms = data["terms"]
        except (KeyError, TypeError) as e:
            raise IndexFormatError(f"index file missing field {e}") from None
        if not isinstance(doc_count, int) or not isinstance(total_terms, int):
            raise IndexFormatError("doc_count and total_terms must be integers")
        if not isinstance(raw_terms, dict):
            raise IndexFormatError("'terms' must be an object")
        terms: dict[str, dict[str, int]] = {}
        tf_sum = 0
        for term in sorted(raw_terms):
            plist: dict[str, int] = {}
            for entry in raw_terms[term]:
                if (
                    not isinstance(entry, list)
                    or len(entry) != 2
                    or not isinstance(entry[0], str)
                    or not isinstance(entry[1], int)
                    or entry[1] < 1
                ):
                    raise IndexFormatError(f"bad posting for term {term!r}: {entry!r}")
                if entry[0] in plist:
                    raise IndexFormatError(f"duplicate posting {entry[0]!r} for {term!r}")
                plist[entry[0]] = entry[1]
                tf_sum += entry[1]
            terms[term] = dict(sorted(plist.items()))
        if tf_sum != total_terms:
            raise IndexFormatError(
                f"total_terms {total_terms} disagrees with postings sum {tf_sum}"
            )
        return cls(terms, doc_count, total_terms)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":")) + "\n"


def build_index(docs: Iterable[Document]) -> InvertedIndex:
    seen: set[str] = set()
    acc: dict[str, dict[str, int]] = {}
    total = 0
    for doc in docs:
        if not doc.id:
            raise IndexFormatError("document id must be non-empty")
        if doc.id in seen:
            raise IndexFormatError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
        counts = Counter(tokenize(doc.text))
        total += sum(counts.values())
        for term, tf in counts.items():
            acc.setdefault(term, {})[doc.id] = tf
    terms = {t: dict(sorted(acc[t].items())) for t in sorted(acc)}
    return InvertedIndex(terms, len(seen), total)


def _rank(scores: dict[str, int]) -> list[Hit]:
    return [Hit(d, s) for d, s in sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))]


def query_index(index: InvertedIndex, q: Node) -> list[Hit]:
    """Evaluate *q* with set semantics; NOT complements within the positive candidates."""
    pos = positive_terms(q)
    empty: dict[str, int] = {}
    candidates: set[str] = set()
    for t in pos:
        candidates.update(index.terms.get(t, empty))

    def ev(n: Node) -> set[str]:
        if isinstance(n, Term):
            return set(index.terms.get(n.term, empty))
        if isinstance(n, And):
            return ev(n.left) & ev(n.right)
        if isinstance(n, Or):
            return ev(n.left) | ev(n.right)
        return candidates - ev(n.child)

    hits = ev(q)
    scores = {}
    plists = [index.terms.get(t, empty) for t in pos]
    for d in hits:
        scores[d] = sum(p.get(d, 0) for p in plists)
    return _rank(scores)


def _matches(n: Node, present: set[str], in_candidates: bool) -> bool:
    if isinstance(n, Term):
        return n.term in present
    if isinstance(n, And):
        return _matches(n.left, present, in_candidates) and _matches(
            n.right, present, in_candidates
        )
    if isinstance(n, Or):
        return _matches(n.left, present, in_candidates) or _matches(
            n.right, present, in_candidates
        )
    assert isinstance(n, Not)
    return in_candidates and not _matches(n.child, present, in_candidates)


def scan_query(docs: Iterable[Document], q: Node) -> list[Hit]:
    """Linear-scan baseline: tokenizes every document at query time."""
    pos = positive_terms(q)
    scores = {}
    for doc in docs:
        lowered = doc.text.lower()
        # every token is a substring of the lowercased text, so this skip is exact
        if not any(t in lowered for t in pos):
            continue
        tokens = tokenize(doc.text)
        present = set(tokens)
        in_candidates = any(t in present for t in pos)
        if in_candidates and _matches(q, present, in_candidates):
            scores[doc.id] = sum(tokens.count(t) for t in pos)
    return _rank(scores)


def save_index(index: InvertedIndex, path: str | Path) -> None:
    Path(path).write_text(index.dumps(), encoding="utf-8")


def load_index(path: str | Path) -> InvertedIndex:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise IndexFormatError(
            f"{path}: invalid index JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    return InvertedIndex.from_dict(data)
