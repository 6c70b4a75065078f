"""Line-oriented N-Triples parser for SKOS vocabularies.

Recognized predicates (matched by full IRI):

* ``skos:prefLabel`` -> term label (English-tagged literals preferred)
* ``skos:altLabel``  -> synonym
* ``skos:broader``   -> hierarchy edge (subject = child)

Anything else is ignored silently; syntactically invalid lines are
counted and skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .base import HierarchyEdge, OntologyTerm

SKOS = "http://www.w3.org/2004/02/skos/core#"
PREF_LABEL = SKOS + "prefLabel"
ALT_LABEL = SKOS + "altLabel"
BROADER = SKOS + "broader"

_IRI = r"<([^<>\s]*)>"
_BLANK = r"(_:[A-Za-z0-9][A-Za-z0-9._-]*)"
_LITERAL = r'"((?:[^"\\]|\\.)*)"(?:@([A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^<[^<>\s]*>)?'
_TRIPLE_RE = re.compile(
    rf"^(?:{_IRI}|{_BLANK})\s+{_IRI}\s+(?:{_IRI}|{_BLANK}|{_LITERAL})\s*\.\s*$"
)

_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        code = text[i + 1]
        if code == "u":
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif code == "U":
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            out.append(_ESCAPES.get(code, code))
            i += 2
    return "".join(out)


@dataclass
class SkosResult:
    terms: list[OntologyTerm] = field(default_factory=list)
    edges: list[HierarchyEdge] = field(default_factory=list)
    skipped_lines: int = 0


def _english_rank(lang: str) -> int:
    lang = lang.lower()
    if lang == "en":
        return 0
    if lang.startswith("en-"):
        return 1
    return 2


def parse_skos_ntriples(path: str | Path, ontology: str) -> SkosResult:
    result = SkosResult()
    order: list[str] = []
    pref: dict[str, list[tuple[str, str]]] = {}  # subject -> [(label, lang)]
    alt: dict[str, list[str]] = {}
    broader: dict[str, list[str]] = {}

    def touch(subject: str) -> None:
        if subject not in pref:
            order.append(subject)
            pref[subject] = []
            alt[subject] = []
            broader[subject] = []

    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            match = _TRIPLE_RE.match(line)
            if not match:
                result.skipped_lines += 1
                continue
            subj_iri, subj_blank, predicate, obj_iri, obj_blank, lit, lang = match.groups()
            subject = subj_iri if subj_iri is not None else subj_blank
            if predicate == PREF_LABEL and lit is not None:
                touch(subject)
                pref[subject].append((_unescape(lit), lang or ""))
            elif predicate == ALT_LABEL and lit is not None:
                touch(subject)
                alt[subject].append(_unescape(lit))
            elif predicate == BROADER and obj_iri is not None:
                touch(subject)
                broader[subject].append(obj_iri)

    for subject in order:
        labels = pref[subject]
        label = ""
        if labels:
            label = min(
                enumerate(labels), key=lambda item: (_english_rank(item[1][1]), item[0])
            )[1][0]
        synonyms: list[str] = []
        for text in alt[subject]:
            if text not in synonyms:
                synonyms.append(text)
        result.terms.append(OntologyTerm(subject, ontology, label, synonyms, False))
        for parent in broader[subject]:
            if parent != subject:
                result.edges.append(HierarchyEdge(subject, parent, "broader"))
    return result
