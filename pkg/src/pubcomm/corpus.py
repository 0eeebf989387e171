"""Bibliographic records: WoS flat-file ingestion, canonical persistence and
author-level tables.

The canonical on-disk form is newline-delimited JSON, one record per line,
keys in this fixed order::

    record_id, year, authors, title, journal, subject_categories,
    addresses, cited_refs

``authors`` is a list of ``[last_name, initials, resolved_id]`` triples,
``cited_refs`` a list of ``[raw, year, matched_record_id]`` triples,
``subject_categories`` is sorted, ``addresses`` holds ISO-3166 alpha-2 codes
in the order they were listed. Missing values are ``null``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import IO, Iterable, Iterator, Mapping

log = logging.getLogger(__name__)

__all__ = [
    "AuthorName",
    "CitedRef",
    "BiblioRecord",
    "Corpus",
    "AuthorEntry",
    "AuthorTable",
    "parse_wos_flatfile",
    "normalize_corpus",
    "apply_subject_filter",
    "apply_disambiguation",
    "load_disambiguation_map",
    "build_author_table",
    "last_name_commonality",
    "dump_canonical",
    "load_canonical",
    "normalize_last_name",
    "country_code",
]


@dataclass(frozen=True)
class AuthorName:
    last_name: str
    initials: str = ""
    resolved_id: str | None = None

    @property
    def key(self) -> str:
        """Author identity: the resolved id when present, else ``LAST, I``."""
        if self.resolved_id is not None:
            return self.resolved_id
        return f"{self.last_name}, {self.initials}" if self.initials else self.last_name


@dataclass(frozen=True)
class CitedRef:
    raw: str
    year: int | None = None
    matched_record_id: str | None = None


@dataclass(frozen=True)
class BiblioRecord:
    record_id: str
    year: int
    authors: tuple[AuthorName, ...]
    title: str = ""
    journal: str = ""
    subject_categories: frozenset[str] = frozenset()
    addresses: tuple[str, ...] = ()
    cited_refs: tuple[CitedRef, ...] = ()

    def author_keys(self) -> list[str]:
        """Distinct author identities, in byline order."""
        seen: dict[str, None] = {}
        for a in self.authors:
            seen.setdefault(a.key, None)
        return list(seen)


# ---------------------------------------------------------------------------
# name and country normalization

_NAME_DROP = re.compile(r"[^A-Z \-']")


def normalize_last_name(name: str) -> str:
    folded = unicodedata.normalize("NFKD", name)
    folded = "".join(c for c in folded if not unicodedata.combining(c))
    folded = folded.encode("ascii", "ignore").decode("ascii").upper()
    folded = _NAME_DROP.sub("", folded)
    return " ".join(folded.split())


def _normalize_initials(text: str) -> str:
    folded = normalize_last_name(text)
    return "".join(c for c in folded if c.isalpha())


def _parse_author(text: str) -> AuthorName | None:
    text = text.strip()
    if not text:
        return None
    if "," in text:
        last, _, rest = text.partition(",")
    else:
        parts = text.split()
        if len(parts) > 1 and parts[-1].isupper() and len(parts[-1]) <= 3:
            last, rest = " ".join(parts[:-1]), parts[-1]
        else:
            last, rest = text, ""
    last = normalize_last_name(last)
    if not last:
        return None
    return AuthorName(last, _normalize_initials(rest))


def _load_countries() -> tuple[dict[str, str], dict[str, str]]:
    names: dict[str, str] = {}
    continents: dict[str, str] = {}
    text = resources.files("pubcomm.data").joinpath("countries.csv").read_text("utf-8")
    for row in csv.DictReader(io.StringIO(text)):
        code = row["iso2"]
        continents[code] = row["continent"]
        for alias in row["names"].split("|"):
            names[alias.strip().upper()] = code
    return names, continents


_COUNTRY_NAMES, CONTINENTS = _load_countries()
_US_TAIL = re.compile(r"(?:^|\s)USA$")


def country_code(address: str) -> str | None:
    """ISO alpha-2 code from the trailing token of a WoS C1 address line."""
    text = re.sub(r"^\[[^\]]*\]\s*", "", address.strip()).rstrip(". ")
    if not text:
        return None
    tail = text.rsplit(",", 1)[-1].strip().upper()
    if _US_TAIL.search(tail):
        return "US"
    if tail in _COUNTRY_NAMES:
        return _COUNTRY_NAMES[tail]
    # "PEOPLES R CHINA" style tails sometimes carry a postcode prefix
    words = tail.split()
    for i in range(1, len(words)):
        cand = " ".join(words[i:])
        if cand in _COUNTRY_NAMES:
            return _COUNTRY_NAMES[cand]
    if len(tail) == 2 and tail in CONTINENTS:
        return tail
    return None


# ---------------------------------------------------------------------------
# WoS tagged flat file

_YEAR_TOKEN = re.compile(r"^(1[5-9]\d\d|20\d\d)$")


def _ref_year(raw: str) -> int | None:
    for tok in raw.split(","):
        tok = tok.strip()
        if _YEAR_TOKEN.match(tok):
            return int(tok)
    return None


def _iter_tagged(lines: Iterable[str]) -> Iterator[tuple[int, str, str]]:
    tag = None
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("   ") and tag is not None:
            yield lineno, tag, line.strip()
            continue
        tag, value = line[:2], line[3:].strip() if len(line) > 2 else ""
        yield lineno, tag, value


def _build_record(fields: dict[str, list[str]], start: int, errors: list) -> BiblioRecord | None:
    ut = " ".join(fields.get("UT", [])).strip()
    py = " ".join(fields.get("PY", [])).strip()
    missing = [t for t, v in (("UT", ut), ("PY", py)) if not v]
    if missing:
        msg = f"record at line {start}: missing {', '.join(missing)}"
        log.warning("rejected %s", msg)
        errors.append((start, msg))
        return None
    try:
        year = int(py[:4])
    except ValueError:
        msg = f"record at line {start}: bad PY {py!r}"
        log.warning("rejected %s", msg)
        errors.append((start, msg))
        return None
    authors = tuple(a for a in map(_parse_author, fields.get("AU", [])) if a is not None)
    cats: set[str] = set()
    for line in fields.get("SC", []) + fields.get("WC", []):
        cats.update(c.strip().upper() for c in line.split(";") if c.strip())
    addresses = tuple(c for c in map(country_code, fields.get("C1", [])) if c)
    refs = tuple(CitedRef(r, _ref_year(r)) for r in fields.get("CR", []) if r.strip())
    return BiblioRecord(
        record_id=ut,
        year=year,
        authors=authors,
        title=" ".join(fields.get("TI", [])),
        journal=" ".join(fields.get("SO", [])).upper(),
        subject_categories=frozenset(cats),
        addresses=addresses,
        cited_refs=refs,
    )


def parse_wos_flatfile(stream: bytes | str | IO, errors: list | None = None) -> list[BiblioRecord]:
    """Parse a WoS tagged export into records.

    ``stream`` may be raw bytes, already-decoded text, or a file object.
    Malformed blocks are logged and, when ``errors`` is given, appended to it
    as ``(line_number, message)``.
    """
    if errors is None:
        errors = []
    if hasattr(stream, "read"):
        stream = stream.read()
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8-sig")
    stream = stream.lstrip("﻿")

    records: list[BiblioRecord] = []
    fields: dict[str, list[str]] | None = None
    start = 0
    for lineno, tag, value in _iter_tagged(stream.splitlines()):
        if tag == "PT":
            if fields is not None:
                rec = _build_record(fields, start, errors)
                if rec is not None:
                    records.append(rec)
            fields, start = {"PT": [value]}, lineno
        elif tag == "ER":
            if fields is None:
                continue
            rec = _build_record(fields, start, errors)
            if rec is not None:
                records.append(rec)
            fields = None
        elif tag in ("FN", "VR", "EF"):
            continue
        else:
            if fields is None:
                fields, start = {}, lineno
            fields.setdefault(tag, []).append(value)
    if fields is not None:
        rec = _build_record(fields, start, errors)
        if rec is not None:
            records.append(rec)
    return records


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class Corpus:
    records: tuple[BiblioRecord, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {r.record_id: r for r in self.records})

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[BiblioRecord]:
        return iter(self.records)

    def __contains__(self, record_id: object) -> bool:
        return record_id in self._by_id

    def __getitem__(self, record_id: str) -> BiblioRecord:
        return self._by_id[record_id]

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(self._by_id)

    def get(self, record_id: str) -> BiblioRecord | None:
        return self._by_id.get(record_id)

    def dumps(self) -> str:
        return dump_canonical(self.records)


def _match_ref(ref: CitedRef, citing: str, by_id: Mapping[str, BiblioRecord]) -> CitedRef:
    raw = ref.raw.strip()
    candidates = [raw] + [t.strip() for t in raw.split(",")]
    matched = None
    for cand in candidates:
        if cand and cand != citing and cand in by_id:
            matched = cand
            break
    year = ref.year
    if year is None and matched is not None:
        year = by_id[matched].year
    return CitedRef(ref.raw, year, matched)


def normalize_corpus(
    records: Iterable[BiblioRecord],
    year_range: tuple[int, int] | None = None,
) -> Corpus:
    """Deduplicate, normalize names and resolve in-corpus references."""
    warnings: list[str] = []
    kept: dict[str, BiblioRecord] = {}
    for rec in records:
        if rec.record_id in kept:
            msg = f"duplicate record_id {rec.record_id}; later copy dropped"
            log.warning(msg)
            warnings.append(msg)
            continue
        if year_range is not None and not (year_range[0] <= rec.year <= year_range[1]):
            msg = f"record {rec.record_id} year {rec.year} outside {year_range[0]}-{year_range[1]}; dropped"
            log.warning(msg)
            warnings.append(msg)
            continue
        if not rec.authors:
            msg = f"record {rec.record_id} has no authors; dropped"
            log.warning(msg)
            warnings.append(msg)
            continue
        authors = tuple(
            AuthorName(normalize_last_name(a.last_name), _normalize_initials(a.initials), a.resolved_id)
            for a in rec.authors
        )
        kept[rec.record_id] = replace(rec, authors=authors)

    out = []
    for rec in kept.values():
        refs = tuple(_match_ref(r, rec.record_id, kept) for r in rec.cited_refs)
        out.append(replace(rec, cited_refs=refs))
    return Corpus(tuple(out), tuple(warnings))


def apply_subject_filter(corpus: Corpus, allowed: Iterable[str]) -> Corpus:
    allowed = {a.upper() for a in allowed}
    if not allowed:
        raise ValueError("allowed subject categories must be non-empty")
    kept = tuple(r for r in corpus if r.subject_categories & allowed)
    removed = len(corpus) - len(kept)
    log.info("subject filter removed %d of %d records", removed, len(corpus))
    msg = f"subject filter removed {removed} records"
    return Corpus(kept, corpus.warnings + (msg,))


def load_disambiguation_map(stream: str | IO) -> dict[tuple[str, int], str]:
    """Read ``record_id, author_position, resolved_id`` rows (1-based positions)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    out = {}
    for row in csv.reader(stream):
        if not row or row[0].strip().lower() == "record_id":
            continue
        rid, pos, resolved = (c.strip() for c in row[:3])
        out[(rid, int(pos))] = resolved
    return out


def apply_disambiguation(corpus: Corpus, mapping: Mapping[tuple[str, int], str]) -> Corpus:
    records = []
    for rec in corpus:
        authors = tuple(
            replace(a, resolved_id=mapping.get((rec.record_id, i), a.resolved_id))
            for i, a in enumerate(rec.authors, 1)
        )
        records.append(replace(rec, authors=authors))
    return Corpus(tuple(records), corpus.warnings)


# ---------------------------------------------------------------------------
# canonical persistence


def _record_to_obj(rec: BiblioRecord) -> dict:
    return {
        "record_id": rec.record_id,
        "year": rec.year,
        "authors": [[a.last_name, a.initials, a.resolved_id] for a in rec.authors],
        "title": rec.title,
        "journal": rec.journal,
        "subject_categories": sorted(rec.subject_categories),
        "addresses": list(rec.addresses),
        "cited_refs": [[r.raw, r.year, r.matched_record_id] for r in rec.cited_refs],
    }


def _record_from_obj(obj: dict) -> BiblioRecord:
    return BiblioRecord(
        record_id=obj["record_id"],
        year=int(obj["year"]),
        authors=tuple(AuthorName(*a) for a in obj["authors"]),
        title=obj.get("title", ""),
        journal=obj.get("journal", ""),
        subject_categories=frozenset(obj.get("subject_categories", ())),
        addresses=tuple(obj.get("addresses", ())),
        cited_refs=tuple(CitedRef(*r) for r in obj.get("cited_refs", ())),
    )


def dump_canonical(records: Iterable[BiblioRecord]) -> str:
    lines = [
        json.dumps(_record_to_obj(r), ensure_ascii=False, separators=(",", ":"))
        for r in records
    ]
    return "".join(line + "\n" for line in lines)


def load_canonical(text: str | bytes) -> Corpus:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    records = [_record_from_obj(json.loads(line)) for line in text.splitlines() if line.strip()]
    return Corpus(tuple(records))


# ---------------------------------------------------------------------------
# author tables


@dataclass(frozen=True)
class AuthorEntry:
    publication_count: int
    record_ids: frozenset[str]
    last_name: str


@dataclass(frozen=True)
class AuthorTable:
    entries: Mapping[str, AuthorEntry]
    min_pubs: int = 1
    total_authors: int = 0
    removed: int = 0
    one_time_authors: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, author_id: object) -> bool:
        return author_id in self.entries

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, author_id: str) -> AuthorEntry:
        return self.entries[author_id]


def build_author_table(corpus: Corpus, min_pubs: int = 1) -> AuthorTable:
    """Per-author publication sets, keeping authors with ``>= min_pubs`` records.

    ``one_time_authors`` counts authors with a single publication in the whole
    corpus regardless of the threshold; ``removed`` counts those dropped.
    """
    if min_pubs < 1:
        raise ValueError("min_pubs must be >= 1")
    recs: dict[str, set[str]] = {}
    names: dict[str, str] = {}
    for rec in corpus:
        for a in rec.authors:
            recs.setdefault(a.key, set()).add(rec.record_id)
            names.setdefault(a.key, a.last_name)
    entries = {
        k: AuthorEntry(len(v), frozenset(v), names[k])
        for k, v in sorted(recs.items())
        if len(v) >= min_pubs
    }
    one_timers = sum(1 for v in recs.values() if len(v) == 1)
    return AuthorTable(entries, min_pubs, len(recs), len(recs) - len(entries), one_timers)


def last_name_commonality(table: AuthorTable) -> dict[str, int]:
    return dict(Counter(e.last_name for e in table.entries.values()))
