"""Pipeline configuration: INI text with one section per module."""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path

__all__ = ["DEFAULTS", "Config", "load_config", "defaults_text"]

DEFAULTS: dict[str, dict[str, str]] = {
    "run": {"seed": "0", "trials": "20", "workers": "1"},
    "ingest": {
        "input": "",
        "year_min": "",
        "year_max": "",
        "subject_categories": "",
        "disambiguation": "",
    },
    "authors": {"min_pubs": "2"},
    "graph": {"max_authors": ""},
    "cluster": {"teleport": "0.15"},
    "roles": {"min_members": "30", "alpha": "0.05"},
    "topics": {"min_frac": "0.02", "top_n": "5"},
    "rir": {"window": "5", "start": "1996", "end": "2010"},
    "affinity": {"mode": "citation"},
    "delineation": {"top_k": "4", "researchers": ""},
}


def defaults_text() -> str:
    cp = configparser.ConfigParser()
    cp.read_dict(DEFAULTS)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


@dataclass
class Config:
    parser: configparser.ConfigParser

    def get(self, section: str, key: str) -> str:
        return self.parser.get(section, key)

    def getint(self, section: str, key: str) -> int | None:
        v = self.get(section, key).strip()
        return int(v) if v else None

    def getfloat(self, section: str, key: str) -> float:
        return self.parser.getfloat(section, key)

    def set(self, section: str, key: str, value) -> None:
        self.parser.set(section, key, "" if value is None else str(value))

    def section(self, name: str) -> dict[str, str]:
        return dict(self.parser[name])

    def as_dict(self) -> dict[str, dict[str, str]]:
        return {s: dict(self.parser[s]) for s in self.parser.sections()}


def load_config(path: str | Path | None = None, text: str | None = None) -> Config:
    """Defaults overlaid by a file or string; unknown sections/keys are errors."""
    cp = configparser.ConfigParser()
    cp.read_dict(DEFAULTS)
    user = configparser.ConfigParser()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            user.read_file(fh)
    if text is not None:
        user.read_string(text)
    for sec in user.sections():
        if sec not in DEFAULTS:
            raise ValueError(f"unknown config section [{sec}]; valid: {', '.join(DEFAULTS)}")
        for key, value in user[sec].items():
            if key not in DEFAULTS[sec]:
                raise ValueError(f"unknown key {key!r} in [{sec}]; valid: {', '.join(DEFAULTS[sec])}")
            cp.set(sec, key, value)
    return Config(cp)
