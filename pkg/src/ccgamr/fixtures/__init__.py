"""Bundled fixtures: a lexicon, derivation scripts, and gold graphs."""

from __future__ import annotations

from pathlib import Path

FIXTURES_DIR = Path(__file__).resolve().parent
LEXICON_PATH = FIXTURES_DIR / "paper.lex"


def fixture(name: str) -> Path:
    path = FIXTURES_DIR / name
    if not path.exists():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return path


def script(name: str) -> Path:
    return fixture(f"scripts/{name}.ccg")


def gold(name: str) -> Path:
    return fixture(f"gold/{name}.amr")
