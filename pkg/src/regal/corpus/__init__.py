"""Small programs with their initial grammars, used by tests and demos."""

from __future__ import annotations

from importlib import resources

from ..frontend import load

#: programs on which the analysis must be sound and self-verifying
CORPUS = (
    "append", "nrev", "length", "evenodd", "member", "revacc", "flatten",
    "qsort", "path", "perm", "plus", "last", "badcall", "goodcall", "chain",
)


def source(name: str) -> tuple[str, str]:
    """Program text and initial-grammar text of a corpus entry."""
    base = resources.files(__name__)
    return (base / f"{name}.pl").read_text(), (base / f"{name}.tg").read_text()


def load_example(name: str):
    return load(*source(name))


def path(name: str, ext: str = "pl"):
    return resources.files(__name__) / f"{name}.{ext}"
