"""Small built-in English stopword list, overridable from a file."""

from __future__ import annotations

from pathlib import Path

# ~120 high-frequency function words; callers may replace or extend it.
DEFAULT_STOPWORDS = frozenset(
    """
    a about above after again all am an and any are as at be because been
    before being below between both but by can could did do does doing down
    during each few for from further had has have having he her here hers
    him his how i if in into is it its itself just me more most my myself
    no nor not now of off on once only or other our ours out over own s
    same she should so some such t than that the their theirs them then
    there these they this those through to too under until up very was we
    were what when where which while who whom why will with you your yours
    yourself itself ourselves themselves
    """.split()
)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One word per line; blank lines and ``#`` comments are skipped."""
    words = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)
