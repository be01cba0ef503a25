"""Review text normalization.

The pipeline is deliberately small and deterministic: lowercase, strip
URL/mention tokens, replace everything outside a-z with spaces, collapse
whitespace. No stopword removal, no stemming, no unicode normalization.
Output strings therefore contain only lowercase a-z words separated by
single spaces.
"""

import re

# Whitespace-delimited URL tokens (http://, https://, www.) and @mentions.
# Matched after lowercasing, so uppercase schemes are covered too.
_URL_OR_MENTION = re.compile(r"(?:https?://|www\.)\S*|@\S+")
_NON_ALPHA = re.compile(r"[^a-z]")


def clean_text(raw: str) -> str:
    """Normalize a raw review string.

    Steps, in order: (1) lowercase, (2) remove URL and mention tokens,
    (3) replace every character outside a-z with a space, (4) collapse
    runs of whitespace and trim. Total function: any input string is
    accepted and the result may be empty.
    """
    text = raw.lower()
    text = _URL_OR_MENTION.sub(" ", text)
    text = _NON_ALPHA.sub(" ", text)
    return " ".join(text.split())


def tokenize(cleaned: str) -> list[str]:
    """Whitespace-split a cleaned string (the only separator left)."""
    return cleaned.split()
