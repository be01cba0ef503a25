"""Text cleaning and vocabulary encoding, step by step.

Run: python3 demos/01_cleaning_and_vocabulary.py
"""

from sentilens.textprep import clean_text
from sentilens.vocab import Vocabulary, decode, encode

# -- cleaning ----------------------------------------------------------------
# Four steps: lowercase, strip URLs/mentions, keep only a-z, squeeze spaces.

samples = [
    "Check THIS out http://store.example/app/123 NOW!!! @dev_team",
    "Great game 10/10, würde again",
    "Runs smooth on my rig... LOVE it <3",
]
for raw in samples:
    print(f"raw:     {raw!r}")
    print(f"cleaned: {clean_text(raw)!r}\n")

# -- vocabulary --------------------------------------------------------------
# Most-frequent tokens win; ties break alphabetically; index 0 is padding
# and index 1 is the unknown-token bucket.

corpus = [clean_text(s) for s in samples] + ["love love this game", "game runs great"]
vocab = Vocabulary.build(corpus, max_size=10)
print(f"vocabulary ({vocab.size} entries): {vocab.index_to_token}")

# -- encoding ----------------------------------------------------------------
# Fixed-length index sequences: truncate to max_len, pad with zeros.

example = encode("love this great game zzz", vocab, max_len=8, label=1)
print(f"\nindices: {example.indices.tolist()}  (length {example.length})")
print(f"decoded: {decode(example.indices, example.length, vocab)!r}")
print("('zzz' was never seen, so it maps to the <unk> index 1)")
