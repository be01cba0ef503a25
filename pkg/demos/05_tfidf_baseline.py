"""TF-IDF + logistic regression baseline under 3-fold cross-validation.

Run: python3 demos/05_tfidf_baseline.py
"""

from sentilens.baseline import stratified_kfold_cv, tfidf_fit, tfidf_transform
from sentilens.ingest import map_label
from sentilens.synthetic import generate_corpus
from sentilens.textprep import clean_text

# -- the representation -------------------------------------------------------
# Smoothed idf: ln((1+N)/(1+df)) + 1, raw counts, unit Euclidean norm.

docs = ["the game is great", "the game crashes a lot", "great fun great value"]
model = tfidf_fit(docs, max_features=100)
print("idf values:")
for term, idx in sorted(model.term_to_index.items()):
    print(f"  {term:<8} {model.idf[idx]:.4f}")

vec = tfidf_transform("great great game", model)
print("\n'great great game' ->", [(i, round(float(v), 4)) for i, v in vec.entries])
print("norm:", round(vec.norm(), 12))

# -- cross-validated baseline --------------------------------------------------
# Stratified folds, TF-IDF refit per training fold (no test leakage),
# class-weighted logistic regression by full-batch gradient descent.

records = [
    (clean_text(r.text), map_label(r.label))
    for r in generate_corpus(1200, positive_fraction=0.9, seed=3)
]
result = stratified_kfold_cv(records, k=3, seed=3, max_features=500, epochs=200)
for fold, score in enumerate(result.fold_f1):
    print(f"fold {fold}: weighted F1 = {score:.4f}")
print(f"mean weighted F1 = {result.mean_f1:.4f}")
