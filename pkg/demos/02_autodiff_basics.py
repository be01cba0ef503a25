"""The reverse-mode tensor engine behind the classifier.

Run: python3 demos/02_autodiff_basics.py
"""

import numpy as np

from sentilens import autodiff as ad
from sentilens.autodiff import Tensor

# -- forward + backward -------------------------------------------------------
# Every primitive records a tape entry; backward() walks the tape in
# reverse and accumulates gradients into .grad.

w = Tensor(np.array([[0.5, -1.0], [2.0, 0.0]]), requires_grad=True)
x = Tensor(np.array([[1.0], [3.0]]))

loss = ad.tsum(ad.tanh(ad.matmul(w, x)))
ad.backward(loss)
print("loss:", float(loss.values))
print("dloss/dw:\n", w.grad)

# -- gradient checking --------------------------------------------------------
# Central finite differences over every element; the engine refuses to
# check a stochastic forward pass (e.g. with dropout active).

w.zero_grad()


def forward():
    return ad.tsum(ad.tanh(ad.matmul(w, x)))


err = ad.grad_check(forward, [w], epsilon=1e-5)
print(f"\nmax relative error vs finite differences: {err:.2e}")

# -- masked softmax -----------------------------------------------------------
# Attention uses this: masked positions get exactly zero weight.

scores = Tensor(np.array([[2.0, 1.0, -0.5, 9.9]]))
mask = np.array([[True, True, True, False]])  # last position is padding
alpha = ad.masked_softmax(scores, mask, axis=1)
print("\nmasked softmax:", alpha.values, "(row sums to", alpha.values.sum(), ")")

# -- inverted dropout ---------------------------------------------------------

rng = np.random.Generator(np.random.Philox(0))
big = Tensor(np.full(100_000, 3.0))
dropped = ad.dropout(big, rate=0.3, rng=rng, training=True)
print(f"\ndropout keeps the expectation: mean = {dropped.values.mean():.4f} (input 3.0)")
