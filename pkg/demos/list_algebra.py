"""
List vectors behave like a functional stack
===========================================

Token chains are trees with one attribute. Their encodings support push
directly, and the head pops off with one subtraction and one rotation,
no decoding of the tail required.
"""

import numpy as np

from btembed import (
    cardinality_estimate,
    decode,
    encode_list,
    make_embedding,
    make_sweep_schema,
    push,
    zero_vector,
)

schema = make_sweep_schema(20, 1)  # 20 labels plus the "next" attribute
e = make_embedding(schema, dim=768, seed=3)


def labels(tree):
    # walk the single-attribute chain back into a plain list
    out = []
    while tree is not None:
        out.append(tree.label)
        tree = dict(tree.children).get(0)
    return out


word = [4, 11, 0, 17, 9]
v = encode_list(e, word)
print("decoded chain:", labels(decode(e, v)))

# build the same vector by pushing right to left
acc = zero_vector(e)
for tok in reversed(word):
    acc = push(e, acc, tok)
print("push fold matches:", bool(np.abs(acc.data - v.data).max() < 1e-9))

# pop the head: subtract its token vector, rotate by the inverse step.
# orthogonal matrices invert by transposition, so this is exact and cheap.
nxt = e.attribute_matrix("next")
rest = e.wrap(nxt.T @ (v.data - e.token_vector(word[0])))
print("after shift:", labels(decode(e, rest)))
print("lengths:", cardinality_estimate(v), "->", cardinality_estimate(rest))
