"""Embeddings: token vectors, orthogonal attribute matrices, and the algebra.

A tree embeds as a superposition of its nodes. Each node contributes its
token vector rotated by the product of the attribute matrices along the path
from the root, taken left to right. Because the matrices are orthogonal the
per-node contributions keep unit norm, and in high dimension they are nearly
orthogonal to each other, which is what makes decoding possible.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DimensionTooSmallError, SchemaMismatchError
from .schema import Schema, Tree
from .vectors import BTVector

GENERATOR_NAME = "philox"
_MAX_SEED = 2**64 - 1


def haar_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw an orthogonal matrix uniformly with respect to Haar measure.

    QR of a standard Gaussian matrix, with each column of Q multiplied by the
    sign of the matching diagonal entry of R. The sign correction removes the
    factorization's convention bias; without it the distribution is not Haar.
    """
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diagonal(r))
    signs[signs == 0] = 1.0
    return q * signs


def embedding_fingerprint(schema: Schema, dim: int, seed: int) -> str:
    """Hex digest identifying an embedding; arrays are determined by these inputs."""
    h = hashlib.sha256()
    h.update(schema.digest())
    h.update(struct.pack("<IQ", dim, seed))
    return h.hexdigest()


@dataclass(frozen=True)
class Embedding:
    """Frozen bundle of schema, token vectors, and attribute matrices.

    token_vectors has shape (n_tokens, dim) with unit rows. attribute_matrices
    has shape (n_attributes, dim, dim); each slice is orthogonal, so its
    inverse is its transpose.
    """

    schema: Schema
    dim: int
    seed: int
    generator: str
    token_vectors: np.ndarray
    attribute_matrices: np.ndarray
    fingerprint: str

    def token_vector(self, token: int | str) -> np.ndarray:
        idx = self.schema.token_index(token) if isinstance(token, str) else token
        return self.token_vectors[idx]

    def attribute_matrix(self, attr: int | str) -> np.ndarray:
        idx = self.schema.attribute_index(attr) if isinstance(attr, str) else attr
        return self.attribute_matrices[idx]

    def wrap(self, data: np.ndarray) -> BTVector:
        return BTVector(data, self.fingerprint)

    def check(self, v: BTVector) -> np.ndarray:
        if v.fingerprint != self.fingerprint:
            raise SchemaMismatchError(
                f"vector fingerprint {v.fingerprint[:12]} does not match "
                f"embedding {self.fingerprint[:12]}"
            )
        return v.data


def make_embedding(schema: Schema, dim: int, seed: int) -> Embedding:
    """Sample an embedding deterministically from a 64-bit seed.

    The counter-based Philox generator keyed by the seed makes the draw
    reproducible across platforms. Token vectors are drawn first (normalized
    Gaussian rows), then one Haar orthogonal matrix per attribute in schema
    order; the order is part of the format contract.
    """
    if dim < 2:
        raise DimensionTooSmallError(f"dim must be at least 2, got {dim}")
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    rng = np.random.Generator(np.random.Philox(key=seed))
    tok = rng.standard_normal((schema.n_tokens, dim))
    tok /= np.linalg.norm(tok, axis=1, keepdims=True)
    mats = np.empty((schema.n_attributes, dim, dim))
    for i in range(schema.n_attributes):
        mats[i] = haar_orthogonal(dim, rng)
    return Embedding(
        schema=schema,
        dim=dim,
        seed=seed,
        generator=GENERATOR_NAME,
        token_vectors=tok,
        attribute_matrices=mats,
        fingerprint=embedding_fingerprint(schema, dim, seed),
    )


def zero_vector(e: Embedding) -> BTVector:
    return e.wrap(np.zeros(e.dim))


def bt_encode(e: Embedding, tree: Tree) -> BTVector:
    """Embed a tree bottom-up.

    enc(node) = token(label) + sum over children of M_attr @ enc(child),
    which equals the per-node path-product sum without ever materializing a
    matrix chain; cost is one matrix-vector product per edge.
    """

    def enc(node: Tree) -> np.ndarray:
        if node.label >= e.schema.n_tokens:
            raise ValueError(f"label {node.label} outside schema")
        acc = e.token_vectors[node.label].copy()
        for attr, sub in node.children:
            if attr >= e.schema.n_attributes:
                raise ValueError(f"attribute {attr} outside schema")
            acc += e.attribute_matrices[attr] @ enc(sub)
        return acc

    return e.wrap(enc(tree))


def cardinality_estimate(v: BTVector) -> int:
    """Nearest integer to the squared norm, the node count in expectation."""
    return int(np.rint(v.data @ v.data))


def attach(
    e: Embedding, v1: BTVector, path: Sequence[int | str], attr: int | str, v2: BTVector
) -> BTVector:
    """Graft the tree behind v2 under `attr` at the node addressed by `path`.

    Linear in both operands: the result is v1 plus v2 rotated by the path
    product extended with the attachment attribute, innermost. Matches
    bt_encode of the composed tree exactly when the slot is free.
    """
    a = e.check(v1)
    b = e.check(v2)
    u = e.attribute_matrix(attr) @ b
    for q in reversed(list(path)):
        u = e.attribute_matrix(q) @ u
    return e.wrap(a + u)


def encode_list(e: Embedding, tokens: Sequence[int | str], next_attr: int | str = "next") -> BTVector:
    """Embed a non-empty token sequence as a chain along the next attribute."""
    if len(tokens) == 0:
        raise ValueError("encode_list needs a non-empty sequence")
    nxt = e.attribute_matrix(next_attr)
    acc = e.token_vector(tokens[-1]).copy()
    for t in reversed(tokens[:-1]):
        acc = e.token_vector(t) + nxt @ acc
    return e.wrap(acc)


def push(e: Embedding, v: BTVector, token: int | str, next_attr: int | str = "next") -> BTVector:
    """Prepend a token to a chain: token vector plus the shifted payload."""
    data = e.check(v)
    return e.wrap(e.token_vector(token) + e.attribute_matrix(next_attr) @ data)
