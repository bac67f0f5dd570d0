"""A fixed-weight transformer that walks attribute paths in embedding space.

The decoder runs n slots for a length n-1 path. Slot 1 starts with the query
vector and the path (as a token chain shifted once along next); every block
moves each slot's working vector one step down the path and deposits the
decoded token into the slot's output channel. Slot i's token settles at block
i, so the block is applied n times in total.

Slots concatenate five channels: position code p (k wide), working vector v,
relay w, path r, and output t (d wide each). All nonlinearity lives in the
two feed-forward passes; attention only routes w and the shifted r backward
by one slot under a strict causal mask.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .decoder import decode_token
from .embedding import Embedding, encode_list, haar_orthogonal
from .exceptions import PathTooLongError, SeparationUnachievableError
from .vectors import BTVector


@dataclass(frozen=True)
class XfConfig:
    k: int = 64
    attn_sharpness: float = 100.0
    gate_constant: float = 1e4
    pos_overlap_bound: float = 0.3
    pos_retries: int = 100


@dataclass(frozen=True)
class PositionCodes:
    """Unit codes p_i = Z^(i-1) p_1 for a Haar orthogonal step Z."""

    codes: np.ndarray
    step: np.ndarray

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def k(self) -> int:
        return self.codes.shape[1]

    def max_overlap(self) -> float:
        if self.n < 2:
            return 0.0
        gram = self.codes @ self.codes.T
        return float(np.abs(gram - np.eye(self.n)).max())


def build_position_codes(
    n: int,
    k: int,
    rng: np.random.Generator,
    overlap_bound: float = 0.3,
    retries: int = 100,
) -> PositionCodes:
    """Resample (p_1, Z) until all off-diagonal overlaps stay under the bound.

    Overlaps concentrate around sqrt(2/k), so the bound must sit well above
    that for the draw to succeed; infeasible requests raise after the retry
    limit instead of looping forever.
    """
    for _ in range(retries):
        z = haar_orthogonal(k, rng)
        p = rng.standard_normal(k)
        p /= np.linalg.norm(p)
        codes = np.empty((n, k))
        codes[0] = p
        for i in range(1, n):
            codes[i] = z @ codes[i - 1]
        built = PositionCodes(codes, z)
        if built.max_overlap() < overlap_bound:
            return built
    raise SeparationUnachievableError(
        f"no draw met overlap bound {overlap_bound} at n={n}, k={k} "
        f"within {retries} retries"
    )


@dataclass(frozen=True)
class SeqState:
    """Slot matrix split by channel; rows are slots."""

    pos: np.ndarray
    v: np.ndarray
    w: np.ndarray
    r: np.ndarray
    t: np.ndarray

    @property
    def n_slots(self) -> int:
        return self.pos.shape[0]

    @property
    def slot_width(self) -> int:
        return self.pos.shape[1] + 4 * self.v.shape[1]

    def as_matrix(self) -> np.ndarray:
        return np.concatenate([self.pos, self.v, self.w, self.r, self.t], axis=1)


def _attr_indices(e: Embedding, path: Sequence[int | str]) -> list[int]:
    return [a if isinstance(a, int) else e.schema.attribute_index(a) for a in path]


def init_state(
    e: Embedding,
    v: BTVector,
    path: Sequence[int | str],
    codes: PositionCodes,
    next_attr: int | str = "next",
) -> SeqState:
    """Slot 1 carries the query and the once-shifted path chain; the rest are blank.

    The extra next-shift hides the first path token from slot 1 itself: the
    root label needs no step, so slot 1's r must decode to nothing.
    """
    data = e.check(v)
    attrs = _attr_indices(e, path)
    n = len(attrs) + 1
    if codes.n != n:
        raise ValueError(f"position codes built for n={codes.n}, path needs {n}")
    d = e.dim
    vm = np.zeros((n, d))
    vm[0] = data
    rm = np.zeros((n, d))
    if attrs:
        tokens = [e.schema.attribute_token_indices[a] for a in attrs]
        chain = encode_list(e, tokens, next_attr)
        rm[0] = e.attribute_matrix(next_attr) @ chain.data
    return SeqState(pos=codes.codes.copy(), v=vm, w=np.zeros((n, d)), r=rm, t=np.zeros((n, d)))


def attention_matrix(codes: PositionCodes, cfg: XfConfig) -> np.ndarray:
    """Softmax weights over j < i; row 1 is identically zero by definition."""
    n = codes.n
    queries = codes.codes @ codes.step  # row i holds (Z^-1 p_i)^T
    logits = cfg.attn_sharpness * (queries @ codes.codes.T)
    mask = np.tril(np.ones((n, n), dtype=bool), k=-1)
    weights = np.zeros((n, n))
    if n > 1:
        masked = np.where(mask, logits, -np.inf)[1:]
        masked -= masked.max(axis=1, keepdims=True)
        expd = np.exp(masked)
        weights[1:] = expd / expd.sum(axis=1, keepdims=True)
    return weights


def attention_step(
    state: SeqState, codes: PositionCodes, e: Embedding, cfg: XfConfig, next_attr: int | str = "next"
) -> SeqState:
    """Each slot pulls its predecessor's relay into v and its shifted path into r.

    Value vectors carry (0, w_j, 0, M_next^T r_j, 0); the residual keeps
    everything else in place. The mask is strictly causal, so slot 1 receives
    nothing.
    """
    weights = attention_matrix(codes, cfg)
    nxt = e.attribute_matrix(next_attr)
    new_v = state.v + weights @ state.w
    new_r = state.r + weights @ (state.r @ nxt)  # row-wise M_next^T r_j
    return replace(state, v=new_v, r=new_r)


def ffn1(state: SeqState, e: Embedding, cfg: XfConfig) -> SeqState:
    """Gate on the path head and advance the working vector into w.

    y_j = C(<attr_j, r> - 1/2) saturates each gate; the gated relu pair passes
    M_j^T v - v only where the head matches, and the trailing relu pair
    cancels the residual w exactly, so w ends as f1.
    """
    c = cfg.gate_constant
    attr_rows = e.token_vectors[list(e.schema.attribute_token_indices)]
    gates = c * (state.r @ attr_rows.T - 0.5)  # slots x attributes
    f1 = np.maximum(state.v, 0.0) - np.maximum(-state.v, 0.0)
    for j in range(e.schema.n_attributes):
        stepped = state.v @ e.attribute_matrices[j]  # rows M_j^T v_i
        yj = gates[:, j : j + 1]
        f1 += np.maximum(yj + stepped - state.v, 0.0) - np.maximum(yj, 0.0)
    return replace(state, w=f1)


def ffn2(state: SeqState, e: Embedding, cfg: XfConfig) -> SeqState:
    """Read w's token into the output channel and clear v.

    z = C(E w - 1/2); relu(z+1) - relu(z) is a saturated indicator per token,
    so t gains exactly the decoded token vector. The relu pair on v cancels
    the residual, leaving v zero for the next block's delivery.
    """
    c = cfg.gate_constant
    z = c * (state.w @ e.token_vectors.T - 0.5)  # slots x tokens
    indicator = np.maximum(z + 1.0, 0.0) - np.maximum(z, 0.0)
    new_t = state.t + indicator @ e.token_vectors
    new_v = state.v - np.maximum(state.v, 0.0) + np.maximum(-state.v, 0.0)
    return replace(state, v=new_v, t=new_t)


def block(
    state: SeqState, codes: PositionCodes, e: Embedding, cfg: XfConfig, next_attr: int | str = "next"
) -> SeqState:
    return ffn2(ffn1(attention_step(state, codes, e, cfg, next_attr), e, cfg), e, cfg)


def run_decoder(
    e: Embedding,
    v: BTVector,
    path: Sequence[int | str],
    cfg: XfConfig = XfConfig(),
    seed: int | None = None,
    next_attr: int | str = "next",
) -> list[int | None]:
    """Decode the labels along a path with n block applications.

    Returns one entry per slot: slot 1 is the root label, slot i the label
    after following the first i-1 path attributes. Position codes draw from a
    stream derived from the embedding seed and n, so queries are reproducible
    without extra arguments.
    """
    attrs = _attr_indices(e, path)
    n = len(attrs) + 1
    if n > cfg.k:
        raise PathTooLongError(f"{n} slots exceed position dimension k={cfg.k}")
    base = e.seed if seed is None else seed
    rng = np.random.default_rng([base, n])
    codes = build_position_codes(n, cfg.k, rng, cfg.pos_overlap_bound, cfg.pos_retries)
    state = init_state(e, v, attrs, codes, next_attr)
    for _ in range(n):
        state = block(state, codes, e, cfg, next_attr)
    return [decode_token(e, state.t[i]) for i in range(n)]


def export_weights(
    e: Embedding, codes: PositionCodes, cfg: XfConfig, next_attr: int | str = "next"
) -> dict[str, np.ndarray]:
    """Materialize the block as dense tensors over the full slot width.

    Channel layout along the width: [p | v | w | r | t]. The attention value
    map and both feed-forward affine pairs reproduce the structured evaluator
    bit for bit; x + out @ relu(lin @ x + bias) applies an FFN. Dense size
    grows with d^2, so exporting is meant for small dimensions.
    """
    k, d = codes.k, e.dim
    n_attrs, n_tokens = e.schema.n_attributes, e.schema.n_tokens
    s = k + 4 * d
    pv, vv, wv, rv, tv = 0, k, k + d, k + 2 * d, k + 3 * d
    c = cfg.gate_constant
    attr_rows = e.token_vectors[list(e.schema.attribute_token_indices)]
    nxt = e.attribute_matrix(next_attr)

    wq = np.zeros((k, s))
    wq[:, pv : pv + k] = codes.step.T
    wk = np.zeros((k, s))
    wk[:, pv : pv + k] = np.eye(k)
    wval = np.zeros((s, s))
    wval[vv : vv + d, wv : wv + d] = np.eye(d)
    wval[rv : rv + d, rv : rv + d] = nxt.T

    h1 = 4 * d + n_attrs * (d + 1)
    f1_lin = np.zeros((h1, s))
    f1_bias = np.zeros(h1)
    f1_out = np.zeros((s, h1))
    f1_lin[0:d, vv : vv + d] = np.eye(d)
    f1_lin[d : 2 * d, vv : vv + d] = -np.eye(d)
    f1_out[wv : wv + d, 0:d] = np.eye(d)
    f1_out[wv : wv + d, d : 2 * d] = -np.eye(d)
    row = 2 * d
    for j in range(n_attrs):
        f1_lin[row : row + d, vv : vv + d] = e.attribute_matrices[j].T - np.eye(d)
        f1_lin[row : row + d, rv : rv + d] = c * attr_rows[j]
        f1_bias[row : row + d] = -c / 2.0
        f1_out[wv : wv + d, row : row + d] = np.eye(d)
        f1_lin[row + d, rv : rv + d] = c * attr_rows[j]
        f1_bias[row + d] = -c / 2.0
        f1_out[wv : wv + d, row + d] = -1.0
        row += d + 1
    f1_lin[row : row + d, wv : wv + d] = np.eye(d)
    f1_out[wv : wv + d, row : row + d] = -np.eye(d)
    f1_lin[row + d : row + 2 * d, wv : wv + d] = -np.eye(d)
    f1_out[wv : wv + d, row + d : row + 2 * d] = np.eye(d)

    h2 = 2 * n_tokens + 2 * d
    f2_lin = np.zeros((h2, s))
    f2_bias = np.zeros(h2)
    f2_out = np.zeros((s, h2))
    f2_lin[0:n_tokens, wv : wv + d] = c * e.token_vectors
    f2_bias[0:n_tokens] = -c / 2.0 + 1.0
    f2_lin[n_tokens : 2 * n_tokens, wv : wv + d] = c * e.token_vectors
    f2_bias[n_tokens : 2 * n_tokens] = -c / 2.0
    f2_out[tv : tv + d, 0:n_tokens] = e.token_vectors.T
    f2_out[tv : tv + d, n_tokens : 2 * n_tokens] = -e.token_vectors.T
    f2_lin[2 * n_tokens : 2 * n_tokens + d, vv : vv + d] = np.eye(d)
    f2_out[vv : vv + d, 2 * n_tokens : 2 * n_tokens + d] = -np.eye(d)
    f2_lin[2 * n_tokens + d : h2, vv : vv + d] = -np.eye(d)
    f2_out[vv : vv + d, 2 * n_tokens + d : h2] = np.eye(d)

    return {
        "Wq": wq,
        "Wk": wk,
        "Wv": wval,
        "f1_lin": f1_lin,
        "f1_bias": f1_bias,
        "f1_out": f1_out,
        "f2_lin": f2_lin,
        "f2_bias": f2_bias,
        "f2_out": f2_out,
    }


def save_weights(tensors: dict[str, np.ndarray], directory: str | Path) -> None:
    """Write one little-endian float64 .bin per tensor plus a JSON manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, arr in tensors.items():
        fname = f"{name}.bin"
        with open(directory / fname, "wb") as f:
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        entries.append({"name": name, "file": fname, "shape": list(arr.shape)})
    manifest = {"byte_order": "little", "dtype": "float64", "tensors": entries}
    with open(directory / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
