"""Bidirectional LSTM tagger that resolves ambiguous rule sites.

Tokens are embedded, run through forward and backward LSTMs that both start
from zero hidden and cell states, and the concatenated hidden states feed a
linear layer that scores every tag at every position. All arithmetic is in
float64.

Gate rows of each ``W``/``U``/``b`` block are ordered input, forget,
candidate, output.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DivergenceError, EmptySequence, FormatError, UnknownId, UnknownTag
from .rules import NULL_TAG, Candidate, Site
from .script import SourceToken

PAD, UNK = "<pad>", "<unk>"
FORMAT_MAGIC = "indic2braille-tagger"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]  # id -> token; ids 0 and 1 are PAD and UNK
    tags: tuple[str, ...]  # tag id -> label; tags[0] is the null tag

    def __post_init__(self):
        if self.tokens[:2] != (PAD, UNK):
            raise ValueError("vocabulary must start with PAD, UNK")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("duplicate vocabulary entries")
        if not self.tags or self.tags[0] != NULL_TAG or len(set(self.tags)) != len(self.tags):
            raise ValueError("tag inventory must be distinct and start with the null tag")
        object.__setattr__(self, "_ids", {t: i for i, t in enumerate(self.tokens)})
        object.__setattr__(self, "_tag_ids", {t: i for i, t in enumerate(self.tags)})

    @classmethod
    def build(cls, tokens: Iterable[str], tags: Iterable[str]) -> "Vocab":
        seen = dict.fromkeys([PAD, UNK])
        seen.update(dict.fromkeys(tokens))
        tag_seen = dict.fromkeys([NULL_TAG])
        tag_seen.update(dict.fromkeys(tags))
        return cls(tuple(seen), tuple(tag_seen))

    def __len__(self):
        return len(self.tokens)

    def id(self, token: str) -> int:
        return self._ids.get(token, 1)

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.id(t) for t in tokens]

    def tag_id(self, tag: str) -> int:
        try:
            return self._tag_ids[tag]
        except KeyError:
            raise UnknownTag(tag) from None


@dataclass(frozen=True)
class HiddenState:
    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, d_hidden: int) -> "HiddenState":
        return cls(np.zeros(d_hidden), np.zeros(d_hidden))


def param_shapes(n_vocab, n_tags, d_emb, d_hidden, layers) -> dict[str, tuple[int, ...]]:
    shapes = {"embedding": (n_vocab, d_emb)}
    for layer in range(layers):
        d_in = d_emb if layer == 0 else 2 * d_hidden
        for direction in ("fwd", "bwd"):
            prefix = f"l{layer}.{direction}"
            shapes[f"{prefix}.W"] = (4 * d_hidden, d_in)
            shapes[f"{prefix}.U"] = (4 * d_hidden, d_hidden)
            shapes[f"{prefix}.b"] = (4 * d_hidden,)
    shapes["head.W"] = (2 * d_hidden, n_tags)
    shapes["head.b"] = (n_tags,)
    return shapes


@dataclass(frozen=True, eq=False)
class TaggerModel:
    vocab: Vocab
    params: Mapping[str, np.ndarray]
    d_emb: int
    d_hidden: int
    layers: int = 1
    dropout: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if min(self.d_emb, self.d_hidden, self.layers) < 1:
            raise ValueError("dimensions and layer count must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")
        expected = param_shapes(len(self.vocab), len(self.vocab.tags), self.d_emb, self.d_hidden, self.layers)
        if list(self.params) != list(expected):
            raise ValueError(f"parameter names {list(self.params)} != {list(expected)}")
        frozen = {}
        for name, shape in expected.items():
            arr = np.array(self.params[name], dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(f"{name}: shape {arr.shape} != {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}: non-finite values")
            arr.setflags(write=False)
            frozen[name] = arr
        object.__setattr__(self, "params", frozen)

    @property
    def n_tags(self) -> int:
        return len(self.vocab.tags)

    def replace_params(self, params: Mapping[str, np.ndarray]) -> "TaggerModel":
        return TaggerModel(self.vocab, dict(params), self.d_emb, self.d_hidden, self.layers, self.dropout, self.seed)

    def direction(self, layer: int, name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        p = self.params
        return p[f"l{layer}.{name}.W"], p[f"l{layer}.{name}.U"], p[f"l{layer}.{name}.b"]


def init_model(vocab: Vocab, d_emb=32, d_hidden=64, layers=1, dropout=0.25, seed=0, scale=0.1) -> TaggerModel:
    """Uniform(-scale, scale) weights from the seeded RNG; forget-gate biases start at 1."""
    rng = np.random.default_rng([seed, 1])
    params = {}
    for name, shape in param_shapes(len(vocab), len(vocab.tags), d_emb, d_hidden, layers).items():
        arr = rng.uniform(-scale, scale, size=shape)
        if name.endswith(".b"):
            arr[:] = 0.0
            arr[d_hidden:2 * d_hidden] = 1.0
        elif name == "head.b":
            arr[:] = 0.0
        params[name] = arr
    return TaggerModel(vocab, params, d_emb, d_hidden, layers, dropout, seed)


def zero_model(vocab: Vocab, d_emb=4, d_hidden=4, layers=1) -> TaggerModel:
    shapes = param_shapes(len(vocab), len(vocab.tags), d_emb, d_hidden, layers)
    return TaggerModel(vocab, {k: np.zeros(s) for k, s in shapes.items()}, d_emb, d_hidden, layers, 0.0)


# -- forward -------------------------------------------------------------------

def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def lstm_step(x: np.ndarray, prev: HiddenState, W: np.ndarray, U: np.ndarray, b: np.ndarray) -> HiddenState:
    """One standard LSTM cell update (no peepholes, uncoupled forget gate)."""
    d = U.shape[1]
    z = W @ x + U @ prev.h + b
    i, f, o = _sigmoid(z[:d]), _sigmoid(z[d:2 * d]), _sigmoid(z[3 * d:])
    g = np.tanh(z[2 * d:3 * d])
    c = f * prev.c + i * g
    return HiddenState(o * np.tanh(c), c)


@dataclass
class _DirCache:
    order: np.ndarray
    X: np.ndarray
    gates: np.ndarray  # activated i, f, g, o per position
    c: np.ndarray
    c_prev: np.ndarray
    h_prev: np.ndarray


def _run_direction(X, W, U, b, reverse):
    T, d = X.shape[0], U.shape[1]
    pre = X @ W.T + b
    H = np.empty((T, d))
    gates = np.empty((T, 4 * d))
    C = np.empty((T, d))
    C_prev = np.empty((T, d))
    H_prev = np.empty((T, d))
    h = np.zeros(d)
    c = np.zeros(d)
    order = np.arange(T - 1, -1, -1) if reverse else np.arange(T)
    for t in order:
        z = pre[t] + U @ h
        i = _sigmoid(z[:d])
        f = _sigmoid(z[d:2 * d])
        g = np.tanh(z[2 * d:3 * d])
        o = _sigmoid(z[3 * d:])
        H_prev[t] = h
        C_prev[t] = c
        c = f * c + i * g
        h = o * np.tanh(c)
        gates[t, :d], gates[t, d:2 * d], gates[t, 2 * d:3 * d], gates[t, 3 * d:] = i, f, g, o
        C[t] = c
        H[t] = h
    return H, _DirCache(order, X, gates, C, C_prev, H_prev)


def _dropout_masks(model: TaggerModel, T: int, key: int):
    p = model.dropout
    rng = np.random.default_rng([model.seed, 3, key])
    keep = 1.0 - p
    m_emb = (rng.random((T, model.d_emb)) < keep) / keep
    m_out = (rng.random((T, 2 * model.d_hidden)) < keep) / keep
    return m_emb, m_out


def _check_ids(ids, model):
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise EmptySequence("token sequence must be non-empty")
    if ids.min() < 0 or ids.max() >= len(model.vocab):
        raise UnknownId(f"ids must lie in [0, {len(model.vocab)})")
    return ids


def _forward(ids, model, train_mode, dropout_key):
    ids = _check_ids(ids, model)
    p = model.params
    X = p["embedding"][ids]
    masks = None
    if train_mode and model.dropout > 0:
        masks = _dropout_masks(model, len(ids), dropout_key)
        X = X * masks[0]
    caches = []
    for layer in range(model.layers):
        Hf, cf = _run_direction(X, *model.direction(layer, "fwd"), reverse=False)
        Hb, cb = _run_direction(X, *model.direction(layer, "bwd"), reverse=True)
        caches.append((cf, cb))
        X = np.concatenate([Hf, Hb], axis=1)
    H = X
    if masks is not None:
        H = H * masks[1]
    scores = H @ p["head.W"] + p["head.b"]
    return scores, (ids, masks, caches, H)


def bilstm_hidden(ids: Sequence[int], model: TaggerModel) -> np.ndarray:
    """Concatenated final-layer states ``[h_fwd; h_bwd]`` per position, evaluation mode."""
    _, (_, _, _, H) = _forward(ids, model, False, 0)
    return H


def bilstm_forward(ids: Sequence[int], model: TaggerModel, train_mode: bool = False, dropout_key: int = 0) -> np.ndarray:
    """T x n_tags score matrix.

    Dropout on the embeddings and final LSTM outputs is applied only in
    ``train_mode``; its masks are a function of ``model.seed`` and
    ``dropout_key``, so equal arguments give equal scores.
    """
    return _forward(ids, model, train_mode, dropout_key)[0]


# -- loss and gradients -----------------------------------------------------------

def _log_softmax(scores):
    shifted = scores - scores.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def sequence_loss(ids, tags, model, train_mode=False, dropout_key=0) -> float:
    """Mean per-token softmax cross-entropy."""
    scores = bilstm_forward(ids, model, train_mode, dropout_key)
    logp = _log_softmax(scores)
    return float(-logp[np.arange(len(tags)), tags].mean())


def _backward_direction(dH, W, U, cache):
    d = U.shape[1]
    T = dH.shape[0]
    dZ = np.empty((T, 4 * d))
    dh_next = np.zeros(d)
    dc_next = np.zeros(d)
    for t in cache.order[::-1]:
        i, f = cache.gates[t, :d], cache.gates[t, d:2 * d]
        g, o = cache.gates[t, 2 * d:3 * d], cache.gates[t, 3 * d:]
        tanh_c = np.tanh(cache.c[t])
        dh = dH[t] + dh_next
        dc = dh * o * (1.0 - tanh_c ** 2) + dc_next
        dZ[t, :d] = dc * g * i * (1.0 - i)
        dZ[t, d:2 * d] = dc * cache.c_prev[t] * f * (1.0 - f)
        dZ[t, 2 * d:3 * d] = dc * i * (1.0 - g ** 2)
        dZ[t, 3 * d:] = dh * tanh_c * o * (1.0 - o)
        dc_next = dc * f
        dh_next = U.T @ dZ[t]
    return dZ.T @ cache.X, dZ.T @ cache.h_prev, dZ.sum(axis=0), dZ @ W


def loss_and_grads(ids, tags, model: TaggerModel, train_mode=False, dropout_key=0):
    """Mean cross-entropy and its gradient for every parameter (full BPTT)."""
    scores, (ids, masks, caches, H) = _forward(ids, model, train_mode, dropout_key)
    tags = np.asarray(tags, dtype=np.int64)
    T = len(ids)
    logp = _log_softmax(scores)
    loss = float(-logp[np.arange(T), tags].mean())
    dscores = np.exp(logp)
    dscores[np.arange(T), tags] -= 1.0
    dscores /= T

    p = model.params
    grads = {}
    grads["head.W"] = H.T @ dscores
    grads["head.b"] = dscores.sum(axis=0)
    dX = dscores @ p["head.W"].T
    if masks is not None:
        dX = dX * masks[1]
    d = model.d_hidden
    for layer in range(model.layers - 1, -1, -1):
        cf, cb = caches[layer]
        dIn = 0.0
        for name, cache, dH in (("fwd", cf, dX[:, :d]), ("bwd", cb, dX[:, d:])):
            W, U, _ = model.direction(layer, name)
            gW, gU, gb, gX = _backward_direction(dH, W, U, cache)
            grads[f"l{layer}.{name}.W"] = gW
            grads[f"l{layer}.{name}.U"] = gU
            grads[f"l{layer}.{name}.b"] = gb
            dIn = dIn + gX
        dX = dIn
    if masks is not None:
        dX = dX * masks[0]
    gE = np.zeros_like(p["embedding"])
    np.add.at(gE, ids, dX)
    grads["embedding"] = gE
    return loss, {name: grads[name] for name in p}


# -- training -------------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    lr: float = 0.1
    d_emb: int = 32
    d_hidden: int = 64
    dropout: float = 0.25
    seed: int = 0
    layers: int = 1


def train(corpus: Sequence[tuple[Sequence[int], Sequence[int]]], vocab: Vocab, config: TrainConfig = TrainConfig(),
          progress=None) -> tuple[TaggerModel, list[float]]:
    """Plain per-sequence SGD over ``(token ids, gold tag ids)`` pairs.

    Returns the trained model and the mean training loss of each epoch.
    """
    if not corpus:
        raise ValueError("training corpus is empty")
    data = []
    for ids, tags in corpus:
        if len(ids) == 0 or len(ids) != len(tags):
            raise ValueError("every example needs equally many (>0) tokens and tags")
        if min(tags) < 0 or max(tags) >= len(vocab.tags):
            raise UnknownTag(f"tag id out of range in {list(tags)}")
        data.append((np.asarray(ids, dtype=np.int64), np.asarray(tags, dtype=np.int64)))

    model = init_model(vocab, config.d_emb, config.d_hidden, config.layers, config.dropout, config.seed)
    params = {k: v.copy() for k, v in model.params.items()}
    work = _unchecked(model, params)  # sees the in-place updates below
    shuffle = np.random.default_rng([config.seed, 2])
    trace = []
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is checked explicitly below
        _epochs(data, params, work, shuffle, config, trace, progress)
    return model.replace_params(params), trace


def _epochs(data, params, work, shuffle, config, trace, progress):
    step = 0
    for epoch in range(config.epochs):
        total = 0.0
        for idx in shuffle.permutation(len(data)):
            ids, tags = data[idx]
            loss, grads = loss_and_grads(ids, tags, work, True, step)
            if not math.isfinite(loss):
                raise DivergenceError(f"loss became {loss} at epoch {epoch + 1}")
            for name, g in grads.items():
                params[name] -= config.lr * g
            total += loss
            step += 1
        epoch_loss = total / len(data)
        if not math.isfinite(epoch_loss) or not all(np.all(np.isfinite(v)) for v in params.values()):
            raise DivergenceError(f"loss became {epoch_loss} at epoch {epoch + 1}")
        trace.append(epoch_loss)
        if progress is not None:
            progress(epoch + 1, epoch_loss)


def _unchecked(model: TaggerModel, params: dict) -> TaggerModel:
    """Share ``params`` without the validation copy; only for the training loop."""
    clone = object.__new__(TaggerModel)
    for f in ("vocab", "d_emb", "d_hidden", "layers", "dropout", "seed"):
        object.__setattr__(clone, f, getattr(model, f))
    object.__setattr__(clone, "params", params)
    return clone


# -- disambiguation ------------------------------------------------------------------

def disambiguate(word_tokens: Sequence[SourceToken], sites: Sequence[Site], model: TaggerModel,
                 vocab: Vocab | None = None) -> dict[int, Candidate]:
    """Pick one candidate per site by the highest-scoring candidate tag.

    Site indices are relative to ``word_tokens``. Only the site's own candidate
    tags compete; equal scores go to the lowest tag id.
    """
    vocab = vocab or model.vocab
    if not sites:
        return {}
    scores = bilstm_forward(vocab.encode(t.text for t in word_tokens), model)
    chosen = {}
    for site in sites:
        tag_ids = [vocab.tag_id(c.tag) for c in site.candidates]
        row = scores[site.start]
        best = min(range(len(tag_ids)), key=lambda k: (-row[tag_ids[k]], tag_ids[k]))
        chosen[site.start] = site.candidates[best]
    return chosen


# -- serialization ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.17g" % x


def save_model(model: TaggerModel) -> str:
    lines = [
        f"{FORMAT_MAGIC} {FORMAT_VERSION} d_emb={model.d_emb} d_hidden={model.d_hidden} "
        f"layers={model.layers} vocab={len(model.vocab)} tags={model.n_tags} "
        f"dropout={_fmt(model.dropout)} seed={model.seed}"
    ]
    lines.append(f"block vocab {len(model.vocab)}")
    lines += [json.dumps(t, ensure_ascii=False) for t in model.vocab.tokens]
    lines.append(f"block tags {model.n_tags}")
    lines += [json.dumps(t) for t in model.vocab.tags]
    for name, arr in model.params.items():
        lines.append(f"block {name} {' '.join(map(str, arr.shape))}")
        rows = arr.reshape(1, -1) if arr.ndim == 1 else arr
        lines += [" ".join(_fmt(v) for v in row) for row in rows]
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_model(document: str) -> TaggerModel:
    lines = document.split("\n")
    pos = 0

    def take(block):
        nonlocal pos
        if pos >= len(lines) or (pos == len(lines) - 1 and lines[pos] == ""):
            raise FormatError("unexpected end of file", block)
        pos += 1
        return lines[pos - 1]

    header = take("header").split()
    if len(header) < 2 or header[0] != FORMAT_MAGIC:
        raise FormatError("not a tagger model file", "header")
    if header[1] != str(FORMAT_VERSION):
        raise FormatError(f"unsupported version {header[1]}", "header")
    try:
        meta = dict(item.split("=", 1) for item in header[2:])
        dims = {k: int(meta[k]) for k in ("d_emb", "d_hidden", "layers", "vocab", "tags", "seed")}
        dropout = float(meta["dropout"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header field: {exc}", "header") from None

    def block_header(name):
        parts = take(name).split()
        if len(parts) < 2 or parts[0] != "block" or parts[1] != name:
            raise FormatError(f"expected block {name!r}, found {' '.join(parts[:2])!r}", name)
        try:
            return tuple(int(x) for x in parts[2:])
        except ValueError:
            raise FormatError("bad block shape", name) from None

    def string_block(name, expected):
        shape = block_header(name)
        if shape != (expected,):
            raise FormatError(f"block holds {shape} entries, header says {expected}", name)
        try:
            return tuple(json.loads(take(name)) for _ in range(expected))
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad entry: {exc}", name) from None

    tokens = string_block("vocab", dims["vocab"])
    tags = string_block("tags", dims["tags"])
    try:
        vocab = Vocab(tokens, tags)
    except ValueError as exc:
        raise FormatError(str(exc), "vocab") from None

    expected = param_shapes(dims["vocab"], dims["tags"], dims["d_emb"], dims["d_hidden"], dims["layers"])
    params = {}
    for name, shape in expected.items():
        got = block_header(name)
        if got != shape:
            raise FormatError(f"shape {got} inconsistent with header dims {shape}", name)
        n_rows = 1 if len(shape) == 1 else shape[0]
        n_cols = shape[-1]
        rows = []
        for _ in range(n_rows):
            try:
                row = [float(v) for v in take(name).split()]
            except ValueError:
                raise FormatError("non-numeric value", name) from None
            if len(row) != n_cols:
                raise FormatError(f"row has {len(row)} values, expected {n_cols}", name)
            rows.append(row)
        params[name] = np.array(rows, dtype=np.float64).reshape(shape)
    if take("end").strip() != "end":
        raise FormatError("missing end marker", "end")
    try:
        return TaggerModel(vocab, params, dims["d_emb"], dims["d_hidden"], dims["layers"], dropout, dims["seed"])
    except ValueError as exc:
        raise FormatError(str(exc), "params") from None
