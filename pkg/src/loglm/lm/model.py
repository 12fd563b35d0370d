"""Decoder-only next-key model with hand-rolled forward and backward passes.

The block structure is pre-normalization with RMS normalization, rotary
position encoding on queries/keys, and a gated (SiLU) feed-forward; a config
flag downgrades to learned positional embeddings plus a plain ReLU
feed-forward for debugging.  Everything runs in numpy so runs are
deterministic and the f64 mode gives sharp gradient checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from loglm.errors import ContextOverflow, IndexOutOfVocab
from loglm.lm.config import ModelConfig
from loglm.lm.vocab import Vocabulary

INIT_STD = 0.02


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Stable in both tails.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=-1, keepdims=True)


@dataclass
class _LayerCache:
    attn_in: np.ndarray
    attn_normed: np.ndarray
    attn_inv_rms: np.ndarray
    q_rot: np.ndarray
    k_rot: np.ndarray
    v_heads: np.ndarray
    att: np.ndarray
    context: np.ndarray
    ffn_in: np.ndarray
    ffn_normed: np.ndarray
    ffn_inv_rms: np.ndarray
    ffn_pre: tuple[np.ndarray, ...]


@dataclass
class ForwardCache:
    ids: np.ndarray
    layers: list[_LayerCache] = field(default_factory=list)
    final_in: np.ndarray | None = None
    final_inv_rms: np.ndarray | None = None
    final_normed: np.ndarray | None = None


class LanguageModel:
    """Parameter set plus architecture config and vocabulary."""

    def __init__(self, config: ModelConfig, vocab: Vocabulary, params: dict[str, np.ndarray]):
        if vocab.vocab_size != config.vocab_size:
            raise ValueError(
                f"config vocab_size {config.vocab_size} != vocabulary size {vocab.vocab_size}"
            )
        self.config = config
        self.vocab = vocab
        self.params = params
        self.version = 0
        self._rope_cache: tuple[np.ndarray, np.ndarray] | None = None

    # ------------------------------------------------------------------ setup

    @classmethod
    def initialize(
        cls, config: ModelConfig, vocab: Vocabulary, seed: int | np.random.Generator = 0
    ) -> "LanguageModel":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        dtype = config.dtype

        def normal(*shape: int) -> np.ndarray:
            return (rng.standard_normal(shape) * INIT_STD).astype(dtype)

        d, f, v = config.d_model, config.d_ff, config.vocab_size
        params: dict[str, np.ndarray] = {"embed": normal(v, d)}
        if config.classic_blocks:
            params["pos"] = normal(config.max_context, d)
        for i in range(config.n_layers):
            p = f"layer{i}."
            params[p + "attn_norm"] = np.ones(d, dtype=dtype)
            for name in ("wq", "wk", "wv", "wo"):
                params[p + name] = normal(d, d)
            params[p + "ffn_norm"] = np.ones(d, dtype=dtype)
            if config.classic_blocks:
                params[p + "w1"] = normal(d, f)
                params[p + "w2"] = normal(f, d)
            else:
                params[p + "w_gate"] = normal(d, f)
                params[p + "w_up"] = normal(d, f)
                params[p + "w_down"] = normal(f, d)
        params["final_norm"] = np.ones(d, dtype=dtype)
        params["output"] = normal(d, v)
        return cls(config, vocab, params)

    def copy(self) -> "LanguageModel":
        clone = LanguageModel(self.config, self.vocab, {k: v.copy() for k, v in self.params.items()})
        clone.version = self.version
        return clone

    def bump_version(self) -> None:
        self.version += 1

    # ---------------------------------------------------------------- forward

    def _validate_ids(self, ids: np.ndarray) -> None:
        if ids.shape[-1] > self.config.max_context:
            raise ContextOverflow(
                f"sequence length {ids.shape[-1]} exceeds max_context {self.config.max_context}"
            )
        if ids.size and (ids.min() < 0 or ids.max() >= self.config.vocab_size):
            raise IndexOutOfVocab(
                f"key indices must be in [0, {self.config.vocab_size})"
            )

    def _rope_tables(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        pairs = self.config.head_dim // 2
        if self._rope_cache is None or self._rope_cache[0].shape[0] < t:
            positions = np.arange(self.config.max_context, dtype=np.float64)
            inv_freq = self.config.rope_theta ** (
                -2.0 * np.arange(pairs, dtype=np.float64) / self.config.head_dim
            )
            angles = positions[:, None] * inv_freq[None, :]
            dtype = self.config.dtype
            self._rope_cache = (np.cos(angles).astype(dtype), np.sin(angles).astype(dtype))
        cos, sin = self._rope_cache
        return cos[:t], sin[:t]

    def _rotate(self, x: np.ndarray, cos: np.ndarray, sin: np.ndarray, inverse: bool = False) -> np.ndarray:
        # x: (B, H, T, Dh); rotate the leading even number of dims pairwise,
        # pass any odd leftover dim through unchanged.
        pairs = cos.shape[-1]
        out = x.copy()
        even = x[..., 0 : 2 * pairs : 2]
        odd = x[..., 1 : 2 * pairs : 2]
        s = -sin if inverse else sin
        out[..., 0 : 2 * pairs : 2] = even * cos - odd * s
        out[..., 1 : 2 * pairs : 2] = even * s + odd * cos
        return out

    def _split_heads(self, x: np.ndarray) -> np.ndarray:
        b, t, _ = x.shape
        h, dh = self.config.n_heads, self.config.head_dim
        return x.reshape(b, t, h, dh).transpose(0, 2, 1, 3)

    def _merge_heads(self, x: np.ndarray) -> np.ndarray:
        b, h, t, dh = x.shape
        return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)

    def forward_batch(
        self, ids: np.ndarray, want_cache: bool = False
    ) -> tuple[np.ndarray, ForwardCache | None]:
        """Causal logits for a batch of token id rows, shape (B, T, V)."""
        ids = np.asarray(ids, dtype=np.int64)
        if ids.ndim != 2:
            raise ValueError("forward_batch expects a (batch, positions) array")
        if ids.shape[1] < 1:
            raise ValueError("empty sequence")
        self._validate_ids(ids)
        cfg = self.config
        p = self.params
        b, t = ids.shape

        x = p["embed"][ids]
        if cfg.classic_blocks:
            x = x + p["pos"][:t][None, :, :]
        cache = ForwardCache(ids=ids) if want_cache else None

        cos, sin = self._rope_tables(t)
        mask = np.triu(np.full((t, t), -np.inf, dtype=cfg.dtype), k=1)
        scale = 1.0 / np.sqrt(cfg.head_dim)

        for i in range(cfg.n_layers):
            pre = f"layer{i}."
            attn_in = x
            normed, inv_rms = self._rmsnorm(attn_in, p[pre + "attn_norm"])
            q = self._split_heads(normed @ p[pre + "wq"])
            k = self._split_heads(normed @ p[pre + "wk"])
            v = self._split_heads(normed @ p[pre + "wv"])
            if not cfg.classic_blocks:
                q = self._rotate(q, cos, sin)
                k = self._rotate(k, cos, sin)
            scores = (q @ k.swapaxes(-1, -2)) * scale + mask
            att = _softmax(scores)
            context = att @ v
            attn_out = self._merge_heads(context) @ p[pre + "wo"]
            x = attn_in + attn_out

            ffn_in = x
            ffn_normed, ffn_inv_rms = self._rmsnorm(ffn_in, p[pre + "ffn_norm"])
            if cfg.classic_blocks:
                z1 = ffn_normed @ p[pre + "w1"]
                a1 = np.maximum(z1, 0.0)
                ffn_out = a1 @ p[pre + "w2"]
                ffn_pre: tuple[np.ndarray, ...] = (z1, a1)
            else:
                zg = ffn_normed @ p[pre + "w_gate"]
                zu = ffn_normed @ p[pre + "w_up"]
                sg = _sigmoid(zg)
                gated = zg * sg * zu
                ffn_out = gated @ p[pre + "w_down"]
                ffn_pre = (zg, zu, sg)
            x = ffn_in + ffn_out

            if cache is not None:
                cache.layers.append(
                    _LayerCache(
                        attn_in=attn_in,
                        attn_normed=normed,
                        attn_inv_rms=inv_rms,
                        q_rot=q,
                        k_rot=k,
                        v_heads=v,
                        att=att,
                        context=context,
                        ffn_in=ffn_in,
                        ffn_normed=ffn_normed,
                        ffn_inv_rms=ffn_inv_rms,
                        ffn_pre=ffn_pre,
                    )
                )

        final_normed, final_inv_rms = self._rmsnorm(x, p["final_norm"])
        logits = final_normed @ p["output"]
        if cache is not None:
            cache.final_in = x
            cache.final_inv_rms = final_inv_rms
            cache.final_normed = final_normed
        return logits, cache

    def forward(self, keys: Sequence[int] | np.ndarray) -> np.ndarray:
        """Logits for one sequence, shape (positions, vocab)."""
        ids = np.asarray(keys, dtype=np.int64).reshape(1, -1)
        logits, _ = self.forward_batch(ids)
        return logits[0]

    def _rmsnorm(self, x: np.ndarray, gain: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        inv_rms = 1.0 / np.sqrt((x * x).mean(axis=-1, keepdims=True) + self.config.norm_eps)
        return x * inv_rms * gain, inv_rms

    # --------------------------------------------------------------- backward

    def _rmsnorm_backward(
        self,
        dy: np.ndarray,
        x: np.ndarray,
        inv_rms: np.ndarray,
        gain: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray]:
        d = x.shape[-1]
        dgain = (dy * x * inv_rms).reshape(-1, d).sum(axis=0)
        dn = dy * gain
        dot = (dn * x).sum(axis=-1, keepdims=True)
        dx = inv_rms * dn - (inv_rms**3 / d) * x * dot
        return dx, dgain

    def backward_batch(self, cache: ForwardCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        """Parameter gradients given d(loss)/d(logits) for a cached forward."""
        cfg = self.config
        p = self.params
        b, t = cache.ids.shape
        d = cfg.d_model
        grads = {name: np.zeros_like(arr) for name, arr in p.items()}

        flat = lambda a: a.reshape(-1, a.shape[-1])

        # Output projection and final norm.
        grads["output"] += flat(cache.final_normed).T @ flat(dlogits)
        d_final_normed = dlogits @ p["output"].T
        dx, dgain = self._rmsnorm_backward(
            d_final_normed, cache.final_in, cache.final_inv_rms, p["final_norm"]
        )
        grads["final_norm"] += dgain

        cos, sin = self._rope_tables(t)
        scale = 1.0 / np.sqrt(cfg.head_dim)

        for i in reversed(range(cfg.n_layers)):
            pre = f"layer{i}."
            lc = cache.layers[i]

            # Feed-forward sublayer (residual: x = ffn_in + ffn_out).
            d_ffn_out = dx
            if cfg.classic_blocks:
                z1, a1 = lc.ffn_pre
                grads[pre + "w2"] += flat(a1).T @ flat(d_ffn_out)
                da1 = d_ffn_out @ p[pre + "w2"].T
                dz1 = da1 * (z1 > 0)
                grads[pre + "w1"] += flat(lc.ffn_normed).T @ flat(dz1)
                d_ffn_normed = dz1 @ p[pre + "w1"].T
            else:
                zg, zu, sg = lc.ffn_pre
                silu = zg * sg
                grads[pre + "w_down"] += flat(silu * zu).T @ flat(d_ffn_out)
                d_gated = d_ffn_out @ p[pre + "w_down"].T
                dzu = d_gated * silu
                dsilu = d_gated * zu
                dzg = dsilu * (sg * (1.0 + zg * (1.0 - sg)))
                grads[pre + "w_gate"] += flat(lc.ffn_normed).T @ flat(dzg)
                grads[pre + "w_up"] += flat(lc.ffn_normed).T @ flat(dzu)
                d_ffn_normed = dzg @ p[pre + "w_gate"].T + dzu @ p[pre + "w_up"].T
            d_ffn_in, dgain = self._rmsnorm_backward(
                d_ffn_normed, lc.ffn_in, lc.ffn_inv_rms, p[pre + "ffn_norm"]
            )
            grads[pre + "ffn_norm"] += dgain
            dx = dx + d_ffn_in

            # Attention sublayer (residual: x = attn_in + attn_out).
            d_attn_out = dx
            grads[pre + "wo"] += flat(self._merge_heads(lc.context)).T @ flat(d_attn_out)
            d_context = self._split_heads(d_attn_out @ p[pre + "wo"].T)
            datt = d_context @ lc.v_heads.swapaxes(-1, -2)
            dv = lc.att.swapaxes(-1, -2) @ d_context
            dscores = lc.att * (datt - (datt * lc.att).sum(axis=-1, keepdims=True))
            dq = (dscores @ lc.k_rot) * scale
            dk = (dscores.swapaxes(-1, -2) @ lc.q_rot) * scale
            if not cfg.classic_blocks:
                dq = self._rotate(dq, cos, sin, inverse=True)
                dk = self._rotate(dk, cos, sin, inverse=True)
            dq_m, dk_m, dv_m = (self._merge_heads(a) for a in (dq, dk, dv))
            grads[pre + "wq"] += flat(lc.attn_normed).T @ flat(dq_m)
            grads[pre + "wk"] += flat(lc.attn_normed).T @ flat(dk_m)
            grads[pre + "wv"] += flat(lc.attn_normed).T @ flat(dv_m)
            d_attn_normed = dq_m @ p[pre + "wq"].T + dk_m @ p[pre + "wk"].T + dv_m @ p[pre + "wv"].T
            d_attn_in, dgain = self._rmsnorm_backward(
                d_attn_normed, lc.attn_in, lc.attn_inv_rms, p[pre + "attn_norm"]
            )
            grads[pre + "attn_norm"] += dgain
            dx = dx + d_attn_in

        if cfg.classic_blocks:
            grads["pos"][:t] += dx.sum(axis=0)
        np.add.at(grads["embed"], cache.ids, dx)
        return grads

    # ------------------------------------------------------------ predictions

    def key_distributions(self, keys: Sequence[int] | np.ndarray) -> np.ndarray:
        """Per-position next-key distributions over the full vocabulary.

        Probability mass on the special tokens is renormalized away, so each
        row sums to 1 over the log keys alone.
        """
        logits = self.forward(keys)
        return self.mask_distributions(_softmax(logits))

    def mask_distributions(self, probs: np.ndarray) -> np.ndarray:
        n = self.vocab.key_count
        masked = probs.copy()
        masked[..., n:] = 0.0
        totals = masked.sum(axis=-1, keepdims=True)
        uniform = 1.0 / n
        safe = np.where(totals > 0.0, totals, 1.0)
        masked = masked / safe
        masked = np.where(totals > 0.0, masked, np.where(np.arange(probs.shape[-1]) < n, uniform, 0.0))
        return masked

    def next_key_distribution(self, prefix: Sequence[int] | np.ndarray) -> np.ndarray:
        """Distribution over the next key given a non-empty prefix."""
        prefix = np.asarray(prefix, dtype=np.int64)
        if prefix.size < 1:
            raise ValueError("prefix must be non-empty")
        return self.key_distributions(prefix)[-1]
