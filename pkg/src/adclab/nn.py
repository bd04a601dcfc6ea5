"""Networks for the 1-D conditional-GAN experiments.

One parameter bundle serves every method: a conditional generator (latent
code concatenated with a one-hot label), a shared feature extractor phi,
a linear discriminator head psi on top of phi, and label embedding
matrices.  The embeddings double as classifier heads: ``emb_plus`` gives
the K "real with label y" logits, ``emb_minus`` the K "fake with label y"
logits, and their difference is the projection embedding used by the
projection-discriminator logit.  A (K+1)-row embedding provides the
label-extended head with an explicit fake class in row 0.

All heads read the same single phi evaluation per batch; a module-level
counter exposes that for tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from adclab import rng
from adclab.autodiff import Tape, Var


class LabelOutOfRange(Exception):
    """A class label falls outside [0, num_classes)."""


LEAKY_SLOPE = 0.2  # keeps discriminator gradients alive on the negative side


@dataclass
class Dims:
    latent_dim: int = 4
    data_dim: int = 1
    feature_dim: int = 32
    num_classes: int = 3
    hidden: tuple[int, ...] = (64, 64)

    def __post_init__(self):
        vals = (self.latent_dim, self.data_dim, self.feature_dim, self.num_classes, *self.hidden)
        if any(int(v) <= 0 for v in vals):
            raise ValueError(f"all dims must be positive, got {self}")
        self.hidden = tuple(int(h) for h in self.hidden)


@dataclass(frozen=True)
class LatentSpec:
    """Latent code distribution: iid standard normal per coordinate."""

    latent_dim: int

    def __post_init__(self):
        if self.latent_dim <= 0:
            raise ValueError("latent_dim must be positive")

    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        return rng.normals(gen, n * self.latent_dim).reshape(n, self.latent_dim)


@dataclass
class DenseLayer:
    weight: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)


@dataclass
class ModelParams:
    generator: list[DenseLayer]
    phi: list[DenseLayer]
    psi: DenseLayer
    emb_plus: np.ndarray  # (K, d)
    emb_minus: np.ndarray  # (K, d)
    emb_ext: np.ndarray  # (K+1, d), row 0 = fake class
    dims: Dims

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        """Stable (name, array) listing used by the optimizer and checkpoints."""
        out = []
        for i, layer in enumerate(self.generator):
            out.append((f"gen.{i}.w", layer.weight))
            out.append((f"gen.{i}.b", layer.bias))
        for i, layer in enumerate(self.phi):
            out.append((f"phi.{i}.w", layer.weight))
            out.append((f"phi.{i}.b", layer.bias))
        out.append(("psi.w", self.psi.weight))
        out.append(("psi.b", self.psi.bias))
        out.append(("emb_plus", self.emb_plus))
        out.append(("emb_minus", self.emb_minus))
        out.append(("emb_ext", self.emb_ext))
        return out

    def set_array(self, name: str, value: np.ndarray):
        """Replace one named array (checkpoint restore)."""
        for current_name, arr in self.named_arrays():
            if current_name == name:
                if arr.shape != value.shape:
                    raise ValueError(f"{name}: shape {value.shape} != {arr.shape}")
                arr[...] = value
                return
        raise KeyError(name)


def _glorot(gen, out_dim: int, in_dim: int) -> np.ndarray:
    std = np.sqrt(2.0 / (in_dim + out_dim))
    return std * rng.normals(gen, out_dim * in_dim).reshape(out_dim, in_dim)


def _mlp(gen, sizes: list[int]) -> list[DenseLayer]:
    return [DenseLayer(_glorot(gen, o, i), np.zeros(o)) for i, o in zip(sizes[:-1], sizes[1:])]


def init_params(dims: Dims, seed: int) -> ModelParams:
    """Glorot-normal weights, zero biases; bit-identical for equal (dims, seed)."""
    gen = rng.philox_stream(seed, rng.STREAM_PARAMS)
    k, d = dims.num_classes, dims.feature_dim
    generator = _mlp(gen, [dims.latent_dim + k, *dims.hidden, dims.data_dim])
    phi = _mlp(gen, [dims.data_dim, *dims.hidden, d])
    psi = DenseLayer(_glorot(gen, 1, d), np.zeros(1))
    return ModelParams(
        generator=generator,
        phi=phi,
        psi=psi,
        emb_plus=_glorot(gen, k, d),
        emb_minus=_glorot(gen, k, d),
        emb_ext=_glorot(gen, k + 1, d),
        dims=dims,
    )


# ---------------------------------------------------------------------------
# Tape binding and forward passes
# ---------------------------------------------------------------------------


@dataclass
class BoundParams:
    """ModelParams registered as leaves on one tape."""

    tape: Tape
    generator: list[tuple[Var, Var]]
    phi: list[tuple[Var, Var]]
    psi: tuple[Var, Var]
    emb_plus: Var
    emb_minus: Var
    emb_ext: Var
    dims: Dims
    by_name: dict[str, Var] = field(default_factory=dict)


def bind(tape: Tape, params: ModelParams) -> BoundParams:
    by_name = {name: tape.var(arr) for name, arr in params.named_arrays()}
    n_gen, n_phi = len(params.generator), len(params.phi)
    return BoundParams(
        tape=tape,
        generator=[(by_name[f"gen.{i}.w"], by_name[f"gen.{i}.b"]) for i in range(n_gen)],
        phi=[(by_name[f"phi.{i}.w"], by_name[f"phi.{i}.b"]) for i in range(n_phi)],
        psi=(by_name["psi.w"], by_name["psi.b"]),
        emb_plus=by_name["emb_plus"],
        emb_minus=by_name["emb_minus"],
        emb_ext=by_name["emb_ext"],
        dims=params.dims,
        by_name=by_name,
    )


def _mlp_forward(tape: Tape, layers: list[tuple[Var, Var]], x: Var) -> Var:
    h = x
    for i, (w, b) in enumerate(layers):
        h = tape.affine(h, w, b)
        if i < len(layers) - 1:
            h = tape.leaky_relu(h, LEAKY_SLOPE)
    return h


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    out = np.zeros((labels.shape[0], num_classes))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _check_labels(labels: np.ndarray, num_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise LabelOutOfRange(f"labels must be a vector, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelOutOfRange(f"labels must lie in [0, {num_classes})")
    return labels


def generate(tape: Tape, bound: BoundParams, z: np.ndarray, labels: np.ndarray) -> Var:
    """Generator forward: concat(z, one_hot(y)) -> data batch on the tape."""
    labels = _check_labels(labels, bound.dims.num_classes)
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2 or z.shape[1] != bound.dims.latent_dim or z.shape[0] != labels.shape[0]:
        raise ValueError(f"latent batch shape {z.shape} does not match labels/latent_dim")
    zin = tape.var(z)
    onehot = tape.var(one_hot(labels, bound.dims.num_classes))
    return _mlp_forward(tape, bound.generator, tape.concat(zin, onehot))


# test instrumentation: how many times the shared feature extractor ran
_phi_forward_count = 0


def phi_forward_count() -> int:
    return _phi_forward_count


@dataclass
class HeadLogits:
    phi: Var  # (n, d) shared features
    disc: Var  # (n, 1) discriminator logit psi(phi(x))
    plus: Var  # (n, K) real-label logits emb_plus . phi(x)
    minus: Var  # (n, K) fake-label logits emb_minus . phi(x)


def head_logits(tape: Tape, bound: BoundParams, x) -> HeadLogits:
    """All shared-feature heads from a single phi evaluation of the batch."""
    global _phi_forward_count
    if not isinstance(x, Var):
        x = tape.var(np.asarray(x, dtype=np.float64))
    h = _mlp_forward(tape, bound.phi, x)
    _phi_forward_count += 1
    k = bound.dims.num_classes
    zero_k = tape.var(np.zeros(k))
    disc = tape.affine(h, *bound.psi)
    plus = tape.affine(h, bound.emb_plus, zero_k)
    minus = tape.affine(h, bound.emb_minus, zero_k)
    return HeadLogits(phi=h, disc=disc, plus=plus, minus=minus)


def label_extended_logits(tape: Tape, bound: BoundParams, heads: HeadLogits) -> Var:
    """(n, K+1) logits of the label-extended head, column 0 = fake class."""
    zero = tape.var(np.zeros(bound.dims.num_classes + 1))
    return tape.affine(heads.phi, bound.emb_ext, zero)


def row_dot(tape: Tape, a: Var, b: Var) -> Var:
    """Per-row inner product of two (n, d) batches, as an (n, 1) column."""
    prod = tape.mul(a, b)
    ones = tape.var(np.ones((a.shape[1], 1)))
    return tape.matmul(prod, ones)


def pd_logit_from_heads(tape: Tape, bound: BoundParams, heads: HeadLogits,
                        labels: np.ndarray) -> Var:
    """psi(phi(x)) + (emb_plus - emb_minus)[y] . phi(x) from computed heads."""
    labels = _check_labels(labels, bound.dims.num_classes)
    emb = tape.sub(tape.gather_rows(bound.emb_plus, labels),
                   tape.gather_rows(bound.emb_minus, labels))
    return tape.add(heads.disc, row_dot(tape, emb, heads.phi))


def pd_logit(tape: Tape, bound: BoundParams, x, labels: np.ndarray,
             with_partition: bool = False):
    """Projection-discriminator logit psi(phi(x)) + (emb_plus - emb_minus)[y] . phi(x).

    This is the heuristic form that drops the log-partition correction of
    the label-conditional term.  With ``with_partition=True`` the dropped
    term is returned alongside, computed per row as
    logsumexp(emb_plus . phi) + logsumexp(emb_minus . phi).
    """
    heads = head_logits(tape, bound, x)
    logit = pd_logit_from_heads(tape, bound, heads, labels)
    if not with_partition:
        return logit
    partition = tape.add(tape.logsumexp(heads.plus), tape.logsumexp(heads.minus))
    return logit, partition
