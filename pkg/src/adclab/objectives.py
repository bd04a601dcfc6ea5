"""Per-method discriminator/classifier and generator losses, on tape.

Each method composes a plain GAN loss on the discriminator logit with a
label head trained in the log domain; classifier log-probabilities are
always written as ``logit - logsumexp(logits)`` rather than
``log(softmax)``.  The real/fake label head is a single softmax over the
2K concatenated logits, and its generator signal reduces to a logit
difference because the shared partition cancels.

Mixing conventions: ``include_gan_loss=False`` drops the GAN term
entirely; a ``lam_prime`` in [0, 1] instead blends the two parts as
(1 - lam_prime) * gan + lam_prime * lam * classifier, so lam_prime=0 is
the pure GAN loss and lam_prime=1 matches the dropped-GAN-term setting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from adclab import nn
from adclab.autodiff import Tape, Var
from adclab.tabular import METHODS

GAN_LOSSES = ("non_saturating", "hinge", "least_squares")


@dataclass
class MethodSpec:
    """Which method to train, with which GAN loss and coefficients."""

    method: str
    gan_loss: str = "non_saturating"
    lam: float = 1.0
    lam_prime: float | None = None
    include_gan_loss: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.gan_loss not in GAN_LOSSES:
            raise ValueError(f"unknown gan loss {self.gan_loss!r}")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.lam_prime is not None:
            if not 0.0 <= self.lam_prime <= 1.0:
                raise ValueError("lam_prime must lie in [0, 1]")
            if self.method == "pdgan":
                raise ValueError("lam_prime mixing applies to classifier-based methods only")
            if not self.include_gan_loss:
                raise ValueError("lam_prime mixing already controls the GAN term")
        if self.method == "pdgan" and not self.include_gan_loss:
            raise ValueError("pdgan has no classifier term; its GAN loss cannot be dropped")

    def coefficients(self) -> tuple[float, float]:
        """(gan term coefficient, classifier term coefficient)."""
        if self.lam_prime is not None:
            return 1.0 - self.lam_prime, self.lam_prime * self.lam
        if not self.include_gan_loss:
            return 0.0, self.lam
        return 1.0, self.lam


# ---------------------------------------------------------------------------
# GAN loss variants (logits of shape (n, 1))
# ---------------------------------------------------------------------------


def _softplus(tape: Tape, logits: Var) -> Var:
    """log(1 + exp(x)) per row via logsumexp([0, x]); equals -log sigmoid(-x)."""
    zeros = tape.var(np.zeros(logits.shape))
    return tape.logsumexp(tape.concat(zeros, logits))


def _relu(tape: Tape, x: Var) -> Var:
    return tape.leaky_relu(x, 0.0)


def gan_loss_d(tape: Tape, variant: str, real_logits: Var, fake_logits: Var) -> Var:
    """Discriminator-side GAN loss (to be minimized)."""
    if variant == "non_saturating":
        # -mean log sigmoid(real) - mean log(1 - sigmoid(fake))
        return tape.add(tape.mean(_softplus(tape, tape.scale(real_logits, -1.0))),
                        tape.mean(_softplus(tape, fake_logits)))
    if variant == "hinge":
        ones_r = tape.var(np.ones(real_logits.shape))
        ones_f = tape.var(np.ones(fake_logits.shape))
        return tape.add(tape.mean(_relu(tape, tape.sub(ones_r, real_logits))),
                        tape.mean(_relu(tape, tape.add(ones_f, fake_logits))))
    if variant == "least_squares":
        ones = tape.var(np.ones(real_logits.shape))
        return tape.add(tape.mean(tape.square(tape.sub(real_logits, ones))),
                        tape.mean(tape.square(fake_logits)))
    raise ValueError(f"unknown gan loss {variant!r}")


def gan_loss_g(tape: Tape, variant: str, fake_logits: Var) -> Var:
    """Generator-side GAN loss (to be minimized)."""
    if variant == "non_saturating":
        return tape.mean(_softplus(tape, tape.scale(fake_logits, -1.0)))
    if variant == "hinge":
        return tape.scale(tape.mean(fake_logits), -1.0)
    if variant == "least_squares":
        ones = tape.var(np.ones(fake_logits.shape))
        return tape.mean(tape.square(tape.sub(fake_logits, ones)))
    raise ValueError(f"unknown gan loss {variant!r}")


def cross_entropy(tape: Tape, logits: Var, targets: np.ndarray) -> Var:
    """Mean of logsumexp(logits) - logits[target] over the batch."""
    targets = np.asarray(targets, dtype=np.int64)
    return tape.mean(tape.sub(tape.logsumexp(logits), tape.select_col(logits, targets)))


def _mean_select(tape: Tape, logits: Var, targets: np.ndarray) -> Var:
    return tape.mean(tape.select_col(logits, np.asarray(targets, dtype=np.int64)))


# ---------------------------------------------------------------------------
# Method losses
# ---------------------------------------------------------------------------


def _combine(tape: Tape, spec: MethodSpec, gan_term: Var | None, cls_term: Var | None) -> Var:
    gan_coef, cls_coef = spec.coefficients()
    parts = []
    if gan_term is not None:
        parts.append(tape.scale(gan_term, gan_coef))
    if cls_term is not None:
        parts.append(tape.scale(cls_term, cls_coef))
    total = parts[0]
    for part in parts[1:]:
        total = tape.add(total, part)
    return total


def discriminator_loss(tape: Tape, spec: MethodSpec, bound: nn.BoundParams,
                       real_x: np.ndarray, real_y: np.ndarray,
                       fake_x: np.ndarray, fake_y: np.ndarray) -> Var:
    """Joint discriminator/classifier loss on one real and one fake batch.

    ``fake_x`` is a plain array: the fake batch is treated as data here, so
    no gradient flows back into the generator from this side.
    """
    k = bound.dims.num_classes
    real_y = np.asarray(real_y, dtype=np.int64)
    fake_y = np.asarray(fake_y, dtype=np.int64)
    heads_r = nn.head_logits(tape, bound, real_x)
    heads_f = nn.head_logits(tape, bound, fake_x)

    method = spec.method
    if method == "pdgan":
        d_real = nn.pd_logit_from_heads(tape, bound, heads_r, real_y)
        d_fake = nn.pd_logit_from_heads(tape, bound, heads_f, fake_y)
        return _combine(tape, spec, gan_loss_d(tape, spec.gan_loss, d_real, d_fake), None)

    gan_term = None
    if spec.coefficients()[0] != 0.0:
        gan_term = gan_loss_d(tape, spec.gan_loss, heads_r.disc, heads_f.disc)

    if method == "acgan":
        cls = cross_entropy(tape, heads_r.plus, real_y)
    elif method == "acgan_original":
        cls = tape.add(cross_entropy(tape, heads_r.plus, real_y),
                       cross_entropy(tape, heads_f.plus, fake_y))
    elif method == "tacgan":
        cls = tape.add(cross_entropy(tape, heads_r.plus, real_y),
                       cross_entropy(tape, heads_f.minus, fake_y))
    elif method == "adcgan":
        cls = tape.add(cross_entropy(tape, tape.concat(heads_r.plus, heads_r.minus), real_y),
                       cross_entropy(tape, tape.concat(heads_f.plus, heads_f.minus), fake_y + k))
    elif method == "amgan":
        ext_r = nn.label_extended_logits(tape, bound, heads_r)
        ext_f = nn.label_extended_logits(tape, bound, heads_f)
        cls = tape.add(cross_entropy(tape, ext_r, real_y + 1),
                       cross_entropy(tape, ext_f, np.zeros_like(fake_y)))
    else:
        raise AssertionError(method)
    return _combine(tape, spec, gan_term, cls)


def generator_loss(tape: Tape, spec: MethodSpec, bound: nn.BoundParams,
                   z: np.ndarray, fake_y: np.ndarray) -> Var:
    """Generator loss on one latent batch; fakes are produced on the tape."""
    k = bound.dims.num_classes
    fake_y = np.asarray(fake_y, dtype=np.int64)
    fake_x = nn.generate(tape, bound, z, fake_y)
    heads = nn.head_logits(tape, bound, fake_x)

    method = spec.method
    if method == "pdgan":
        d_fake = nn.pd_logit_from_heads(tape, bound, heads, fake_y)
        return _combine(tape, spec, gan_loss_g(tape, spec.gan_loss, d_fake), None)

    gan_term = None
    if spec.coefficients()[0] != 0.0:
        gan_term = gan_loss_g(tape, spec.gan_loss, heads.disc)

    if method in ("acgan", "acgan_original"):
        cls = cross_entropy(tape, heads.plus, fake_y)
    elif method == "tacgan":
        cls = tape.sub(cross_entropy(tape, heads.plus, fake_y),
                       cross_entropy(tape, heads.minus, fake_y))
    elif method == "adcgan":
        # log Cd(y+|x) - log Cd(y-|x): the 2K-way partition cancels, only
        # the logit difference (emb_plus - emb_minus)[y] . phi(x) remains
        cls = tape.scale(tape.sub(_mean_select(tape, heads.plus, fake_y),
                                  _mean_select(tape, heads.minus, fake_y)), -1.0)
    elif method == "amgan":
        ext = nn.label_extended_logits(tape, bound, heads)
        cls = cross_entropy(tape, ext, fake_y + 1)
    else:
        raise AssertionError(method)
    return _combine(tape, spec, gan_term, cls)


def generator_forward(params: nn.ModelParams, z: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Plain-array generator forward pass (the detached fake batch)."""
    labels = np.asarray(labels, dtype=np.int64)
    h = np.concatenate([np.asarray(z, dtype=np.float64),
                        nn.one_hot(labels, params.dims.num_classes)], axis=1)
    layers = params.generator
    for i, layer in enumerate(layers):
        h = h @ layer.weight.T + layer.bias
        if i < len(layers) - 1:
            h = np.where(h > 0.0, h, nn.LEAKY_SLOPE * h)
    return h


def method_losses(spec: MethodSpec, params: nn.ModelParams,
                  real_batch: tuple[np.ndarray, np.ndarray],
                  latent_batch: tuple[np.ndarray, np.ndarray]) -> dict[str, float]:
    """Evaluate both sides of ``spec`` on fixed batches; returns plain floats."""
    real_x, real_y = real_batch
    z, fake_y = latent_batch
    fake_x = generator_forward(params, z, fake_y)

    tape_d = Tape()
    loss_d = discriminator_loss(tape_d, spec, nn.bind(tape_d, params),
                                real_x, real_y, fake_x, fake_y)
    tape_g = Tape()
    loss_g = generator_loss(tape_g, spec, nn.bind(tape_g, params), z, fake_y)
    return {"loss_d": float(loss_d.data), "loss_g": float(loss_g.data)}
