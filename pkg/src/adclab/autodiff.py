"""Taped reverse-mode automatic differentiation on dense float64 arrays.

Forward values are computed eagerly; each recorded node keeps its op kind,
input node ids and a vector-Jacobian closure over the saved forward
values.  ``backward`` runs one reverse sweep over the tape, which is
topologically ordered by construction.  The primitive set is exactly what
the conditional-GAN losses need: elementwise arithmetic, dense affine
maps, a leaky rectifier, the usual scalar nonlinearities, full reductions,
a numerically stable log-sum-exp over the last axis, and index plumbing
for label embeddings and per-row logit selection.

Only first-order gradients are supported; the tape stores no graph for
its own backward pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class AutodiffError(Exception):
    pass


class ShapeMismatch(AutodiffError):
    """Operand shapes are incompatible for the requested op."""


class NonScalarOutput(AutodiffError):
    """backward requires a scalar output node."""


class NonFinite(AutodiffError):
    """A function evaluation produced NaN or infinity."""


@dataclass
class Node:
    op: str
    inputs: tuple[int, ...]
    value: np.ndarray
    vjp: Callable[[np.ndarray], tuple[np.ndarray, ...]] | None  # None for leaves


@dataclass(frozen=True)
class Var:
    """Handle to one tape node; immutable once recorded."""

    tape: "Tape"
    id: int

    @property
    def data(self) -> np.ndarray:
        return self.tape.nodes[self.id].value

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape


def _as_f64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


class Tape:
    """Single-writer record of one forward computation."""

    def __init__(self):
        self.nodes: list[Node] = []

    def _record(self, op, inputs: Sequence[Var], value, vjp) -> Var:
        node = Node(op, tuple(v.id for v in inputs), _as_f64(value), vjp)
        self.nodes.append(node)
        return Var(self, len(self.nodes) - 1)

    # -- leaves --------------------------------------------------------

    def var(self, data) -> Var:
        """New leaf holding a copy of ``data``."""
        return self._record("leaf", (), np.array(data, dtype=np.float64), None)

    # -- elementwise arithmetic ----------------------------------------

    def _binary_same_shape(self, op, a: Var, b: Var):
        if a.shape != b.shape:
            raise ShapeMismatch(f"{op}: {a.shape} vs {b.shape}")

    def add(self, a: Var, b: Var) -> Var:
        self._binary_same_shape("add", a, b)
        return self._record("add", (a, b), a.data + b.data, lambda g: (g, g))

    def sub(self, a: Var, b: Var) -> Var:
        self._binary_same_shape("sub", a, b)
        return self._record("sub", (a, b), a.data - b.data, lambda g: (g, -g))

    def mul(self, a: Var, b: Var) -> Var:
        self._binary_same_shape("mul", a, b)
        av, bv = a.data, b.data
        return self._record("mul", (a, b), av * bv, lambda g: (g * bv, g * av))

    def scale(self, a: Var, c: float) -> Var:
        c = float(c)
        return self._record("scale", (a,), c * a.data, lambda g: (c * g,))

    # -- linear algebra -------------------------------------------------

    def matmul(self, a: Var, b: Var) -> Var:
        if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeMismatch(f"matmul: {a.shape} @ {b.shape}")
        av, bv = a.data, b.data
        return self._record("matmul", (a, b), av @ bv,
                            lambda g: (g @ bv.T, av.T @ g))

    def affine(self, x: Var, w: Var, b: Var) -> Var:
        """x @ w.T + b with w of shape (out, in) and b of shape (out,)."""
        if x.data.ndim != 2 or w.data.ndim != 2 or x.shape[1] != w.shape[1] \
                or b.shape != (w.shape[0],):
            raise ShapeMismatch(f"affine: x{x.shape} w{w.shape} b{b.shape}")
        xv, wv = x.data, w.data
        return self._record("affine", (x, w, b), xv @ wv.T + b.data,
                            lambda g: (g @ wv, g.T @ xv, g.sum(axis=0)))

    # -- nonlinearities ---------------------------------------------------

    def leaky_relu(self, x: Var, slope: float = 0.2) -> Var:
        pos = x.data > 0.0
        factor = np.where(pos, 1.0, slope)
        return self._record("leaky_relu", (x,), factor * x.data, lambda g: (g * factor,))

    def tanh(self, x: Var) -> Var:
        t = np.tanh(x.data)
        return self._record("tanh", (x,), t, lambda g: (g * (1.0 - t * t),))

    def exp(self, x: Var) -> Var:
        e = np.exp(x.data)
        return self._record("exp", (x,), e, lambda g: (g * e,))

    def log(self, x: Var) -> Var:
        xv = x.data
        return self._record("log", (x,), np.log(xv), lambda g: (g / xv,))

    def sigmoid(self, x: Var) -> Var:
        xv = x.data
        s = np.where(xv >= 0, 1.0 / (1.0 + np.exp(-np.abs(xv))),
                     np.exp(-np.abs(xv)) / (1.0 + np.exp(-np.abs(xv))))
        return self._record("sigmoid", (x,), s, lambda g: (g * s * (1.0 - s),))

    def square(self, x: Var) -> Var:
        xv = x.data
        return self._record("square", (x,), xv * xv, lambda g: (2.0 * g * xv,))

    # -- reductions -------------------------------------------------------

    def sum(self, x: Var) -> Var:
        shape = x.shape
        return self._record("sum", (x,), np.asarray(x.data.sum()),
                            lambda g: (np.broadcast_to(g, shape).copy(),))

    def mean(self, x: Var) -> Var:
        shape = x.shape
        n = x.data.size
        return self._record("mean", (x,), np.asarray(x.data.mean()),
                            lambda g: (np.broadcast_to(g / n, shape).copy(),))

    def logsumexp(self, x: Var) -> Var:
        """log sum exp over the last axis, stabilized by the row max."""
        xv = x.data
        hi = xv.max(axis=-1, keepdims=True)
        ex = np.exp(xv - hi)
        total = ex.sum(axis=-1, keepdims=True)
        value = (hi + np.log(total)).reshape(xv.shape[:-1])
        soft = ex / total
        return self._record("logsumexp", (x,), value,
                            lambda g: (np.expand_dims(g, -1) * soft,))

    # -- index plumbing ---------------------------------------------------

    def gather_rows(self, m: Var, idx: np.ndarray) -> Var:
        """Rows m[idx] of a (K, d) matrix; idx is a fixed int vector."""
        idx = np.asarray(idx)
        if m.data.ndim != 2 or idx.ndim != 1:
            raise ShapeMismatch(f"gather_rows: m{m.shape} idx{idx.shape}")
        mshape = m.shape

        def vjp(g):
            gm = np.zeros(mshape)
            np.add.at(gm, idx, g)
            return (gm,)

        return self._record("gather_rows", (m,), m.data[idx], vjp)

    def select_col(self, x: Var, idx: np.ndarray) -> Var:
        """Per-row entry x[i, idx[i]]; idx is a fixed int vector of length n."""
        idx = np.asarray(idx)
        if x.data.ndim != 2 or idx.shape != (x.shape[0],):
            raise ShapeMismatch(f"select_col: x{x.shape} idx{idx.shape}")
        rows = np.arange(x.shape[0])
        xshape = x.shape

        def vjp(g):
            gx = np.zeros(xshape)
            gx[rows, idx] = g
            return (gx,)

        return self._record("select_col", (x,), x.data[rows, idx], vjp)

    def concat(self, a: Var, b: Var) -> Var:
        """Concatenate along the last axis."""
        if a.data.ndim != b.data.ndim or a.shape[:-1] != b.shape[:-1]:
            raise ShapeMismatch(f"concat: {a.shape} vs {b.shape}")
        na = a.shape[-1]

        def vjp(g):
            return (g[..., :na], g[..., na:])

        return self._record("concat", (a, b), np.concatenate([a.data, b.data], axis=-1), vjp)

    # -- reverse sweep -----------------------------------------------------

    def backward(self, out: Var) -> list[np.ndarray]:
        """Gradients of the scalar ``out`` w.r.t. every node on the tape.

        Nodes not on a path to ``out`` get an exact zero gradient.
        """
        if out.tape is not self:
            raise AutodiffError("output belongs to a different tape")
        if out.shape != ():
            raise NonScalarOutput(f"output has shape {out.shape}, expected scalar")
        grads: list[np.ndarray | None] = [None] * len(self.nodes)
        grads[out.id] = np.asarray(1.0)
        for nid in range(out.id, -1, -1):
            g = grads[nid]
            node = self.nodes[nid]
            if g is None or node.vjp is None:
                continue
            for in_id, gin in zip(node.inputs, node.vjp(g)):
                if grads[in_id] is None:
                    grads[in_id] = np.zeros_like(self.nodes[in_id].value)
                grads[in_id] = grads[in_id] + gin
        return [np.zeros_like(n.value) if g is None else np.asarray(g)
                for g, n in zip(grads, self.nodes)]


def grad_check(fn, point: np.ndarray, step: float = 1e-6, mode: str = "central") -> float:
    """Max relative error between fn's gradient and finite differences.

    ``fn(x)`` must return ``(value, grad)`` with grad the same shape as x.
    The error metric is max_i |g_i - fd_i| / max(1, |g_i|, |fd_i|).
    """
    if mode not in ("central", "forward"):
        raise ValueError(f"unknown mode {mode!r}")
    point = _as_f64(point)
    value, grad = fn(point)
    grad = _as_f64(grad)
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NonFinite("function value or gradient is not finite at the base point")
    worst = 0.0
    flat = point.ravel()
    for i in range(flat.size):
        shifted = flat.copy()
        shifted[i] = flat[i] + step
        up, _ = fn(shifted.reshape(point.shape))
        if mode == "central":
            shifted[i] = flat[i] - step
            down, _ = fn(shifted.reshape(point.shape))
            fd = (up - down) / (2.0 * step)
        else:
            fd = (up - value) / step
        if not np.isfinite(fd):
            raise NonFinite(f"finite-difference evaluation not finite at coordinate {i}")
        gi = grad.ravel()[i]
        worst = max(worst, abs(gi - fd) / max(1.0, abs(gi), abs(fd)))
    return worst
