"""Tape engine: forward values, reverse sweep, finite-difference agreement."""

import math

import numpy as np
import pytest

from adclab.autodiff import (
    NonFinite,
    NonScalarOutput,
    ShapeMismatch,
    Tape,
    grad_check,
)


def naive_matmul(a, b):
    """Triple-loop oracle."""
    n, m = a.shape
    m2, k = b.shape
    out = np.zeros((n, k))
    for i in range(n):
        for j in range(k):
            for l in range(m):
                out[i, j] += a[i, l] * b[l, j]
    return out


class TestForward:
    def test_add_example(self):
        tape = Tape()
        out = tape.add(tape.var([1.0, 2.0]), tape.var([3.0, 4.0]))
        assert np.array_equal(out.data, [4.0, 6.0])

    def test_logsumexp_example(self):
        tape = Tape()
        out = tape.logsumexp(tape.var([0.0, 0.0]))
        assert float(out.data) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_matmul_against_naive_oracle(self):
        gen = np.random.default_rng(0)
        a, b = gen.normal(size=(2, 3)), gen.normal(size=(3, 2))
        tape = Tape()
        out = tape.matmul(tape.var(a), tape.var(b))
        assert np.allclose(out.data, naive_matmul(a, b), atol=1e-12)

    def test_affine_matches_matmul_plus_bias(self):
        gen = np.random.default_rng(1)
        x, w, b = gen.normal(size=(4, 3)), gen.normal(size=(5, 3)), gen.normal(size=5)
        tape = Tape()
        out = tape.affine(tape.var(x), tape.var(w), tape.var(b))
        assert np.allclose(out.data, x @ w.T + b, atol=1e-12)

    def test_shape_mismatch_reports_shapes(self):
        tape = Tape()
        with pytest.raises(ShapeMismatch, match=r"\(2,\)"):
            tape.add(tape.var([1.0, 2.0]), tape.var([1.0, 2.0, 3.0]))
        with pytest.raises(ShapeMismatch):
            tape.matmul(tape.var(np.ones((2, 3))), tape.var(np.ones((2, 3))))

    def test_sigmoid_extreme_logits_stay_finite(self):
        tape = Tape()
        out = tape.sigmoid(tape.var([-1000.0, 0.0, 1000.0]))
        assert np.all(np.isfinite(out.data))
        assert out.data[1] == 0.5


class TestBackward:
    def test_square_gradient(self):
        tape = Tape()
        x = tape.var(3.0)
        grads = tape.backward(tape.square(x))
        assert float(grads[x.id]) == pytest.approx(6.0, abs=1e-12)

    def test_logsumexp_gradient_is_softmax(self):
        tape = Tape()
        v = tape.var([0.0, 0.0])
        grads = tape.backward(tape.logsumexp(v))
        assert np.allclose(grads[v.id], [0.5, 0.5], atol=1e-12)

    def test_non_scalar_output_rejected(self):
        tape = Tape()
        v = tape.var([1.0, 2.0])
        with pytest.raises(NonScalarOutput):
            tape.backward(v)

    def test_unreached_leaf_gets_zero(self):
        tape = Tape()
        x = tape.var([1.0, 2.0])
        y = tape.var([5.0, 5.0])
        grads = tape.backward(tape.sum(x))
        assert np.array_equal(grads[y.id], [0.0, 0.0])

    def test_gradient_linearity(self):
        """grad of a sum of parts equals the sum of the parts' grads."""
        gen = np.random.default_rng(2)
        a_val = gen.normal(size=(3, 4))
        b_val = gen.normal(size=(3, 4))

        def part1(tape, a, b):
            return tape.mean(tape.mul(a, b))

        def part2(tape, a, b):
            return tape.sum(tape.square(tape.sub(a, b)))

        tape = Tape()
        a, b = tape.var(a_val), tape.var(b_val)
        grads_total = tape.backward(tape.add(part1(tape, a, b), part2(tape, a, b)))

        tape1 = Tape()
        a1, b1 = tape1.var(a_val), tape1.var(b_val)
        g1 = tape1.backward(part1(tape1, a1, b1))
        tape2 = Tape()
        a2, b2 = tape2.var(a_val), tape2.var(b_val)
        g2 = tape2.backward(part2(tape2, a2, b2))

        assert np.allclose(grads_total[a.id], g1[a1.id] + g2[a2.id], atol=1e-12)
        assert np.allclose(grads_total[b.id], g1[b1.id] + g2[b2.id], atol=1e-12)

    def test_backward_twice_identical(self):
        gen = np.random.default_rng(3)
        tape = Tape()
        x = tape.var(gen.normal(size=(4, 3)))
        out = tape.mean(tape.tanh(tape.square(x)))
        first = tape.backward(out)
        second = tape.backward(out)
        assert all(np.array_equal(f, s) for f, s in zip(first, second))

    def test_gather_rows_accumulates_duplicates(self):
        tape = Tape()
        m = tape.var(np.arange(6.0).reshape(3, 2))
        out = tape.sum(tape.gather_rows(m, np.array([0, 0, 2])))
        grads = tape.backward(out)
        assert np.array_equal(grads[m.id], [[2.0, 2.0], [0.0, 0.0], [1.0, 1.0]])

    def test_select_col_gradient(self):
        tape = Tape()
        x = tape.var(np.arange(6.0).reshape(2, 3))
        out = tape.sum(tape.select_col(x, np.array([2, 0])))
        grads = tape.backward(out)
        assert np.array_equal(grads[x.id], [[0, 0, 1], [1, 0, 0]])


class TestLogsumexpShiftInvariance:
    def test_value_and_gradient(self):
        gen = np.random.default_rng(4)
        v = gen.normal(size=(5, 7))
        c = 3.7
        tape1, tape2 = Tape(), Tape()
        x1, x2 = tape1.var(v), tape2.var(v + c)
        out1 = tape1.sum(tape1.logsumexp(x1))
        out2 = tape2.sum(tape2.logsumexp(x2))
        assert float(out2.data - out1.data) == pytest.approx(5 * c, abs=1e-12)
        g1 = tape1.backward(out1)[x1.id]
        g2 = tape2.backward(out2)[x2.id]
        assert np.allclose(g1, g2, atol=1e-12)

    def test_huge_logits_stable(self):
        tape = Tape()
        out = tape.logsumexp(tape.var([1000.0, 1000.0]))
        assert float(out.data) == pytest.approx(1000.0 + math.log(2.0), abs=1e-9)


class TestGradCheck:
    def _tape_fn(self, build):
        """Wrap a tape builder into the (value, grad) interface."""

        def fn(x):
            tape = Tape()
            v = tape.var(x)
            out = build(tape, v)
            grads = tape.backward(out)
            return float(out.data), grads[v.id]

        return fn

    def test_linear_function_is_exact(self):
        fn = self._tape_fn(lambda tape, v: tape.sum(tape.scale(v, 2.5)))
        assert grad_check(fn, np.array([1.0, -2.0, 3.0])) < 1e-9

    def test_exp_at_zero(self):
        fn = self._tape_fn(lambda tape, v: tape.sum(tape.exp(v)))
        assert grad_check(fn, np.array([0.0])) < 1e-8

    def test_forward_mode(self):
        fn = self._tape_fn(lambda tape, v: tape.sum(tape.square(v)))
        assert grad_check(fn, np.array([1.0, 2.0]), mode="forward") < 1e-4

    def test_nonfinite_raises(self):
        fn = self._tape_fn(lambda tape, v: tape.sum(tape.log(v)))
        with np.errstate(divide="ignore"), pytest.raises(NonFinite):
            grad_check(fn, np.array([0.0]))

    @pytest.mark.parametrize("op", [
        "add", "sub", "mul", "matmul", "affine", "leaky_relu", "tanh", "exp",
        "log", "sigmoid", "square", "sum", "mean", "logsumexp", "gather_rows",
        "select_col", "concat", "scale",
    ])
    def test_every_primitive_fd_agreement(self, op):
        """Each primitive: relative error < 1e-5 at 20 random points."""
        gen = np.random.default_rng(hash(op) % 2 ** 32)
        for _ in range(20):
            if op in ("add", "sub", "mul", "concat"):
                shape = (2, 3)
                other = gen.normal(size=shape)

                def build(tape, v, _op=op, _other=other):
                    w = tape.var(_other)
                    return tape.mean(tape.square(getattr(tape, _op)(v, w)))

                point = gen.normal(size=shape)
            elif op == "matmul":
                other = gen.normal(size=(3, 2))

                def build(tape, v, _other=other):
                    return tape.mean(tape.square(tape.matmul(v, tape.var(_other))))

                point = gen.normal(size=(2, 3))
            elif op == "affine":
                w, b = gen.normal(size=(4, 3)), gen.normal(size=4)

                def build(tape, v, _w=w, _b=b):
                    return tape.mean(tape.square(tape.affine(v, tape.var(_w), tape.var(_b))))

                point = gen.normal(size=(2, 3))
            elif op in ("gather_rows", "select_col"):
                idx = gen.integers(0, 3, size=4) if op == "select_col" \
                    else gen.integers(0, 4, size=6)

                def build(tape, v, _op=op, _idx=idx):
                    return tape.mean(tape.square(getattr(tape, _op)(v, _idx)))

                point = gen.normal(size=(4, 3))
            elif op == "log":
                def build(tape, v):
                    return tape.mean(tape.log(v))

                point = 0.5 + gen.random(size=(2, 3))
            elif op == "leaky_relu":
                def build(tape, v):
                    return tape.mean(tape.leaky_relu(v))

                # keep preactivations away from the kink for finite differences
                point = gen.normal(size=(2, 3))
                point = np.where(np.abs(point) < 1e-3, 0.5, point)
            elif op == "scale":
                def build(tape, v):
                    return tape.mean(tape.square(tape.scale(v, -1.7)))

                point = gen.normal(size=(2, 3))
            else:
                def build(tape, v, _op=op):
                    return tape.mean(tape.square(getattr(tape, _op)(v)))

                point = gen.normal(size=(2, 3))

            fn = self._tape_fn(build)
            assert grad_check(fn, point) < 1e-5
