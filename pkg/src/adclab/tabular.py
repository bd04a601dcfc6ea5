"""Exact discrete joint distributions and closed-form conditional-GAN optima.

Everything in this module operates on finite joint tables p(x, y) with
``num_points`` support points and ``num_classes`` labels, which makes every
expectation a finite sum.  That exactness is the point: the closed-form
optimal classifiers/discriminators of the auxiliary-classifier GAN family,
the theoretical generator objectives of each method, and the identities
relating the two can all be verified to floating-point accuracy instead of
by stochastic approximation.

Conventions
-----------
- All divergences are in nats.
- ``kl(a, b) = sum a * log(a / b)`` with the usual 0*log 0 = 0 convention.
- Classifier tables are row-stochastic over their output columns; rows
  whose support point carries no probability mass are undefined (NaN) and
  flagged, never silently normalized.

The discriminative-classifier convention used throughout: a 2K-column
table whose first K columns are the "real with label y" outputs and whose
last K columns are the "fake with label y" outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

METHODS = ("acgan", "acgan_original", "tacgan", "adcgan", "pdgan", "amgan")

THEOREM_IDS = ("thm1", "thm2", "thm3", "amgan_bound")

_SUM_TOL = 1e-12


class TabularError(Exception):
    """Base class for errors raised by this module."""


class AbsoluteContinuityViolation(TabularError):
    """a > 0 on a cell where b = 0, so kl(a, b) diverges."""


class UndefinedRow(TabularError):
    """A conditional is requested at a point with zero support."""


class UndefinedPair(TabularError):
    """p(x,y) = q(x,y) = 0: the pairwise density ratio is 0/0."""


class EmptyFamily(TabularError):
    """argmin requested over an empty candidate family."""


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointTable:
    """Exact joint distribution p(x, y) on a finite support.

    probs has shape (num_points, num_classes), entries nonnegative and
    summing to one.  Marginals are always derived from probs, never stored.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] < 1 or probs.shape[1] < 1:
            raise ValueError(f"joint table must be 2-D and nonempty, got shape {probs.shape}")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("joint probabilities must be finite and nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"joint probabilities must sum to 1, got {total!r}")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def num_points(self) -> int:
        return self.probs.shape[0]

    @property
    def num_classes(self) -> int:
        return self.probs.shape[1]

    def marginal_x(self) -> np.ndarray:
        """p(x): length num_points."""
        return self.probs.sum(axis=1)

    def marginal_y(self) -> np.ndarray:
        """p(y): length num_classes."""
        return self.probs.sum(axis=0)


@dataclass(frozen=True)
class ClassifierTable:
    """Conditional probabilities over M outputs at each support point.

    Rows at points with zero support are NaN and flagged in
    ``undefined_rows``; all other rows sum to one.
    """

    probs: np.ndarray
    undefined_rows: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        undef = np.asarray(self.undefined_rows, dtype=bool)
        if probs.ndim != 2 or undef.shape != (probs.shape[0],):
            raise ValueError("classifier table shape mismatch")
        defined = ~undef
        if defined.any():
            sums = probs[defined].sum(axis=1)
            if np.any(np.abs(sums - 1.0) > 1e-9):
                raise ValueError("defined classifier rows must sum to 1")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        undef = undef.copy()
        undef.flags.writeable = False
        object.__setattr__(self, "undefined_rows", undef)

    @property
    def num_outputs(self) -> int:
        return self.probs.shape[1]


def _rows_to_table(num: np.ndarray, denom: np.ndarray) -> ClassifierTable:
    """Row-normalize num by denom, flagging denom == 0 rows as undefined."""
    undef = denom == 0.0
    safe = np.where(undef, 1.0, denom)
    probs = num / safe[:, None]
    probs[undef] = np.nan
    return ClassifierTable(probs, undef)


def random_joint_table(gen: np.random.Generator, num_points: int, num_classes: int,
                       eps: float = 1e-3) -> JointTable:
    """Strictly positive random table: entries uniform on (eps, 1], normalized.

    Positivity guarantees absolute continuity for theorem sweeps; boundary
    tables with zero cells are constructed explicitly where needed.
    """
    raw = eps + (1.0 - eps) * gen.random((num_points, num_classes))
    return JointTable(raw / raw.sum())


# ---------------------------------------------------------------------------
# Divergences
# ---------------------------------------------------------------------------


def kl(a: np.ndarray | JointTable, b: np.ndarray | JointTable) -> float:
    """KL divergence sum a*log(a/b) in nats, with 0*log 0 := 0.

    Raises AbsoluteContinuityViolation if a puts mass where b has none.
    """
    a = a.probs if isinstance(a, JointTable) else np.asarray(a, dtype=np.float64)
    b = b.probs if isinstance(b, JointTable) else np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mask = a > 0.0
    if np.any(mask & (b == 0.0)):
        raise AbsoluteContinuityViolation("a > 0 on a cell where b = 0")
    return float(np.sum(a[mask] * np.log(a[mask] / b[mask])))


def js(a: np.ndarray | JointTable, b: np.ndarray | JointTable) -> float:
    """Jensen-Shannon divergence in nats; lies in [0, log 2]."""
    a = a.probs if isinstance(a, JointTable) else np.asarray(a, dtype=np.float64)
    b = b.probs if isinstance(b, JointTable) else np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    m = 0.5 * (a + b)
    return 0.5 * kl(a, m) + 0.5 * kl(b, m)


def conditional_entropy(q: JointTable) -> float:
    """H(Y|X) = -sum_{x,y} q(x,y) log q(y|x), in nats; in [0, log K]."""
    probs = q.probs
    px = q.marginal_x()
    mask = probs > 0.0
    cond = probs[mask] / np.broadcast_to(px[:, None], probs.shape)[mask]
    return float(-np.sum(probs[mask] * np.log(cond)))


# ---------------------------------------------------------------------------
# Closed-form optima
# ---------------------------------------------------------------------------


def optimal_classifier_acgan(p: JointTable) -> ClassifierTable:
    """Best K-way classifier for real data alone: C*(y|x) = p(x,y)/p(x).

    Rows at points with p(x) = 0 are flagged undefined rather than raised:
    they carry no weight in the classifier's training objective.
    """
    return _rows_to_table(p.probs, p.marginal_x())


def optimal_discriminative_classifier(p: JointTable, q: JointTable) -> ClassifierTable:
    """Best 2K-way real/fake label classifier.

    Columns 0..K-1 hold C*(y+|x) = p(x,y)/(p(x)+q(x)); columns K..2K-1 hold
    C*(y-|x) = q(x,y)/(p(x)+q(x)).  Note the zero-probability behaviour: a
    pair with p(x,y) = 0 but p(x)+q(x) > 0 gets an exact 0, which is what
    lets this head penalize mismatched data-label pairs.
    """
    _check_same_support(p, q)
    denom = p.marginal_x() + q.marginal_x()
    if np.any(denom == 0.0):
        raise UndefinedRow("p(x) + q(x) = 0 at some support point")
    probs = np.concatenate([p.probs, q.probs], axis=1) / denom[:, None]
    return ClassifierTable(probs, np.zeros(p.num_points, dtype=bool))


def optimal_twin_classifiers(p: JointTable, q: JointTable) -> tuple[ClassifierTable, ClassifierTable]:
    """Twin per-distribution classifiers: C*(y|x)=p(y|x) and C_mi*(y|x)=q(y|x)."""
    _check_same_support(p, q)
    px = p.marginal_x()
    qx = q.marginal_x()
    if np.any(px == 0.0) or np.any(qx == 0.0):
        raise UndefinedRow("zero marginal under p or q at some support point")
    c = _rows_to_table(p.probs, px)
    c_mi = _rows_to_table(q.probs, qx)
    return c, c_mi


def optimal_discriminator(p: JointTable, q: JointTable) -> np.ndarray:
    """Per-point D*(x) = p(x)/(p(x)+q(x)); 1/2 wherever the marginals agree."""
    _check_same_support(p, q)
    px = p.marginal_x()
    qx = q.marginal_x()
    denom = px + qx
    if np.any(denom == 0.0):
        raise UndefinedRow("p(x) + q(x) = 0 at some support point")
    return px / denom


def optimal_label_extended(p: JointTable, q: JointTable) -> ClassifierTable:
    """Best (K+1)-way head with an explicit fake class in column 0.

    D+*(y|x) = p(x,y)/(p(x)+q(x)) for the K label columns and
    D+*(0|x) = q(x)/(p(x)+q(x)) for the fake column; rows sum to one.
    """
    _check_same_support(p, q)
    qx = q.marginal_x()
    denom = p.marginal_x() + qx
    if np.any(denom == 0.0):
        raise UndefinedRow("p(x) + q(x) = 0 at some support point")
    probs = np.concatenate([qx[:, None], p.probs], axis=1) / denom[:, None]
    return ClassifierTable(probs, np.zeros(p.num_points, dtype=bool))


def optimal_pd_logit(p: JointTable, q: JointTable, x: int, y: int) -> tuple[float, float, float]:
    """Optimal projection-discriminator logit at one (x, y) pair.

    Returns (r_x, r_y_given_x, d_star) with
        r_x         = log p(x)/q(x)
        r_y_given_x = log p(y|x)/q(y|x)
        d_star      = log p(x,y)/q(x,y) = r_x + r_y_given_x.

    Raises UndefinedPair when p(x,y) = q(x,y) = 0; the pairwise ratio is
    0/0 there and no logit value is defensible.  Pairs where exactly one
    side vanishes yield an infinite logit with the matching sign.
    """
    _check_same_support(p, q)
    pxy = float(p.probs[x, y])
    qxy = float(q.probs[x, y])
    if pxy == 0.0 and qxy == 0.0:
        raise UndefinedPair(f"p(x,y) = q(x,y) = 0 at point {x}, label {y}")
    px = float(p.marginal_x()[x])
    qx = float(q.marginal_x()[x])
    with np.errstate(divide="ignore"):
        r_x = float(np.log(px) - np.log(qx))
        d_star = float(np.log(pxy) - np.log(qxy))
        r_y_given_x = float((np.log(pxy) - np.log(px)) - (np.log(qxy) - np.log(qx)))
    return r_x, r_y_given_x, d_star


def _check_same_support(p: JointTable, q: JointTable):
    if p.probs.shape != q.probs.shape:
        raise ValueError(f"support shapes differ: {p.probs.shape} vs {q.probs.shape}")


# ---------------------------------------------------------------------------
# Training objectives of the closed-form heads (used by the perturbation
# oracle: each optimum must beat random row-stochastic perturbations)
# ---------------------------------------------------------------------------


def classifier_objective(kind: str, p: JointTable, q: JointTable, table) -> float:
    """Value of a head's training objective (to be maximized) at ``table``.

    kind selects the head: 'acgan' and 'tac_real' score E_p[log C(y|x)],
    'tac_fake' scores E_q[log C(y|x)], 'adc' the 2K-way real/fake label
    objective, 'disc' the two-sided discriminator objective (table is the
    per-point D vector), 'label_extended' the (K+1)-way objective.
    Cells with zero weight contribute zero regardless of the table value.
    """
    probs = table.probs if isinstance(table, ClassifierTable) else np.asarray(table, dtype=np.float64)

    def wlog(w: np.ndarray, c: np.ndarray) -> float:
        mask = w > 0.0
        with np.errstate(divide="ignore"):
            vals = np.log(np.where(mask, c, 1.0))
        return float(np.sum(w[mask] * vals[mask]))

    if kind in ("acgan", "tac_real"):
        return wlog(p.probs, probs)
    if kind == "tac_fake":
        return wlog(q.probs, probs)
    if kind == "adc":
        k = p.num_classes
        return wlog(p.probs, probs[:, :k]) + wlog(q.probs, probs[:, k:])
    if kind == "disc":
        return wlog(p.marginal_x(), probs) + wlog(q.marginal_x(), 1.0 - probs)
    if kind == "label_extended":
        return wlog(p.probs, probs[:, 1:]) + wlog(q.marginal_x(), probs[:, 0])
    raise ValueError(f"unknown objective kind {kind!r}")


# ---------------------------------------------------------------------------
# Theoretical generator objectives
# ---------------------------------------------------------------------------


def generator_objective(method: str, p: JointTable, q: JointTable, lam: float = 1.0,
                        include_js: bool = True) -> float:
    """Generator objective of ``method`` under its optimal discriminator/classifier.

    Per-method expressions (all divergences in nats), with Q the generated
    joint table and P the real one:

        acgan / acgan_original : JS(P_X, Q_X) + lam*(KL(Q||P) - KL(Q_X||P_X) + H_Q(Y|X))
        tacgan                 : JS(P_X, Q_X) + lam*(KL(Q||P) - KL(Q_X||P_X))
        adcgan                 : JS(P_X, Q_X) + lam*KL(Q||P)
        pdgan                  : JS(Q, P) on the joint tables (no classifier term)
        amgan                  : JS(P_X, Q_X) + KL(Q||P) - KL(Q_X||P_X)/2 + H_Q(Y|X) + log 2

    ``include_js=False`` drops the JS term (training without the plain GAN
    game), leaving only the classifier-driven part; for pdgan nothing
    remains and the value is 0.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    _check_same_support(p, q)

    if method == "pdgan":
        return js(p, q) if include_js else 0.0

    js_term = js(p.marginal_x(), q.marginal_x()) if include_js else 0.0
    kl_joint = kl(q, p)
    kl_marg = kl(q.marginal_x(), p.marginal_x())

    if method in ("acgan", "acgan_original"):
        return js_term + lam * (kl_joint - kl_marg + conditional_entropy(q))
    if method == "tacgan":
        return js_term + lam * (kl_joint - kl_marg)
    if method == "adcgan":
        return js_term + lam * kl_joint
    # amgan: the label-extended head's bound, lam plays no role
    return js_term + kl_joint - 0.5 * kl_marg + conditional_entropy(q) + math.log(2.0)


def _expect_log(weights: np.ndarray, values: np.ndarray) -> float:
    """sum weights*log(values) over cells with positive weight."""
    mask = weights > 0.0
    if np.any(mask & (values == 0.0)):
        raise AbsoluteContinuityViolation("log of zero under positive weight")
    return float(np.sum(weights[mask] * np.log(values[mask])))


def verify_theorem(theorem_id: str, p: JointTable, q: JointTable) -> float:
    """Residual of one closed-form identity, evaluated exactly on (p, q).

    thm1 : the optimal real-data classifier's generator signal equals
           -(KL(Q||P) - KL(Q_X||P_X) + H_Q(Y|X)); returns the abs residual.
    thm2 : the discriminative classifier's signal equals -KL(Q||P).
    thm3 : the twin classifiers' signal equals -(KL(Q||P) - KL(Q_X||P_X)).
    amgan_bound : -E_Q[log D+*(y|x)] minus its lower bound
           KL(Q||P) - KL(Q_X||P_X)/2 + H_Q(Y|X) + log 2; must be >= 0 up to
           rounding, with equality at q = p.

    thm1/thm3 require Q absolutely continuous w.r.t. P on the joint support.
    """
    _check_same_support(p, q)
    qp = q.probs
    kl_joint = kl(q, p)
    kl_marg = kl(q.marginal_x(), p.marginal_x())

    if theorem_id == "thm1":
        c = optimal_classifier_acgan(p)
        signal = _expect_log(qp, np.nan_to_num(c.probs, nan=0.0))
        return abs(signal + (kl_joint - kl_marg + conditional_entropy(q)))
    if theorem_id == "thm2":
        cd = optimal_discriminative_classifier(p, q)
        k = p.num_classes
        signal = _expect_log(qp, cd.probs[:, :k]) - _expect_log(qp, cd.probs[:, k:])
        return abs(signal + kl_joint)
    if theorem_id == "thm3":
        c, c_mi = optimal_twin_classifiers(p, q)
        signal = _expect_log(qp, c.probs) - _expect_log(qp, c_mi.probs)
        return abs(signal + (kl_joint - kl_marg))
    if theorem_id == "amgan_bound":
        d_plus = optimal_label_extended(p, q)
        neg_signal = -_expect_log(qp, d_plus.probs[:, 1:])
        bound = kl_joint - 0.5 * kl_marg + conditional_entropy(q) + math.log(2.0)
        return neg_signal - bound
    raise ValueError(f"unknown theorem id {theorem_id!r}")


def argmin_over_family(method: str, p: JointTable, family: Iterable[JointTable],
                       lam: float = 1.0, include_js: bool = True) -> tuple[JointTable, float]:
    """Exhaustive minimizer of generator_objective over a finite family.

    Ties keep the first minimizer.  Raises EmptyFamily on an empty iterable.
    """
    best_q = None
    best_val = math.inf
    for q in family:
        val = generator_objective(method, p, q, lam, include_js)
        if val < best_val:
            best_q, best_val = q, val
    if best_q is None:
        raise EmptyFamily("no candidate tables supplied")
    return best_q, best_val
