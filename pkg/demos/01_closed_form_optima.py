"""Closed-form optima on an exact joint table, and why the label head wins.

Everything here is computed on a small discrete joint distribution p(x, y),
so the "optimal classifier" and "optimal discriminator" are not fitted --
they are written down and then checked: against their defining objectives
(no row-stochastic perturbation can score higher) and against the
identities that connect their generator-side signals to divergences.
"""

import numpy as np

from adclab import runner, tabular

gen = np.random.default_rng(0)

# a lopsided 4-point, 3-class joint distribution
p = tabular.random_joint_table(np.random.default_rng(1), 4, 3)
q = tabular.random_joint_table(np.random.default_rng(2), 4, 3)

print("p(x,y) =\n", np.round(p.probs, 4))
print("q(x,y) =\n", np.round(q.probs, 4))

print("\n-- closed forms -----------------------------------------------")
c = tabular.optimal_classifier_acgan(p)
print("plain classifier rows (p(y|x)):\n", np.round(c.probs, 4))

cd = tabular.optimal_discriminative_classifier(p, q)
print("real/fake label head rows (2K columns, sum to 1):\n", np.round(cd.probs, 4))
print("row sums:", np.round(cd.probs.sum(axis=1), 12))

d = tabular.optimal_discriminator(p, q)
print("discriminator p(x)/(p(x)+q(x)):", np.round(d, 4))

print("\n-- each optimum beats random perturbations --------------------")
for kind, probs in [("acgan", c.probs), ("adc", cd.probs)]:
    best = tabular.classifier_objective(kind, p, q, probs)
    rivals = [tabular.classifier_objective(kind, p, q, runner.perturb_rows(gen, probs))
              for _ in range(200)]
    print(f"{kind:6s} objective {best:+.6f}, best of 200 perturbations {max(rivals):+.6f}")

print("\n-- identity residuals ------------------------------------------")
for tid in ("thm1", "thm2", "thm3"):
    print(f"{tid}: residual {tabular.verify_theorem(tid, p, q):.3e}")
print(f"label-extended head bound gap (must be >= 0): "
      f"{tabular.verify_theorem('amgan_bound', p, q):.3e}")
print(f"...and exactly 0 at q = p: {tabular.verify_theorem('amgan_bound', p, p):.3e}")

print("\n-- the mismatched-pair defect ----------------------------------")
# a pair (x=0, y=0) that neither distribution ever produces
p0 = tabular.JointTable(np.array([[0.0, 0.5], [0.25, 0.25]]))
q0 = tabular.JointTable(np.array([[0.0, 0.25], [0.5, 0.25]]))
print("label head on the impossible pair:",
      tabular.optimal_discriminative_classifier(p0, q0).probs[0, 0], "(exact zero)")
try:
    tabular.optimal_pd_logit(p0, q0, 0, 0)
except tabular.UndefinedPair as exc:
    print("projection logit on the same pair: UndefinedPair --", exc)
