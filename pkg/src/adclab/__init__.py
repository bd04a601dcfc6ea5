"""Conditional-GAN objective laboratory.

Two halves, one subject: ``tabular`` verifies the closed-form optima and
generator objectives of classifier- and projection-based conditional GANs
exactly on finite joint distributions, while ``autodiff``/``nn``/
``objectives``/``runner`` train the same methods on a 1-D labeled mixture
of Gaussians with a small taped reverse-mode engine, so the theoretical
predictions can be compared against what gradient training actually does.
"""

from adclab import autodiff, metrics, nn, objectives, runner, synthdata, tabular
from adclab.objectives import MethodSpec
from adclab.runner import TrainConfig, train, verify_theory_suite
from adclab.synthdata import GaussianMixtureSpec, default_mixture
from adclab.tabular import JointTable

__all__ = [
    "autodiff", "metrics", "nn", "objectives", "runner", "synthdata", "tabular",
    "MethodSpec", "TrainConfig", "train", "verify_theory_suite",
    "GaussianMixtureSpec", "default_mixture", "JointTable",
]

__version__ = "0.1.0"
