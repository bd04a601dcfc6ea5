"""The full eight-panel comparison at production settings (long-running).

Renders the real-data panel plus seven trained panels: the three
classifier-based methods with and without the GAN term, and the
projection method with it.  Each run is 20k steps (roughly 2-4 minutes on
one core; runs execute two at a time), so expect ~15-25 minutes total.
Output: demo_output/panels/*.svg
"""

import concurrent.futures
import os

from adclab import runner, svgplot
from adclab.objectives import MethodSpec
from adclab.synthdata import default_mixture

OUT = os.path.join("demo_output", "panels")
os.makedirs(OUT, exist_ok=True)

PANELS = [
    ("b_acgan_no_gan_term", MethodSpec("acgan", include_gan_loss=False)),
    ("c_tacgan_no_gan_term", MethodSpec("tacgan", include_gan_loss=False)),
    ("d_adcgan_no_gan_term", MethodSpec("adcgan", include_gan_loss=False)),
    ("e_pdgan", MethodSpec("pdgan")),
    ("f_acgan", MethodSpec("acgan")),
    ("g_tacgan", MethodSpec("tacgan")),
    ("h_adcgan", MethodSpec("adcgan")),
]

svgplot.sample_panel(os.path.join(OUT, "a_real_data.svg"), default_mixture(),
                     None, None, "real data")
print("wrote a_real_data.svg")


def run_panel(name, spec):
    out_dir = os.path.join(OUT, name)
    record = runner.train(runner.TrainConfig(method_spec=spec, seed=1, out_dir=out_dir))
    runner.plot_run(out_dir, os.path.join(OUT, f"{name}.svg"))
    return name, record.summary()


with concurrent.futures.ProcessPoolExecutor(max_workers=2) as pool:
    futures = [pool.submit(run_panel, name, spec) for name, spec in PANELS]
    for fut in futures:
        name, summary = fut.result()
        print(f"{name}: {summary}")

print(f"\npanels in {OUT}")
