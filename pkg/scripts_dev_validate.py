"""Dev-only: run the full acceptance training battery and dump summaries."""
import concurrent.futures
import json
import time

import numpy as np

from adclab import runner
from adclab.objectives import MethodSpec


def run_one(tag, method, gan_loss, include_v, seed):
    cfg = runner.TrainConfig(
        method_spec=MethodSpec(method, gan_loss=gan_loss, include_gan_loss=include_v),
        seed=seed)
    t0 = time.perf_counter()
    rec = runner.train(cfg)
    out = rec.summary()
    last = rec.rows[-1]
    out.update(tag=tag, method=method, gan_loss=gan_loss, include_v=include_v,
               seed=seed, secs=round(time.perf_counter() - t0, 1),
               raw_last_l1=last.l1_density, raw_last_maxfre=float(np.max(last.frechet)),
               tail_l1=[r.l1_density for r in rec.rows[-3:]],
               tail_fre=[float(np.max(r.frechet)) for r in rec.rows[-3:]])
    return out


JOBS = []
for seed in (1, 2, 3):
    JOBS.append(("c5_adc_woV", "adcgan", "non_saturating", False, seed))
    JOBS.append(("c5_ac_woV", "acgan", "non_saturating", False, seed))
    JOBS.append(("c5_adc_wV", "adcgan", "non_saturating", True, seed))
    JOBS.append(("c7_adc_hinge", "adcgan", "hinge", True, seed))
    JOBS.append(("c7_adc_ls", "adcgan", "least_squares", True, seed))


def main():
    results = []
    with concurrent.futures.ProcessPoolExecutor(max_workers=2) as pool:
        futs = [pool.submit(run_one, *job) for job in JOBS]
        for fut in futs:
            res = fut.result()
            print(json.dumps(res), flush=True)
            results.append(res)

    base_adc = runner.TrainConfig(method_spec=MethodSpec("adcgan"), seed=1)
    rows = runner.sweep_lambda_prime(base_adc, [0.25, 0.5, 0.75, 1.0], workers=2)
    for r in rows:
        r["tag"] = "c6_adc_sweep"
        print(json.dumps(r), flush=True)
        results.append(r)
    base_ac = runner.TrainConfig(method_spec=MethodSpec("acgan"), seed=1)
    rows = runner.sweep_lambda_prime(base_ac, [1.0], workers=1)
    for r in rows:
        r["tag"] = "c6_ac_lp1"
        print(json.dumps(r), flush=True)
        results.append(r)

    with open("validate_results.json", "w") as fh:
        json.dump(results, fh, indent=1)
    print("DONE")


if __name__ == "__main__":
    main()
