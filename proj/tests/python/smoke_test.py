"""Smoke test for the python extension: imports, end-to-end test run,
inversion, simulation determinism, and dataset loading."""

import math
import os
import tempfile

import numpy as np

import weakiv


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)


def main():
    # probability kernels round-trip
    z = weakiv.prob.normal_upper_quantile(0.05)
    check(abs(z - 1.6448536269514727) < 1e-9, "normal quantile")
    check(abs(weakiv.prob.normal_cdf(z) - 0.95) < 1e-12, "normal round trip")
    q = weakiv.prob.gumbel_upper_quantile(0.05)
    check(abs(weakiv.prob.gumbel_cdf(q) - 0.95) < 1e-12, "gumbel round trip")

    # DGP + tests
    dgp = weakiv.DGPConfig()
    dgp.n = 200
    dgp.num_instruments = 100
    dgp.mu2 = 180.0
    dgp.sparsity = weakiv.Sparsity(weakiv.SparsityKind.DENSE, 60)
    dgp.beta = 3.0
    dgp.beta0 = 1.0
    data = weakiv.generate(dgp, 11)
    check(data.n == 200 and data.num_instruments == 100, "dataset shape")

    alt = weakiv.run_test(data, 1.0, weakiv.Method.JAR, 0.05)
    check(alt.reject, "strong dense alternative should reject")
    null = weakiv.run_test(data, 3.0, weakiv.Method.FISHER, 0.05)
    check(0.0 < null.p_value <= 1.0, "null p-value well-formed")
    check(null.detail.p_jar is not None, "fisher detail populated")

    res = weakiv.residuals(data, 1.0)
    m, per = weakiv.max_statistic(data, res)
    check(m == max(x for x in per if not math.isnan(x)), "max consistency")

    # inversion
    cs = weakiv.invert(data, weakiv.GridSpec(-4.0, 6.0, 100), weakiv.Method.JAR, 0.05)
    covered = any(lo <= 3.0 <= hi for lo, hi in cs.intervals)
    check(covered, "true beta covered")
    check(not any(lo <= -3.0 <= hi for lo, hi in cs.intervals), "distant beta excluded")

    # Monte Carlo determinism across thread counts
    cfg = weakiv.MCConfig()
    cfg.dgp.n = 60
    cfg.dgp.num_instruments = 15
    cfg.dgp.sparsity = weakiv.Sparsity(weakiv.SparsityKind.SPARSE, 1)
    cfg.replications = 10
    cfg.master_seed = 5
    cfg.methods = [weakiv.Method.JAR, weakiv.Method.BCCH_ASY]
    t1 = weakiv.run_monte_carlo(cfg, threads=1)
    t2 = weakiv.run_monte_carlo(cfg, threads=4)
    check(
        [r.rejections for r in t1.rows] == [r.rejections for r in t2.rows],
        "thread-count invariance",
    )

    # degenerate statistic surfaces as StatisticUndefined
    y = np.array([1.0, 2.0, 3.0])
    bad = weakiv.Dataset(y, y, np.random.default_rng(0).normal(size=(3, 2)))
    try:
        weakiv.run_test(bad, 1.0, weakiv.Method.JAR, 0.05)
        raise AssertionError("expected StatisticUndefined")
    except weakiv.StatisticUndefined:
        pass

    # dataset loading
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "d.csv")
        rng = np.random.default_rng(1)
        zmat = rng.normal(size=(30, 2))
        x = zmat @ [0.5, -0.2] + rng.normal(size=30)
        yv = 0.3 * x + rng.normal(size=30)
        with open(path, "w") as f:
            f.write("Y,X,Z1,Z2\n")
            for i in range(30):
                f.write(f"{yv[i]},{x[i]},{zmat[i,0]},{zmat[i,1]}\n")
        loaded, report = weakiv.load_dataset(path)
        check(loaded.n == 30, "loaded rows")
        check(len(report.z_shifts) == 2, "shifts recorded")

    print("smoke ok")


if __name__ == "__main__":
    main()
