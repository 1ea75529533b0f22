"""Smoke test for the apdim extension module.

Build and install first:
    maturin build --release -m crates/py/Cargo.toml && pip install target/wheels/apdim-*.whl
"""

import math

import apdim


def main():
    cf = apdim.ContinuedFraction("sqrt2", 20)
    assert cf.a0 == 1 and cf.terms[:4] == [2, 2, 2, 2]
    p, q = cf.convergents()[5]
    assert (p, q) == (99, 70)
    lo, hi = cf.approximation_gap(1)
    assert lo < abs(math.sqrt(2) - 3 / 2) < hi
    assert abs(float(cf) - math.sqrt(2)) < 1e-15

    liouville = apdim.ContinuedFraction("[0; 5, 10^9, (1)]", 12)
    assert liouville.convergents()[2][1] == 5 * 10**9 + 1
    profile = apdim.ContinuedFraction("[0; (1, 2)]", 30).classify()
    assert profile.g_property and profile.nu_hat < 0.15

    p = apdim.TrigPolynomial.unit_sum(["1", "sqrt2"])
    lo, hi = p.shift_distance(12.0)
    assert abs(hi - 2 * abs(math.sin(12 * math.pi * math.sqrt(2)))) < 1e-9

    ladder = [0.25, 0.125, 0.0625, 0.03125]
    scans = [apdim.scan(p, e, 16 / e) for e in ladder]
    assert all(s.reliable for s in scans)
    est = apdim.diophantine_estimate(scans)
    assert 0.6 < est.fit_slope < 1.4, est

    centers, gap = apdim.solve_one_freq(cf, 0.05, 1000.0)
    brute = [n for n in range(1, 1001) if abs(n * math.sqrt(2) - round(n * math.sqrt(2))) < 0.05]
    assert centers[1:] == brute or centers == brute, (centers[:5], brute[:5])

    pts = [[(i + 0.5) / 300, (j + 0.5) / 300] for i in range(300) for j in range(300)]
    box = apdim.box_dimension(pts, [0.25, 0.125, 0.0625, 0.03125])
    assert abs(box.fit_slope - 2) < 0.1

    try:
        apdim.scan(p, 0.01, 1e6, budget=10)
    except apdim.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget was not enforced")

    print("smoke test passed:", est, box)


if __name__ == "__main__":
    main()
