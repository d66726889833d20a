"""Convergence of the Cauchy-slice and current forms towards the null form for one current pair.

    python scripts/symplectic_convergence.py [seed]
"""
import sys
import time

import numpy as np

from irasym.sympquant import GaussianCurrent, symp_cauchy, symp_current, symp_null


def main(seed=3):
    rng = np.random.default_rng(seed)
    J1, J2 = GaussianCurrent.random(rng), GaussianCurrent.random(rng)
    P1, P2 = J1.profile(), J2.profile()
    ref = symp_null(P1, P2)
    print(f"# null form {ref:.12f}")
    print("# form     level  value              |diff|     seconds")
    for n in (4, 6, 8, 10):
        t = time.time()
        val = symp_cauchy(P1, P2, n_r=n, ang_order=n, n_phi=2 * n + 4)["value"]
        print(f"cauchy     {n:5d}  {val:.12f}  {abs(val - ref):.2e}  {time.time() - t:7.1f}")
    for n in (4, 6, 9, 12):
        t = time.time()
        val = symp_current(J1, J2, n_gh=n)["current"]
        print(f"current    {n:5d}  {val:.12f}  {abs(val - ref):.2e}  {time.time() - t:7.1f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
