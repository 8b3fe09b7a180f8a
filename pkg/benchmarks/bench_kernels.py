"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Kernel calls are timed in-process against both modules directly.  The
equation-of-motion right-hand side and a short integration go through the
backend chosen at import, so each backend runs in its own subprocess.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from breathing_rotators import _kernels_py
from breathing_rotators.sampling import gauge_at

try:
    from breathing_rotators import _ckernels
except ImportError:
    _ckernels = None

END_TO_END = """
import json, time
import numpy as np
from breathing_rotators import BACKEND
from breathing_rotators.dynamics import IntegratorConfig, derivative, integrate, pack
from breathing_rotators.models import Deformed, FundamentalSqrt, Polynomial
from breathing_rotators.sampling import gauge_at
model = Deformed(FundamentalSqrt(), 0.1, Polynomial([(2, 0, 1.0)]))
c = gauge_at(0.2, 0.1, np.random.default_rng(0), vmax=0.3)
s = pack(c)
n = {n}
t = time.perf_counter()
for _ in range(n):
    derivative(s, model)
rhs = (time.perf_counter() - t) / n
t = time.perf_counter()
integrate(c, model, IntegratorConfig(span=10.0))
print(json.dumps({{"backend": BACKEND, "rhs_us": rhs * 1e6, "integrate_s": time.perf_counter() - t}}))
"""


def per_call_us(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=repeat, repeat=3)) / repeat * 1e6


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    c = gauge_at(0.3, 0.5, rng)
    jet = np.array([1.1, 0.2, -0.3, 0.05, 0.01, -0.02])
    e = np.exp(c.psi)
    cases = {
        "kinematic_jet": (c.V, e * c.N, e * c.omega),
        "block_coefficients": (c.V, c.N, c.omega, jet),
        "hessian_dense": (c.V, c.N, c.omega, jet),
    }
    rows = []
    for name, args in cases.items():
        py = per_call_us(getattr(_kernels_py, name), args, repeat)
        cy = per_call_us(getattr(_ckernels, name), args, repeat) if _ckernels else float("nan")
        rows.append((name, py, cy))
    return rows


def end_to_end(pure, n):
    env = dict(os.environ, BREATHING_ROTATORS_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args()

    print(f"{'kernel':<20}{'python us':>12}{'cython us':>12}{'speedup':>10}")
    for name, py, cy in kernel_table(args.repeat):
        print(f"{name:<20}{py:>12.1f}{cy:>12.1f}{py / cy:>10.1f}")
    print()
    for pure in (True, False):
        r = end_to_end(pure, max(1, args.repeat // 4))
        print(f"{r['backend']:<8} rhs {r['rhs_us']:8.1f} us   integrate(span 10) {r['integrate_s']:.3f} s")


if __name__ == "__main__":
    main()
