"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row reports the best of N runs per backend, plus the largest difference
between the two results so a speedup never hides a wrong answer.
"""

import argparse
import timeit

import numpy as np

from histoq._kernels import available_backends


def cases(rng):
    z = rng.normal(scale=4.0, size=20000) + 1j * rng.normal(scale=4.0, size=20000)
    theta = np.linspace(0, np.pi, 400)
    phi = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    y = np.linspace(-300, 300, 200001)
    x = np.linspace(0, 12, 200001)
    return [
        ("erf (20k complex points)", lambda k: k.erf(z)),
        ("faddeeva (20k complex points)", lambda k: k.faddeeva(z)),
        ("spin grid 400x400", lambda k: k.spin_min_grid(0.7, theta, phi)),
        ("ensemble row N=2000", lambda k: k.ensemble_row(0.9, 0.3, 2000)),
        ("ensemble horizon to N=500", lambda k: np.float64(k.ensemble_horizon(0.95, 0.01, 500, -1e-12)[0])),
        ("two-slit densities 200k", lambda k: k.two_slit_densities(y, 1.0, 60.0, 60.0)),
        ("spacetime integrands 200k", lambda k: k.spacetime_integrands(x, 1.5, -20.0, 1.0)),
    ]


def _flat(result):
    if isinstance(result, tuple):
        return np.concatenate([np.ravel(np.asarray(r, dtype=complex)) for r in result])
    return np.ravel(np.asarray(result, dtype=complex))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy fallback is available")
    names = sorted(backends, reverse=True)
    print(f"{'kernel':32s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}{'max diff':>11s}")
    for label, fn in cases(np.random.default_rng(0)):
        times, outs = {}, {}
        for n in names:
            k = backends[n]
            outs[n] = _flat(fn(k))
            times[n] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        row = f"{label:32s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if len(names) == 2:
            scale = max(1.0, float(np.max(np.abs(outs["python"]))))
            diff = float(np.max(np.abs(outs["cython"] - outs["python"]))) / scale
            row += f"{times['python'] / times['cython']:9.1f}x{diff:11.1e}"
        print(row)


if __name__ == "__main__":
    main()
