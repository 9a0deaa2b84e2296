"""Monte-Carlo two-point functions of permanental polynomials next to their closed forms.

Usage: python3 demos/two_point_functions.py [--samples M] [--seed S] [--workers W]
"""

import argparse

from permpoly import EnsembleSpec, mc_two_point
from permpoly import closed_forms as cf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    a, b = 0.3 + 0.2j, -0.5j
    cases = [
        ("GUE", 3, 0.3, -0.1, cf.two_point_gue),
        ("GOE", 3, 0.4, 0.2, cf.two_point_goe),
        ("CUE", 4, a, b, cf.two_point_cue),
        ("Ginibre", 3, a, b, cf.two_point_ginibre),
    ]
    print(f"{'ensemble':8} {'n':>2}  {'Monte Carlo':>28}  {'closed form':>24}  {'z':>5}")
    for kind, n, m1, m2, oracle in cases:
        spec = EnsembleSpec(kind, n)
        conj = None if spec.hermitian else True
        est = mc_two_point(spec, m1, m2, args.samples, args.seed, conjugate_second=conj, workers=args.workers)
        ref = complex(oracle(n, m1, m2))
        print(f"{kind:8} {n:>2}  {est.mean.real:+.5f}{est.mean.imag:+.5f}i +- {abs(est.stderr):.1e}"
              f"  {ref.real:+.6f}{ref.imag:+.6f}i  {est.z_score(ref):5.2f}")


if __name__ == "__main__":
    main()
