"""How fast (1/n) ln <|p(z)|^2> approaches its limiting potential, per ensemble.

Usage: python3 demos/potential_convergence.py
"""

from permpoly import closed_forms as cf

POINTS = (0.3 + 0.5j, 1.4 - 0.2j, 0.05j)
SIZES = (25, 50, 100, 200, 400)


def main():
    for kind in cf.PHI_KINDS:
        print(kind)
        for z in POINTS:
            gaps = [abs(cf.finite_phi(kind, n, z) - cf.asymptotic_phi(kind, z)) for n in SIZES]
            print(f"  z={z.real:+.2f}{z.imag:+.2f}i  " + "  ".join(f"n={n}: {g:.1e}" for n, g in zip(SIZES, gaps)))


if __name__ == "__main__":
    main()
