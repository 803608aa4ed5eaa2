"""phi(p^n - 1)/(p^n - 1) over prime n, and the Fermat-number products.

    python scripts/totient_scan.py --p 3 --max-n 37
"""
import argparse

from affine_hsp import number_theory as nt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=61)
    args = ap.parse_args()

    scan = nt.prime_power_scan(args.p, args.max_n)
    print(f"p = {args.p}, finite constant {scan.finite_constant}, lower bound {scan.rows[0].bound:.4f}")
    for r in scan.rows:
        print(f"n={r.n:>3} ratio={r.ratio:.6f} structural={r.structural_ok} "
              f"{nt.format_factorization(list(r.factorization))}")
    print(f"min ratio {scan.min_ratio:.6f}")
    for i in range(nt.MAX_FERMAT_INDEX + 1):
        f = nt.fermat_product(i)
        print(f"through F_{i}: prime-divisor product {f.product:.8f}, idealized {f.idealized:.10f}")


if __name__ == "__main__":
    main()
