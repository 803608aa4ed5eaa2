"""Exact success probabilities of one pipeline run, for every small field.

    python scripts/exact_success_table.py [--tk diagonal|dlog]
"""
import argparse

from affine_hsp import affine_group as ag
from affine_hsp import finite_field as ff
from affine_hsp import hsp_pipeline as hp

FIELDS = [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tk", choices=hp.TK_MODES, default="diagonal")
    args = ap.parse_args()
    print(f"{'q':>3} {'exact':>9} {'formula':>9} {'((q-1)/q)^2':>12} {'k=0':>7} {'phase fail':>10}")
    for p, n in FIELDS:
        spec = ff.build_field(p, n)
        q = spec.q
        tree = hp.success_tree(spec, ag.make_coset_oracle(spec, q - 1, 0), args.tk)
        print(f"{q:>3} {tree['total']:9.6f} {hp.diagonal_success_formula(q):9.6f} "
              f"{hp.assumed_branch_bound(q):12.6f} {tree['from_k_zero']:7.4f} "
              f"{tree['phase_failure']:10.6f}")


if __name__ == "__main__":
    main()
