"""Sampled success rate against the exact value, with and without retries.

    python scripts/sampling_experiment.py --p 2 --n 3 --trials 10000 --seed 7
"""
import argparse
import math

from affine_hsp import affine_group as ag
from affine_hsp import finite_field as ff
from affine_hsp import hsp_pipeline as hp
from affine_hsp import number_theory as nt
from affine_hsp.statevector import trial_rng


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--epsilon", type=float, default=0.05)
    args = ap.parse_args()

    spec = ff.build_field(args.p, args.n)
    oracle = ag.make_coset_oracle(spec, spec.q - 1, args.seed)
    budget = nt.retry_budget(spec.q, args.epsilon)
    for mode in hp.TK_MODES:
        exact = hp.exact_success_probability(spec, oracle, mode)
        wins = sum(hp.run_trial(spec, oracle, trial_rng(args.seed, i), mode).success
                   for i in range(args.trials))
        sigma = math.sqrt(exact * (1 - exact) / args.trials)
        rate = wins / args.trials
        print(f"{mode:8s} single run: rate {rate:.4f}  exact {exact:.4f}  "
              f"z = {(rate - exact) / sigma:+.2f}")
        meta = min(args.trials, 1000)
        wins = sum(hp.run_until_success(spec, oracle, trial_rng(args.seed, i), mode, budget).success
                   for i in range(meta))
        print(f"{mode:8s} budget {budget}: rate {wins / meta:.4f}  "
              f"target {1 - args.epsilon:.2f}  predicted {1 - (1 - exact) ** budget:.6f}")


if __name__ == "__main__":
    main()
