"""Count seeds that violate each consistency, presupposition and route check."""
import argparse
import random

from contrastive import properties as P

CHECKS = {
    "alternative-consistency": lambda r: P.check_alternative_consistency(*P.draw_alternative(r)),
    "congruent-consistency": lambda r: P.check_congruent_consistency(*P.draw_congruent(r)),
    "general-congruent-consistency":
        lambda r: P.check_general_congruent_consistency(*P.draw_congruent(r, general=True)),
    "presupposition-alternative": lambda r: P.check_presupposition_alternative(*P.draw_alternative(r)),
    "presupposition-congruent": lambda r: P.check_presupposition_congruent(*P.draw_congruent(r)),
    "alternative-routes": lambda r: P.check_alternative_routes(*P.draw_alternative_state(r)),
    "congruent-routes": lambda r: P.check_congruent_routes(*P.draw_congruent_states(r)),
}

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=500)
    ap.add_argument("--show", type=int, default=3, help="violating seeds to list per check")
    args = ap.parse_args()
    for name, check in CHECKS.items():
        bad = {}
        for seed in range(args.seeds):
            v = check(random.Random(seed))
            if v:
                bad[seed] = v
        print(f"{name}: {len(bad)}/{args.seeds} seeds violate")
        for seed in list(bad)[:args.show]:
            print(f"  seed {seed}: {bad[seed][0]}")
