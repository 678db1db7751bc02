"""Why naive vague quantification trivializes, and how thresholds fix it.

Sweeps psi_red over a grid on the one-pixie world and prints the naive
and exact values of "everything is red" and "something is red" side by
side.  Naive evaluation collapses to 0/1 for any fractional psi; the
threshold semantics returns psi itself for both quantifiers.

Usage: python scripts/triviality_demo.py
"""

import quantale as q


def one_pixie_world(p):
    model = q.SituationModel(q.PixieSpace(("x1",)), ("x",), ((("x1",), 1.0),))
    lexicon = q.VagueLexicon({"red": q.VaguePredicate("red", {"x1": p})})
    return model, lexicon


def main():
    every = q.parse_prop("(every (x) true (red x))")
    some = q.parse_prop("(some (x) true (red x))")
    print(f"{'psi_red':>8} {'naive every':>12} {'naive some':>11} "
          f"{'exact every':>12} {'exact some':>11}")
    for i in range(11):
        p = i / 10
        model, lexicon = one_pixie_world(p)
        row = [
            q.eval_naive(every, model, lexicon).probability,
            q.eval_naive(some, model, lexicon).probability,
            q.eval_exact(every, model, lexicon).probability,
            q.eval_exact(some, model, lexicon).probability,
        ]
        print(f"{p:>8.1f} {row[0]:>12.3f} {row[1]:>11.3f} {row[2]:>12.3f} {row[3]:>11.3f}")


if __name__ == "__main__":
    main()
