#!/usr/bin/env python3
"""Rule evaluation for the snap-biased simulated model, independent of the C++
implementation.

Evaluates the documented snap rule by hand for the default closure sweep
(lengths 5..150 step 5, 10 trials) and freezes the expected accuracy row and
bias-count series into tests/golden/. The acceptance suite compares the real
pipeline against these files, so regenerate them only when the rule itself
changes:

    python3 scripts/expected_snap_pattern.py

Snap rule (defaults): answers with the exact sum while the term count is at
most 35; beyond that it returns the nearest snap target (50 or 100) whenever
the true sum lies within 10 of one, and otherwise an offset wrong answer.
"""

import os

LENGTHS = list(range(5, 151, 5))
TRIALS = 10
SNAP_TARGETS = (50, 100)
SNAP_RADIUS = 10
FAIL_THRESHOLD = 35


def snap_answer_is_exact(term_count: int, truth: int) -> bool:
    if term_count <= FAIL_THRESHOLD:
        return True
    for target in SNAP_TARGETS:
        if abs(truth - target) <= SNAP_RADIUS:
            return truth == target
    return False  # offset answer, never equal to the truth


def snap_output(term_count: int, truth: int):
    """Returns the model output when it is determined by the rule, else None
    (the offset branch draws a seeded nonzero offset; only its wrongness is
    determined)."""
    if term_count <= FAIL_THRESHOLD:
        return truth
    best = None
    for target in SNAP_TARGETS:
        if abs(truth - target) <= SNAP_RADIUS:
            if best is None or abs(truth - target) < abs(truth - best):
                best = target
    return best


def main() -> None:
    out_dir = os.path.join(os.path.dirname(__file__), "..", "tests", "golden")
    os.makedirs(out_dir, exist_ok=True)

    # Closure sweep: truth == term count == n.
    with open(os.path.join(out_dir, "snap_closure_accuracy.csv"), "w", newline="\n") as f:
        f.write("length,accuracy\n")
        for n in LENGTHS:
            acc = "1.0000" if snap_answer_is_exact(n, n) else "0.0000"
            f.write(f"{n},{acc}\n")

    for target in SNAP_TARGETS:
        path = os.path.join(out_dir, f"snap_bias_{target}.csv")
        with open(path, "w", newline="\n") as f:
            f.write("truth,count\n")
            for n in LENGTHS:
                hits = TRIALS if snap_output(n, n) == target else 0
                f.write(f"{n},{hits}\n")

    # Failure onsets for the closure row at threshold 1.0: first length whose
    # accuracy dips below the threshold, and first length from which accuracy
    # stays at zero through the end of the sweep.
    first_drop = next(n for n in LENGTHS if not snap_answer_is_exact(n, n))
    permanent_zero = None
    for i, n in enumerate(LENGTHS):
        if all(not snap_answer_is_exact(m, m) for m in LENGTHS[i:]):
            permanent_zero = n
            break
    with open(os.path.join(out_dir, "snap_closure_onset.csv"), "w", newline="\n") as f:
        f.write("first_drop,permanent_zero\n")
        f.write(f"{first_drop},{permanent_zero}\n")

    print(f"golden files written to {os.path.abspath(out_dir)}")


if __name__ == "__main__":
    main()
