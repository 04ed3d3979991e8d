#!/usr/bin/env python3
"""Regenerates the per-item fixtures in this directory.

The files are built to reproduce published aggregate tables: every count
below is an aggregate; the per-item arrangement is an arbitrary seeded
shuffle. Run from this directory: python3 make_fixtures.py
"""
import csv
import json
import math
import random
import statistics

GEMINI = "google:gemini-2.5-pro"
GPT = "openai:gpt-5"
CLAUDE = "anthropic:claude-sonnet-4.5"
DEEPSEEK = "deepseek:deepseek-reasoner"
GROK = "xai:grok-4"
IDENTIFIERS = [CLAUDE, DEEPSEEK, GEMINI, GPT, GROK]
SHORT = {GEMINI: "gemini", GPT: "gpt5"}


def run(pair_id, ins, ident, lev, judge):
    return {
        "pair_id": pair_id,
        "identification_model_id": ident,
        "insertion_model_id": ins,
        "word_limit": 30,
        "excerpts": ["candidate excerpt"],
        "per_excerpt": [{"lev_score": 0.8 if lev else 0.1, "lev_match": lev, "judge_match": judge}],
        "refusal": False,
        "truncated": 0,
        "dropped": 0,
        "scored": True,
        "judge_model_id": ins,
        "judge_failed": False,
    }


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")


def write_labels(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["pair_id", "identification_model_id", "human_identified", "annotator_id"])
        w.writerows(rows)


def items_for(ins, papers):
    return [(f"pair-{SHORT[ins]}-p{p:02d}", ins, m) for p in range(1, papers + 1) for m in IDENTIFIERS]


def agreement_fixture(rng):
    # Per insertion model: both identified, both not, disagreement; of the
    # agreed items, automatic false positives and false negatives.
    spec = {GEMINI: (29, 41, 86, 18, 4, 0), GPT: (28, 22, 104, 14, 2, 1)}
    runs, labels = [], []
    annotators = [("a1", "a2"), ("a1", "a3"), ("a2", "a3")]
    for ins, (papers, yes, no, split, fp, fn) in spec.items():
        items = items_for(ins, papers)
        kinds = ["yes"] * yes + ["no"] * no + ["split"] * split
        rng.shuffle(kinds)
        yes_seen = no_seen = 0
        for (pair_id, _, ident), kind in zip(items, kinds):
            paper_no = int(pair_id.rsplit("p", 1)[1])
            a, b = annotators[paper_no % 3]
            if kind == "yes":
                auto = yes_seen >= fn
                yes_seen += 1
                labels += [(pair_id, ident, 1, a), (pair_id, ident, 1, b)]
            elif kind == "no":
                auto = no_seen < fp
                no_seen += 1
                labels += [(pair_id, ident, 0, a), (pair_id, ident, 0, b)]
            else:
                auto = rng.random() < 0.5
                first = rng.random() < 0.5
                labels += [(pair_id, ident, int(first), a), (pair_id, ident, int(not first), b)]
            runs.append(run(pair_id, ins, ident, auto, auto))
    write_jsonl("agreement_runs.jsonl", runs)
    write_labels("agreement_labels.csv", labels)


def metric_fixture(rng):
    # (human label, lev, judge) -> count, 19 papers x 2 insertion models x 5.
    cells = {(1, 1, 1): 21, (1, 1, 0): 12, (1, 0, 1): 5, (1, 0, 0): 4,
             (0, 1, 1): 12, (0, 1, 0): 3, (0, 0, 1): 3, (0, 0, 0): 130}
    kinds = [k for k, n in cells.items() for _ in range(n)]
    rng.shuffle(kinds)
    items = items_for(GEMINI, 19) + items_for(GPT, 19)
    runs, labels = [], []
    for (pair_id, ins, ident), (human, lev, judge) in zip(items, kinds):
        runs.append(run(pair_id, ins, ident, bool(lev), bool(judge)))
        labels.append((pair_id, ident, human, "m1"))
    write_jsonl("metric_runs.jsonl", runs)
    write_labels("metric_labels.csv", labels)


# Identification accuracy at k = 1, 3, 6, 10 per (insertion, identification).
ACCURACY = {
    GEMINI: {CLAUDE: (0.058, 0.143, 0.223, 0.250), DEEPSEEK: (0.067, 0.199, 0.315, 0.393),
             GEMINI: (0.076, 0.190, 0.230, 0.234), GPT: (0.103, 0.219, 0.339, 0.440),
             GROK: (0.105, 0.183, 0.232, 0.259)},
    GPT: {CLAUDE: (0.041, 0.098, 0.151, 0.155), DEEPSEEK: (0.045, 0.102, 0.230, 0.283),
          GEMINI: (0.049, 0.106, 0.132, 0.136), GPT: (0.068, 0.147, 0.234, 0.309),
          GROK: (0.060, 0.128, 0.185, 0.192)},
}
SUPPORT = {GEMINI: 448, GPT: 265}
# Candidate counts: median, mean, standard deviation.
CANDIDATES = {
    GEMINI: {CLAUDE: (5, 5.41, 1.48), DEEPSEEK: (9, 7.77, 2.78), GEMINI: (4, 3.83, 1.42),
             GPT: (9, 8.56, 1.62), GROK: (5, 4.88, 2.11)},
    GPT: {CLAUDE: (5, 5.32, 1.56), DEEPSEEK: (9, 7.65, 2.98), GEMINI: (4, 3.79, 1.52),
          GPT: (9, 8.43, 1.71), GROK: (4, 4.60, 2.26)},
}
KNOWN_K = (1, 3, 6, 10)


def hit_counts(n, acc):
    known = {k: round(a * n) for k, a in zip(KNOWN_K, acc)}
    counts = {}
    for lo, hi in zip(KNOWN_K, KNOWN_K[1:]):
        for k in range(lo, hi + 1):
            counts[k] = round(known[lo] + (known[hi] - known[lo]) * (k - lo) / (hi - lo))
    return [counts[k] for k in range(1, 11)]


def feasible(counts, ranks):
    return all(c >= r for c, r in zip(sorted(counts), sorted(ranks)))


def candidate_counts(rng, n, target, ranks):
    """Counts in 1..10 with the target median, mean (to the nearest total)
    and standard deviation (to 2 decimals), able to hold every hit rank.
    Only the histogram matters, so the search moves single items between
    adjacent bins."""
    median, mean, sd = target
    total = round(mean * n)
    need = [sum(1 for r in ranks if r >= t) for t in range(11)]

    def cost(h):
        s = sum(v * c for v, c in enumerate(h))
        sq = sum(v * v * c for v, c in enumerate(h))
        var = (sq - s * s / n) / (n - 1)
        pen = abs(s - total) * 10 + abs(var ** 0.5 - sd) * 100
        below = sum(h[:median])
        above = sum(h[median + 1:])
        if below > (n - 1) // 2 or above > (n - 1) // 2:
            pen += 50
        have = 0
        for t in range(10, 0, -1):
            have += h[t]
            pen += max(0, need[t] - have) * 10
        return pen

    def step(h, v, w):
        if h[v] == 0 or not 1 <= w <= 10:
            return False
        h[v] -= 1
        h[w] += 1
        return True

    h = [0] * 11
    h[median] = n
    current = cost(h)
    best, best_h = current, list(h)
    steps = 100000
    for i in range(steps):
        temp = 2.0 * (1 - i / steps) + 1e-3
        moves = [(rng.randrange(1, 11), 0)]
        moves[0] = (moves[0][0], moves[0][0] + rng.choice((-1, 1)))
        if rng.random() < 0.7:  # second move in the opposite direction keeps the sum
            v = rng.randrange(1, 11)
            moves.append((v, v - (moves[0][1] - moves[0][0])))
        done = []
        for v, w in moves:
            if step(h, v, w):
                done.append((v, w))
        c = cost(h)
        if c <= current or rng.random() < math.exp((current - c) / temp):
            current = c
            if c < best:
                best, best_h = c, list(h)
        else:
            for v, w in reversed(done):
                step(h, w, v)
        if best < 0.3:
            break
    h = best_h
    v = [x for x, c in enumerate(h) for _ in range(c)]
    ok = (sum(v) == total and statistics.median(v) == median and round(statistics.stdev(v), 2) == sd
          and feasible(v, ranks))
    return v if ok else None


def outcome_fixture(rng):
    rows = []
    for ins, by_model in ACCURACY.items():
        n = SUPPORT[ins]
        pair_ids = [f"pair-{SHORT[ins]}-{i:03d}" for i in range(1, n + 1)]
        for ident, acc in by_model.items():
            counts = hit_counts(n, acc)
            ranks = []
            prev = 0
            for k, c in enumerate(counts, start=1):
                ranks += [k] * (c - prev)
                prev = c
            ranks += [0] * (n - len(ranks))
            rng.shuffle(ranks)
            cand = candidate_counts(rng, n, CANDIDATES[ins][ident], ranks)
            if cand is None:
                raise SystemExit(f"no candidate counts for {ins} / {ident}")
            # Pair each rank with a count that can hold it.
            order = sorted(range(n), key=lambda i: ranks[i])
            cand_sorted = sorted(cand)
            assigned = [0] * n
            for slot, i in enumerate(order):
                assigned[i] = cand_sorted[slot]
            for pid, r, c in zip(pair_ids, ranks, assigned):
                rows.append((pid, ins, ident, [int(r != 0 and r <= k) for k in range(1, 11)], c))
    rows.sort(key=lambda r: (r[0], r[2]))
    with open("table4_outcomes.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["pair_id", "insertion_model_id", "identification_model_id"] + [f"k{k}" for k in range(1, 11)]
                   + ["n_candidates"])
        for pid, ins, ident, hits, c in rows:
            w.writerow([pid, ins, ident] + hits + [c])


if __name__ == "__main__":
    agreement_fixture(random.Random(2024))
    metric_fixture(random.Random(190))
    outcome_fixture(random.Random(713))
