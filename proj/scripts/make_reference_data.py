#!/usr/bin/env python3
"""Builds the deterministic reference corpus under data/reference/.

The released corpus is reconstructed from its published marginal statistics:
per-type instance counts, complex-only means and standard deviations, the
per-genre test split sizes with their constant-baseline MAE values, and the
annotator-group score ranges. All randomness is seeded, so reruns are
byte-identical.
"""

import math
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
OUT = os.path.join(ROOT, "data", "reference")

# (canonical name, original count, complex-only count, mean, std)
TYPES = [
    ("not MWE", 2181, 1665, 0.101, 0.098),
    ("MW compound", 1272, 1131, 0.145, 0.143),
    ("MW named entity", 497, 365, 0.077, 0.075),
    ("not MWE but contains MWE(s)", 436, 300, 0.088, 0.083),
    ("verb-particle or other phrasal verb", 119, 102, 0.127, 0.120),
    ("fixed phrase", 72, 67, 0.119, 0.121),
    ("semi-fixed VP", 39, 25, 0.083, 0.084),
    ("verb-preposition", 34, 28, 0.078, 0.080),
    ("PP modifier", 33, 25, 0.087, 0.086),
    ("conjunction/connective", 16, 13, 0.054, 0.054),
    ("verb-noun(-preposition)", 15, 9, 0.115, 0.094),
    ("coordinated phrase", 11, 10, 0.125, 0.115),
    ("support verb", 7, 6, 0.070, 0.067),
]

GENRES = ["News", "WikiNews", "Wikipedia"]

# Per-genre test subsets as unit-value compositions {prob/0.05: row count}.
# Deviation sums against a constant 0.05 prediction:
#   News:      10*1 + 6*1 + 40*2 + 20*3 + 10*4 = 196 -> MAE 0.07481 over 131
#   Wikipedia: 10*1 + 6*1 + 20*2 + 12*3 +  6*4 = 116 -> MAE 0.07436 over 78
#   WikiNews:   1*1 + 15*3 + 1*6              =  52 -> MAE 0.03250 over 80,
#   with 63 of 80 rows at 0.05 and a 0.35 maximum.
TEST_COMPOSITION = {
    "News": {0: 10, 1: 45, 2: 6, 3: 40, 4: 20, 5: 10},
    "Wikipedia": {0: 10, 1: 24, 2: 6, 3: 20, 4: 12, 5: 6},
    "WikiNews": {1: 63, 2: 1, 4: 15, 7: 1},
}

MAX_UNITS = 18  # prob 0.90; native 10/10 plus non-native 8/10

# Word-complexity signal: mean_cw tracks the within-type residual of the
# complexity score, with enough noise that the learnable margin over the
# baselines matches the published gap.
CW_BASE = 0.32
CW_GAIN = 0.40
CW_NOISE = 0.085

SEED = 20260826


def fit_units(n, mean, std, force_max=False):
    """Integer multiset k_1..k_n in [1, MAX_UNITS] (prob = k * 0.05) matching
    sum = round(20 n mean) and, as closely as parity and bounds allow,
    sum of squares implied by the population std."""
    # The unit sum fixes the mean; sum(k^2) must share its parity. Between
    # the two integer sums bracketing the exact mean, prefer the smaller mean
    # error, breaking ties by the achievable std error. The squared-sum
    # target uses the realized mean so rounding in one does not leak into
    # the other.
    def plan(s):
        mean_r = s / (20.0 * n)
        exact_q = n * (std * std + mean_r * mean_r) / 0.0025
        base_q = round(exact_q)
        qs = [q for q in (base_q - 1, base_q, base_q + 1) if (q - s) % 2 == 0]
        q = min(qs, key=lambda c: abs(c - exact_q))
        std_r = math.sqrt(max(q * 0.0025 / n - mean_r * mean_r, 0.0))
        return (round(abs(mean_r - mean), 9), abs(std_r - std), s, q)

    exact_s = 20.0 * n * mean
    _, _, target_s, target_q = min(plan(s) for s in {math.floor(exact_s), math.ceil(exact_s)})
    hist = [0] * (MAX_UNITS + 1)
    remaining_n, remaining_s = n, target_s
    if force_max:
        hist[MAX_UNITS] += 1
        remaining_n -= 1
        remaining_s -= MAX_UNITS

    # Start from a geometric distribution over k-1 whose mean matches the
    # target, sampled by quantile so the draw is deterministic. The score
    # distribution spikes at 0.05 and decays, which this reproduces.
    excess = max(remaining_s / max(remaining_n, 1) - 1.0, 0.01)
    ratio = excess / (1.0 + excess)
    for i in range(remaining_n):
        u = (i + 0.5) / remaining_n
        k = 1 + int(math.log(1.0 - u) / math.log(ratio)) if ratio > 0 else 1
        hist[min(k, MAX_UNITS)] += 1

    def total(h):
        return sum(v * c for v, c in enumerate(h))

    def total_sq(h):
        return sum(v * v * c for v, c in enumerate(h))

    # repair the sum by moving tail elements, leaving the spike at 1 alone
    while total(hist) != target_s:
        if total(hist) < target_s:
            v = max(v for v in range(1, MAX_UNITS) if hist[v] > 0)
            hist[v] -= 1
            hist[v + 1] += 1
        else:
            v = next(v for v in range(2, MAX_UNITS + 1) if hist[v] > 0)
            hist[v] -= 1
            hist[v - 1] += 1

    # Repair the sum of squares with sum-preserving transfers. Each move
    # shifts one element down and one up; its effect 2*(w - v + 1) is kept
    # within the remaining gap, so the gap shrinks monotonically.
    goal = target_q

    def widen_step(gap):
        for v in range(2, MAX_UNITS + 1):
            if hist[v] == 0:
                continue
            for w in range(min(MAX_UNITS - 1, v + gap // 2 - 1), v - 1, -1):
                if hist[w] == 0 or (w == v and hist[v] < 2):
                    continue
                hist[v] -= 1
                hist[v - 1] += 1
                hist[w] -= 1
                hist[w + 1] += 1
                return True
        # No exact-fit move: overshoot by one step (effect 4) so the next
        # narrow step can close the remaining even gap
        if gap >= 2:
            for v in range(2, MAX_UNITS):
                if hist[v] > 0 and hist[v + 1] > 0 and v + 2 <= MAX_UNITS:
                    hist[v] -= 1
                    hist[v - 1] += 1
                    hist[v + 1] -= 1
                    hist[v + 2] += 1
                    return True
        return False

    def narrow_step(gap):
        for w in range(MAX_UNITS, 2, -1):
            if hist[w] == 0:
                continue
            for lo in range(max(1, w - 1 - gap // 2), w - 1):
                if hist[lo] == 0 or (lo == w - 1 and hist[w - 1] < 1):
                    continue
                hist[w] -= 1
                hist[w - 1] += 1
                hist[lo] -= 1
                hist[lo + 1] += 1
                return True
        return False

    while True:
        gap = goal - total_sq(hist)
        if abs(gap) <= 1:
            break
        moved = widen_step(gap) if gap > 0 else narrow_step(-gap)
        if not moved:
            break

    units = []
    for v in range(1, MAX_UNITS + 1):
        units.extend([v] * hist[v])
    assert len(units) == n and sum(units) == target_s
    return units


SYLLABLES = [
    "ba", "be", "bo", "da", "del", "dor", "fa", "fen", "ga", "gil", "ha", "hel",
    "ka", "kel", "la", "lim", "ma", "mel", "na", "nor", "pa", "pel", "ra", "rim",
    "sa", "sel", "ta", "tor", "va", "vel", "wa", "wen", "ya", "zo", "ril", "mon",
]


class WordMaker:
    def __init__(self, rng):
        self.rng = rng
        self.seen = set()

    def word(self):
        while True:
            w = "".join(self.rng.choice(SYLLABLES) for _ in range(3))
            if w not in self.seen:
                self.seen.add(w)
                return w


TEMPLATES = [
    "officials said the {p} would remain under review",
    "reporters noted that {p} drew attention last week",
    "the committee discussed {p} during its briefing",
    "residents described the {p} as a local landmark",
    "analysts expect the {p} to shape the next quarter",
    "witnesses recalled the {p} in their statements",
    "the article describes {p} in considerable detail",
    "editors flagged the {p} for further checking",
]


def marks_split(m):
    nonnative = max(m - 10, min(8, m // 2))
    native = m - nonnative
    assert 0 <= native <= 10 and 0 <= nonnative <= 8
    return native, nonnative


def main():
    rng = random.Random(SEED)
    words = WordMaker(rng)

    rows = []  # dicts: type, units
    for idx, (name, original, complex_n, mean, std) in enumerate(TYPES):
        force_max = name == "MW compound"
        for k in fit_units(complex_n, mean, std, force_max=force_max):
            rows.append({"type": name, "units": k})
        for _ in range(original - complex_n):
            rows.append({"type": name, "units": 0})

    # deterministic shuffle before genre/split assignment
    rng.shuffle(rows)

    modeling = [r for r in rows if r["type"] != "not MWE"]
    not_mwe = [r for r in rows if r["type"] == "not MWE"]

    # ---- test subsets -----------------------------------------------------
    unassigned = list(modeling)

    def take(units, count):
        picked = []
        keep = []
        for r in unassigned:
            if len(picked) < count and r["units"] == units:
                picked.append(r)
            else:
                keep.append(r)
        assert len(picked) == count, \
            f"pool exhausted at units={units} ({len(picked)}/{count})"
        unassigned[:] = keep
        return picked

    for genre, composition in TEST_COMPOSITION.items():
        for units, count in composition.items():
            for r in take(units, count):
                r["genre"] = genre
                r["split"] = "Test"

    # ---- remaining splits -------------------------------------------------
    for r in unassigned:
        r["genre"] = rng.choices(GENRES, weights=[45, 25, 30])[0]
        r["split"] = "Dev" if rng.random() < 0.10 else "Train"
    for r in not_mwe:
        r["genre"] = rng.choices(GENRES, weights=[45, 25, 30])[0]
        x = rng.random()
        r["split"] = "Test" if x < 0.10 else ("Dev" if x < 0.20 else "Train")

    type_means = {name: mean for name, _, _, mean, _ in TYPES}

    # ---- surface forms and feature resources ------------------------------
    lexicon = {}
    bigrams = []
    for r in rows:
        n_tokens = 3 if rng.random() < 0.10 else 2
        tokens = [words.word() for _ in range(n_tokens)]
        r["phrase"] = " ".join(tokens)
        assert len(r["phrase"]) <= 50
        v = r["units"] * 0.05
        center = CW_BASE + CW_GAIN * (v - type_means[r["type"]])
        # Noise is mostly shared across a phrase's words: its mean and max
        # complexity then carry the same signal, which keeps the two cw
        # feature groups redundant with each other.
        phrase_noise = rng.gauss(0.0, CW_NOISE)
        for t in tokens:
            score = center + phrase_noise + rng.gauss(0.0, 0.01)
            lexicon[t] = round(min(0.95, max(0.02, score)), 4)
        for a, b in zip(tokens, tokens[1:]):
            bigrams.append((a, b, int(math.exp(rng.gauss(5.0, 1.0))) + 1))
        template = rng.choice(TEMPLATES)
        r["sentence"] = template.format(p=r["phrase"])
        r["start"] = r["sentence"].index(r["phrase"])
        r["end"] = r["start"] + len(r["phrase"])

    # stable file order, then ids
    rows.sort(key=lambda r: (r["genre"], r["split"], r["phrase"]))
    for i, r in enumerate(rows):
        r["id"] = f"mwe{i + 1:04d}"

    os.makedirs(os.path.join(OUT, "upstream"), exist_ok=True)

    # ---- upstream layout --------------------------------------------------
    by_file = {}
    for r in rows:
        by_file.setdefault((r["genre"], r["split"]), []).append(r)
    for (genre, split), file_rows in sorted(by_file.items()):
        path = os.path.join(OUT, "upstream", f"{genre}_{split}.tsv")
        with open(path, "w") as f:
            for r in file_rows:
                native, nonnative = marks_split(r["units"])
                prob = f"{r['units'] * 0.05:.2f}"
                f.write("\t".join([
                    r["id"], r["sentence"], str(r["start"]), str(r["end"]),
                    r["phrase"], "10", "10", str(native), str(nonnative),
                    "1" if r["units"] > 0 else "0", prob,
                ]) + "\n")
    with open(os.path.join(OUT, "upstream", "mwe_annotations.tsv"), "w") as f:
        for r in rows:
            f.write(f"{r['id']}\t{r['type']}\n")

    # ---- canonical layout -------------------------------------------------
    with open(os.path.join(OUT, "instances.tsv"), "w") as f:
        f.write("\t".join(["id", "genre", "split", "sentence", "start", "end",
                           "phrase", "native_seen", "nonnative_seen", "native_marked",
                           "nonnative_marked", "binary", "prob"]) + "\n")
        for r in rows:
            native, nonnative = marks_split(r["units"])
            f.write("\t".join([
                r["id"], r["genre"], r["split"], r["sentence"], str(r["start"]),
                str(r["end"]), r["phrase"], "10", "10", str(native), str(nonnative),
                "1" if r["units"] > 0 else "0", f"{r['units'] * 0.05:.2f}",
            ]) + "\n")
    with open(os.path.join(OUT, "mwe_labels.tsv"), "w") as f:
        f.write("id\tmwe_type\n")
        for r in rows:
            f.write(f"{r['id']}\t{r['type']}\n")

    # ---- feature resources ------------------------------------------------
    with open(os.path.join(OUT, "cw_lexicon.tsv"), "w") as f:
        f.write("word\tscore\n")
        for w in sorted(lexicon):
            f.write(f"{w}\t{lexicon[w]:.4f}\n")
    with open(os.path.join(OUT, "bigram_freq.tsv"), "w") as f:
        f.write("token1\ttoken2\tcount\n")
        for a, b, c in sorted(bigrams):
            f.write(f"{a}\t{b}\t{c}\n")

    # ---- joint-annotation rounds ------------------------------------------
    # Four rounds of three annotators. Observed mean-pairwise agreement per
    # round is pinned to the closest value representable with 3 annotators:
    # item-level agreement is 1 (all agree), 1/3 (two agree) or 0.
    all_types = [t[0] for t in TYPES]
    round_plan = [
        (1, 100, 60, 30),   # (3*60 + 30) / 300  = 0.7000
        (2, 200, 160, 20),  # (3*160 + 20) / 600 = 0.8333
        (3, 300, 233, 20),  # (3*233 + 20) / 900 = 0.7989
        (4, 400, 314, 21),  # (3*314 + 21) / 1200 = 0.8025
    ]
    ann_rng = random.Random(SEED + 1)
    pool = rows[:1000]
    cursor = 0
    with open(os.path.join(OUT, "annotations.tsv"), "w") as f:
        f.write("instance_id\tannotator_id\tround\tmwe_type\n")
        for round_no, n_items, full, partial in round_plan:
            items = pool[cursor:cursor + n_items]
            cursor += n_items
            for i, r in enumerate(items):
                gold = r["type"]
                others = [t for t in all_types if t != gold]
                if i < full:
                    labels = [gold, gold, gold]
                elif i < full + partial:
                    labels = [gold, gold, ann_rng.choice(others)]
                else:
                    wrong = ann_rng.sample(others, 2)
                    labels = [gold, wrong[0], wrong[1]]
                for a, label in zip(["a1", "a2", "a3"], labels):
                    f.write(f"{r['id']}\t{a}\t{round_no}\t{label}\n")

    # ---- summary ----------------------------------------------------------
    zeros = sum(1 for r in modeling if r["units"] == 0)
    at_005 = sum(1 for r in modeling if r["units"] == 1)
    print(f"total rows: {len(rows)}")
    print(f"modeling rows: {len(modeling)} (zeros {zeros}, at 0.05 {at_005})")
    for genre in TEST_COMPOSITION:
        sel = [r for r in modeling if r["split"] == "Test" and r["genre"] == genre]
        mae = sum(abs(r["units"] * 0.05 - 0.05) for r in sel) / len(sel)
        print(f"{genre} test: n={len(sel)} constant-baseline MAE={mae:.4f}")
    for name, _, complex_n, mean, std in TYPES:
        vals = [r["units"] * 0.05 for r in rows
                if r["type"] == name and r["units"] > 0]
        m = sum(vals) / len(vals)
        var = sum((v - m) ** 2 for v in vals) / len(vals)
        print(f"{name}: n={len(vals)} mean={m:.4f} (target {mean})"
              f" std={math.sqrt(var):.4f} (target {std})")


if __name__ == "__main__":
    main()
