"""Writes tests/data/golden_uniform.json: exact uniform-model probabilities
computed by plain enumeration with independently written predicates."""

import itertools
import json
import pathlib
from fractions import Fraction


def compositions(n, m):
    for bars in itertools.combinations(range(n + m - 1), n - 1):
        edges = (-1,) + bars + (n + m - 1,)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(n))


def runs(t, pred):
    out, cur = [], 0
    for x in t:
        if pred(x):
            cur += 1
        elif cur:
            out.append(cur)
            cur = 0
    if cur:
        out.append(cur)
    return out


def windows(t, k):
    return [t[i:i + k] for i in range(len(t) - k + 1)]


def rank(w):
    d = sorted(set(w))
    return tuple(d.index(x) for x in w)


PREDICATES = {
    "cmax_ge": lambda t, k: max(runs(t, lambda x: x != 0), default=0) >= k,
    "gmax_ge": lambda t, k: max(runs(t, lambda x: x == 0), default=0) >= k,
    "cmin_gt": lambda t, k: all(r > k for r in runs(t, lambda x: x != 0)),
    "components_ge": lambda t, k: len(runs(t, lambda x: x != 0)) >= k,
    "tmax_ge": lambda t, k: max(t) >= k,
    "tmin_ge": lambda t, k: min(t) >= k,
    "carlitz": lambda t, k: all(a != b for a, b in zip(t, t[1:])),
    "equal_terms": lambda t, k: max(t.count(x) for x in t) >= k,
    "all_distinct": lambda t, k: len(set(t)) == len(t),
    "square": lambda t, k: any(all(x == k for x in w) for w in windows(t, k)),
    "increasing_run": lambda t, k: any(all(a < b for a, b in zip(w, w[1:])) for w in windows(t, k)),
}

PATTERNS = {
    "e:[1,1]": lambda t: (1, 1) in windows(t, 2),
    "u:[1,1]": lambda t: any(a >= 1 and b >= 1 for a, b in windows(t, 2)),
    "l:[0,0]": lambda t: any(a == 0 and b == 0 for a, b in windows(t, 2)),
    "o:[0,2,1]": lambda t: any(rank(w) == (0, 2, 1) for w in windows(t, 3)),
    "e:1,0,1": lambda t: any(
        t[i] == 1 and t[j] == 0 and t[k] == 1 for i, j, k in itertools.combinations(range(len(t)), 3)
    ),
    "o:1,0": lambda t: any(t[i] > t[j] for i, j in itertools.combinations(range(len(t)), 2)),
}

CASES = [
    (5, 4, {"statistic": "cmax_ge", "k": 3}),
    (6, 5, {"statistic": "gmax_ge", "k": 2}),
    (7, 6, {"statistic": "cmin_gt", "k": 1}),
    (6, 6, {"statistic": "components_ge", "k": 3}),
    (4, 9, {"statistic": "tmax_ge", "k": 5}),
    (4, 8, {"statistic": "tmin_ge", "k": 1}),
    (5, 7, {"statistic": "carlitz"}),
    (6, 4, {"statistic": "equal_terms", "k": 4}),
    (4, 10, {"statistic": "all_distinct"}),
    (6, 8, {"statistic": "square", "k": 2}),
    (5, 8, {"statistic": "increasing_run", "k": 3}),
    (8, 7, {"statistic": "cmax_ge", "k": 4}),
    (7, 7, {"pattern": "e:[1,1]"}),
    (8, 5, {"pattern": "u:[1,1]"}),
    (6, 9, {"pattern": "l:[0,0]"}),
    (6, 6, {"pattern": "o:[0,2,1]"}),
    (6, 5, {"pattern": "e:1,0,1"}),
    (5, 6, {"pattern": "o:1,0"}),
    (9, 9, {"statistic": "carlitz"}),
    (10, 5, {"pattern": "u:[1,1]"}),
]


def probability(n, m, prop):
    if "pattern" in prop:
        pred = PATTERNS[prop["pattern"]]
    else:
        f = PREDICATES[prop["statistic"]]
        pred = lambda t: f(t, prop.get("k"))  # noqa: E731
    total = hits = 0
    for t in compositions(n, m):
        total += 1
        hits += bool(pred(t))
    return Fraction(hits, total)


def main():
    out = []
    for n, m, prop in CASES:
        p = probability(n, m, prop)
        out.append({"n": n, "m": m, "property": prop, "value": f"{p.numerator}/{p.denominator}"})
    path = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_uniform.json"
    path.write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
