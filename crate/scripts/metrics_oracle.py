#!/usr/bin/env python3
"""Writes the 10-statement scoring fixture and prints expected scores.

The scorer here is a deliberately plain re-implementation used as an oracle:
greedy one-to-one matching per parameter (predictions by start, then end;
each takes the unmatched gold span with the largest overlap, preferring
identical boundaries, then the leftmost), per-statement precision/recall
averaged over the statements where each is defined, and pooled token counts
for the word-level scores.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures" / "metrics"
LEN = 12
PARAMS = ["Sender", "Receiver", "Subject", "Attribute", "TP"]

# (id, gold spans, predicted spans); spans are (param, start, end).
CASES = [
    ("m01", [("Sender", 0, 1), ("Attribute", 2, 5), ("TP", 5, 9)],
            [("Sender", 0, 1), ("Attribute", 2, 4), ("TP", 5, 9)]),
    ("m02", [("Receiver", 0, 2), ("Attribute", 3, 5)],
            [("Receiver", 1, 2), ("Attribute", 3, 5), ("Attribute", 6, 8)]),
    ("m03", [("TP", 0, 3), ("TP", 4, 10)],
            [("TP", 0, 2), ("TP", 2, 6), ("TP", 7, 10)]),
    ("m04", [("Sender", 0, 1), ("Receiver", 5, 7)],
            [("Receiver", 0, 1), ("Sender", 5, 7)]),
    ("m05", [("Attribute", 1, 3)], []),
    ("m06", [], [("TP", 0, 4)]),
    ("m07", [("Subject", 2, 3), ("Attribute", 2, 6)],
            [("Subject", 2, 3), ("Attribute", 3, 6), ("Actor", 0, 1)]),
    ("m08", [("Attribute", 0, 3), ("Attribute", 5, 8)],
            [("Attribute", 0, 8)]),
    ("m09", [("TP", 3, 9)],
            [("TP", 3, 5), ("TP", 3, 9)]),
    ("m10", [("Sender", 0, 2), ("Receiver", 4, 6), ("Attribute", 7, 9), ("TP", 9, 12)],
            [("Sender", 0, 2), ("Receiver", 4, 6), ("Attribute", 7, 9), ("TP", 9, 12)]),
]


def overlap(a, b):
    return max(0, min(a[2], b[2]) - max(a[1], b[1]))


def match(preds, golds, exact):
    preds = sorted(preds, key=lambda s: (s[1], s[2]))
    golds = sorted(golds, key=lambda s: (s[1], s[2]))
    used = [False] * len(golds)
    tp = 0
    for p in preds:
        best, key = None, None
        for j, g in enumerate(golds):
            if used[j]:
                continue
            same = (p[1], p[2]) == (g[1], g[2])
            if exact and not same:
                continue
            ov = overlap(p, g)
            if ov == 0:
                continue
            k = (ov, same, -j)
            if key is None or k > key:
                best, key = j, k
        if best is not None:
            used[best] = True
            tp += 1
    return tp, len(preds) - tp, len(golds) - tp


def macro(exact):
    res = {}
    for param in PARAMS:
        ps, rs = [], []
        for _, gold, pred in CASES:
            g = [s for s in gold if s[0] == param]
            p = [s for s in pred if s[0] == param]
            if not g and not p:
                continue
            tp, fp, fn = match(p, g, exact)
            if p:
                ps.append(tp / len(p))
            if g:
                rs.append(tp / len(g))
        if not ps and not rs:
            continue
        P = sum(ps) / len(ps) if ps else 0.0
        R = sum(rs) / len(rs) if rs else 0.0
        F = 0.0 if P + R == 0 else 2 * P * R / (P + R)
        res[param] = (P, R, F)
    return res


def tags(spans):
    t = ["O"] * LEN
    for param in reversed(PARAMS):
        for q, s, e in spans:
            if q == param:
                for i in range(s, e):
                    t[i] = param
    return t


def word_level():
    counts = {}
    for _, gold, pred in CASES:
        for g, p in zip(tags(gold), tags(pred)):
            if g == p:
                if g != "O":
                    counts.setdefault(g, [0, 0, 0])[0] += 1
                continue
            if p != "O":
                counts.setdefault(p, [0, 0, 0])[1] += 1
            if g != "O":
                counts.setdefault(g, [0, 0, 0])[2] += 1
    res = {}
    for param, (tp, fp, fn) in counts.items():
        P = tp / (tp + fp) if tp + fp else 0.0
        R = tp / (tp + fn) if tp + fn else 0.0
        F = 0.0 if P + R == 0 else 2 * P * R / (P + R)
        res[param] = (P, R, F, tp, fp, fn)
    return res


def ann(sid, method, spans, valid=None):
    d = {"statement_id": sid, "method": method}
    if valid is not None:
        d["valid"] = valid
    d["spans"] = [{"start": s, "end": e, "param": p, "source_tag": method if method == "gold" else "x"}
                  for p, s, e in spans]
    if method == "dp":
        pass
    return json.dumps(d, separators=(",", ":"))


def conll(which):
    out = []
    for sid, gold, pred in CASES:
        spans = gold if which == "gold" else pred
        out.append(f"# sent_id = {sid}")
        for i, t in enumerate(tags(spans)):
            out.append(f"t{i} {t}")
        out.append("")
    return "\n".join(out) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "gold.jsonl").write_text(
        "\n".join(ann(sid, "gold", g, valid=bool(g)) for sid, g, _ in CASES) + "\n")
    # Predictions carrying an Actor span must come from the DP mapper.
    (OUT / "pred.jsonl").write_text(
        "\n".join(ann(sid, "dp", p) for sid, _, p in CASES) + "\n")
    (OUT / "gold.conll").write_text(conll("gold"))
    (OUT / "pred.conll").write_text(conll("pred"))
    for name, exact in [("overlap", False), ("exact", True)]:
        print(name)
        for param, (P, R, F) in macro(exact).items():
            print(f"  {param:10} P={P:.4f} R={R:.4f} F1={F:.4f}")
    print("word-level")
    for param in PARAMS:
        if param in word_level():
            P, R, F, tp, fp, fn = word_level()[param]
            print(f"  {param:10} P={P:.4f} R={R:.4f} F1={F:.4f} tp={tp} fp={fp} fn={fn}")


if __name__ == "__main__":
    main()
