#!/usr/bin/env python3
"""Builds the synthetic fixture corpus under crates/core/tests/fixtures.

Every statement is assembled from phrases that carry their own dependency
structure, so the segment text, CoNLL-U trees, SRL frames, gold spans and
CoNLL-2003 tag files all describe the same tokens. Output is deterministic.

Gold conventions: parties and attributes are bare noun phrases (no
preposition); every condition/purpose clause is one TP span; a possessive
"your" in a main-clause noun phrase is the Subject; nothing inside a TP
clause is labeled separately.
"""

import json
import random
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"

POS = {
    "your": "PRON", "our": "PRON", "their": "PRON", "its": "PRON",
    "we": "PRON", "you": "PRON", "us": "PRON", "it": "PRON", "they": "PRON",
    "the": "DET", "a": "DET", "this": "DET", "any": "DET", "some": "DET",
    "personal": "ADJ", "technical": "ADJ", "precise": "ADJ", "actual": "ADJ",
    "mobile": "ADJ", "aggregated": "ADJ", "third": "ADJ", "financial": "ADJ",
    "social": "ADJ", "legal": "ADJ",
    "google": "PROPN", "facebook": "PROPN",
}
MOD_DEP = {"PRON": "poss", "DET": "det", "ADJ": "amod", "NOUN": "compound", "PROPN": "compound"}


def pos_of(word):
    return POS.get(word.lower(), "NOUN")


class Phrase:
    """Tokens as [form, lemma, pos, local_head or None, dep or None]."""

    def __init__(self, toks, root):
        self.toks = toks
        self.root = root
        self.frames = []  # inner frames: (verb_local, lemma, [(role, s, e)])
        self.marks = {}   # named local sub-spans

    def __len__(self):
        return len(self.toks)


def np(text):
    words = text.split()
    head = len(words) - 1
    toks = []
    for i, w in enumerate(words):
        p = pos_of(w)
        if i == head:
            toks.append([w, w.lower(), "PRON" if p == "PRON" else p, None, None])
        else:
            toks.append([w, w.lower(), p, head, MOD_DEP[p]])
    ph = Phrase(toks, head)
    ph.marks["np"] = (0, len(words))
    return ph


def concat(parts):
    """Concatenates phrases, shifting heads; returns phrase and offsets."""
    toks, offsets, off = [], [], 0
    for p in parts:
        offsets.append(off)
        for t in p.toks:
            t = list(t)
            if t[3] is not None:
                t[3] += off
            toks.append(t)
        off += len(p)
    return toks, offsets


def pp(prep, obj, dep="prep"):
    """Prepositional phrase; the preposition heads, the object is pobj."""
    obj = np(obj) if isinstance(obj, str) else obj
    head = Phrase([[prep, prep.lower(), "ADP", None, None]], 0)
    toks, (o_head, o_obj) = concat([head, obj])
    toks[o_obj + obj.root][3] = 0
    toks[o_obj + obj.root][4] = "pobj"
    ph = Phrase(toks, 0)
    ph.marks["np"] = (1, len(toks))
    ph.dep = dep
    return ph


def clause(words, verb_at, verb_lemma, deps, frame_roles, lemma_tracked=True):
    """A subordinate clause from word list.

    `deps` maps word index to (head index, dep); the verb is the clause root.
    `frame_roles` lists (role, start, end) local to the clause for the
    inner verb's frame.
    """
    toks = []
    for i, w in enumerate(words):
        if i == verb_at:
            toks.append([w, verb_lemma, "VERB", None, None])
        else:
            h, d = deps[i]
            p = {"when": "ADV", "if": "SCONJ", "after": "SCONJ", "to": "PART",
                 "as": "SCONJ", "are": "AUX", "is": "AUX", "in": "ADP", "with": "ADP",
                 "by": "ADP", "for": "ADP", "about": "ADP"}.get(w.lower(), pos_of(w))
            toks.append([w, w.lower(), p, h, d])
    ph = Phrase(toks, verb_at)
    ph.frames.append((verb_at, verb_lemma, frame_roles))
    return ph


# --- TP clauses -----------------------------------------------------------
# Each returns (phrase, dep to main verb, SRL role in the main frame, uses_actor)
# where uses_actor means the inner frame's ARG0 is the main clause actor.

def tp_when_visit():
    w = "when you visit our websites".split()
    return clause(w, 2, "visit",
                  {0: (2, "advmod"), 1: (2, "nsubj"), 3: (4, "poss"), 4: (2, "dobj")},
                  [("ARGM-TMP", 0, 1), ("ARG0", 1, 2), ("ARG1", 3, 5)]), "advcl", "ARGM-TMP", False


def tp_when_use():
    w = "when you use our mobile applications".split()
    return clause(w, 2, "use",
                  {0: (2, "advmod"), 1: (2, "nsubj"), 3: (5, "poss"), 4: (5, "amod"), 5: (2, "dobj")},
                  [("ARGM-TMP", 0, 1), ("ARG0", 1, 2), ("ARG1", 3, 6)]), "advcl", "ARGM-TMP", False


def tp_when_share():
    w = "when you share content with friends".split()
    return clause(w, 2, "share",
                  {0: (2, "advmod"), 1: (2, "nsubj"), 3: (2, "dobj"), 4: (2, "prep"), 5: (4, "pobj")},
                  [("ARGM-TMP", 0, 1), ("ARG0", 1, 2), ("ARG1", 3, 4), ("ARG2", 4, 6)]), "advcl", "ARGM-TMP", False


def tp_when_send():
    w = "when you send us a message".split()
    return clause(w, 2, "send",
                  {0: (2, "advmod"), 1: (2, "nsubj"), 3: (2, "dative"), 4: (5, "det"), 5: (2, "dobj")},
                  [("ARGM-TMP", 0, 1), ("ARG0", 1, 2), ("ARG2", 3, 4), ("ARG1", 4, 6)]), "advcl", "ARGM-TMP", False


def tp_after_provide():
    w = "after you provide it".split()
    return clause(w, 2, "provide",
                  {0: (2, "mark"), 1: (2, "nsubj"), 3: (2, "dobj")},
                  [("ARGM-TMP", 0, 1), ("ARG0", 1, 2), ("ARG1", 3, 4)]), "advcl", "ARGM-TMP", False


def tp_to_provide():
    w = "to provide our services".split()
    return clause(w, 1, "provide",
                  {0: (1, "aux"), 2: (3, "poss"), 3: (1, "dobj")},
                  [("ARG1", 2, 4)]), "advcl", "ARGM-PNC", True


def tp_to_improve():
    w = "to improve our products".split()
    return clause(w, 1, "improve",
                  {0: (1, "aux"), 2: (3, "poss"), 3: (1, "dobj")},
                  [("ARG1", 2, 4)]), "advcl", "ARGM-PNC", True


def tp_if_consent():
    w = "if you consent".split()
    return clause(w, 2, "consent", {0: (2, "mark"), 1: (2, "nsubj")},
                  [("ARG0", 1, 2)]), "advcl", "ARGM-ADV", False


def tp_as_described():
    w = "as described in this policy".split()
    return clause(w, 1, "describe",
                  {0: (1, "mark"), 2: (1, "prep"), 3: (4, "det"), 4: (2, "pobj")},
                  [("ARGM-LOC", 2, 5)]), "advcl", "ARGM-MNR", False


def tp_for_marketing():
    ph = pp("for", "marketing purposes")
    return ph, "prep", "ARGM-PNC", False


def tp_with_consent():
    ph = pp("with", "your consent")
    return ph, "prep", "ARGM-MNR", False


TPS = {
    "visit": tp_when_visit, "use": tp_when_use, "share": tp_when_share,
    "send": tp_when_send, "after_provide": tp_after_provide,
    "provide": tp_to_provide, "improve": tp_to_improve, "consent": tp_if_consent,
    "described": tp_as_described, "marketing": tp_for_marketing,
    "with_consent": tp_with_consent,
}

SENDING = {"share", "send", "transmit", "transfer", "disclose", "provide"}
RECEIVING = {"collect", "gather", "receive", "acquire"}
UNTRACKED = {"sell", "rent", "use"}


class Statement:
    def __init__(self):
        self.toks = []
        self.frames = []  # (verb_index, lemma, [(role, s, e)])
        self.gold = []    # (param, s, e)
        self.valid = True


def build_active(actor, verb_form, lemma, attr, party=None, tps=(), aux=None, neg=False):
    """[front TPs ,] actor [aux] [not] verb attr [party] [back TPs] ."""
    front = [t for t in tps if t[0] == "front"]
    back = [t for t in tps if t[0] == "back"]
    elems = []  # (name, phrase, dep)
    tp_info = []
    for _, key in front:
        ph, dep, role, uses_actor = TPS[key]()
        elems.append(("tp", ph, dep))
        tp_info.append((role, uses_actor))
    if front:
        elems.append(("comma", Phrase([[",", ",", "PUNCT", None, None]], 0), "punct"))
    elems.append(("actor", np(actor.lower()), "nsubj"))
    if aux:
        elems.append(("aux", Phrase([[aux, aux, "AUX", None, None]], 0), "aux"))
    if neg:
        elems.append(("aux", Phrase([["do", "do", "AUX", None, None]], 0), "aux"))
        elems.append(("neg", Phrase([["not", "not", "PART", None, None]], 0), "neg"))
    elems.append(("verb", Phrase([[verb_form, lemma, "VERB", None, None]], 0), None))
    elems.append(("attr", np(attr), "dobj"))
    if party:
        prep, obj = party
        elems.append(("party", pp(prep, obj), "prep" if prep != "to" else "dative"))
    for _, key in back:
        ph, dep, role, uses_actor = TPS[key]()
        elems.append(("tp", ph, dep))
        tp_info.append((role, uses_actor))
    elems.append(("stop", Phrase([[".", ".", "PUNCT", None, None]], 0), "punct"))
    return assemble(elems, tp_info, lemma)


def build_passive(subj, aux, verb_form, lemma, agent=None, party=None, tps=()):
    """subj aux be verb [by agent] [party] [TPs] ."""
    elems = [("subjpass", np(subj.lower()), "nsubjpass")]
    if aux:
        elems.append(("aux", Phrase([[aux, aux, "AUX", None, None]], 0), "aux"))
        elems.append(("auxpass", Phrase([["be", "be", "AUX", None, None]], 0), "auxpass"))
    else:
        elems.append(("auxpass", Phrase([["is", "be", "AUX", None, None]], 0), "auxpass"))
    elems.append(("verb", Phrase([[verb_form, lemma, "VERB", None, None]], 0), None))
    if agent:
        elems.append(("agent", pp("by", agent), "agent"))
    if party:
        elems.append(("party", pp(*party), "prep"))
    tp_info = []
    for _, key in tps:
        ph, dep, role, uses_actor = TPS[key]()
        elems.append(("tp", ph, dep))
        tp_info.append((role, uses_actor))
    elems.append(("stop", Phrase([[".", ".", "PUNCT", None, None]], 0), "punct"))
    return assemble(elems, tp_info, lemma, passive=True)


def assemble(elems, tp_info, lemma, passive=False):
    st = Statement()
    toks, offsets = concat([e[1] for e in elems])
    verb_idx = offsets[[e[0] for e in elems].index("verb")]
    span = {}
    tp_spans = []
    for (name, ph, dep), off in zip(elems, offsets):
        root = off + ph.root
        if name != "verb":
            toks[root][3] = verb_idx
            toks[root][4] = dep
        s, e = off, off + len(ph)
        if name == "tp":
            tp_spans.append((s, e, ph, off))
        else:
            span.setdefault(name, (s, e, ph, off))
    toks[verb_idx][4] = "ROOT"
    st.toks = toks

    def np_span(name):
        s, e, ph, off = span[name]
        a, b = ph.marks["np"]
        return (off + a, off + b)

    # Main frame.
    args = []
    if passive:
        args.append(("ARG1",) + span["subjpass"][:2])
        if "agent" in span:
            args.append(("ARG0",) + span["agent"][:2])
    else:
        args.append(("ARG0",) + span["actor"][:2])
        args.append(("ARG1",) + span["attr"][:2])
    if "aux" in span and toks[span["aux"][0]][1] in ("may", "can", "will"):
        args.append(("ARGM-MOD",) + span["aux"][:2])
    if "neg" in span:
        args.append(("ARGM-NEG",) + span["neg"][:2])
    if "party" in span:
        args.append(("ARG2",) + span["party"][:2])
    for (s, e, ph, off), (role, _) in zip(tp_spans, tp_info):
        args.append((role, s, e))
    st.frames.append((verb_idx, lemma, sorted(args, key=lambda a: (a[1], a[2], a[0]))))

    # Inner frames of TP clauses.
    for (s, e, ph, off), (role, uses_actor) in zip(tp_spans, tp_info):
        for v, vl, roles in ph.frames:
            inner = [(r, off + a, off + b) for r, a, b in roles]
            if uses_actor and not passive:
                inner.append(("ARG0",) + span["actor"][:2])
            st.frames.append((off + v, vl, sorted(inner, key=lambda a: (a[1], a[2], a[0]))))
    st.frames.sort(key=lambda f: f[0])

    # Gold.
    gold = []
    if passive:
        gold.append(("Attribute",) + np_span("subjpass"))
        if "agent" in span:
            gold.append(("Receiver" if lemma in RECEIVING else "Sender",) + np_span("agent"))
        if "party" in span:
            gold.append(("Sender" if lemma in RECEIVING else "Receiver",) + np_span("party"))
    else:
        receiving = lemma in RECEIVING
        gold.append(("Receiver" if receiving else "Sender",) + np_span("actor"))
        gold.append(("Attribute",) + np_span("attr"))
        if "party" in span:
            gold.append(("Sender" if receiving else "Receiver",) + np_span("party"))
    for s, e, _, _ in tp_spans:
        gold.append(("TP", s, e))
    for name in ("actor", "attr", "subjpass", "party", "agent"):
        if name in span:
            s, e = span[name][:2]
            for i in range(s, e):
                if toks[i][0].lower() == "your":
                    gold.append(("Subject", i, i + 1))
    st.gold = sorted(gold, key=lambda g: (g[1], g[2], g[0]))
    return st


def handmade(words, rows, frames, gold, valid=True):
    """Statement from explicit (pos, head, dep) rows with 0-based heads."""
    st = Statement()
    st.toks = [[w, lem, p, h, d] for w, (lem, p, h, d) in zip(words, rows)]
    st.frames = frames
    st.gold = gold
    st.valid = valid
    return st


def google_example():
    words = "When you use Google services , we may collect and process information about your actual location .".split()
    rows = [
        ("when", "ADV", 2, "advmod"), ("you", "PRON", 2, "nsubj"), ("use", "VERB", 8, "advcl"),
        ("google", "PROPN", 4, "compound"), ("service", "NOUN", 2, "dobj"), (",", "PUNCT", 8, "punct"),
        ("we", "PRON", 8, "nsubj"), ("may", "AUX", 8, "aux"), ("collect", "VERB", None, "ROOT"),
        ("and", "CCONJ", 8, "cc"), ("process", "VERB", 8, "conj"), ("information", "NOUN", 8, "dobj"),
        ("about", "ADP", 11, "prep"), ("your", "PRON", 15, "poss"), ("actual", "ADJ", 15, "amod"),
        ("location", "NOUN", 12, "pobj"), (".", "PUNCT", 8, "punct"),
    ]
    frames = [
        (2, "use", [("ARGM-TMP", 0, 1), ("ARG0", 1, 2), ("ARG1", 3, 5)]),
        (8, "collect", [("ARGM-TMP", 0, 5), ("ARG0", 6, 7), ("ARGM-MOD", 7, 8), ("ARG1", 11, 16)]),
        (10, "process", [("ARG0", 6, 7), ("ARG1", 11, 16)]),
    ]
    gold = [("TP", 0, 5), ("Receiver", 6, 7), ("Attribute", 11, 16), ("Subject", 13, 14)]
    return handmade(words, rows, frames, gold)


def collect_example():
    words = "We collect technical information when you visit our websites or use our mobile applications or services .".split()
    rows = [
        ("we", "PRON", 1, "nsubj"), ("collect", "VERB", None, "ROOT"), ("technical", "ADJ", 3, "amod"),
        ("information", "NOUN", 1, "dobj"), ("when", "ADV", 6, "advmod"), ("you", "PRON", 6, "nsubj"),
        ("visit", "VERB", 1, "advcl"), ("our", "PRON", 8, "poss"), ("website", "NOUN", 6, "dobj"),
        ("or", "CCONJ", 6, "cc"), ("use", "VERB", 6, "conj"), ("our", "PRON", 13, "poss"),
        ("mobile", "ADJ", 13, "amod"), ("application", "NOUN", 10, "dobj"), ("or", "CCONJ", 13, "cc"),
        ("service", "NOUN", 13, "conj"), (".", "PUNCT", 1, "punct"),
    ]
    frames = [
        (1, "collect", [("ARG0", 0, 1), ("ARG1", 2, 4), ("ARGM-TMP", 4, 9), ("ARGM-TMP", 9, 16)]),
        (6, "visit", [("ARGM-TMP", 4, 5), ("ARG0", 5, 6), ("ARG1", 7, 9)]),
        (10, "use", [("ARG0", 5, 6), ("ARG1", 11, 16)]),
    ]
    gold = [("Receiver", 0, 1), ("Attribute", 2, 4), ("TP", 4, 16)]
    return handmade(words, rows, frames, gold)


def collect_share_example():
    words = "We collect your personal information when you are sharing your post .".split()
    rows = [
        ("we", "PRON", 1, "nsubj"), ("collect", "VERB", None, "ROOT"), ("your", "PRON", 4, "poss"),
        ("personal", "ADJ", 4, "amod"), ("information", "NOUN", 1, "dobj"), ("when", "ADV", 8, "advmod"),
        ("you", "PRON", 8, "nsubj"), ("be", "AUX", 8, "aux"), ("share", "VERB", 1, "advcl"),
        ("your", "PRON", 10, "poss"), ("post", "NOUN", 8, "dobj"), (".", "PUNCT", 1, "punct"),
    ]
    frames = [
        (1, "collect", [("ARG0", 0, 1), ("ARG1", 2, 5), ("ARGM-TMP", 5, 11)]),
        (8, "share", [("ARGM-TMP", 5, 6), ("ARG0", 6, 7), ("ARG1", 9, 11)]),
    ]
    gold = [("Receiver", 0, 1), ("Attribute", 2, 5), ("Subject", 2, 3), ("TP", 5, 11)]
    return handmade(words, rows, frames, gold)


def invalid_statements():
    out = []
    out.append(handmade(
        "This policy was last updated in 2019 .".split(),
        [("this", "DET", 1, "det"), ("policy", "NOUN", 4, "nsubjpass"), ("be", "AUX", 4, "auxpass"),
         ("last", "ADV", 4, "advmod"), ("update", "VERB", None, "ROOT"), ("in", "ADP", 4, "prep"),
         ("2019", "NUM", 5, "pobj"), (".", "PUNCT", 4, "punct")],
        [(4, "update", [("ARG1", 0, 2), ("ARGM-TMP", 3, 4), ("ARGM-TMP", 5, 7)])],
        [], valid=False))
    out.append(handmade(
        "Please read this policy carefully .".split(),
        [("please", "INTJ", 1, "intj"), ("read", "VERB", None, "ROOT"), ("this", "DET", 3, "det"),
         ("policy", "NOUN", 1, "dobj"), ("carefully", "ADV", 1, "advmod"), (".", "PUNCT", 1, "punct")],
        [(1, "read", [("ARGM-DIS", 0, 1), ("ARG1", 2, 4), ("ARGM-MNR", 4, 5)])],
        [], valid=False))
    out.append(handmade(
        "Contact us with any questions .".split(),
        [("contact", "VERB", None, "ROOT"), ("us", "PRON", 0, "dobj"), ("with", "ADP", 0, "prep"),
         ("any", "DET", 4, "det"), ("question", "NOUN", 2, "pobj"), (".", "PUNCT", 0, "punct")],
        [(0, "contact", [("ARG1", 1, 2), ("ARG2", 2, 5)])],
        [], valid=False))
    out.append(handmade(
        "Thank you .".split(),
        [("thank", "VERB", None, "ROOT"), ("you", "PRON", 0, "dobj"), (".", "PUNCT", 0, "punct")],
        [(0, "thank", [("ARG1", 1, 2)])],
        [], valid=False))
    return out


ACTORS = ["We", "Our partners", "Advertisers", "Our affiliates", "The company"]
ATTRS = ["your email address", "technical information", "your location data",
         "your personal information", "usage data", "your contact details",
         "cookie identifiers", "your purchase history", "device information",
         "your payment information"]
SEND_PARTY = [("with", "advertisers"), ("with", "our affiliates"), ("to", "third parties"),
              ("to", "law enforcement"), ("with", "service providers")]
RECV_PARTY = [("from", "third parties"), ("from", "your device"), ("from", "our partners"),
              ("from", "social networks")]
VERBS = {
    "share": "share", "disclose": "disclose", "transfer": "transfer", "provide": "provide",
    "send": "send", "transmit": "transmit",
    "collect": "collect", "gather": "gather", "receive": "receive", "acquire": "acquire",
}
# TP keys whose clause holds a tracked verb (redundant under the filter).
REDUNDANT_TPS = ["share", "send", "after_provide", "provide"]
PLAIN_TPS = ["visit", "use", "improve", "consent", "described", "marketing", "with_consent"]


def random_statement(rng):
    kind = rng.random()
    if kind < 0.12:
        verb = rng.choice(["sell", "rent"])
        return build_active("We", verb, verb, rng.choice(ATTRS), party=("to", "third parties"),
                            aux=None, neg=True)
    if kind < 0.27:
        lemma = rng.choice(["share", "collect", "disclose", "transfer"])
        form = {"share": "shared", "collect": "collected", "disclose": "disclosed",
                "transfer": "transferred"}[lemma]
        subj = rng.choice(["Your personal information", "Your data", "Usage data"])
        agent = rng.choice([None, "our partners", "advertisers"]) if lemma == "collect" else None
        party = None if agent else rng.choice(RECV_PARTY if lemma in RECEIVING else SEND_PARTY)
        tps = [("back", rng.choice(PLAIN_TPS + REDUNDANT_TPS[:2]))] if rng.random() < 0.6 else []
        return build_passive(subj, rng.choice([None, "may"]), form, lemma, agent=agent,
                             party=party, tps=tps)
    lemma = rng.choice(sorted(VERBS))
    receiving = lemma in RECEIVING
    actor = rng.choice(ACTORS)
    if receiving and rng.random() < 0.6:
        actor = "We"
    party = None
    if rng.random() < 0.7:
        party = rng.choice(RECV_PARTY if receiving else SEND_PARTY)
    tps = []
    r = rng.random()
    if r < 0.45:
        tps.append((rng.choice(["front", "back"]), rng.choice(REDUNDANT_TPS)))
    elif r < 0.85:
        tps.append((rng.choice(["front", "back"]), rng.choice(PLAIN_TPS)))
    if rng.random() < 0.25:
        tps.append(("back", rng.choice(PLAIN_TPS)))
    # Two clauses can't both sit in front; keep the front one first.
    if sum(1 for t in tps if t[0] == "front") > 1:
        tps = [tps[0]] + [("back", k) for _, k in tps[1:]]
    if len({k for _, k in tps}) < len(tps):
        tps = tps[:1]
    aux = rng.choice([None, None, "may", "can"])
    return build_active(actor, lemma, lemma, rng.choice(ATTRS), party=party, tps=tps, aux=aux)


# --- writers ----------------------------------------------------------------

NO_SPACE_BEFORE = {",", ".", ";", ":", "!", "?"}


def surface(st):
    words = []
    for i, t in enumerate(st.toks):
        w = t[0]
        if i == 0:
            w = w[0].upper() + w[1:]
        if words and w in NO_SPACE_BEFORE:
            words[-1] += w
        else:
            words.append(w)
    return " ".join(words)


def capitalize_first(st):
    t = st.toks[0]
    t[0] = t[0][0].upper() + t[0][1:]


def conllu(st_id, st):
    lines = [f"# sent_id = {st_id}", f"# text = {surface(st)}"]
    for i, (form, lemma, pos, head, dep) in enumerate(st.toks):
        h = 0 if head is None else head + 1
        lines.append(f"{i + 1}\t{form}\t{lemma}\t{pos}\t_\t_\t{h}\t{dep}\t_\t_")
    return "\n".join(lines) + "\n\n"


def frames_jsonl(st_id, st):
    out = []
    for v, lemma, args in st.frames:
        out.append(json.dumps({
            "statement_id": st_id,
            "sentence_len": len(st.toks),
            "verb_index": v,
            "verb_lemma": lemma,
            "arguments": [{"role": r, "start": s, "end": e} for r, s, e in args],
        }, separators=(",", ":")))
    return out


def gold_json(st_id, st):
    return json.dumps({
        "statement_id": st_id,
        "method": "gold",
        "valid": st.valid,
        "spans": [{"start": s, "end": e, "param": p, "source_tag": "gold"} for p, s, e in st.gold],
    }, separators=(",", ":"))


TAG_ORDER = ["Sender", "Receiver", "Subject", "Attribute", "TP"]


def tags_of(st):
    tags = ["O"] * len(st.toks)
    for p in reversed(TAG_ORDER):
        for q, s, e in st.gold:
            if q == p:
                for i in range(s, e):
                    tags[i] = p
    return tags


def conll2003(st_id, st):
    lines = [f"# sent_id = {st_id}"]
    for t, tag in zip(st.toks, tags_of(st)):
        lines.append(f"{t[0]} {tag}")
    return "\n".join(lines) + "\n\n"


def check(st):
    n = len(st.toks)
    roots = [i for i, t in enumerate(st.toks) if t[3] is None]
    assert len(roots) == 1, (surface(st), roots)
    for v, _, args in st.frames:
        assert 0 <= v < n
        for _, s, e in args:
            assert 0 <= s < e <= n, (surface(st), s, e)


POLICIES = ["acme", "globex", "initech", "umbrella", "hooli"]
OTHER_LABELS = ["User Choice/Control", "Policy Change", "Other"]
LABELS = ["First Party Collection/Use", "Third Party Sharing/Collection", "Data Retention"]


def main():
    rng = random.Random(20191017)
    corpus = []  # (policy, segment, label, [statements])

    corpus.append(("google", "s00", LABELS[0], [google_example()]))
    corpus.append(("acme", "s00", LABELS[0], [collect_example()]))
    corpus.append(("acme", "s01", LABELS[0], [collect_share_example()]))
    invalid = invalid_statements()

    seg_counter = {p: 2 if p == "acme" else 0 for p in POLICIES}
    target = 60
    count = 3
    inv_i = 0
    while count < target:
        policy = POLICIES[count % len(POLICIES)]
        seg = f"s{seg_counter[policy]:02d}"
        seg_counter[policy] += 1
        sts = [random_statement(rng)]
        if rng.random() < 0.2:
            sts.append(random_statement(rng))
        if inv_i < len(invalid) and count % 13 == 5:
            sts.append(invalid[inv_i])
            inv_i += 1
        label = LABELS[1] if any(s.frames and s.frames[0][1] in SENDING for s in sts) else LABELS[0]
        corpus.append((policy, seg, label, sts))
        count += len(sts)
    while inv_i < len(invalid):
        policy = POLICIES[inv_i % len(POLICIES)]
        seg = f"s{seg_counter[policy]:02d}"
        seg_counter[policy] += 1
        corpus.append((policy, seg, LABELS[2], [invalid[inv_i]]))
        inv_i += 1

    seg_dir = OUT / "corpus" / "segments"
    seg_dir.mkdir(parents=True, exist_ok=True)
    by_policy = {}
    trees, frames, gold = [], [], []
    for policy, seg, label, sts in corpus:
        for st in sts:
            capitalize_first(st)
            check(st)
        text = " ".join(surface(st) for st in sts)
        by_policy.setdefault(policy, []).append(json.dumps(
            {"policy_id": policy, "segment_id": seg, "label": label, "text": text},
            separators=(",", ":")))
        for k, st in enumerate(sts):
            sid = f"{policy}/{seg}/{k}"
            trees.append(conllu(sid, st))
            frames.extend(frames_jsonl(sid, st))
            gold.append(gold_json(sid, st))
    # Segments outside the allow-list are dropped at ingest.
    for i, label in enumerate(OTHER_LABELS):
        policy = POLICIES[i]
        by_policy[policy].append(json.dumps(
            {"policy_id": policy, "segment_id": f"x{i:02d}", "label": label,
             "text": "You can opt out of marketing emails at any time. We will notify you of changes."},
            separators=(",", ":")))
    for policy, lines in by_policy.items():
        (seg_dir / f"{policy}.jsonl").write_text("\n".join(lines) + "\n")
    (OUT / "corpus" / "trees.conllu").write_text("".join(trees))
    (OUT / "corpus" / "frames.jsonl").write_text("\n".join(frames) + "\n")
    (OUT / "corpus" / "gold.jsonl").write_text("\n".join(gold) + "\n")

    # Worked examples on their own.
    worked = OUT / "worked"
    worked.mkdir(exist_ok=True)
    for name, st in [("google", corpus[0][3][0]), ("collect", corpus[1][3][0]),
                     ("collect_share", corpus[2][3][0])]:
        (worked / f"{name}.conllu").write_text(conllu(name, st))
        (worked / f"{name}.frames.jsonl").write_text("\n".join(frames_jsonl(name, st)) + "\n")

    # Tagged sentences for the HMM, drawn from a separate stream.
    hrng = random.Random(7)
    hmm = OUT / "hmm"
    hmm.mkdir(exist_ok=True)
    for name, n in [("train", 400), ("test", 80)]:
        chunks = []
        for i in range(n):
            st = random_statement(hrng)
            capitalize_first(st)
            check(st)
            chunks.append(conll2003(f"{name}-{i:03d}", st))
        (hmm / f"{name}.conll").write_text("".join(chunks))

    print(f"{sum(len(c[3]) for c in corpus)} statements in {len(corpus)} segments", file=sys.stderr)


if __name__ == "__main__":
    main()
