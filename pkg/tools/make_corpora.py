#!/usr/bin/env python3
"""Generate the bundled test corpora (deterministic, seeded).

Writes tests/data/toy_corpus.jsonl (20 documents, wide enough for
meaningful top-10 training labels) and tests/data/synth_corpus.jsonl
(50 documents with abstracts, a few edge cases and coref clusters).
Documents are synthetic dependency trees built from hand-checked
sentence templates, so every parse is valid by construction.
"""
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "tests", "data")

PROPNS = ["Alice", "Brandon", "Clara", "Daniel", "Elena", "Felix", "Grace",
          "Hugo", "Irene", "Jonas", "Karen", "Leo", "Mona", "Nora", "Oscar",
          "Priya", "Quinn", "Rosa", "Samuel", "Tessa"]

NOUNS = ["court", "judge", "city", "company", "market", "river", "bridge",
         "school", "garden", "minister", "village", "factory", "harbor",
         "museum", "council", "farmer", "artist", "doctor", "library",
         "station", "forest", "mountain", "valley", "castle", "tower"]

# (past form, lemma); every lemma is in the demo verb lexicon
VERBS = [("walked", "walk"), ("ended", "end"), ("won", "win"),
         ("attacked", "attack"), ("built", "build"), ("visited", "visit"),
         ("met", "meet"), ("launched", "launch"), ("signed", "sign"),
         ("approved", "approve"), ("investigated", "investigate"),
         ("celebrated", "celebrate"), ("rescued", "rescue"),
         ("elected", "elect"), ("announced", "announce"),
         ("marched", "march"), ("protested", "protest"),
         ("negotiated", "negotiate"), ("discovered", "discover"),
         ("revealed", "reveal"), ("published", "publish"),
         ("escaped", "escape"), ("arrived", "arrive"), ("departed", "depart")]

# all in the demo eventive-noun lexicon
EVENT_NOUNS = ["war", "call", "interview", "election", "earthquake", "flood",
               "strike", "protest", "ceremony", "trial"]

ADJS = ["old", "new", "large", "small", "quiet", "busy", "famous", "ancient"]

LIGHT_VERBS = [("made", "make"), ("gave", "give"), ("took", "take")]


def s_nvn(n1, verb, n2):
    past, lemma = verb
    return [("The", "the", "DET", 2, "det"), (n1, n1, "NOUN", 3, "nsubj"),
            (past, lemma, "VERB", 0, "root"), ("the", "the", "DET", 5, "det"),
            (n2, n2, "NOUN", 3, "obj"), (".", ".", "PUNCT", 3, "punct")]


def s_pvn(p, verb, n):
    past, lemma = verb
    return [(p, p, "PROPN", 2, "nsubj"), (past, lemma, "VERB", 0, "root"),
            ("a", "a", "DET", 4, "det"), (n, n, "NOUN", 2, "obj"),
            (".", ".", "PUNCT", 2, "punct")]


def s_light(p1, light, ev_noun, p2):
    past, lemma = light
    return [(p1, p1, "PROPN", 2, "nsubj"), (past, lemma, "VERB", 0, "root"),
            ("a", "a", "DET", 4, "det"), (ev_noun, ev_noun, "NOUN", 2, "obj"),
            ("to", "to", "ADP", 6, "case"), (p2, p2, "PROPN", 2, "iobj"),
            (".", ".", "PUNCT", 2, "punct")]


def s_adjn(adj, n, verb):
    past, lemma = verb
    return [("The", "the", "DET", 3, "det"), (adj, adj, "ADJ", 3, "amod"),
            (n, n, "NOUN", 4, "nsubj"), (past, lemma, "VERB", 0, "root"),
            (".", ".", "PUNCT", 4, "punct")]


def s_obl(n1, verb, n2):
    past, lemma = verb
    return [("The", "the", "DET", 2, "det"), (n1, n1, "NOUN", 3, "nsubj"),
            (past, lemma, "VERB", 0, "root"), ("in", "in", "ADP", 6, "case"),
            ("the", "the", "DET", 6, "det"), (n2, n2, "NOUN", 3, "obl"),
            (".", ".", "PUNCT", 3, "punct")]


def s_evs(ev_noun, verb, n):
    past, lemma = verb
    return [("The", "the", "DET", 2, "det"),
            (ev_noun, ev_noun, "NOUN", 3, "nsubj"),
            (past, lemma, "VERB", 0, "root"), ("the", "the", "DET", 5, "det"),
            (n, n, "NOUN", 3, "obj"), (".", ".", "PUNCT", 3, "punct")]


def s_pron(verb, n):
    past, lemma = verb
    return [("He", "he", "PRON", 2, "nsubj"), (past, lemma, "VERB", 0, "root"),
            ("the", "the", "DET", 4, "det"), (n, n, "NOUN", 2, "obj"),
            (".", ".", "PUNCT", 2, "punct")]


def render(rows):
    lines = []
    for idx, (surface, lemma, upos, head, deprel) in enumerate(rows, start=1):
        lines.append("\t".join([str(idx), surface, lemma, upos, "_", "_",
                                str(head), deprel, "_", "_"]))
    return "\n".join(lines)


def render_doc(sentence_rows):
    return "\n\n".join(render(rows) for rows in sentence_rows) + "\n"


def propn_mentions(rows):
    """(token_index, name) pairs for proper nouns in one sentence."""
    return [(idx, surface) for idx, (surface, _, upos, _, _)
            in enumerate(rows, start=1) if upos == "PROPN"]


class DocBuilder:
    def __init__(self, rng):
        self.rng = rng
        self.nouns = NOUNS[:]
        self.verbs = VERBS[:]
        self.rng.shuffle(self.nouns)
        self.rng.shuffle(self.verbs)
        # small per-doc name pool so names recur and can corefer
        self.names = rng.sample(PROPNS, 5)
        self.sentences = []

    def take_noun(self):
        if not self.nouns:
            self.nouns = NOUNS[:]
            self.rng.shuffle(self.nouns)
        return self.nouns.pop()

    def take_verb(self):
        if not self.verbs:
            self.verbs = VERBS[:]
            self.rng.shuffle(self.verbs)
        return self.verbs.pop()

    def add_random_sentence(self):
        rng = self.rng
        kind = rng.choice(["nvn", "pvn", "light", "adjn", "obl", "evs", "pron"])
        if kind == "nvn":
            rows = s_nvn(self.take_noun(), self.take_verb(), self.take_noun())
        elif kind == "pvn":
            rows = s_pvn(rng.choice(self.names), self.take_verb(),
                         self.take_noun())
        elif kind == "light":
            p1, p2 = rng.sample(self.names, 2)
            rows = s_light(p1, rng.choice(LIGHT_VERBS),
                           rng.choice(EVENT_NOUNS), p2)
        elif kind == "adjn":
            rows = s_adjn(rng.choice(ADJS), self.take_noun(), self.take_verb())
        elif kind == "obl":
            rows = s_obl(self.take_noun(), self.take_verb(), self.take_noun())
        elif kind == "evs":
            rows = s_evs(rng.choice(EVENT_NOUNS), self.take_verb(),
                         self.take_noun())
        else:
            rows = s_pron(self.take_verb(), self.take_noun())
        self.sentences.append(rows)
        return rows


def coref_clusters(sentences):
    """Cluster repeated proper names (single-token body mentions)."""
    by_name = {}
    for sent_index, rows in enumerate(sentences):
        for token_index, name in propn_mentions(rows):
            by_name.setdefault(name, []).append(
                {"part": "body", "sent": sent_index,
                 "start": token_index, "end": token_index})
    return [refs for refs in by_name.values() if len(refs) >= 2]


def make_toy_corpus(path, n_docs=20, seed=20240501):
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as out:
        for i in range(n_docs):
            builder = DocBuilder(rng)
            for _ in range(12):
                builder.add_random_sentence()
            abstract = [rng.choice(builder.sentences)]
            record = {"doc_id": "toy-%03d" % i,
                      "body": render_doc(builder.sentences),
                      "abstract": render_doc(abstract)}
            out.write(json.dumps(record, sort_keys=True) + "\n")


def make_synth_corpus(path, n_docs=50, seed=774422):
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as out:
        for i in range(n_docs):
            builder = DocBuilder(rng)
            for _ in range(rng.randint(3, 8)):
                builder.add_random_sentence()
            record = {"doc_id": "synth-%03d" % i,
                      "body": render_doc(builder.sentences)}

            if i in (7, 31):
                pass  # no abstract: exercises skip handling
            else:
                abstract = []
                for _ in range(rng.randint(1, 2)):
                    if rng.random() < 0.75:
                        abstract.append(rng.choice(builder.sentences))
                    else:
                        extra = DocBuilder(rng)
                        abstract.append(extra.add_random_sentence())
                if i == 13:
                    # gold with entities but no events: verb outside the
                    # demo lexicon, no eventive noun
                    abstract = [[("Nora", "Nora", "PROPN", 2, "nsubj"),
                                 ("saw", "see", "VERB", 0, "root"),
                                 ("the", "the", "DET", 4, "det"),
                                 ("bridge", "bridge", "NOUN", 2, "obj"),
                                 (".", ".", "PUNCT", 2, "punct")]]
                record["abstract"] = render_doc(abstract)

            clusters = coref_clusters(builder.sentences)
            if clusters and rng.random() < 0.7:
                record["coref"] = json.dumps(clusters, sort_keys=True)
            out.write(json.dumps(record, sort_keys=True) + "\n")


def main():
    os.makedirs(DATA, exist_ok=True)
    make_toy_corpus(os.path.join(DATA, "toy_corpus.jsonl"))
    make_synth_corpus(os.path.join(DATA, "synth_corpus.jsonl"))
    print("wrote corpora under", os.path.normpath(DATA))


if __name__ == "__main__":
    main()
