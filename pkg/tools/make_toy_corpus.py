"""Generate the deterministic toy corpora under data/toy/.

Synthetic parallel data for the three tasks, sized so the full pipeline can
run end to end in tests and demos: sources carry seeded mechanical errors,
targets carry their corrections, and the German GEC corpus also gets an
M2-style gold file whose S-lines match the package tokenizer exactly.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from editkit.gec_align import extract_edits
from editkit.tokenize import tokenize

OUT = Path(__file__).resolve().parents[1] / "data" / "toy"

DE_SUBJECTS = [
    (["der", "Mann"], "sg"),
    (["die", "Frau"], "sg"),
    (["das", "Kind"], "sg"),
    (["die", "Kinder"], "pl"),
    (["mein", "Bruder"], "sg"),
    (["unsere", "Nachbarn"], "pl"),
]
DE_VERBS = [("geht", "gehen"), ("kommt", "kommen"), ("spielt", "spielen"),
            ("arbeitet", "arbeiten"), ("wohnt", "wohnen"), ("lernt", "lernen")]
DE_TAILS = [["nach", "Hause"], ["in", "die", "Schule"], ["im", "Garten"],
            ["am", "Montag"], ["mit", "dem", "Hund"], ["in", "der", "Stadt"]]

ES_SUBJECTS = [
    (["el", "niño"], "sg"),
    (["la", "niña"], "sg"),
    (["el", "profesor"], "sg"),
    (["los", "estudiantes"], "pl"),
    (["mi", "amigo"], "sg"),
    (["las", "mujeres"], "pl"),
]
ES_VERBS = [("come", "comen"), ("vive", "viven"), ("trabaja", "trabajan"),
            ("estudia", "estudian"), ("canta", "cantan"), ("corre", "corren")]
ES_TAILS = [["en", "la", "escuela"], ["por", "la", "mañana"],
            ["con", "sus", "amigos"], ["en", "el", "parque"],
            ["todos", "los", "días"], ["cerca", "del", "río"]]

JA_SUBJECTS = ["私", "彼", "彼女", "先生", "友達"]
JA_PLACES = ["学校", "図書館", "公園", "駅"]
JA_VERBS = ["行きます", "います", "来ます", "帰ります"]

EN_NOUNS = ["committee", "engineer", "museum", "teacher", "report", "garden"]
EN_ADJS = ["large", "old", "famous", "complex", "quiet", "modern"]
EN_VERBS = ["described", "examined", "presented", "organized", "reviewed"]
EN_OBJS = ["the plan", "the results", "the building", "the lesson", "the data"]

SYNONYMS = {
    "described": "explained", "examined": "inspected", "presented": "showed",
    "organized": "arranged", "reviewed": "checked", "large": "big",
    "old": "ancient", "famous": "well known", "complex": "complicated",
    "quiet": "calm", "modern": "new", "plan": "proposal", "results": "findings",
    "building": "structure", "lesson": "class", "data": "figures",
}


def corrupt_sv(tokens, correct_sg, correct_pl, number, rng):
    """Break subject-verb agreement plus maybe one more mechanical error."""
    out = list(tokens)
    verb_at = next(i for i, t in enumerate(out) if t in (correct_sg, correct_pl))
    out[verb_at] = correct_pl if number == "sg" else correct_sg
    extra = rng.random()
    if extra < 0.25:
        at = rng.randrange(len(out) - 1)
        out.insert(at, out[at])
    elif extra < 0.45 and out[-1] == ".":
        out.pop()
    return out


def make_gec_de(rng):
    rows, m2_blocks = [], []
    for i in range(100):
        subj, number = DE_SUBJECTS[rng.randrange(len(DE_SUBJECTS))]
        verb_sg, verb_pl = DE_VERBS[rng.randrange(len(DE_VERBS))]
        tail = DE_TAILS[rng.randrange(len(DE_TAILS))]
        verb = verb_sg if number == "sg" else verb_pl
        target = subj + [verb] + tail + ["."]
        if rng.random() < 0.1:
            source = list(target)  # already correct
        else:
            source = corrupt_sv(target, verb_sg, verb_pl, number, rng)
        targets = [" ".join(target)]
        # a second annotator sometimes flips the subject instead of the verb
        if source != target and rng.random() < 0.3:
            alt_subj = ["das", "Kind"] if number == "pl" else ["die", "Kinder"]
            alt_verb = verb_sg if number == "pl" else verb_pl
            alt = alt_subj + [alt_verb] + target[len(subj) + 1:]
            targets.append(" ".join(alt))
        rows.append({
            "id": f"gec_de_{i:04d}", "lang": "de", "task": "gec",
            "source": " ".join(source), "targets": targets,
        })
        m2_blocks.append(make_m2_block(" ".join(source), targets, "de"))
    return rows, m2_blocks


def make_m2_block(source, targets, lang):
    src_toks = tuple(tokenize(source, lang))
    lines = ["S " + " ".join(src_toks)]
    for aid, tgt in enumerate(targets):
        tgt_toks = tuple(tokenize(tgt, lang))
        edits = extract_edits(src_toks, tgt_toks)
        if not edits:
            lines.append(f"A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{aid}")
            continue
        for span in edits:
            if span.start == span.end:
                etype = "M:OTHER"
            elif not span.replacement:
                etype = "U:OTHER"
            else:
                etype = "R:OTHER"
            corr = " ".join(span.replacement) if span.replacement else "-NONE-"
            lines.append(
                f"A {span.start} {span.end}|||{etype}|||{corr}"
                f"|||REQUIRED|||-NONE-|||{aid}"
            )
    return "\n".join(lines)


def make_gec_es(rng):
    rows = []
    for i in range(398):
        subj, number = ES_SUBJECTS[rng.randrange(len(ES_SUBJECTS))]
        verb_sg, verb_pl = ES_VERBS[rng.randrange(len(ES_VERBS))]
        tail = ES_TAILS[rng.randrange(len(ES_TAILS))]
        verb = verb_sg if number == "sg" else verb_pl
        target = subj + [verb] + tail + ["."]
        if rng.random() < 0.1:
            source = list(target)
        else:
            source = corrupt_sv(target, verb_sg, verb_pl, number, rng)
            if "días" in source and rng.random() < 0.5:
                source[source.index("días")] = "dias"
        rows.append({
            "id": f"gec_es_{i:04d}", "lang": "es", "task": "gec",
            "source": " ".join(source), "targets": [" ".join(target)],
        })
    return rows


def make_gec_ja(rng):
    rows = []
    for i in range(30):
        subj = JA_SUBJECTS[rng.randrange(len(JA_SUBJECTS))]
        place = JA_PLACES[rng.randrange(len(JA_PLACES))]
        verb = JA_VERBS[rng.randrange(len(JA_VERBS))]
        target = f"{subj}は{place}に{verb}。"
        if rng.random() < 0.15:
            source = target
        else:
            kind = rng.random()
            if kind < 0.4:
                source = f"{subj}が{place}に{verb}。"
            elif kind < 0.8:
                source = f"{subj}は{place}で{verb}。"
            else:
                source = f"{subj}は{place}に{verb}"
        rows.append({
            "id": f"gec_ja_{i:04d}", "lang": "ja", "task": "gec",
            "source": source, "targets": [target],
        })
    return rows


def make_simp_en(rng):
    rows = []
    for i in range(100):
        noun = EN_NOUNS[rng.randrange(len(EN_NOUNS))]
        adj1, adj2 = rng.sample(EN_ADJS, 2)
        verb = EN_VERBS[rng.randrange(len(EN_VERBS))]
        obj = EN_OBJS[rng.randrange(len(EN_OBJS))]
        source = (
            f"the {noun} , which was {adj1} and {adj2} , "
            f"{verb} {obj} in considerable detail ."
        )
        ref1 = f"the {noun} {verb} {obj} ."
        ref2 = f"the {adj1} {noun} {verb} {obj} ."
        rows.append({
            "id": f"simp_en_{i:04d}", "lang": "en", "task": "simplification",
            "source": source, "targets": [ref1, ref2],
        })
    return rows


def reword(text):
    return " ".join(SYNONYMS.get(tok, tok) for tok in text.split())


def make_para_en(rng):
    rows = []
    for i in range(100):
        noun = EN_NOUNS[rng.randrange(len(EN_NOUNS))]
        adj = EN_ADJS[rng.randrange(len(EN_ADJS))]
        verb = EN_VERBS[rng.randrange(len(EN_VERBS))]
        obj = EN_OBJS[rng.randrange(len(EN_OBJS))]
        source = f"the {adj} {noun} {verb} {obj} ."
        rows.append({
            "id": f"para_en_{i:04d}", "lang": "en", "task": "paraphrasing",
            "source": source, "targets": [reword(source)],
        })
    return rows


def write_jsonl(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    rng = random.Random(20240817)
    OUT.mkdir(parents=True, exist_ok=True)

    de_rows, m2_blocks = make_gec_de(rng)
    write_jsonl(de_rows, OUT / "gec_de.jsonl")
    (OUT / "gec_de.m2").write_text(
        "\n\n".join(m2_blocks) + "\n", encoding="utf-8"
    )
    write_jsonl(make_gec_es(rng), OUT / "gec_es.jsonl")
    write_jsonl(make_gec_ja(rng), OUT / "gec_ja.jsonl")
    write_jsonl(make_simp_en(rng), OUT / "simp_en.jsonl")
    write_jsonl(make_para_en(rng), OUT / "para_en.jsonl")
    for name in ("gec_de.jsonl", "gec_de.m2", "gec_es.jsonl", "gec_ja.jsonl",
                 "simp_en.jsonl", "para_en.jsonl"):
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
