#!/usr/bin/env python3
"""Writes the annotated-context and HotpotQA-style fixtures with computed offsets."""

import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def annotate(cid, sentences, triples, coref=(), nes=None):
    context = " ".join(sentences)
    starts, pos = [], 0
    for s in sentences:
        starts.append(pos)
        pos += len(s) + 1

    def span(sent, phrase, after=0):
        off = sentences[sent].find(phrase, after)
        if off < 0:
            raise ValueError(f"{phrase!r} not in sentence {sent}")
        b = starts[sent] + off
        return {"sent": sent, "start": b, "end": b + len(phrase)}, off + len(phrase)

    out_triples = []
    for sent, subj, rel, obj in triples:
        s, after = span(sent, subj)
        r, after = span(sent, rel, after)
        o, _ = span(sent, obj, after)
        out_triples.append({"subject": s, "relation": r, "object": o})
    doc = {
        "id": cid,
        "context": context,
        "sentences": [{"start": b, "end": b + len(s)} for b, s in zip(starts, sentences)],
        "triples": out_triples,
        "coref_clusters": [[span(sent, p)[0] for sent, p in cluster] for cluster in coref],
    }
    if nes is not None:
        doc["named_entities"] = [dict(span(sent, p)[0], type=t) for sent, p, t in nes]
    return doc


FIG1 = annotate(
    "fig1",
    [
        "Tom Cruise starred Top Gun in 1986.",
        "Top Gun is directed by Tony Scott.",
        "It is a 1986 action film.",
        "Tom Cruise was born in Syracuse.",
        "Tony Scott was a British film director.",
    ],
    [
        (0, "Tom Cruise", "starred", "Top Gun"),
        (1, "Top Gun", "is directed by", "Tony Scott"),
        (2, "It", "is", "a 1986 action film"),
        (3, "Tom Cruise", "was born in", "Syracuse"),
        (4, "Tony Scott", "was", "a British film director"),
    ],
    coref=[[(0, "Top Gun"), (1, "Top Gun"), (2, "It")]],
    nes=[
        (0, "Tom Cruise", "PERSON"),
        (0, "Top Gun", "WORK_OF_ART"),
        (1, "Tony Scott", "PERSON"),
        (3, "Tom Cruise", "PERSON"),
        (3, "Syracuse", "GPE"),
        (4, "Tony Scott", "PERSON"),
    ],
)

STAR_CRUISE = annotate(
    "star-cruise",
    [
        "Tom Cruise starred Top Gun in 1986.",
        "Tom Cruise was born in Syracuse.",
        "Tom Cruise married Nicole Kidman in 1990.",
    ],
    [
        (0, "Tom Cruise", "starred", "Top Gun"),
        (1, "Tom Cruise", "was born in", "Syracuse"),
        (2, "Tom Cruise", "married", "Nicole Kidman"),
    ],
    nes=[
        (0, "Tom Cruise", "PERSON"),
        (0, "Top Gun", "WORK_OF_ART"),
        (1, "Syracuse", "GPE"),
        (2, "Nicole Kidman", "PERSON"),
    ],
)

STAR_HITCHCOCK = annotate(
    "star-hitchcock",
    [
        "Dial M for Murder is directed by Alfred Hitchcock.",
        "Alfred Hitchcock was born in London.",
        "Rear Window is directed by Alfred Hitchcock.",
    ],
    [
        (0, "Dial M for Murder", "is directed by", "Alfred Hitchcock"),
        (1, "Alfred Hitchcock", "was born in", "London"),
        (2, "Rear Window", "is directed by", "Alfred Hitchcock"),
    ],
    nes=[
        (0, "Dial M for Murder", "WORK_OF_ART"),
        (0, "Alfred Hitchcock", "PERSON"),
        (1, "London", "GPE"),
        (2, "Rear Window", "WORK_OF_ART"),
    ],
)


def hotpot(rid, question, answer, paragraphs, facts, qtype, triples, coref=()):
    sentences = [s for _, sents in paragraphs for s in sents]
    return {
        "_id": rid,
        "question": question,
        "answer": answer,
        "context": [[title, sents] for title, sents in paragraphs],
        "supporting_facts": [[t, i] for t, i in facts],
        "type": qtype,
        "level": "medium",
        "annotated_context": annotate(rid, sentences, triples, coref),
    }


FIG2_PARAGRAPHS = [
    ("A Perfect Murder", [
        "A Perfect Murder is a 1998 American crime film directed by Andrew Davis.",
        "It is a loose modern remake of the 1954 film Dial M for Murder.",
    ]),
    ("Dial M for Murder", [
        "Dial M for Murder is a 1954 American crime thriller film directed by Alfred Hitchcock.",
    ]),
]

FIG2 = hotpot(
    "fig2-bridge",
    "Who directed the film to which A Perfect Murder was a modern remake?",
    "Alfred Hitchcock",
    FIG2_PARAGRAPHS,
    [("A Perfect Murder", 1), ("Dial M for Murder", 0)],
    "bridge",
    [
        (0, "A Perfect Murder", "is", "a 1998 American crime film"),
        (0, "A Perfect Murder", "directed by", "Andrew Davis"),
        (1, "It", "is a loose modern remake of", "Dial M for Murder"),
        (2, "Dial M for Murder", "is", "a 1954 American crime thriller film"),
        (2, "Dial M for Murder", "directed by", "Alfred Hitchcock"),
    ],
    coref=[[(0, "A Perfect Murder"), (1, "It")]],
)

COMPARISON = hotpot(
    "cmp-first",
    "Which film came out first, Top Gun or Dial M for Murder?",
    "Dial M for Murder",
    [
        ("Top Gun", ["Top Gun is a 1986 American action film starring Tom Cruise."]),
        ("Dial M for Murder", [
            "Dial M for Murder is a 1954 American crime thriller film directed by Alfred Hitchcock.",
        ]),
    ],
    [("Top Gun", 0), ("Dial M for Murder", 0)],
    "comparison",
    [
        (0, "Top Gun", "is", "a 1986 American action film"),
        (1, "Dial M for Murder", "is", "a 1954 American crime thriller film"),
    ],
)

INTERSECTION = hotpot(
    "int-cruise",
    "Who starred in Top Gun and married Nicole Kidman?",
    "Tom Cruise",
    [
        ("Top Gun", ["Top Gun is a 1986 American action film starring Tom Cruise."]),
        ("Nicole Kidman", [
            "Nicole Kidman is an Australian actress.",
            "Kidman married Tom Cruise in 1990.",
        ]),
    ],
    [("Top Gun", 0), ("Nicole Kidman", 1)],
    "bridge",
    [
        (0, "Top Gun", "is", "a 1986 American action film"),
        (0, "Top Gun", "starring", "Tom Cruise"),
        (1, "Nicole Kidman", "is", "an Australian actress"),
        (2, "Kidman", "married", "Tom Cruise"),
    ],
    coref=[[(1, "Nicole Kidman"), (2, "Kidman")]],
)


def dump(path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def dump_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))


def main():
    for target in (HERE, HERE.parent.parent / "samples"):
        target.mkdir(exist_ok=True)
        dump(target / "fig1_context.json", FIG1)
        dump_jsonl(target / "star_contexts.jsonl", [STAR_CRUISE, STAR_HITCHCOCK])
        dump(target / "hotpot_fixture.json", [FIG2, COMPARISON, INTERSECTION])
        dump(target / "fig2_context.json", FIG2["annotated_context"])


if __name__ == "__main__":
    main()
