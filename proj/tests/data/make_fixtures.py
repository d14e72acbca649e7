#!/usr/bin/env python3
"""Writes the JSONL fixtures used by the test suites.

fix1/   four pages, two categories under "root".
noise/  four themes, each with two subcategories of three pages. Every theme
        word occurs on two pages of each subcategory of its theme; every
        noise word occurs on one page of each theme, so both kinds have
        df = 4 and f = 1 on every page that holds them. Each page also has
        one rare word of its own theme.
        eval.jsonl holds 4 classes x 5 documents; a document has one rare
        word of its class, three noise words and a word no page contains.

Run from anywhere; output goes next to this script.
"""

import json
import random
from itertools import combinations
from pathlib import Path

HERE = Path(__file__).resolve().parent


def write_jsonl(path, records):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for rec in records:
            out.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def fix1():
    texts = {
        "p1": "alpha alpha beta gamma",
        "p2": "beta delta epsilon",
        "p3": "beta gamma delta",
        "p4": "beta epsilon",
    }
    cats = {"p1": ["c1"], "p2": ["c1"], "p3": ["c2"], "p4": ["c2"]}
    pages = [
        {
            "id": pid,
            "title": pid.upper(),
            "text": text,
            "links_out": [q for q in texts if q != pid],
            "categories": cats[pid],
        }
        for pid, text in texts.items()
    ]
    categories = [
        {"id": "root", "title": "Root", "parents": []},
        {"id": "c1", "title": "C1", "parents": ["root"]},
        {"id": "c2", "title": "C2", "parents": ["root"]},
    ]
    write_jsonl(HERE / "fix1" / "pages.jsonl", pages)
    write_jsonl(HERE / "fix1" / "categories.jsonl", categories)


THEMES = ["astro", "botany", "cuisine", "dance"]
PAGES_PER_SUB = 3
NOISE_WORDS = [f"noise{k}" for k in range(2 * PAGES_PER_SUB)]


def theme_words(theme):
    pairs = list(combinations(range(PAGES_PER_SUB), 2))
    words = []
    for i, a in enumerate(pairs):
        for j, b in enumerate(pairs):
            words.append((f"{theme}{i}{j}", a, b))
    return words


def noise():
    pages, categories = [], [{"id": "root", "title": "Root", "parents": []}]
    all_ids = []
    for t, theme in enumerate(THEMES):
        categories.append({"id": theme, "title": theme.title(), "parents": ["root"]})
        words = theme_words(theme)
        for s in range(2):
            sub = f"{theme}_s{s}"
            categories.append({"id": sub, "title": sub, "parents": [theme]})
            for k in range(PAGES_PER_SUB):
                pos = s * PAGES_PER_SUB + k
                tokens = [w for w, a, b in words if k in (a, b)[s]]
                tokens.append(NOISE_WORDS[(pos + t) % len(NOISE_WORDS)])
                tokens.append(f"{theme}rare{pos}")
                tokens += ["common", "filler"]
                pid = f"{theme}_p{pos}"
                all_ids.append(pid)
                pages.append({"id": pid, "title": pid, "text": " ".join(tokens), "categories": [sub]})
    for page in pages:
        page["links_out"] = [q for q in all_ids if q != page["id"]]
    write_jsonl(HERE / "noise" / "pages.jsonl", pages)
    write_jsonl(HERE / "noise" / "categories.jsonl", categories)

    rng = random.Random(2024)
    docs = []
    for theme in THEMES:
        for d in range(5):
            tokens = [f"{theme}rare{d}"] + rng.sample(NOISE_WORDS, 3) + ["unseen"]
            rng.shuffle(tokens)
            docs.append({"doc_id": f"{theme}_d{d}", "label": theme, "text": " ".join(tokens)})
    write_jsonl(HERE / "noise" / "eval.jsonl", docs)


if __name__ == "__main__":
    fix1()
    noise()
