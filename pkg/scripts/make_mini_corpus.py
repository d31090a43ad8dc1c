#!/usr/bin/env python3
"""Author the bundled synthetic mini corpus and report its cosine structure.

Planted design, per event: a two-article wire core sharing four verbatim
sentences, a three-article periphery trio sharing two verbatim sentences
(each trio member keeps one core wire sentence, so the periphery hangs
off the core), and one isolate.  One trio member carries a
sentiment-shifted near-duplicate of a wire sentence for the threshold
sweep.  Core/periphery domain roles flip between the two events so the
cross-event consensus clustering is non-trivial.

All non-identical sentence pairs must stay below the designed cosine gap
(0.6) under the default toy provider so the tau1 sweep plateaus above it.
"""

import itertools
import json
from pathlib import Path

from stylegraph.providers import SentimentScorer, ToyEmbeddingProvider, load_lexicon

DATA = Path(__file__).resolve().parents[1] / "src" / "stylegraph" / "data"

ARTICLES = [
    # --- event: bridge-closure -------------------------------------------------
    # core: b-ap-1 + b-mh-1; periphery trio: b-db-1, b-db-2, b-lb-1; isolate: b-ap-2
    {
        "id": "b-ap-1",
        "domain": "apnews.com",
        "event_id": "bridge-closure",
        "title": "Harbor bridge shut for cable checks",
        "body": (
            "The harbor bridge will remain closed through the weekend while engineers "
            "inspect the support cables. "
            "City officials said the closure follows a routine inspection that found "
            "corrosion on two cables. "
            "Commuters are being rerouted to the ferry terminal during the repairs. "
            "Click the link to subscribe to our daily briefing. "
            "The bridge carries roughly forty thousand vehicles each day."
        ),
        "bias_label": "center",
        "url": "https://apnews.com/bridge-closure",
    },
    {
        "id": "b-mh-1",
        "domain": "morningherald.com",
        "event_id": "bridge-closure",
        "title": "Commuters rerouted as span stays dark",
        "body": (
            "The harbor bridge will remain closed through the weekend while engineers "
            "inspect the support cables. "
            "City officials said the closure follows a routine inspection that found "
            "corrosion on two cables. "
            "Commuters are being rerouted to the ferry terminal during the repairs. "
            "The bridge carries roughly forty thousand vehicles each day."
        ),
        "bias_label": "left-center",
        "url": "https://morningherald.com/span-dark",
    },
    {
        "id": "b-db-1",
        "domain": "dailybugle.com",
        "event_id": "bridge-closure",
        "title": "Weekend shutdown hits harbor crossing",
        "body": (
            "The harbor bridge will remain closed through the weekend while engineers "
            "inspect the support cables. "
            "Dock workers described double shifts unloading diverted freight. "
            "The transit authority urged patience while the inspection continues. "
            "Opposition council members demanded a full audit of the maintenance budget."
        ),
        "bias_label": "right",
        "url": "https://dailybugle.com/shutdown",
    },
    {
        "id": "b-db-2",
        "domain": "dailybugle.com",
        "event_id": "bridge-closure",
        "title": "Ferry queues swell at dawn",
        "body": (
            "The harbor bridge will remain closed through the weekend while engineers "
            "inspect the support cables. "
            "Vendors near the dock reported brisk sales of coffee and umbrellas. "
            "The transit authority urged patience while the inspection continues. "
            "Opposition council members demanded a full audit of the maintenance budget."
        ),
        "bias_label": "right",
        "url": "https://dailybugle.com/ferry-queues",
    },
    {
        "id": "b-lb-1",
        "domain": "libertybeacon.com",
        "event_id": "bridge-closure",
        "title": "What nobody admits about the span",
        "body": (
            "The harbor bridge will remain closed through the weekend while engineers "
            "inspect the support cables. "
            "City bureaucrats admitted the closure follows an alarming survey that "
            "exposed dangerous corrosion on both cables. "
            "The transit authority urged patience while the inspection continues. "
            "Opposition council members demanded a full audit of the maintenance budget."
        ),
        "bias_label": "far-right",
        "url": "https://libertybeacon.com/span-truth",
    },
    {
        "id": "b-ap-2",
        "domain": "apnews.com",
        "event_id": "bridge-closure",
        "title": "Transit ridership climbs across region",
        "body": (
            "Rail ridership rose nine percent compared with last spring, the U.S. transit "
            "survey shows. "
            "Planners credit new express lines and cheaper monthly passes."
        ),
        "bias_label": "center",
        "url": "https://apnews.com/ridership",
    },
    # --- event: reservoir-advisory ---------------------------------------------
    # core: r-ap-1 + r-db-1; periphery trio: r-mh-1, r-mh-2, r-lb-1; isolate: r-db-2
    {
        "id": "r-ap-1",
        "domain": "apnews.com",
        "event_id": "reservoir-advisory",
        "title": "Bacteria advisory covers east side taps",
        "body": (
            "Health inspectors issued a boil-water notice for neighborhoods served by "
            "the east reservoir. "
            "Laboratory samples taken Tuesday showed elevated bacteria levels near the "
            "intake pipe. "
            "Crews flushed the mains overnight and reopened two pumping stations. "
            "Bottled water distribution continues at the fairgrounds until further notice."
        ),
        "bias_label": "center",
        "url": "https://apnews.com/boil-notice",
    },
    {
        "id": "r-db-1",
        "domain": "dailybugle.com",
        "event_id": "reservoir-advisory",
        "title": "Tap water scare grips east neighborhoods",
        "body": (
            "Health inspectors issued a boil-water notice for neighborhoods served by "
            "the east reservoir. "
            "Laboratory samples taken Tuesday showed elevated bacteria levels near the "
            "intake pipe. "
            "Crews flushed the mains overnight and reopened two pumping stations. "
            "Bottled water distribution continues at the fairgrounds until further notice."
        ),
        "bias_label": "right",
        "url": "https://dailybugle.com/water-scare",
    },
    {
        "id": "r-mh-1",
        "domain": "morningherald.com",
        "event_id": "reservoir-advisory",
        "title": "East side told to boil tap water",
        "body": (
            "Health inspectors issued a boil-water notice for neighborhoods served by "
            "the east reservoir. "
            "Nurses at the clinic fielded calls from anxious parents all morning. "
            "A spokesman promised the filtration upgrade would reach the council agenda. "
            "Residents packed the gallery to demand answers from the waterworks board."
        ),
        "bias_label": "left-center",
        "url": "https://morningherald.com/boil-tap",
    },
    {
        "id": "r-mh-2",
        "domain": "morningherald.com",
        "event_id": "reservoir-advisory",
        "title": "Fairgrounds line stretches around block",
        "body": (
            "Health inspectors issued a boil-water notice for neighborhoods served by "
            "the east reservoir. "
            "Volunteers handed out jugs from flatbed trucks through the afternoon. "
            "A spokesman promised the filtration upgrade would reach the council agenda. "
            "Residents packed the gallery to demand answers from the waterworks board."
        ),
        "bias_label": "left-center",
        "url": "https://morningherald.com/fairgrounds-line",
    },
    {
        "id": "r-lb-1",
        "domain": "libertybeacon.com",
        "event_id": "reservoir-advisory",
        "title": "Questions pile up at the waterworks",
        "body": (
            "Health inspectors issued a boil-water notice for neighborhoods served by "
            "the east reservoir. "
            "Lab samples logged Monday found troubling bacteria counts close to that "
            "intake pipe, raising concern. "
            "A spokesman promised the filtration upgrade would reach the council agenda. "
            "Residents packed the gallery to demand answers from the waterworks board."
        ),
        "bias_label": "far-right",
        "url": "https://libertybeacon.com/waterworks",
    },
    {
        "id": "r-db-2",
        "domain": "dailybugle.com",
        "event_id": "reservoir-advisory",
        "title": "Bond vote looms for aging water plant",
        "body": (
            "Council members will weigh a bond measure for the filtration plant next "
            "month. "
            "Engineers estimate the upgrade would take three construction seasons."
        ),
        "bias_label": "right",
        "url": "https://dailybugle.com/bond-vote",
    },
]


def main() -> None:
    out = DATA / "mini_corpus.jsonl"
    with out.open("w", encoding="utf-8") as fh:
        for rec in ARTICLES:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(f"wrote {out} ({len(ARTICLES)} articles)")

    # report the cosine/sentiment structure under the default toy provider
    from stylegraph.corpus import clean_and_segment, load_corpus, load_patterns, load_wordlist

    junk = load_patterns(DATA / "junk_patterns.txt")
    abbr = load_wordlist(DATA / "abbreviations.txt")
    scorer = SentimentScorer(load_lexicon(DATA / "lexicon.tsv"))
    provider = ToyEmbeddingProvider(dim=64, seed=0)

    events = load_corpus(out)
    for event_id, articles in events.items():
        sentences = []
        for art in articles:
            sentences.extend(clean_and_segment(art, junk, abbr))
        texts = [s.text for s in sentences]
        vecs = provider.embed_batch(texts)
        uniq = sorted(set(texts))
        print(f"\n== {event_id}: {len(texts)} sentences, {len(uniq)} unique")
        worst = {}
        for (i, a), (j, b) in itertools.combinations(enumerate(texts), 2):
            if a == b:
                continue
            c = float(vecs[i] @ vecs[j])
            key = (min(a, b), max(a, b))
            worst[key] = max(worst.get(key, -1.0), c)
        top = sorted(worst.items(), key=lambda kv: -kv[1])[:4]
        for (a, b), c in top:
            print(f"  cos={c:+.3f}  {a[:46]!r} | {b[:46]!r}")
        print("  nonzero sentiments:")
        seen = set()
        for s in sentences:
            comp = scorer.score(s.text)
            if abs(comp) > 1e-9 and s.text not in seen:
                seen.add(s.text)
                print(f"    {comp:+.4f}  {s.text[:64]!r}")


if __name__ == "__main__":
    main()
