"""Regenerate every bundled fixture deterministically.

Run from the repository root:

    python fixtures/generate.py

Outputs land next to this script. Everything is seeded, so reruns are
byte-identical; the test suite freezes oracle values computed from these
files and will fail loudly if they drift.

What gets built
---------------
evocation/synth_a|b|c.tsv   three synthetic free-association datasets over
                            the same designed pairs: 500 pseudo-word pairs
                            left to the catch-all relation plus 200 real-word
                            pairs covered by graph edges. Per-pair asymmetry
                            is a shared latent value plus per-dataset noise,
                            realized as integer counts with fixed per-cue
                            totals (a filler response pads every cue to the
                            same total, so count ratios are exactly the
                            conditional ratios).
evocation/micro.tsv         ten hand-set pairs over corpus words, used by
                            the scorer micro-run.
conceptnet_sample.csv       assertion rows for the 200 relation pairs and a
                            few for the micro pairs, plus non-English and
                            deliberately malformed rows.
corpus/doc0*.txt            1,000 synthetic paragraphs (8 documents) built
                            from sentence templates; designated dense pairs
                            co-occur often, one paragraph exceeds the length
                            ceiling on purpose.
corpus_small/doc*.txt       200 paragraphs, dense-pair heavy, for the
                            masked-LM micro-run.
vectors/toy_static.txt      8-d vectors over the real-word vocabulary (with
                            a count/dim header line).
vectors/toy_word.txt        word/context matrices of a dual-space table
vectors/toy_ctx.txt         (no header).
sim_gold/wordsim.tsv        30 graded similarity pairs, 3 of them over
                            pseudo words nothing can score.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

HERE = Path(__file__).parent

CUE_TOTAL = 400  # every cue's response counts sum to this, filler included
FILLER = "zzblank"  # response-only padding word; never a cue, never a pair

# ---------------------------------------------------------------------------
# vocabulary

REAL_WORDS = """
dog cat horse cow sheep goat pig chicken duck goose rabbit mouse fox wolf
bear deer lion tiger monkey elephant whale fish bird snake frog spider bee
ant butterfly apple pear plum peach grape lemon orange banana cherry berry
bread butter cheese milk cream sugar salt pepper honey rice corn wheat bean
soup meat egg cake pie tea coffee wine beer water juice table chair bed sofa
lamp door window wall floor roof kitchen garden fence gate yard house barn
shed hut tent castle tower bridge road street path river lake sea ocean
island mountain hill valley forest tree leaf branch root flower grass stone
rock sand soil cloud rain snow wind storm thunder sun moon star sky dawn
dusk night morning summer winter autumn spring king queen prince knight
doctor nurse teacher student farmer baker butcher tailor smith sailor
soldier hunter painter singer dancer writer reader judge lawyer clerk guard
boy girl man woman child baby friend neighbor guest crowd ship boat canoe
wagon cart train truck car bicycle wheel engine sail anchor rope chain nail
hammer axe saw knife spoon fork plate cup bowl jar bottle basket box bag
sack coat hat shoe boot glove scarf ribbon button cloth wool silk leather
book page letter word story song music drum bell horn flute fire smoke ash
flame candle lantern torch coal iron gold silver copper glass paper ink
clock watch mirror comb brush soap towel ladder broom bucket barrel paris
france rome italy london england madrid spain berlin germany market shop
school church mill farm field meadow orchard vineyard harbor port dock
library money coin
""".split()

DENSE_PAIRS = [
    ("dog", "cat"),
    ("bread", "butter"),
    ("doctor", "nurse"),
    ("river", "lake"),
    ("paris", "france"),
    ("rome", "italy"),
    ("table", "chair"),
    ("sun", "moon"),
    ("king", "queen"),
    ("coffee", "tea"),
    ("rain", "cloud"),
    ("ship", "sea"),
    ("apple", "tree"),
    ("book", "library"),
    ("fire", "smoke"),
]

FACTS = [
    "the capital of france is paris .",
    "the capital of italy is rome .",
    "the capital of england is london .",
    "the capital of spain is madrid .",
    "the capital of germany is berlin .",
    "a dog chases the cat around the yard .",
    "bread goes with butter at every meal .",
    "the doctor works with the nurse all night .",
    "the king sits beside the queen .",
    "smoke rises from the fire .",
]

CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aeiou"


def pseudo_words(rng: random.Random, n: int, taken: set[str]) -> list[str]:
    out: list[str] = []
    seen = set(taken)
    while len(out) < n:
        word = "".join(
            rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(3)
        )
        if word not in seen:
            seen.add(word)
            out.append(word)
    return out


# ---------------------------------------------------------------------------
# evocation trio

RELATIONS = {
    # relation -> (count, mean log asymmetry along the edge direction)
    "isA": (40, 3.0),
    "atLocation": (40, 1.6),
    "synonym": (40, -1.6),
    "antonym": (40, 0.0),
    "distinctFrom": (40, 0.0),
}
DATASET_NOISE = {"synth_a": 0.894, "synth_b": 0.772, "synth_c": 0.596}
COUNT_BASE = 30
COUNT_CAP = 150


def realize_counts(log_asym: float) -> tuple[int, int]:
    c_fwd = round(COUNT_BASE * math.exp(log_asym / 2.0))
    c_rev = round(COUNT_BASE * math.exp(-log_asym / 2.0))
    clamp = lambda c: max(1, min(COUNT_CAP, c))
    return clamp(c_fwd), clamp(c_rev)


def build_designs(rng: random.Random):
    """Plan every pair: words, orientation, latent asymmetry, relation."""
    dense_words = {w for p in DENSE_PAIRS for w in p}
    pool = [w for w in REAL_WORDS if w not in dense_words]

    slots = pool * 2
    rng.shuffle(slots)
    relation_pairs: list[tuple[str, str, str, float]] = []
    used: set[tuple[str, str]] = set()
    for relation, (count, mu) in RELATIONS.items():
        made = 0
        while made < count:
            head = slots.pop()
            tail = slots.pop()
            key = (min(head, tail), max(head, tail))
            if head == tail or key in used:
                slots.insert(0, head)
                slots.insert(0, tail)
                continue
            used.add(key)
            offset = rng.gauss(0.0, 0.5)
            relation_pairs.append((head, tail, relation, mu + offset))
            made += 1

    pseudo = pseudo_words(rng, 1000, taken=set(REAL_WORDS))
    related_pairs: list[tuple[str, str, float]] = []
    for i in range(500):
        a, b = sorted((pseudo[2 * i], pseudo[2 * i + 1]))
        related_pairs.append((a, b, rng.gauss(0.0, 1.0)))
    return relation_pairs, related_pairs


def write_dataset(
    name: str,
    rng: random.Random,
    relation_pairs,
    related_pairs,
    drop: set[tuple[str, str]],
) -> None:
    sigma = DATASET_NOISE[name]
    counts: dict[str, dict[str, int]] = {}

    def add(cue: str, response: str, count: int) -> None:
        counts.setdefault(cue, {})[response] = count

    for head, tail, _relation, latent in relation_pairs:
        log_asym = latent + rng.gauss(0.0, sigma)
        c_fwd, c_rev = realize_counts(log_asym)
        add(head, tail, c_fwd)
        add(tail, head, c_rev)
    for a, b, latent in related_pairs:
        # draw noise before the drop check so the three datasets stay on a
        # shared random stream for the pairs they do share
        log_asym = latent + rng.gauss(0.0, sigma)
        if (a, b) in drop:
            continue
        c_fwd, c_rev = realize_counts(log_asym)
        add(a, b, c_fwd)
        add(b, a, c_rev)

    path = HERE / "evocation" / f"{name}.tsv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for cue in sorted(counts):
            total = sum(counts[cue].values())
            assert total <= CUE_TOTAL - 10, (cue, total)
            for response in sorted(counts[cue]):
                fh.write(f"{cue}\t{response}\t{counts[cue][response]}\n")
            fh.write(f"{cue}\t{FILLER}\t{CUE_TOTAL - total}\n")
    print(f"wrote {path}")


def write_micro_dataset() -> None:
    rows = []
    for k, (a, b) in enumerate(DENSE_PAIRS[:10]):
        fwd = 12 + 9 * k  # spread of asymmetries, both directions observed
        rev = 30 - 2 * k
        rows.append((a, b, fwd))
        rows.append((b, a, rev))
    path = HERE / "evocation" / "micro.tsv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for cue, response, count in rows:
            fh.write(f"{cue}\t{response}\t{count}\n")
            fh.write(f"{cue}\t{FILLER}\t{CUE_TOTAL - count}\n")
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# assertion dump

MICRO_EDGES = [
    ("AtLocation", "paris", "france"),
    ("AtLocation", "rome", "italy"),
    ("Antonym", "sun", "moon"),
    ("Antonym", "king", "queen"),
]


def write_conceptnet(rng: random.Random, relation_pairs) -> None:
    def row(relation: str, head: str, tail: str, lang: str = "en") -> str:
        rel_uri = f"/r/{relation}"
        h = f"/c/{lang}/{head}"
        t = f"/c/{lang}/{tail}"
        if rng.random() < 0.3:  # sense-tagged concept URIs parse the same
            h += "/n"
        meta = '{"dataset": "/d/synthetic", "weight": %.1f}' % (1.0 + rng.random() * 4)
        return f"/a/[{rel_uri}/,{h}/,{t}/]\t{rel_uri}\t{h}\t{t}\t{meta}"

    cap = lambda r: r[0].upper() + r[1:]
    lines = []
    for head, tail, relation, _ in relation_pairs:
        lines.append(row(cap(relation), head, tail))
    for relation, head, tail in MICRO_EDGES:
        lines.append(row(relation, head, tail))
    # duplicates must collapse to one ordered entry
    lines.append(row("IsA", relation_pairs[0][0], relation_pairs[0][1]))
    # other languages are filtered out
    for k in range(10):
        lines.append(row("RelatedTo", f"mot{k}", f"wort{k}", lang="fr"))
    # multi-segment relation URI keeps only the last segment
    lines.append(
        "/a/[/r/dbpedia/genre/,/c/en/song/,/c/en/music/]\t/r/dbpedia/genre"
        '\t/c/en/song\t/c/en/music\t{"weight": 1.0}'
    )
    # malformed rows: too few fields, broken URIs
    lines.append("/a/broken\t/r/IsA\t/c/en/only_three_fields")
    lines.append('not_a_uri\t!!\t??\t/c/en/x\t{"weight": 1.0}')
    lines.append("")
    rng.shuffle(lines)

    path = HERE / "conceptnet_sample.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(line for line in lines if line) + "\n")
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# corpus

PAIR_TEMPLATES = [
    "The {a} stood near the {b} all morning .",
    "Every {a} here belongs with some {b} .",
    "A {a} and a {b} appeared by the road .",
    "People brought the {a} to the {b} before dusk .",
    "That {a} kept another {a} away from the {b} .",
    "Nobody saw the {b} until the {a} arrived .",
    "One old {a} rested beside the {b} .",
]

FILLER_TEMPLATES = [
    "The {w1} waited while the {w2} did nothing at all .",
    "Some {w1} lay under the {w2} near the {w3} .",
    "It isn't a {w1} , just a {w2} .",
    "A well-known {w1} passed the {w2} quietly .",
    "They don't keep the {w1} with the {w2} anymore .",
    "The {w1} , the {w2} and the {w3} were all there .",
]


def make_sentence(rng: random.Random, pair_pool) -> str:
    roll = rng.random()
    if roll < 0.30:
        a, b = rng.choice(pair_pool)
        if rng.random() < 0.5:
            a, b = b, a
        return rng.choice(PAIR_TEMPLATES).format(a=a, b=b)
    if roll < 0.50:
        a, b = rng.choice(DENSE_PAIRS)
        if rng.random() < 0.5:
            a, b = b, a
        return rng.choice(PAIR_TEMPLATES).format(a=a, b=b)
    if roll < 0.58:
        return rng.choice(FACTS)
    w = rng.sample(REAL_WORDS, 3)
    return rng.choice(FILLER_TEMPLATES).format(w1=w[0], w2=w[1], w3=w[2])


def write_corpus(
    dirname: str,
    rng: random.Random,
    n_paragraphs: int,
    docs: int,
    pair_pool,
    oversized: bool,
) -> None:
    out = HERE / dirname
    out.mkdir(exist_ok=True)
    for stale in out.glob("*.txt"):
        stale.unlink()
    per_doc = n_paragraphs // docs
    for d in range(docs):
        paragraphs = []
        for _ in range(per_doc):
            n_sent = rng.randint(1, 4)
            paragraphs.append(" ".join(make_sentence(rng, pair_pool) for _ in range(n_sent)))
        if oversized and d == docs - 1:
            mono = " ".join(
                rng.choice(PAIR_TEMPLATES).format(a="fire", b="smoke") for _ in range(300)
            )
            paragraphs.append(mono)  # > 10,000 chars, must get truncated
        path = out / f"doc{d:02d}.txt"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n\n".join(paragraphs) + "\n")
    print(f"wrote {docs} documents under {out}")


# ---------------------------------------------------------------------------
# vectors and similarity gold

def write_vectors(rng: random.Random, relation_pairs) -> None:
    dim = 8
    out = HERE / "vectors"
    out.mkdir(exist_ok=True)
    base: dict[str, list[float]] = {
        w: [rng.gauss(0.0, 1.0) for _ in range(dim)] for w in REAL_WORDS
    }
    # pull pair words toward each other so nearby words project higher
    for head, tail, _rel, _ in relation_pairs:
        vh, vt = base[head], base[tail]
        mix = [0.6 * x + 0.4 * y for x, y in zip(vh, vt)]
        base[tail] = [y + 0.3 * (m - y) + rng.gauss(0, 0.05) for y, m in zip(vt, mix)]
    for a, b in DENSE_PAIRS:
        va, vb = base[a], base[b]
        base[b] = [y + 0.35 * (x - y) + rng.gauss(0, 0.05) for x, y in zip(va, vb)]

    def dump(path: Path, table: dict[str, list[float]], header: bool) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            if header:
                fh.write(f"{len(table)} {dim}\n")
            for word in sorted(table):
                comps = " ".join(f"{x:.6f}" for x in table[word])
                fh.write(f"{word} {comps}\n")
        print(f"wrote {path}")

    dump(out / "toy_static.txt", base, header=True)
    word_space = {w: [x + rng.gauss(0, 0.08) for x in v] for w, v in base.items()}
    ctx_space = {w: [x + rng.gauss(0, 0.08) for x in v] for w, v in base.items()}
    dump(out / "toy_word.txt", word_space, header=False)
    dump(out / "toy_ctx.txt", ctx_space, header=False)


def write_sim_gold(rng: random.Random) -> None:
    out = HERE / "sim_gold"
    out.mkdir(exist_ok=True)
    rows = [(a, b, 7.0 + rng.random() * 3.0) for a, b in DENSE_PAIRS[:12]]
    words = [w for w in REAL_WORDS if w not in {x for p in DENSE_PAIRS for x in p}]
    for _ in range(15):
        a, b = rng.sample(words, 2)
        rows.append((a, b, rng.random() * 6.0))
    for k in range(3):  # nothing can score these; they count as excluded
        rows.append((f"vupozi{k}", f"gelamu{k}", 5.0))
    rng.shuffle(rows)
    path = out / "wordsim.tsv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b, rating in rows:
            fh.write(f"{a}\t{b}\t{rating:.2f}\n")
    print(f"wrote {path}")


# ---------------------------------------------------------------------------

def main() -> None:
    (HERE / "evocation").mkdir(exist_ok=True)
    design_rng = random.Random(20240811)
    relation_pairs, related_pairs = build_designs(design_rng)

    drops = {
        "synth_a": set(),
        "synth_b": {(a, b) for a, b, _ in related_pairs[7:10]},
        "synth_c": {(a, b) for a, b, _ in related_pairs[490:498]},
    }
    for name in ("synth_a", "synth_b", "synth_c"):
        write_dataset(
            name,
            random.Random(f"counts:{name}"),
            relation_pairs,
            related_pairs,
            drops[name],
        )
    write_micro_dataset()
    write_conceptnet(random.Random(5150), relation_pairs)

    real_pair_pool = [(h, t) for h, t, _, _ in relation_pairs]
    write_corpus("corpus", random.Random(11), 1000, 8, real_pair_pool, oversized=True)
    write_corpus("corpus_small", random.Random(23), 200, 2, DENSE_PAIRS, oversized=False)
    write_vectors(random.Random(77), relation_pairs)
    write_sim_gold(random.Random(99))


if __name__ == "__main__":
    main()
