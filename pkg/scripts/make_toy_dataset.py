"""Generate a small synthetic movie-QA corpus in the MetaQA directory layout.

The output directory gets a pipe-delimited kb.txt plus {1,2,3}-hop/qa_{split}.txt
and qa_{split}_qtype.txt files, so every kgqa subcommand can be exercised
without the real dataset. Answers are computed by executing each question's
compiled query over the generated KB (seed entity excluded), which makes the
gold translator score a perfect hit@1 on this corpus by construction.

Usage: python3 scripts/make_toy_dataset.py --out /tmp/toy_metaqa --movies 40 --seed 0
"""

import argparse
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from kgqa_logic import (
    FactBase,
    InferencePath,
    Triple,
    augment_reverse,
    dump_kb,
    execute,
    ground,
    path_to_query,
)

GENRES = ("drama", "comedy", "thriller", "horror", "romance", "documentary")
LANGUAGES = ("english", "french", "german", "spanish", "italian")
TAGS = ("noir", "cult", "classic", "indie", "remake", "silent")

# question templates per inference-path label; {e} is the seed entity
TEMPLATES = {
    1: {
        "movie_to_director": "who directed [{e}]",
        "movie_to_actor": "who acted in [{e}]",
        "movie_to_writer": "who wrote the film [{e}]",
        "movie_to_year": "when was [{e}] released",
        "movie_to_genre": "what genres is [{e}] listed under",
        "movie_to_language": "what language is [{e}] in",
        "actor_to_movie": "what films did [{e}] star in",
        "director_to_movie": "what films did [{e}] direct",
        "writer_to_movie": "what films did [{e}] write",
        "tag_to_movie": "which films are described by [{e}]",
    },
    2: {
        "movie_to_director_to_movie": "what films share a director with [{e}]",
        "movie_to_actor_to_movie": "what films share an actor with [{e}]",
        "movie_to_writer_to_movie": "what films share a writer with [{e}]",
        "actor_to_movie_to_director": "who directed the films starring [{e}]",
        "actor_to_movie_to_genre": "what genres describe the films starring [{e}]",
        "director_to_movie_to_actor": "who starred in films directed by [{e}]",
        "director_to_movie_to_year": "when were the films directed by [{e}] released",
        "writer_to_movie_to_actor": "who acted in films written by [{e}]",
    },
    3: {
        "movie_to_director_to_movie_to_actor": "who starred in films sharing a director with [{e}]",
        "movie_to_actor_to_movie_to_director": "who directed films sharing an actor with [{e}]",
        "movie_to_writer_to_movie_to_genre": "what genres describe films sharing a writer with [{e}]",
        "actor_to_movie_to_director_to_movie": "what films came from the directors of films starring [{e}]",
        "writer_to_movie_to_actor_to_movie": "what films star the actors of films written by [{e}]",
        "director_to_movie_to_actor_to_movie": "what films star actors from films directed by [{e}]",
    },
}


@dataclass(frozen=True)
class CorpusConfig:
    out: Path
    movies: int = 40
    seed: int = 0
    # questions per hop for train/dev/test
    split_sizes: dict = field(
        default_factory=lambda: {"train": 60, "dev": 15, "test": 15}
    )


def build_kb(cfg: CorpusConfig, rng: random.Random) -> FactBase:
    movies = [f"Movie {i:03d}" for i in range(cfg.movies)]
    directors = [f"Director {i:02d}" for i in range(max(3, cfg.movies // 5))]
    writers = [f"Writer {i:02d}" for i in range(max(3, cfg.movies // 4))]
    actors = [f"Actor {i:02d}" for i in range(max(5, cfg.movies // 2))]

    facts = set()
    for movie in movies:
        facts.add(Triple(movie, "directed_by", rng.choice(directors)))
        for writer in rng.sample(writers, rng.randint(1, 2)):
            facts.add(Triple(movie, "written_by", writer))
        for actor in rng.sample(actors, rng.randint(2, 4)):
            facts.add(Triple(movie, "starred_actors", actor))
        facts.add(Triple(movie, "release_year", str(rng.randint(1960, 2020))))
        facts.add(Triple(movie, "in_language", rng.choice(LANGUAGES)))
        for genre in rng.sample(GENRES, rng.randint(1, 2)):
            facts.add(Triple(movie, "has_genre", genre))
        for tag in rng.sample(TAGS, rng.randint(0, 2)):
            facts.add(Triple(movie, "has_tags", tag))
        if rng.random() < 0.5:
            facts.add(Triple(movie, "has_imdb_rating", f"{rng.uniform(4, 9):.1f}"))
            facts.add(Triple(movie, "has_imdb_votes", str(rng.randint(100, 99999))))
    return FactBase.from_facts(facts)


def seed_pool(fb: FactBase, head: str) -> list[str]:
    """Entities usable as the bracketed question entity for a given head node type."""
    by_prefix = {
        "movie": "Movie ",
        "actor": "Actor ",
        "director": "Director ",
        "writer": "Writer ",
    }
    if head == "tag":
        return sorted(e for e in fb.entities if e in TAGS)
    prefix = by_prefix[head]
    return sorted(e for e in fb.entities if e.startswith(prefix))


def generate_questions(
    fb_augmented: FactBase, hop: int, total: int, rng: random.Random
) -> list[tuple[str, str, tuple[str, ...]]]:
    """Return (question, label, answers) rows, each with a non-empty answer set."""
    candidates = []
    for label in sorted(TEMPLATES[hop]):
        path = InferencePath.from_label(label)
        for entity in seed_pool(fb_augmented, path.nodes[0]):
            candidates.append((label, entity))
    rng.shuffle(candidates)

    rows = []
    for label, entity in candidates:
        if len(rows) == total:
            break
        query = ground(path_to_query(InferencePath.from_label(label)), entity)
        answers = execute(query, fb_augmented, exclude_seed=True).answer_set()
        if not answers:
            continue
        question = TEMPLATES[hop][label].format(e=entity)
        rows.append((question, label, tuple(sorted(answers))))
    if len(rows) < total:
        raise SystemExit(
            f"only {len(rows)} non-empty {hop}-hop questions available, "
            f"need {total}; increase --movies"
        )
    return rows


def write_corpus(cfg: CorpusConfig) -> None:
    rng = random.Random(cfg.seed)
    fb = build_kb(cfg, rng)
    fb_augmented = augment_reverse(fb)

    cfg.out.mkdir(parents=True, exist_ok=True)
    with (cfg.out / "kb.txt").open("w", encoding="utf-8") as handle:
        fact_count = dump_kb(fb, handle)
    print(f"kb.txt: {fact_count} facts")

    split_order = ("train", "dev", "test")
    for hop in (1, 2, 3):
        total = sum(cfg.split_sizes[s] for s in split_order)
        rows = generate_questions(fb_augmented, hop, total, rng)
        hop_dir = cfg.out / f"{hop}-hop"
        hop_dir.mkdir(exist_ok=True)
        start = 0
        for split in split_order:
            chunk = rows[start : start + cfg.split_sizes[split]]
            start += len(chunk)
            with (hop_dir / f"qa_{split}.txt").open("w", encoding="utf-8") as qa:
                with (hop_dir / f"qa_{split}_qtype.txt").open(
                    "w", encoding="utf-8"
                ) as qtype:
                    for question, label, answers in chunk:
                        qa.write(f"{question}\t{'|'.join(answers)}\n")
                        qtype.write(f"{label}\n")
            print(f"{hop}-hop {split}: {len(chunk)} questions")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--movies", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--train", type=int, default=60, help="questions per hop in the train split"
    )
    parser.add_argument("--dev", type=int, default=15)
    parser.add_argument("--test", type=int, default=15)
    args = parser.parse_args(argv)
    cfg = CorpusConfig(
        out=args.out,
        movies=args.movies,
        seed=args.seed,
        split_sizes={"train": args.train, "dev": args.dev, "test": args.test},
    )
    write_corpus(cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
