import re

import pytest

from shake_bake.cli import data_path, default_lexicon
from shake_bake.grammar import bag_from_words, load_bag_file

FIXTURE_WORDS = ("the", "a", "fierce", "little", "brown", "big", "tame", "yellow", "cat", "fox", "likes")


@pytest.fixture(scope="session")
def lex():
    return default_lexicon()


@pytest.fixture
def make_bag(lex):
    def make(words, target="np"):
        if isinstance(words, str):
            words = words.split()
        return bag_from_words(words, lex, target)
    return make


@pytest.fixture
def mary_bag():
    return lambda: load_bag_file(data_path("mary.bag"))


def anon(text: str) -> str:
    """Print variables as ``_`` so printed categories compare across runs."""
    return re.sub(r"_G\d+", "_", text)


def random_phrase_words(rng, max_len=7):
    """Mostly well-formed bags, sometimes with one word swapped out, so that
    random tests see solvable and nearly solvable inputs alike."""
    def np():
        adjs = rng.sample(["fierce", "big", "little", "tame", "brown", "yellow"], rng.randint(0, 2))
        return [rng.choice(["the", "a"])] + adjs + [rng.choice(["cat", "fox"])]

    for _ in range(100):
        if rng.random() < 0.5:
            words, target = np(), "np"
        else:
            words, target = np() + ["likes"] + np(), "s"
        if rng.random() < 0.3:
            words[rng.randrange(len(words))] = rng.choice(FIXTURE_WORDS)
        if len(words) <= max_len:
            rng.shuffle(words)
            return words, target
    return ["a", "fox"], "np"
