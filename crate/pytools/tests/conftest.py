from pathlib import Path

import numpy as np
import pytest

CATEGORIES = ("misc.forsale", "rec.autos", "sci.med", "comp.graphics", "talk.politics.mideast")


def write_corpus(root: Path, docs_per_category: int = 120, seed: int = 3) -> Path:
    """A 20news-style directory: uniform background words, a block of
    topic words per category, and a shared pool of words whose frequencies
    differ by category."""
    rng = np.random.default_rng(seed)
    background = [f"bg{i:04d}" for i in range(2500)]
    shared = [f"sh{i:03d}" for i in range(100)]
    for c, cat in enumerate(CATEGORIES):
        topic = [f"t{c}w{i:02d}" for i in range(60)]
        profile = rng.dirichlet(np.full(len(shared), 0.3))
        folder = root / cat
        folder.mkdir(parents=True)
        for n in range(docs_per_category):
            words = list(rng.choice(background, size=60)) + list(rng.choice(topic, size=15)) + list(rng.choice(shared, size=25, p=profile))
            rng.shuffle(words)
            (folder / f"{n:05d}").write_text(" ".join(words), encoding="latin-1")
    return root


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    return write_corpus(tmp_path_factory.mktemp("news"))


def runner_binary() -> Path | None:
    root = Path(__file__).resolve().parents[2] / "target"
    for profile in ("release", "debug"):
        candidate = root / profile / "ffbandit"
        if candidate.is_file():
            return candidate
    return None
