"""TF-IDF corpus export with classifier-derived relevant features."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.linear_model import LogisticRegression
from sklearn.multiclass import OneVsRestClassifier

from . import formats

DEFAULT_CATEGORIES = (
    "misc.forsale",
    "rec.autos",
    "sci.med",
    "comp.graphics",
    "talk.politics.mideast",
)
DEFAULT_SELECTED = 153

# Vectorizer settings, also written to export.json.
TFIDF_SETTINGS = {"sublinear_tf": False, "norm": "l2", "stop_words": "english", "lowercase": True}

# Inverse regularization strengths tried, smallest first, until the sparse
# classifier keeps enough features.
C_GRID = tuple(float(c) for c in np.geomspace(0.05, 1e4, 40))

MATRIX_FILE = "matrix.mtx"
LABELS_FILE = "labels.txt"
ANNOTATIONS_FILE = "annotations.txt"
VOCABULARY_FILE = "vocabulary.txt"
HEADER_FILE = "export.json"
CONFIG_FILE = "experiment.json"


class SourceMissing(RuntimeError):
    pass


@dataclass
class CorpusExport:
    matrix: sp.csr_matrix
    labels: list[str]
    vocabulary: list[str]
    annotations: dict[str, list[int]]
    # export-space indices chosen by the classifier
    selected: list[int]
    settings: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def validate(self) -> None:
        n, d = self.matrix.shape
        if len(self.vocabulary) != d:
            raise formats.FormatError(f"matrix has {d} columns but the vocabulary has {len(self.vocabulary)} tokens")
        if len(self.labels) != n:
            raise formats.FormatError(f"matrix has {n} rows but there are {len(self.labels)} labels")
        if len(set(self.vocabulary)) != d:
            raise formats.FormatError("vocabulary tokens are not unique")
        for name, features in self.annotations.items():
            formats.check_annotation(name, features, d)

    def write(self, out_dir: Path) -> dict[str, Path]:
        self.validate()
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {
            "matrix": out_dir / MATRIX_FILE,
            "labels": out_dir / LABELS_FILE,
            "annotations": out_dir / ANNOTATIONS_FILE,
            "vocabulary": out_dir / VOCABULARY_FILE,
            "header": out_dir / HEADER_FILE,
            "config": out_dir / CONFIG_FILE,
        }
        formats.write_matrix(paths["matrix"], self.matrix)
        formats.write_lines(paths["labels"], self.labels)
        formats.write_annotations(paths["annotations"], self.annotations, self.dim)
        formats.write_lines(paths["vocabulary"], self.vocabulary)
        header = dict(self.settings, rows=self.matrix.shape[0], dim=self.dim, selected=self.selected)
        paths["header"].write_text(json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        paths["config"].write_text(json.dumps(self.runner_config(), indent=2) + "\n", encoding="utf-8")
        return paths

    def runner_config(self) -> dict:
        """A DATASET experiment over this export for the ffbandit runner."""
        return {
            "scenario": "DATASET",
            "algorithms": ["OFUL", "FF-OFUL"],
            "horizon": min(1000, self.matrix.shape[0]),
            "trials": 20,
            "replacement": False,
            "reward": {"model": "LOGISTIC_BINARY"},
            "dataset": {
                "matrix": MATRIX_FILE,
                "labels": LABELS_FILE,
                "annotations": ANNOTATIONS_FILE,
                "theta": "random_action",
            },
        }


def load_source(categories: Sequence[str], source: Path | None) -> tuple[list[str], list[str]]:
    """Documents and their category names, in a fixed order.

    ``source`` is a directory with one subdirectory of text files per
    category, as in the unpacked 20news-bydate archives. Without it the
    corpus is fetched through scikit-learn.
    """
    if source is not None:
        return _load_directory(categories, Path(source))
    try:
        from sklearn.datasets import fetch_20newsgroups

        data = fetch_20newsgroups(
            subset="all",
            categories=list(categories),
            remove=("headers", "footers", "quotes"),
            shuffle=False,
        )
    except Exception as e:
        raise SourceMissing(
            f"could not fetch the 20 Newsgroups corpus ({e}). Download and unpack "
            "20news-bydate.tar.gz, then pass --source pointing at a directory with one "
            "subdirectory per category."
        ) from e
    order = np.argsort(data.filenames, kind="stable")
    names = data.target_names
    return [data.data[i] for i in order], [names[data.target[i]] for i in order]


def _load_directory(categories: Sequence[str], source: Path) -> tuple[list[str], list[str]]:
    docs, labels = [], []
    for cat in categories:
        files = sorted(p for p in (source / cat).rglob("*") if p.is_file()) if (source / cat).is_dir() else []
        if not files:
            raise SourceMissing(f"no documents for category `{cat}` under {source}; expected {source / cat}/<files>")
        for p in files:
            docs.append(p.read_bytes().decode("latin-1"))
            labels.append(cat)
    return docs, labels


def _sparse_classifier(x: sp.csr_matrix, y: np.ndarray, want: int, seed: int):
    """The least regularised-away L1 one-vs-rest model whose union support
    reaches ``want`` features (or the densest one tried)."""
    model = None
    for c in C_GRID:
        model = OneVsRestClassifier(
            LogisticRegression(penalty="l1", solver="liblinear", C=c, random_state=seed, max_iter=1000)
        ).fit(x, y)
        if np.count_nonzero(np.abs(_coefs(model)).max(axis=0)) >= want:
            return model, c
    return model, C_GRID[-1]


def _coefs(model) -> np.ndarray:
    coefs = np.vstack([est.coef_ for est in model.estimators_])
    # two classes share a single binary estimator
    return np.vstack([coefs, coefs]) if coefs.shape[0] == 1 else coefs


def prepare_corpus(
    categories: Sequence[str] = DEFAULT_CATEGORIES,
    target_dim: int | None = 1000,
    seed: int = 0,
    source: Path | None = None,
    n_selected: int = DEFAULT_SELECTED,
) -> CorpusExport:
    """Builds the export.

    With ``target_dim`` the feature space is the ``n_selected`` strongest
    classifier features plus a seeded uniform fill up to ``target_dim``.
    With ``target_dim=None`` the full vocabulary is kept.
    """
    if len(set(categories)) != len(categories) or len(categories) < 2:
        raise ValueError("need at least two distinct categories")
    docs, labels = load_source(categories, source)
    vectorizer = TfidfVectorizer(**TFIDF_SETTINGS)
    x = vectorizer.fit_transform(docs).tocsr()
    vocab = vectorizer.get_feature_names_out()
    y = np.array([categories.index(lbl) for lbl in labels])

    model, c = _sparse_classifier(x, y, n_selected, seed)
    coefs = _coefs(model)
    strength = np.abs(coefs).max(axis=0)
    support = np.flatnonzero(strength)
    # strongest first, ties toward the lower index
    ranked = support[np.lexsort((support, -strength[support]))]

    if target_dim is None:
        columns = np.arange(x.shape[1])
        selected = np.sort(ranked)
    else:
        if not n_selected <= target_dim <= x.shape[1]:
            raise ValueError(f"need {n_selected} <= target_dim <= {x.shape[1]}, got {target_dim}")
        selected = np.sort(ranked[:n_selected])
        rest = np.setdiff1d(np.arange(x.shape[1]), selected)
        rng = np.random.default_rng(seed)
        fill = rng.choice(rest, size=target_dim - len(selected), replace=False)
        columns = np.sort(np.concatenate([selected, fill]))

    position = {int(j): i for i, j in enumerate(columns)}
    annotations = {}
    for cat, row in zip(categories, coefs):
        annotations[cat] = sorted(position[int(j)] for j in selected if row[j] != 0.0)

    reduced = x[:, columns].tocsr()
    keep = np.flatnonzero(reduced.getnnz(axis=1))
    reduced = reduced[keep]
    settings = {
        "categories": list(categories),
        "seed": seed,
        "tfidf": TFIDF_SETTINGS,
        "classifier": {"penalty": "l1", "solver": "liblinear", "C": c, "multiclass": "one-vs-rest"},
        "documents_dropped_empty": int(len(labels) - len(keep)),
        "target_dim": target_dim,
    }
    return CorpusExport(
        matrix=reduced,
        labels=[labels[i] for i in keep],
        vocabulary=[str(vocab[j]) for j in columns],
        annotations=annotations,
        selected=[position[int(j)] for j in selected],
        settings=settings,
    )
