"""Python access to the revinv native core."""

from ._core import (
    RevinvError,
    cochran_sample_size,
    cosine_distances,
    coverage,
    dbscan,
    extract,
    fuzz,
    hdbscan,
    invariant_id,
    kmeans,
    normalize,
    normalize_message,
    pca_2d,
    run_pipeline,
    s_dbw,
    silhouette,
    tfidf,
    tokenize,
)

__all__ = [
    "RevinvError",
    "cochran_sample_size",
    "cosine_distances",
    "coverage",
    "dbscan",
    "extract",
    "fuzz",
    "hdbscan",
    "invariant_id",
    "kmeans",
    "normalize",
    "normalize_message",
    "pca_2d",
    "run_pipeline",
    "s_dbw",
    "silhouette",
    "tfidf",
    "tokenize",
]
