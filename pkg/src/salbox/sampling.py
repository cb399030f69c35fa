"""Positive/negative pair sampling over patient metadata.

A positive shares the query's patient and disease; negatives carry the
same disease but belong to other patients. Draws are seeded so training
batches and tests are reproducible.
"""

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class MetadataRecord:
    """One image's identity, owning patient, and disease labels."""

    image_id: str
    patient_id: str
    labels: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))


def sample_pairs(
    table: list[MetadataRecord],
    query_id: str,
    disease: str,
    k: int,
    seed: int,
) -> tuple[str, list[str]]:
    """Draw one positive and k negatives for a query image.

    The positive is chosen uniformly among the query patient's other
    images carrying `disease`; negatives are drawn uniformly without
    replacement among other patients' images carrying `disease`.
    Identical (table, arguments, seed) always produce the identical draw.

    Raises NoPositiveSampleError / InsufficientNegativesError when the
    eligible sets are too small.
    """
    from salbox.errors import InsufficientNegativesError, NoPositiveSampleError

    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    by_id: dict[str, MetadataRecord] = {}
    for rec in table:
        if rec.image_id in by_id:
            raise ValueError(f"duplicate image_id {rec.image_id!r} in metadata table")
        by_id[rec.image_id] = rec
    query = by_id.get(query_id)
    if query is None:
        raise ValueError(f"query image {query_id!r} not found in metadata table")
    if disease not in query.labels:
        raise ValueError(f"query image {query_id!r} does not carry label {disease!r}")

    positives = [
        rec.image_id
        for rec in table
        if rec.patient_id == query.patient_id
        and disease in rec.labels
        and rec.image_id != query_id
    ]
    negatives = [
        rec.image_id
        for rec in table
        if rec.patient_id != query.patient_id and disease in rec.labels
    ]
    if not positives:
        raise NoPositiveSampleError(
            f"no other image of patient {query.patient_id!r} carries {disease!r}"
        )
    if len(negatives) < k:
        raise InsufficientNegativesError(k, len(negatives))

    rng = random.Random(seed)
    positive = rng.choice(positives)
    negative_draw = rng.sample(negatives, k)
    return positive, negative_draw
