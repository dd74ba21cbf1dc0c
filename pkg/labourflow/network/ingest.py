"""Transition record ingestion."""

import logging
from collections import defaultdict
from typing import Dict, Iterable, Optional, Sequence

from ..errors import InputError
from ..models.network import Edge, OccRegion, TransitionCounts
from .hierarchy import OccupationHierarchy


logger = logging.getLogger(__name__)


def _parse_count(value, row_number: int) -> int:
    if isinstance(value, bool):
        raise InputError(f"Row {row_number}: count must be an integer, got {value!r}")
    try:
        count = int(str(value).strip())
    except ValueError:
        raise InputError(f"Row {row_number}: count must be an integer, got {value!r}")
    if count < 0:
        raise InputError(f"Row {row_number}: negative count {count}")
    return count


def ingest_transitions(records: Iterable[Sequence], regions: Iterable[str],
                       hierarchy: Optional[OccupationHierarchy] = None) -> TransitionCounts:
    """Aggregate ``(source_occ, source_region, dest_occ, dest_region, count)`` records.

    Duplicate pairs are summed. Every observed occupation is declared in every
    region of the manifest, so nodes without flow still appear in the index.
    """
    region_set = set(regions)
    if not region_set:
        raise InputError("Region manifest is empty")

    counts: Dict[Edge, int] = defaultdict(int)
    occupations = set()
    endpoints = set()
    rows = 0

    for row_number, record in enumerate(records, start=1):
        rows += 1
        if len(record) != 5:
            raise InputError(f"Row {row_number}: expected 5 fields, got {len(record)}")
        source_occ, source_region, dest_occ, dest_region = (str(v).strip() for v in record[:4])
        count = _parse_count(record[4], row_number)

        for region in (source_region, dest_region):
            if region not in region_set:
                raise InputError(f"Row {row_number}: unknown region {region!r}")
        for occupation in (source_occ, dest_occ):
            if not occupation:
                raise InputError(f"Row {row_number}: empty occupation code")
            if hierarchy is not None and occupation not in hierarchy:
                raise InputError(f"Row {row_number}: occupation {occupation!r} not in hierarchy")

        source = OccRegion(source_occ, source_region)
        dest = OccRegion(dest_occ, dest_region)
        occupations.update((source_occ, dest_occ))
        endpoints.update((source, dest))
        if count > 0:
            counts[(source, dest)] += count

    if rows == 0:
        raise InputError("No transition records supplied")

    declared = {OccRegion(occ, region) for occ in occupations for region in region_set}
    node_index = sorted(endpoints | declared)
    logger.info(
        f"Ingested {rows} records: {len(counts)} positive pairs over {len(node_index)} nodes"
    )
    return TransitionCounts(counts=dict(counts), node_index=node_index)


def aggregate_occupations(counts: TransitionCounts) -> TransitionCounts:
    """National occupational counts: the region dimension summed out.

    Nodes keep the ``OccRegion`` type with an empty region id.
    """
    national: Dict[Edge, int] = defaultdict(int)
    for (source, dest), count in counts.counts.items():
        national[(OccRegion(source.occupation_id, ""), OccRegion(dest.occupation_id, ""))] += count
    nodes = sorted({OccRegion(occ, "") for occ in counts.occupations})
    return TransitionCounts(counts=dict(national), node_index=nodes)
