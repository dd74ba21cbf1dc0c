"""Merging sparse occupations into hybrid parent codes."""

import logging
from collections import defaultdict
from typing import Dict, List, Tuple

from ..errors import ConstraintError, InputError
from ..models.network import Edge, OccRegion, TransitionCounts
from .builder import components
from .hierarchy import OccupationHierarchy


logger = logging.getLogger(__name__)


def apply_merge_map(counts: TransitionCounts, merge_map: Dict[str, str]) -> TransitionCounts:
    """Rewrite counts onto merged occupation codes, summing merged pairs."""
    regions = counts.regions
    merged: Dict[Edge, int] = defaultdict(int)
    for (source, dest), count in counts.counts.items():
        try:
            new_source = OccRegion(merge_map[source.occupation_id], source.region_id)
            new_dest = OccRegion(merge_map[dest.occupation_id], dest.region_id)
        except KeyError as e:
            raise InputError(f"Occupation {e.args[0]!r} missing from merge map")
        merged[(new_source, new_dest)] += count

    occupations = sorted({merge_map[occ] for occ in counts.occupations})
    node_index = sorted(OccRegion(occ, region) for occ in occupations for region in regions)
    return TransitionCounts(counts=dict(merged), node_index=node_index)


def _pick_candidate(offending: Dict[str, int], hierarchy: OccupationHierarchy, reason: str) -> str:
    """Deepest code first, then smallest volume, then lexicographic."""
    ordered = sorted(offending, key=lambda code: (-len(code), offending[code], code))
    candidate = ordered[0]
    if hierarchy.parent(candidate) is None:
        raise ConstraintError(
            f"Occupation hierarchy exhausted ({reason}); offending codes: {', '.join(sorted(offending))}"
        )
    return candidate


def merge_occupations(counts: TransitionCounts, hierarchy: OccupationHierarchy,
                      min_presence: int = 1) -> Tuple[TransitionCounts, Dict[str, str]]:
    """Merge occupations into parent codes until every occupation reaches
    ``min_presence`` volume in every region and the network is connected.

    Returns the rewritten counts and the old -> new code mapping; the mapping
    also carries an identity entry for every resulting code.
    """
    if min_presence < 1:
        raise InputError(f"min_presence must be >= 1, got {min_presence}")
    missing = [occ for occ in counts.occupations if occ not in hierarchy]
    if missing:
        raise InputError(f"Occupations missing from hierarchy: {', '.join(missing)}")

    regions = counts.regions
    mapping = {occ: occ for occ in counts.occupations}
    volume: Dict[str, Dict[str, int]] = defaultdict(lambda: {region: 0 for region in regions})
    for node, node_volume in counts.node_volume().items():
        volume[node.occupation_id][node.region_id] += node_volume

    def merge(code: str, reason: str):
        # the parent becomes a hybrid code absorbing every current code below it
        parent = hierarchy.parent(code)
        family = sorted(c for c in volume if c != parent and parent in hierarchy.ancestors(c))
        logger.debug(f"Merging {', '.join(family)} into {parent} ({reason})")
        for member in family:
            for region, amount in volume.pop(member).items():
                volume[parent][region] += amount
        for original, target in mapping.items():
            if target in family:
                mapping[original] = parent

    merges = 0
    while True:
        sparse = {
            code: sum(by_region.values())
            for code, by_region in volume.items()
            if min(by_region.values()) < min_presence
        }
        if sparse:
            merge(_pick_candidate(sparse, hierarchy, "presence"), "presence")
            merges += 1
            continue

        current = apply_merge_map(counts, mapping)
        parts = components(current.to_matrix())
        if len(parts) <= 1:
            break
        outside = {current.node_index[i].occupation_id for part in parts[1:] for i in part}
        disconnected = {code: sum(volume[code].values()) for code in outside}
        merge(_pick_candidate(disconnected, hierarchy, "connectivity"), "connectivity")
        merges += 1

    merge_map = dict(mapping)
    for code in set(mapping.values()):
        merge_map.setdefault(code, code)
    merge_map = dict(sorted(merge_map.items()))

    logger.info(
        f"Merged {merges} times: {len(counts.occupations)} occupations -> "
        f"{len(set(mapping.values()))} across {len(regions)} regions"
    )
    return current, merge_map


def merged_codes(merge_map: Dict[str, str]) -> List[str]:
    """Codes that were rewritten to a different code."""
    return sorted(code for code, target in merge_map.items() if code != target)
