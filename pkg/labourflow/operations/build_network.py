"""Network construction: ingest, merge, build and report."""

import logging
import os
from typing import Any, Dict, Optional

import pandas as pd

from ..config.settings import Config
from ..models.manifest import ArtifactManifest
from ..network.assortativity import assortativity
from ..network.builder import build_network, complete_network, network_stats
from ..network.ingest import aggregate_occupations
from ..network.merging import merge_occupations, merged_codes
from ..storage.artifact_store import ArtifactStore, digest_inputs
from ..storage.csv_io import export_network, load_hierarchy, load_regions, load_transitions, load_wages


logger = logging.getLogger(__name__)

NETWORK_PREFIX = "network"
MERGE_MAP_FILE = os.path.join(NETWORK_PREFIX, "merge_map.csv")
REPORT_FILE = os.path.join(NETWORK_PREFIX, "report.json")
MANIFEST_FILE = os.path.join(NETWORK_PREFIX, "manifest.json")
EDGES_FILE = os.path.join(NETWORK_PREFIX, "edges.csv")
NODES_FILE = os.path.join(NETWORK_PREFIX, "nodes.json")


class BuildNetworkOperation:
    """Handles construction of the regional occupational mobility network."""

    def __init__(self, config: Config, output_dir: str):
        self.config = config
        self.store = ArtifactStore(output_dir)

    def build(self, normalization: Optional[str] = None, no_friction: Optional[bool] = None,
              min_presence: Optional[int] = None) -> Dict[str, Any]:
        """Ingest transitions, merge sparse occupations, build and export the network."""
        self.config.override('network', normalization=normalization, no_friction=no_friction,
                             min_presence=min_presence)
        normalization = self.config.normalization
        no_friction = self.config.no_friction
        min_presence = self.config.min_presence
        paths = {name: self.config.inputs[name] for name in ("transitions", "hierarchy", "regions", "wages")}
        for name in ("transitions", "hierarchy", "regions"):
            self.config.require_input(name)
        logger.info(f"Building network from {paths['transitions']}")

        regions = load_regions(paths['regions'])
        hierarchy = load_hierarchy(paths['hierarchy'])
        counts = load_transitions(paths['transitions'], regions, hierarchy)
        merged, merge_map = merge_occupations(counts, hierarchy, min_presence)

        if no_friction:
            network = complete_network(merged.node_index)
            logger.info(f"Using the complete network over {len(network)} nodes")
        else:
            network = build_network(merged, normalization)

        national = build_network(aggregate_occupations(merged), normalization)
        report = {
            "Stats": network_stats(network),
            "Assortativity": {
                "Region": assortativity(network, "region"),
                "OccupationGroup": assortativity(network, "broad_group"),
                "NationalOccupationGroup": assortativity(national, "broad_group"),
            },
            "Merged": {
                "Occupations": len(counts.occupations),
                "AfterMerge": len(merged.occupations),
                "Rewritten": merged_codes(merge_map),
                "TotalTransitions": merged.total(),
            },
        }

        written = export_network(self.store, network, load_wages(paths['wages']), prefix=NETWORK_PREFIX)
        merge_frame = pd.DataFrame(sorted(merge_map.items()), columns=["original", "merged"])
        self.store.write_frame(MERGE_MAP_FILE, merge_frame)
        self.store.write_json(REPORT_FILE, report)

        outputs = [written["edges"], written["nodes"], MERGE_MAP_FILE, REPORT_FILE]
        manifest = ArtifactManifest(
            kind="network",
            inputs=digest_inputs(paths),
            outputs=self.store.digests(outputs),
            parameters={
                "normalization": normalization,
                "no_friction": no_friction,
                "min_presence": min_presence,
            },
        )
        self.store.write_json(MANIFEST_FILE, manifest.to_dict())
        logger.info(
            f"Network built: {report['Stats']['nodes']} nodes, {report['Stats']['edges']} edges"
        )
        return {
            'report': report,
            'outputs': outputs,
            'output_dir': self.store.root,
        }
