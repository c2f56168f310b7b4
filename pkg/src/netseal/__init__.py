"""Tamper evidence for network structure via hashed node centralities."""

from netseal.centrality import (CentralityRecord, CentralityTable, NotConverged, compute_all,
                                eigenvector_centrality)
from netseal.digest import Digest160, fingerprint, sha1, textual_merge
from netseal.graph import Graph, karate_club, parse_edge_list
from netseal.ledger import (Ledger, LedgerStore, TamperReport, Verdict, node_safe_hash, run_cycle,
                            tamper_check, update)

__all__ = [
    "CentralityRecord", "CentralityTable", "Digest160", "Graph", "Ledger", "LedgerStore",
    "NotConverged", "TamperReport", "Verdict", "compute_all", "eigenvector_centrality",
    "fingerprint", "karate_club", "node_safe_hash", "parse_edge_list", "run_cycle", "sha1",
    "tamper_check", "textual_merge", "update",
]
