"""netseal command line.

Exit codes: 0 clean/match, 1 tamper/alarm/unauthorized, 2 usage or config error.
The update token is read from an environment variable, never from argv.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys
from dataclasses import dataclass
from pathlib import Path

from netseal import scenario
from netseal.centrality import DEFAULT_TOL, NotConverged, compute_all
from netseal.digest import format_value
from netseal.graph import GraphError, karate_club, read_edge_list
from netseal.ledger import (ConfigError, LedgerCorrupt, LedgerStore, Status, Unauthorized, Verdict,
                            node_safe_hash, run_cycle, update)

EXIT_OK, EXIT_ALARM, EXIT_USAGE = 0, 1, 2


@dataclass
class Config:
    graph_path: Path | None
    ledger_path: Path | None
    precision: int = 6
    eigen_tol: float = DEFAULT_TOL
    token_env: str = "NETSEAL_TOKEN"
    secret_env: str = "NETSEAL_SECRET"

    def __post_init__(self):
        if self.precision < 1:
            raise ConfigError("precision must be >= 1")
        if self.eigen_tol <= 0:
            raise ConfigError("eigen tolerance must be positive")
        if self.ledger_path is None and self.graph_path is not None:
            self.ledger_path = self.graph_path.with_name(self.graph_path.name + ".ledger")

    @property
    def token(self) -> str | None:
        return os.environ.get(self.token_env)

    @property
    def secret(self) -> str | None:
        return os.environ.get(self.secret_env)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load_graph(cfg: Config, allow_default: bool = False):
    if cfg.graph_path is None:
        if allow_default:
            return karate_club()
        raise ConfigError("--graph is required")
    return read_edge_list(cfg.graph_path)


def cmd_init(cfg: Config, force: bool = False) -> int:
    if cfg.graph_path is None:
        _err("--graph is required")
        return EXIT_USAGE
    store = LedgerStore(cfg.ledger_path)
    if store.exists() and not force:
        _err(f"ledger exists: {cfg.ledger_path} (use --force to replace)")
        return EXIT_USAGE
    try:
        g = read_edge_list(cfg.graph_path)
        ledger = node_safe_hash(g, tol=cfg.eigen_tol)
        store.commit(ledger)
    except (OSError, GraphError, NotConverged) as exc:
        _err(str(exc))
        return EXIT_USAGE
    print(f"global={ledger.global_digest.hex}")
    print(f"nodes={ledger.node_count} edges={g.edge_count}")
    return EXIT_OK


def cmd_verify(cfg: Config, authorized: bool = False) -> int:
    if cfg.graph_path is None:
        _err("--graph is required")
        return EXIT_USAGE
    try:
        result = run_cycle(cfg.graph_path, cfg.ledger_path, token=cfg.token, secret=cfg.secret,
                           authorized=authorized, tol=cfg.eigen_tol)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if result.status is Status.OK:
        print("MATCH")
        return EXIT_OK
    if result.status is Status.UPDATED:
        print(f"UPDATED global={result.ledger.global_digest.hex}")
        return EXIT_OK
    report = result.report
    print(f"{report.verdict.value}: {report.details}")
    print(report.render())
    return EXIT_ALARM


def cmd_update(cfg: Config) -> int:
    if cfg.graph_path is None:
        _err("--graph is required")
        return EXIT_USAGE
    store = LedgerStore(cfg.ledger_path)
    if not store.exists():
        _err(f"no ledger at {cfg.ledger_path}; run init first")
        return EXIT_USAGE
    try:
        g = read_edge_list(cfg.graph_path)
    except (OSError, GraphError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    try:
        previous = store.load()
    except LedgerCorrupt:
        previous = None
    try:
        new = update(g, previous, cfg.token, cfg.secret, store=store, tol=cfg.eigen_tol)
    except Unauthorized:
        print("unauthorized")
        return EXIT_ALARM
    except (OSError, NotConverged) as exc:
        _err(str(exc))
        return EXIT_USAGE
    print(f"global={new.global_digest.hex}")
    if previous is not None:
        print(f"previous={previous.global_digest.hex}")
    return EXIT_OK


COLUMNS = ("degree", "betweenness", "harmonic", "eccentricity", "eigenvector")


def cmd_centrality(cfg: Config, node: int | None = None) -> int:
    try:
        g = _load_graph(cfg, allow_default=True)
        table = compute_all(g, tol=cfg.eigen_tol)
    except (OSError, GraphError, NotConverged) as exc:
        _err(str(exc))
        return EXIT_USAGE
    records = list(table)
    if node is not None:
        records = [r for r in records if r.node == node]
        if not records:
            _err(f"no such node {node}")
            return EXIT_USAGE
    print("\t".join(("node",) + COLUMNS))
    for r in records:
        print("\t".join([str(r.node)] + [format_value(x, cfg.precision) for x in r.values()]))
    return EXIT_OK


def cmd_simulate(cfg: Config, which: str, seed: int = 0, plot_dir: Path | None = None) -> int:
    try:
        g = _load_graph(cfg, allow_default=True)
    except (OSError, GraphError) as exc:
        _err(str(exc))
        return EXIT_USAGE

    if which == "original":
        report = scenario.scenario_original(g)
        print(report.render())
        return EXIT_OK if report.verdict is Verdict.MATCH else EXIT_ALARM

    if which == "valid":
        edits = scenario.random_edit_sequence(g, seed)
        # in-process replay: a throwaway secret stands in for the deployment secret
        session = secrets.token_hex(16)
        for e in edits:
            print(f"edit={e}")
        report = scenario.scenario_valid_modification(g, edits, session, session)
        print(report.render())
        print(f"seed={seed}")
        return EXIT_OK if report.verdict is Verdict.MATCH else EXIT_ALARM

    if which == "tamper":
        edit = scenario.random_tamper(g, seed)
        report = scenario.scenario_tampered(g, [edit])
        print(f"edit={edit}")
        print(report.render())
        print(f"seed={seed}")
        return EXIT_OK if report.verdict is not Verdict.MATCH else EXIT_ALARM

    result = scenario.deletion_sweep(g)
    result.seed = seed
    for line in result.lines():
        print(line)
    if plot_dir is not None:
        plot_dir.mkdir(parents=True, exist_ok=True)
        from netseal.report import plot_sweep
        plot_sweep(result, plot_dir / "sweep.png")
    return EXIT_OK if result.detection_rate == 1.0 else EXIT_ALARM


def parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"invalid --sizes {text!r}") from None
    if not sizes or any(n < 2 for n in sizes):
        raise ConfigError(f"--sizes must be integers >= 2, got {text!r}")
    return sizes


def cmd_bench(cfg: Config, sizes: str, seed: int = 0, plot_dir: Path | None = None) -> int:
    try:
        ns = parse_sizes(sizes)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    from netseal.report import bench_table, plot_bench
    rows = scenario.bench(ns, seed=seed)
    print(bench_table(rows))
    if plot_dir is not None:
        plot_dir.mkdir(parents=True, exist_ok=True)
        plot_bench(rows, plot_dir / "bench.png")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", type=Path, help="edge-list file")
    common.add_argument("--ledger", type=Path, help="ledger file (default: <graph>.ledger)")
    common.add_argument("--precision", type=int, default=6, help="decimal places for display")
    common.add_argument("--eigen-tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--token-env", default="NETSEAL_TOKEN",
                        help="environment variable holding the update token")
    common.add_argument("--secret-env", default="NETSEAL_SECRET",
                        help="environment variable holding the configured update secret")

    p = argparse.ArgumentParser(prog="netseal", description="Centrality fingerprints and tamper checks.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("init", parents=[common], help="fingerprint a network and write its ledger")
    s.add_argument("--force", action="store_true")
    s = sub.add_parser("verify", parents=[common], help="check a network against its ledger")
    s.add_argument("--authorized", action="store_true",
                   help="declare changes authorized; updates the ledger if the token is valid")
    sub.add_parser("update", parents=[common], help="accept the current network (token required)")
    s = sub.add_parser("centrality", parents=[common], help="print the centrality table")
    s.add_argument("--node", type=int)
    s = sub.add_parser("simulate", parents=[common], help="replay a scenario")
    s.add_argument("--scenario", choices=["original", "valid", "tamper", "sweep"], default="original")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--plot-dir", type=Path)
    s = sub.add_parser("bench", parents=[common], help="time comparison vs recomputation")
    s.add_argument("--sizes", default="1000,2000,4000,8000")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--plot-dir", type=Path)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = Config(args.graph, args.ledger, args.precision, args.eigen_tol, args.token_env, args.secret_env)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.command == "init":
        return cmd_init(cfg, args.force)
    if args.command == "verify":
        return cmd_verify(cfg, args.authorized)
    if args.command == "update":
        return cmd_update(cfg)
    if args.command == "centrality":
        return cmd_centrality(cfg, args.node)
    if args.command == "simulate":
        return cmd_simulate(cfg, args.scenario, args.seed, args.plot_dir)
    return cmd_bench(cfg, args.sizes, args.seed, args.plot_dir)


if __name__ == "__main__":
    sys.exit(main())
