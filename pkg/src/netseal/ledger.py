"""Fingerprint ledgers: build (node-safe hash), compare, persist, update.

A ledger stores one SHA-1 per node row, the SHA-1 of the whole merged
table, and the SHA-1 of the canonical edge list. The file form is sealed
with a trailing ``end=<sha1 of everything before it>`` line.
"""

from __future__ import annotations

import enum
import fcntl
import hmac
import os
import re
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from netseal.centrality import DEFAULT_MAX_ITER, DEFAULT_TOL, compute_all
from netseal.digest import Digest160, serialize_row, sha1, textual_merge
from netseal.graph import Graph, GraphError, canonical_edge_list, read_edge_list

FORMAT_VERSION = 1
ALGORITHM = "sha1"
_TIME_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"
_HEX40 = re.compile(r"[0-9a-f]{40}")


class LedgerCorrupt(ValueError):
    pass


class Unauthorized(PermissionError):
    pass


class ConfigError(RuntimeError):
    pass


class Verdict(str, enum.Enum):
    MATCH = "MATCH"
    TAMPERED = "TAMPERED"
    MISSING = "MISSING"


class Status(str, enum.Enum):
    OK = "OK"
    UPDATED = "UPDATED"
    ALARM = "ALARM"


@dataclass(frozen=True)
class LedgerEntry:
    node: int
    row_digest: Digest160


@dataclass(frozen=True)
class Ledger:
    global_digest: Digest160
    entries: tuple[LedgerEntry, ...]
    edge_set_digest: Digest160
    created_at: datetime
    format_version: int = FORMAT_VERSION
    algorithm: str = ALGORITHM

    @property
    def node_count(self) -> int:
        return len(self.entries)

    def row_digests(self) -> dict[int, Digest160]:
        return {e.node: e.row_digest for e in self.entries}

    def dumps(self) -> str:
        lines = [
            f"version={self.format_version}",
            f"algorithm={self.algorithm}",
            f"nodes={self.node_count}",
            f"global={self.global_digest.hex}",
            f"edges={self.edge_set_digest.hex}",
            f"created={self.created_at.astimezone(timezone.utc).strftime(_TIME_FORMAT)}",
        ]
        lines.extend(f"{e.node} {e.row_digest.hex}" for e in self.entries)
        body = "\n".join(lines) + "\n"
        return body + f"end={sha1(body.encode('utf-8')).hex}\n"

    @classmethod
    def loads(cls, text: str) -> Ledger:
        """Parse and validate a ledger file; any defect raises LedgerCorrupt."""
        if not text.endswith("\n"):
            raise LedgerCorrupt("ledger does not end with a newline")
        cut = text.rfind("end=", 0)
        if cut <= 0 or text[cut - 1] != "\n":
            raise LedgerCorrupt("missing end seal")
        body, seal = text[:cut], text[cut:-1]
        seal_hex = seal[len("end="):]
        if not _HEX40.fullmatch(seal_hex):
            raise LedgerCorrupt("malformed end seal")
        if sha1(body.encode("utf-8")).hex != seal_hex:
            raise LedgerCorrupt("end seal does not match ledger contents")

        lines = body[:-1].split("\n")
        keys = ["version", "algorithm", "nodes", "global", "edges", "created"]
        if len(lines) < len(keys):
            raise LedgerCorrupt("truncated header")
        header = {}
        for key, line in zip(keys, lines):
            name, sep, value = line.partition("=")
            if name != key or not sep:
                raise LedgerCorrupt(f"expected header {key!r}, got {line!r}")
            header[key] = value
        if header["version"] != str(FORMAT_VERSION):
            raise LedgerCorrupt(f"unsupported ledger version {header['version']!r}")
        if header["algorithm"] != ALGORITHM:
            raise LedgerCorrupt(f"unsupported algorithm {header['algorithm']!r}")
        try:
            count = int(header["nodes"])
            created = datetime.strptime(header["created"], _TIME_FORMAT).replace(tzinfo=timezone.utc)
            global_digest = Digest160.from_hex(header["global"])
            edge_digest = Digest160.from_hex(header["edges"])
        except ValueError as exc:
            raise LedgerCorrupt(str(exc)) from None

        entries = []
        for line in lines[len(keys):]:
            node, sep, hexd = line.partition(" ")
            if not sep or not node.isdigit() or not _HEX40.fullmatch(hexd):
                raise LedgerCorrupt(f"malformed entry {line!r}")
            entries.append(LedgerEntry(int(node), Digest160.from_hex(hexd)))
        if len(entries) != count:
            raise LedgerCorrupt(f"header says {count} nodes, found {len(entries)} entries")
        if any(a.node >= b.node for a, b in zip(entries, entries[1:])):
            raise LedgerCorrupt("entries not strictly ascending")
        return cls(global_digest, tuple(entries), edge_digest, created)


@dataclass(frozen=True)
class TamperReport:
    verdict: Verdict
    affected_nodes: tuple[int, ...] = ()
    node_count_delta: int = 0
    details: str = ""

    def render(self) -> str:
        lines = [f"verdict={self.verdict.value}",
                 f"affected={','.join(map(str, self.affected_nodes))}",
                 f"node_count_delta={self.node_count_delta}"]
        if self.details:
            lines.append(f"details={self.details}")
        return "\n".join(lines)


def row_digest(r) -> Digest160:
    """SHA-1 of a row's value fields; the node id is already the entry key,
    so structurally identical nodes get identical digests."""
    return sha1(serialize_row(r).split(":", 1)[1].encode("utf-8"))


def node_safe_hash(g: Graph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> Ledger:
    table = compute_all(g, tol=tol, max_iter=max_iter)
    entries = tuple(LedgerEntry(r.node, row_digest(r)) for r in table)
    return Ledger(
        global_digest=sha1(textual_merge(table).encode("utf-8")),
        entries=entries,
        edge_set_digest=sha1(canonical_edge_list(g).encode("utf-8")),
        created_at=datetime.now(timezone.utc),
    )


def compare_ledgers(stored: Ledger, fresh: Ledger) -> TamperReport:
    """Diff two ledgers. Linear in the number of entries."""
    old = stored.row_digests()
    new = fresh.row_digests()
    affected = sorted(v for v in old.keys() | new.keys() if old.get(v) != new.get(v))
    delta = fresh.node_count - stored.node_count
    if stored.global_digest == fresh.global_digest and not affected and delta == 0:
        details = "" if stored.edge_set_digest == fresh.edge_set_digest else \
            "edge list differs but centrality fingerprint is unchanged"
        return TamperReport(Verdict.MATCH, (), 0, details)
    removed = len(old.keys() - new.keys())
    added = len(new.keys() - old.keys())
    return TamperReport(
        Verdict.TAMPERED,
        tuple(affected),
        delta,
        f"global digest {stored.global_digest.hex} != {fresh.global_digest.hex}; "
        f"{len(affected)} rows changed ({removed} nodes removed, {added} added)",
    )


def tamper_check(g: Graph, stored: Ledger, tol: float = DEFAULT_TOL) -> TamperReport:
    """Recompute the fingerprint of ``g`` and compare it with ``stored``.

    Fail-closed: an error during recomputation is reported as TAMPERED.
    """
    try:
        fresh = node_safe_hash(g, tol=tol)
    except Exception as exc:  # noqa: BLE001
        return TamperReport(Verdict.TAMPERED, (), len(g) - stored.node_count,
                            f"recomputation failed: {type(exc).__name__}: {exc}")
    return compare_ledgers(stored, fresh)


def authorize(token: str | None, secret: str | None) -> bool:
    if not token or not secret:
        return False
    return hmac.compare_digest(token.encode("utf-8"), secret.encode("utf-8"))


def update(g: Graph, stored: Ledger | None, token: str | None, secret: str | None,
           store: LedgerStore | None = None, tol: float = DEFAULT_TOL) -> Ledger:
    """Re-fingerprint ``g`` for an authorized change.

    With a ``store`` the new ledger is committed and the previous one
    archived. Nothing is written when the token is rejected.
    """
    if not authorize(token, secret):
        raise Unauthorized("update token rejected")
    new = node_safe_hash(g, tol=tol)
    if store is not None:
        store.commit(new)
    return new


class LedgerStore:
    """A ledger file plus its archive directory and lock file."""

    def __init__(self, path):
        self.path = Path(path)
        self.archive_dir = self.path.with_name(self.path.name + ".archive")
        self.lock_path = self.path.with_name(self.path.name + ".lock")

    def exists(self) -> bool:
        return self.path.exists()

    def load(self) -> Ledger:
        try:
            text = self.path.read_bytes().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise LedgerCorrupt(f"ledger is not UTF-8: {exc}") from None
        return Ledger.loads(text)

    @contextmanager
    def _locked(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.lock_path, "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def archived(self) -> list[Path]:
        if not self.archive_dir.is_dir():
            return []
        return sorted(self.archive_dir.glob("*.ledger"))

    def commit(self, ledger: Ledger) -> None:
        """Atomically replace the ledger, archiving any previous version."""
        with self._locked():
            if self.path.exists():
                self.archive_dir.mkdir(exist_ok=True)
                seqs = [int(p.stem) for p in self.archived() if p.stem.isdigit()]
                target = self.archive_dir / f"{max(seqs, default=0) + 1:06d}.ledger"
                os.replace(self.path, target)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name + ".")
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(ledger.dumps())
                os.replace(tmp, self.path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise


@dataclass(frozen=True)
class Sources:
    graph: Graph | None
    ledger: Ledger | None
    problem: TamperReport | None = None


def load_sources(graph_path, ledger_path) -> Sources:
    graph = ledger = None
    graph_error = ledger_error = None
    try:
        graph = read_edge_list(graph_path)
    except (OSError, UnicodeDecodeError, GraphError) as exc:
        graph_error = exc
    try:
        ledger = LedgerStore(ledger_path).load()
    except (OSError, LedgerCorrupt) as exc:
        ledger_error = exc

    if graph_error and ledger_error:
        problem = TamperReport(Verdict.MISSING, details="network and ledger both missing or unreadable")
    elif graph_error:
        why = "network deleted" if isinstance(graph_error, FileNotFoundError) else f"network unreadable ({graph_error})"
        problem = TamperReport(Verdict.MISSING, (), -ledger.node_count, why)
    elif ledger_error:
        why = ("ledger deleted or never initialized" if isinstance(ledger_error, FileNotFoundError)
               else f"ledger corrupt ({ledger_error})")
        problem = TamperReport(Verdict.MISSING, (), len(graph), why)
    else:
        problem = None
    return Sources(graph, ledger, problem)


def detect_missing(graph_path, ledger_path) -> TamperReport | None:
    """MISSING report when either source fails to load, else None."""
    return load_sources(graph_path, ledger_path).problem


@dataclass(frozen=True)
class CycleResult:
    status: Status
    report: TamperReport | None = None
    ledger: Ledger | None = field(default=None, repr=False)


def run_cycle(graph_path, ledger_path, token: str | None = None, secret: str | None = None,
              authorized: bool = False, tol: float = DEFAULT_TOL) -> CycleResult:
    """One pass of the monitoring loop.

    OK on a match. UPDATED when a mismatch (or a missing ledger) is declared
    ``authorized`` and the token checks out. ALARM otherwise.
    """
    graph_path, ledger_path = Path(graph_path), Path(ledger_path)
    for p in (graph_path, ledger_path):
        if p.is_dir():
            raise ConfigError(f"{p} is a directory")
    if not graph_path.exists() and not ledger_path.exists():
        raise ConfigError("neither the network file nor the ledger exists")

    store = LedgerStore(ledger_path)
    src = load_sources(graph_path, ledger_path)
    if (src.graph is not None and not ledger_path.exists() and authorized
            and authorize(token, secret)):
        new = update(src.graph, None, token, secret, store=store, tol=tol)
        return CycleResult(Status.UPDATED, None, new)
    if src.problem is not None:
        return CycleResult(Status.ALARM, src.problem)

    report = tamper_check(src.graph, src.ledger, tol=tol)
    if report.verdict is Verdict.MATCH:
        return CycleResult(Status.OK, report, src.ledger)
    if authorized:
        try:
            new = update(src.graph, src.ledger, token, secret, store=store, tol=tol)
        except Unauthorized:
            return CycleResult(Status.ALARM, TamperReport(
                report.verdict, report.affected_nodes, report.node_count_delta,
                report.details + "; update token rejected"))
        return CycleResult(Status.UPDATED, report, new)
    return CycleResult(Status.ALARM, report)
