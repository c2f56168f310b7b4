import random
from datetime import timezone

import pytest

from conftest import KARATE_GOLDEN
from netseal.digest import sha1
from netseal.graph import Graph, add_edge, canonical_edge_list, parse_edge_list, remove_edge, remove_node
from netseal.ledger import (ConfigError, Ledger, LedgerCorrupt, LedgerStore, Status, Unauthorized,
                            Verdict, authorize, compare_ledgers, detect_missing, node_safe_hash,
                            run_cycle, tamper_check, update)
from netseal.scenario import non_edges

SECRET = "s3cret-token"


@pytest.fixture(scope="module")
def karate_ledger(karate):
    return node_safe_hash(karate)


def test_empty_graph_ledger():
    ledger = node_safe_hash(Graph())
    assert ledger.node_count == 0
    assert ledger.global_digest == sha1(b"")


def test_karate_ledger(karate_ledger):
    assert karate_ledger.node_count == 34
    assert karate_ledger.global_digest.hex == KARATE_GOLDEN
    assert karate_ledger.created_at.tzinfo == timezone.utc


def test_single_edge_rows_equal():
    a, b = node_safe_hash(parse_edge_list("1 2")).entries
    assert a.row_digest == b.row_digest


def test_identity_match(karate, karate_ledger):
    report = tamper_check(karate, karate_ledger)
    assert report.verdict is Verdict.MATCH and report.affected_nodes == ()


def test_edge_removal_localized(karate, karate_ledger):
    report = tamper_check(remove_edge(karate, 1, 2), karate_ledger)
    assert report.verdict is Verdict.TAMPERED
    assert {1, 2} <= set(report.affected_nodes)
    assert report.node_count_delta == 0


def test_node_removal(karate, karate_ledger):
    report = tamper_check(remove_node(karate, 1), karate_ledger)
    assert report.verdict is Verdict.TAMPERED
    assert report.node_count_delta == -1
    assert 1 in report.affected_nodes


def test_random_additions_localized(karate, karate_ledger):
    for u, v in random.Random(2).sample(non_edges(karate), 25):
        report = tamper_check(add_edge(karate, u, v), karate_ledger)
        assert report.verdict is Verdict.TAMPERED
        assert {u, v} <= set(report.affected_nodes)


def test_fail_closed(karate_ledger):
    report = tamper_check(parse_edge_list("1 2"), karate_ledger, tol=-1.0)
    assert report.verdict is Verdict.TAMPERED
    assert "recomputation failed" in report.details


def test_match_iff(karate, karate_ledger):
    same = compare_ledgers(karate_ledger, node_safe_hash(karate))
    assert same.verdict is Verdict.MATCH
    other = compare_ledgers(karate_ledger, node_safe_hash(remove_edge(karate, 33, 34)))
    assert other.verdict is Verdict.TAMPERED and other.affected_nodes


class TestFileFormat:
    def test_round_trip(self, karate_ledger):
        text = karate_ledger.dumps()
        assert Ledger.loads(text) == karate_ledger
        lines = text.splitlines()
        assert lines[:3] == ["version=1", "algorithm=sha1", "nodes=34"]
        assert lines[3] == f"global={KARATE_GOLDEN}"
        assert lines[4].startswith("edges=") and lines[5].startswith("created=")
        assert lines[5].endswith("Z")
        assert lines[6].startswith("1 ") and lines[-2].startswith("34 ")
        body = text[: text.rindex("end=")]
        assert lines[-1] == f"end={sha1(body.encode()).hex}"

    def test_edges_digest(self, karate, karate_ledger):
        assert karate_ledger.edge_set_digest == sha1(canonical_edge_list(karate).encode())

    def test_every_truncation_detected(self, karate_ledger):
        text = karate_ledger.dumps()
        for cut in range(len(text)):
            with pytest.raises(LedgerCorrupt):
                Ledger.loads(text[:cut])

    @pytest.mark.parametrize("edit", [
        lambda t: t.replace("nodes=34", "nodes=33"),
        lambda t: t.replace("version=1", "version=2"),
        lambda t: t.replace("\n1 ", "\n0 ", 1),
        lambda t: t + "extra\n",
    ])
    def test_edits_detected(self, karate_ledger, edit):
        with pytest.raises(LedgerCorrupt):
            Ledger.loads(edit(karate_ledger.dumps()))

    def test_resealed_but_inconsistent(self, karate_ledger):
        lines = karate_ledger.dumps().splitlines(keepends=True)
        body = "".join(lines[:6] + lines[7:-1])  # drop one entry, keep nodes=34
        with pytest.raises(LedgerCorrupt, match="34 nodes"):
            Ledger.loads(body + f"end={sha1(body.encode()).hex}\n")


class TestUpdate:
    def test_authorized_then_match(self, karate, karate_ledger):
        g = add_edge(karate, 1, 15)
        new = update(g, karate_ledger, SECRET, SECRET)
        assert tamper_check(g, new).verdict is Verdict.MATCH

    def test_wrong_token(self, karate, karate_ledger, tmp_path):
        store = LedgerStore(tmp_path / "k.ledger")
        store.commit(karate_ledger)
        before = store.path.read_bytes()
        for token in ("nope", "", None):
            with pytest.raises(Unauthorized):
                update(add_edge(karate, 1, 15), karate_ledger, token, SECRET, store=store)
        assert store.path.read_bytes() == before
        assert store.archived() == []

    def test_no_secret_configured(self, karate, karate_ledger):
        with pytest.raises(Unauthorized):
            update(karate, karate_ledger, SECRET, None)

    def test_unchanged_graph(self, karate, karate_ledger):
        new = update(karate, karate_ledger, SECRET, SECRET)
        assert new.global_digest == karate_ledger.global_digest
        assert new.created_at > karate_ledger.created_at

    def test_archive_sequence(self, karate, tmp_path):
        store = LedgerStore(tmp_path / "k.ledger")
        first = node_safe_hash(karate)
        store.commit(first)
        update(remove_edge(karate, 1, 2), first, SECRET, SECRET, store=store)
        update(karate, store.load(), SECRET, SECRET, store=store)
        archived = store.archived()
        assert [p.name for p in archived] == ["000001.ledger", "000002.ledger"]
        assert Ledger.loads(archived[0].read_text()) == first

    def test_authorize_constant_time_api(self):
        assert authorize("a", "a") and not authorize("a", "b") and not authorize(None, "a")


class TestSources:
    def write(self, tmp_path, g):
        graph_path = tmp_path / "g.edges"
        graph_path.write_text(canonical_edge_list(g), encoding="utf-8")
        ledger_path = tmp_path / "g.ledger"
        LedgerStore(ledger_path).commit(node_safe_hash(g))
        return graph_path, ledger_path

    def test_both_present(self, tmp_path, karate):
        assert detect_missing(*self.write(tmp_path, karate)) is None

    def test_ledger_absent(self, tmp_path, karate):
        graph_path, ledger_path = self.write(tmp_path, karate)
        ledger_path.unlink()
        report = detect_missing(graph_path, ledger_path)
        assert report.verdict is Verdict.MISSING
        assert "ledger deleted or never initialized" in report.details

    def test_graph_absent(self, tmp_path, karate):
        graph_path, ledger_path = self.write(tmp_path, karate)
        graph_path.unlink()
        report = detect_missing(graph_path, ledger_path)
        assert report.verdict is Verdict.MISSING and report.details == "network deleted"

    def test_ledger_corrupt(self, tmp_path, karate):
        graph_path, ledger_path = self.write(tmp_path, karate)
        ledger_path.write_text(ledger_path.read_text()[:-5])
        assert detect_missing(graph_path, ledger_path).verdict is Verdict.MISSING


class TestCycle:
    def setup(self, tmp_path, g):
        graph_path = tmp_path / "net.edges"
        graph_path.write_text(canonical_edge_list(g), encoding="utf-8")
        return graph_path, tmp_path / "net.ledger"

    def test_ok(self, tmp_path, karate):
        graph_path, ledger_path = self.setup(tmp_path, karate)
        LedgerStore(ledger_path).commit(node_safe_hash(karate))
        assert run_cycle(graph_path, ledger_path).status is Status.OK

    def test_initialize_with_auth(self, tmp_path, karate):
        graph_path, ledger_path = self.setup(tmp_path, karate)
        assert run_cycle(graph_path, ledger_path).status is Status.ALARM
        result = run_cycle(graph_path, ledger_path, SECRET, SECRET, authorized=True)
        assert result.status is Status.UPDATED
        assert run_cycle(graph_path, ledger_path).status is Status.OK

    def test_flip_alarm_then_update(self, tmp_path, karate):
        graph_path, ledger_path = self.setup(tmp_path, karate)
        LedgerStore(ledger_path).commit(node_safe_hash(karate))
        graph_path.write_text(canonical_edge_list(remove_edge(karate, 5, 11)), encoding="utf-8")
        alarm = run_cycle(graph_path, ledger_path)
        assert alarm.status is Status.ALARM and {5, 11} <= set(alarm.report.affected_nodes)
        refused = run_cycle(graph_path, ledger_path, "bad", SECRET, authorized=True)
        assert refused.status is Status.ALARM and "rejected" in refused.report.details
        assert run_cycle(graph_path, ledger_path, SECRET, SECRET, authorized=True).status is Status.UPDATED
        assert run_cycle(graph_path, ledger_path).status is Status.OK

    def test_never_ok_on_mismatch(self, tmp_path, karate):
        graph_path, ledger_path = self.setup(tmp_path, karate)
        LedgerStore(ledger_path).commit(node_safe_hash(karate))
        for u, v in list(karate.edges())[:10]:
            graph_path.write_text(canonical_edge_list(remove_edge(karate, u, v)), encoding="utf-8")
            assert run_cycle(graph_path, ledger_path).status is Status.ALARM

    def test_config_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            run_cycle(tmp_path / "a", tmp_path / "b")
        with pytest.raises(ConfigError):
            run_cycle(tmp_path, tmp_path / "b")
