import json

import pytest

from conftest import GOLDEN
from viewmetrics.cli import main
from viewmetrics.corpus import DATA_DIR, top25_snapshot
from viewmetrics.snapshot import write_views_tsv

TOP25 = str(DATA_DIR / "snapshots" / "top25.json")
VIRAL = str(DATA_DIR / "snapshots" / "viral_vs_prolific.json")
FILES = ("snapshot.json", "views.txt", "subscribers.txt")


def fetch(replay, out, *extra):
    return main(["fetch", "--base-url", replay.base_url, "--delay", "0", "--out-dir", str(out), *extra])


def test_fetch_matches_golden_and_is_deterministic(replay, tmp_path):
    assert fetch(replay, tmp_path / "a") == 0
    assert fetch(replay, tmp_path / "b") == 0
    for name in FILES:
        first = (tmp_path / "a" / name).read_bytes()
        assert first == (tmp_path / "b" / name).read_bytes()
        assert first == (GOLDEN / "most_subscribed" / name).read_bytes()


def test_fetch_requests_two_listing_pages(replay, tmp_path):
    fetch(replay, tmp_path, "--count", "100")
    assert replay.start_indices("/feeds/api/channelstandardfeeds/most_subscribed") == [1, 51]


def test_fetch_writes_na_and_truncation(replay, tmp_path):
    fetch(replay, tmp_path)
    views = (tmp_path / "views.txt").read_text().splitlines()
    patchy = next(l for l in views if l.startswith("patchystats\t"))
    assert patchy.endswith("\tna\tna")
    big = next(l for l in views if l.startswith("bigarchive\t"))
    assert len(big.split("\t")) == 501
    doc = json.loads((tmp_path / "snapshot.json").read_text())
    flags = {c["id"]: (c["truncated"], c["missing"]) for c in doc["channels"]}
    assert flags["bigarchive"] == (True, 0)
    assert flags["patchystats"] == (False, 2)


def test_fetch_typed_feed(replay, tmp_path):
    assert fetch(replay, tmp_path, "--type", "comedians", "--count", "10") == 0
    doc = json.loads((tmp_path / "snapshot.json").read_text())
    assert {c["id"] for c in doc["channels"]} == {"prolificshow", "sketchtroupe"}
    assert {c["category"] for c in doc["channels"]} == {"Comedians"}
    assert replay.paths("/feeds/api/channelstandardfeeds/")[0].endswith("most_subscribed_Comedians")


def test_fetch_unknown_type_is_usage_error(replay, tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        fetch(replay, tmp_path, "--type", "Dancers")
    assert info.value.code == 1
    assert "unknown channel type" in capsys.readouterr().err


def test_fetch_partial_failure_exit_2(replay, tmp_path, capsys):
    assert fetch(replay, tmp_path, "--ordering", "most_viewed") == 2
    assert "ghostchannel" in capsys.readouterr().err
    doc = json.loads((tmp_path / "snapshot.json").read_text())
    assert len(doc["channels"]) == 3


def test_fetch_unreachable_exit_1(tmp_path, capsys):
    code = main(["fetch", "--base-url", "http://127.0.0.1:9", "--delay", "0", "--retries", "1",
                 "--out-dir", str(tmp_path)])
    assert code == 1
    assert "cannot retrieve channel list" in capsys.readouterr().err


def test_fetch_base_url_from_env(replay, tmp_path, monkeypatch):
    monkeypatch.setenv("VIEWMETRICS_BASE_URL", replay.base_url)
    assert main(["fetch", "--delay", "0", "--count", "3", "--out-dir", str(tmp_path)]) == 0
    monkeypatch.delenv("VIEWMETRICS_BASE_URL")
    assert main(["fetch", "--delay", "0", "--out-dir", str(tmp_path)]) == 1


def test_index_top25_summary(capsys):
    assert main(["index", TOP25]) == 0
    out = capsys.readouterr().out
    assert "mean=56.68 median=55" in out
    assert len(out.splitlines()) == 27


def test_index_json(capsys):
    assert main(["index", TOP25, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["summary"] == {"n": 25, "h_mean": 56.68, "h_median": 55.0}
    assert doc["channels"][0]["h_index"] == 79


def test_index_unit_flag(capsys):
    main(["index", VIRAL, "--unit", "10000", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    h = {c["channel"]: c["h_index"] for c in doc["channels"]}
    assert h == {"viral": 1, "prolific": 60}


def test_index_tsv_without_dates_and_explicit_as_of(tmp_path, capsys):
    path = tmp_path / "views.txt"
    path.write_bytes(write_views_tsv(top25_snapshot()))
    assert main(["index", str(path), "--as-of", "2013-01-03"]) == 2
    captured = capsys.readouterr()
    assert "age unavailable" in captured.err
    assert "mean=56.68" in captured.out


def test_rank_swaps_leaders(capsys):
    main(["rank", VIRAL, "--metric", "h_index"])
    h_lines = capsys.readouterr().out.splitlines()
    main(["rank", VIRAL, "--metric", "total_views"])
    v_lines = capsys.readouterr().out.splitlines()
    assert h_lines[1].split("\t")[1] == "prolific"
    assert v_lines[1].split("\t")[1] == "viral"


def test_rank_writes_files(tmp_path):
    assert main(["rank", VIRAL, "--out-dir", str(tmp_path), "--format", "json"]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["rank_g_index.json", "rank_h_index.json", "rank_subscribers.json", "rank_total_views.json"]
    doc = json.loads((tmp_path / "rank_h_index.json").read_text())
    assert doc["config"] == {"unit_u": 100000, "cap_g_at_nv": True}


def test_rank_metric_unavailable_exit_2(capsys):
    assert main(["rank", TOP25, "--metric", "subscribers"]) == 2
    assert "unavailable" in capsys.readouterr().err


def test_correlate_sample_too_small(capsys):
    assert main(["correlate", VIRAL]) == 2
    assert "sample too small" in capsys.readouterr().err


def test_correlate_prints_tail(tmp_path, capsys):
    snap = GOLDEN / "most_subscribed" / "snapshot.json"
    code = main(["correlate", str(snap), "--tail", "one_sided"])
    out = capsys.readouterr().out
    assert code == 2  # one channel lacks a subscriber count
    assert "tail=one_sided" in out
    assert [l.split("\t")[0] for l in out.splitlines()[2:]] == ["h_index", "g_index", "total_views"]


def test_malformed_snapshot(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_bytes(b"abc\t1\nxyz\t-5\n")
    assert main(["index", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["index", str(tmp_path / "nope.json")]) == 1


def test_report_deterministic(tmp_path):
    snap = str(GOLDEN / "most_subscribed" / "snapshot.json")
    for fmt in ("text", "json"):
        a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
        assert main(["report", snap, "--format", fmt, "--out", str(a)]) == 0
        assert main(["report", snap, "--format", fmt, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
    doc = json.loads((tmp_path / "a.json").read_text())
    assert [t["metric"] for t in doc["rankings"]] == [
        "total_views", "h_index", "g_index", "subscribers", "normalized_h"]
    assert {t["category"] for t in doc["categories"]} == {
        "Comedians", "Directors", "Gurus", "Musicians", "Reporters"}
    text = (tmp_path / "a.text").read_text()
    assert "[Reporters]" in text


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as info:
        main(["rank"])
    assert info.value.code == 1
