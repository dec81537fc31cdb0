import os

import pytest

from twgi.cli import main


@pytest.fixture
def workdir(tmp_path):
    text = tmp_path / "t.txt"
    text.write_bytes(b"abcabc")
    index = tmp_path / "t.twgi"
    rc = main(["build", str(text), "-o", str(index)])
    assert rc == 0
    return tmp_path, str(text), str(index)


def test_build_prints_summary(tmp_path, capsys):
    text = tmp_path / "t.txt"
    text.write_bytes(b"abcabc")
    rc = main(["build", str(text), "-o", str(tmp_path / "x.twgi")])
    out = capsys.readouterr().out
    assert rc == 0
    lines = dict(line.split(": ") for line in out.strip().splitlines())
    assert lines["n"] == "7"
    assert lines["n_t"] == "5"
    assert lines["m_t"] == "5"
    assert lines["tunnels"] == "1"
    assert lines["merged_edges"] == "1"


def test_count(workdir, capsys):
    _, _, index = workdir
    rc = main(["count", index, "abc"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "2"


def test_count_absent_is_zero_success(workdir, capsys):
    _, _, index = workdir
    rc = main(["count", index, "zzz"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "0"


def test_locate(workdir, capsys):
    _, _, index = workdir
    rc = main(["locate", index, "abc"])
    assert rc == 0
    assert capsys.readouterr().out.split() == ["1", "4"]


def test_locate_absent_empty_success(workdir, capsys):
    _, _, index = workdir
    rc = main(["locate", index, "zzz"])
    assert rc == 0
    assert capsys.readouterr().out == ""


def test_locate_empty_pattern_usage_error(workdir):
    _, _, index = workdir
    assert main(["locate", index, ""]) == 2


def test_locate_limit(workdir, capsys):
    _, _, index = workdir
    rc = main(["locate", index, "c", "--limit", "1"])
    assert rc == 0
    assert len(capsys.readouterr().out.split()) == 1


def test_extract(workdir, capsys):
    _, _, index = workdir
    rc = main(["extract", index, "2", "3"])
    assert rc == 0
    assert capsys.readouterr().out == "bca"


def test_extract_out_of_range(workdir, capsys):
    _, _, index = workdir
    assert main(["extract", index, "6", "3"]) == 1


def test_stats(workdir, capsys):
    _, _, index = workdir
    rc = main(["stats", index])
    assert rc == 0
    out = capsys.readouterr().out
    keys = [line.split(":")[0] for line in out.strip().splitlines()]
    assert keys == ["n", "n_t", "sigma", "tunnels", "bits_per_symbol"]


def test_usage_error_exit_2():
    assert main(["count"]) == 2
    assert main(["bogus"]) == 2


def test_missing_file_exit_1(tmp_path, capsys):
    assert main(["count", str(tmp_path / "nope.twgi"), "a"]) == 1


def test_corrupted_index_exit_1(workdir, capsys):
    _, _, index = workdir
    data = bytearray(open(index, "rb").read())
    data[len(data) // 2] ^= 1
    open(index, "wb").write(bytes(data))
    assert main(["count", index, "abc"]) == 1


GRAPH = "WG 7 6 3\n1 2 a\n2 4 b\n3 5 b\n4 6 c\n5 7 c\n6 3 a\n"
BAD_GRAPH = "WG 2 1 1\n2 1 a\n"
BLOCKS = "BLOCK 2 2\n2 3\n4 5\n"


def test_graph_validate_ok(tmp_path, capsys):
    gf = tmp_path / "g.wg"
    gf.write_text(GRAPH)
    rc = main(["graph", "validate", str(gf)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_graph_validate_violation(tmp_path, capsys):
    gf = tmp_path / "bad.wg"
    gf.write_text(BAD_GRAPH)
    rc = main(["graph", "validate", str(gf)])
    assert rc == 1
    assert "zero-indegree-prefix" in capsys.readouterr().out


def test_graph_tunnel_and_search(tmp_path, capsys):
    gf = tmp_path / "g.wg"
    gf.write_text(GRAPH)
    bf = tmp_path / "b.blk"
    bf.write_text(BLOCKS)
    out = tmp_path / "out.wg"
    rc = main(["graph", "tunnel", str(gf), "--blocks", str(bf), "-o", str(out)])
    assert rc == 0
    capsys.readouterr()

    # tunneled output re-validates
    rc = main(["graph", "validate", str(out)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "OK"

    rc = main(["graph", "search", str(out), "bca"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("FOUND")

    rc = main(["graph", "search", str(out), "cc"])
    assert rc == 1
    assert capsys.readouterr().out.strip() == "NOT FOUND"


def test_graph_search_plain_file(tmp_path, capsys):
    gf = tmp_path / "g.wg"
    gf.write_text(GRAPH)
    rc = main(["graph", "search", str(gf), "abca"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("FOUND")


def test_graph_tunnel_bad_blocks_exit_1(tmp_path, capsys):
    gf = tmp_path / "g.wg"
    gf.write_text(GRAPH)
    bf = tmp_path / "b.blk"
    bf.write_text("BLOCK 2 1\n1 2\n")
    rc = main(["graph", "tunnel", str(gf), "--blocks", str(bf),
               "-o", str(tmp_path / "o.wg")])
    assert rc == 1


def test_no_tunnel_build_queries_match(tmp_path, capsys):
    text = tmp_path / "t.txt"
    text.write_bytes(b"abcabcabc")
    plain = tmp_path / "plain.twgi"
    tun = tmp_path / "tun.twgi"
    assert main(["build", str(text), "-o", str(tun)]) == 0
    assert main(["build", str(text), "-o", str(plain), "--no-tunnel"]) == 0
    capsys.readouterr()
    for pat in ("abc", "ca", "cc", "abcabcabc"):
        main(["count", str(tun), pat])
        a = capsys.readouterr().out
        main(["count", str(plain), pat])
        b = capsys.readouterr().out
        assert a == b


def test_escaped_pattern(tmp_path, capsys):
    text = tmp_path / "t.bin"
    text.write_bytes(bytes([0, 1, 0, 1, 0]))
    index = tmp_path / "t.twgi"
    assert main(["build", str(text), "-o", str(index)]) == 0
    capsys.readouterr()
    rc = main(["count", str(index), "\\x00\\x01"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "2"
