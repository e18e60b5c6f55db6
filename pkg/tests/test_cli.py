import json

import pytest

from binpart.cli import main
from binpart.partitions import ResidueStream, bm_mod_stream


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_seq_b(capsys):
    code, out, _ = run(capsys, "seq", "b", "--max", "4")
    assert code == 0
    assert out.splitlines() == ["n,value", "0,1", "1,1", "2,2", "3,2", "4,4"]


def test_seq_chi_last_row(capsys):
    _, out, _ = run(capsys, "seq", "chi", "--max", "10")
    assert out.splitlines()[-1] == "10,1"


def test_seq_c_a(capsys):
    _, out, _ = run(capsys, "seq", "c_a", "--a", "1", "--max", "3")
    assert [r.split(",")[1] for r in out.splitlines()[1:]] == ["0", "6", "10", "12"]


@pytest.mark.parametrize("name", ["b3", "ptm", "T", "sigma", "beta", "f", "gaps"])
def test_seq_others_emit_rows(capsys, name):
    code, out, _ = run(capsys, "seq", name, "--max", "5")
    assert code == 0 and len(out.splitlines()) == 7


def test_seq_bm_needs_m(capsys):
    code, _, err = run(capsys, "seq", "bm", "--max", "5")
    assert code == 2 and "--m" in err


def test_seq_json_and_modular(capsys):
    _, out, _ = run(capsys, "seq", "bm", "--m", "7", "--max", "30", "--mod", "5", "--format", "json")
    doc = json.loads(out)
    assert doc["modulus"] == 32 and doc["values"] == [int(v) for v in bm_mod_stream(7, 30, 5).values]


def test_seq_raw_dump(tmp_path):
    assert main(["seq", "b", "--max", "100", "--mod", "6", "--format", "raw", "--out", str(tmp_path)]) == 0
    back = ResidueStream.from_bytes((tmp_path / "b.bin").read_bytes(), 6)
    assert list(back.values) == list(bm_mod_stream(1, 100, 6).values)


def test_seq_raw_needs_mod(capsys):
    assert run(capsys, "seq", "b", "--format", "raw")[0] == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["seq", "nonsense"])
    assert info.value.code == 2
    assert run(capsys, "verify", "no-such-family")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "verify", "--all", "--max", "5")[0] == 2
    assert run(capsys, "verify", "s1-prefix", "--max", "5")[0] == 2


def test_verify_alias_with_overrides(capsys):
    code, out, _ = run(capsys, "verify", "Thm5.5", "--k", "4", "--max", "20000")
    assert code == 0
    assert json.loads(out)["status"] == "pass"


def test_verify_failure_exit_1(capsys):
    code, out, _ = run(capsys, "verify", "Prop3.7", "--max", "1000")
    assert code == 1
    assert json.loads(out)["counterexample"]["n"] == 0


def test_verify_seed_reaches_factorization(capsys):
    code, out, _ = run(capsys, "verify", "factorize", "--seed", "3")
    assert code == 0 and json.loads(out)["range"]["seed"] == 3


def test_verify_output_is_thread_independent(capsys):
    names = ["s1-prefix", "kernel-ptm", "legendre", "table-cd"]
    _, one, _ = run(capsys, "verify", *names, "--threads", "1")
    _, eight, _ = run(capsys, "verify", *names, "--threads", "8")
    assert one == eight


def test_threads_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("BINPART_THREADS", "0")
    assert run(capsys, "verify", "s1-prefix")[0] == 2
    monkeypatch.setenv("BINPART_THREADS", "4")
    assert run(capsys, "verify", "s1-prefix")[0] == 0


def test_tables_T4(capsys, tmp_path):
    code, _, _ = run(capsys, "tables", "T4", "--nmax", "12", "--assert", "--out", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "T4.csv").read_text().splitlines()
    assert rows[0] == "n,T2n" and rows[-1] == "12,617"


def test_tables_T5(capsys):
    code, out, _ = run(capsys, "tables", "T5", "--nmax", "10", "--assert")
    assert code == 0
    assert out.splitlines()[0] == "s,count,first_n"
    assert "4," in out.splitlines()[1]


def test_tables_T6_mismatch_is_reported(capsys):
    code, out, err = run(capsys, "tables", "T6", "--mmax", "12", "--assert")
    assert code == 1
    assert out.splitlines()[-1].startswith("12,1.80")
    assert "m = 10" in err


def test_tables_checkpoint_dir(capsys, tmp_path):
    run(capsys, "tables", "T4", "--nmax", "11", "--checkpoint-dir", str(tmp_path))
    assert (tmp_path / "r2-b2n-2048.json").exists()


def test_figure(capsys):
    code, out, _ = run(capsys, "figure", "S1", "--xmax", "1024")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 1025
    assert lines[20].startswith("20,-2/3,")


def test_histogram(capsys):
    code, out, _ = run(capsys, "histogram", "--mod", "3", "--max", "1000")
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert code == 0 and sum(int(c) for _, c in rows) == 1001
    assert run(capsys, "histogram", "--mod", "4")[0] == 2
