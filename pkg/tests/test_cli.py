import json
import os
from pathlib import Path

import pytest

from qcoh import cli
from qcoh.report import Report, Table, new_report, render, tex_expr

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_COMMANDS = {
    "fano-V5-charpoly.tex": ["fano", "V5", "charpoly", "--format", "tex"],
    "fano-Q-correlators.json": ["fano", "Q", "correlators"],
    "delpezzo-all-cardinalities.csv": ["delpezzo", "all", "cardinalities", "--format", "csv"],
    "delpezzo-6-spectral.json": ["delpezzo", "6", "spectral"],
    "delpezzo-3-orbits.csv": ["delpezzo", "3", "orbits", "--format", "csv"],
}


def run(argv, capsys):
    code, rep = cli.run_command(argv)
    out = capsys.readouterr()
    return code, rep, out.out, out.err


@pytest.mark.parametrize("name", sorted(GOLDEN_COMMANDS))
def test_golden(name, capsys):
    code, _, out, _ = run(GOLDEN_COMMANDS[name], capsys)
    assert code == 0
    path = GOLDEN / name
    if os.environ.get("QCOH_UPDATE_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")


def test_v5_charpoly_tex_line(capsys):
    _, _, out, _ = run(["fano", "V5", "charpoly", "--format", "tex"], capsys)
    assert "$u^{4} - 44 q u^{2} - 16 q^{2}$" in out


def test_deterministic_output(capsys):
    argv = ["delpezzo", "5", "spectral", "--format", "csv"]
    _, _, a, _ = run(argv, capsys)
    _, _, b, _ = run(argv, capsys)
    assert a == b


def test_json_round_trip(capsys):
    _, rep, out, _ = run(["fano", "V22", "charpoly"], capsys)
    back = Report.from_json(out)
    assert back.to_dict() == rep.to_dict()
    assert render(back, "json") == out


def test_v22_correlator_order(capsys):
    _, rep, _, _ = run(["fano", "V22", "correlators"], capsys)
    symbols = [row[0] for row in rep.tables[0].rows]
    assert symbols == ["[1;2]", "[2;3]", "[2;2,2]", "[3;2,3]", "[4;3,3]", "[3;2,2,2]", "[4;2,2,3]",
                       "[5;2,3,3]", "[6;3,3,3]", "[4;2,2,2,2]", "[5;2,2,2,3]", "[6;2,2,3,3]",
                       "[7;2,3,3,3]", "[8;3,3,3,3]"]
    assert rep.tables[0].rows[-1][1] == "840"


def test_spectral_json(capsys):
    code, _, out, _ = run(["delpezzo", "6", "spectral", "--format", "json"], capsys)
    data = json.loads(out)
    scalars = dict(next(t for t in data["tables"] if t["name"] == "scalars")["rows"])
    assert code == 0 and scalars["mu_double_root"] == "-6" and scalars["mu_orbit_sum"] == "-6"
    poly = next(t for t in data["tables"] if t["name"] == "R_lambda")["rows"]
    assert [c for _, c in poly] == ["1", "-9", "-216", "-756"]


def test_r8_spectral_reports_erratum(capsys):
    _, rep, _, _ = run(["delpezzo", "8", "spectral"], capsys)
    scalars = dict(next(t for t in rep.tables if t.name == "scalars").rows)
    assert scalars["B"] == "252"
    assert any("240" in d and "252" in d for d in rep.diagnostics)


def test_certify_unit_point_inconclusive(capsys):
    code, rep, out, _ = run(["delpezzo", "5", "certify", "--point", "q=1"], capsys)
    assert code == 3
    assert any(d.startswith("no witness at given point; witness found at probe #0") for d in rep.diagnostics)
    fields = dict(rep.tables[0].rows)
    assert fields["status"] == "witness-at-probe" and fields["squarefree"] == "true"


def test_certify_r3(capsys):
    code, rep, _, _ = run(["delpezzo", "3", "certify", "--point", "q=1"], capsys)
    fields = dict(rep.tables[0].rows)
    assert code == 0
    assert fields["status"] == "semisimple-at-point" and fields["given_point_k_squarefree"] == "false"


def test_certify_explicit_point(capsys):
    code, rep, _, _ = run(["delpezzo", "5", "certify", "--point", "2,3,5,7,11,1/1000"], capsys)
    assert code == 0


def test_point_parsing():
    assert cli.parse_point("q=1", 3) == (1, 1, 1, 1)
    assert cli.parse_point("q0=1,q1=2/3,q2=5,q3=7", 3)[1] == pytest.approx(2 / 3)
    with pytest.raises(cli.UsageError):
        cli.parse_point("1,2", 3)


@pytest.mark.parametrize("argv", [
    ["fano", "V7", "charpoly"],
    ["fano", "Q", "orbits"],
    ["delpezzo", "9", "spectral"],
    ["delpezzo", "5", "charpoly"],
    ["delpezzo", "5", "spectral", "--format", "xml"],
    ["delpezzo", "5", "certify", "--point", "1,2"],
    ["nonsense"],
])
def test_usage_errors(argv, capsys):
    code, rep, out, err = run(argv, capsys)
    assert code == 1 and rep is None and out == "" and err.startswith("qcoh:")


def test_bad_seed_file(tmp_path, capsys):
    bad = tmp_path / "seeds.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, _, _ = run(["fano", "Q", "correlators", "--seed-file", str(bad)], capsys)
    assert code == 1


def test_underdetermined_seed_file_is_verification_failure(tmp_path, capsys):
    seeds = json.loads((Path(cli.fano.__file__).parent / "data" / "fano_seeds.json").read_text())
    seeds["manifolds"]["V5"]["seeds"] = seeds["manifolds"]["V5"]["seeds"][:2]
    path = tmp_path / "seeds.json"
    path.write_text(json.dumps(seeds), encoding="utf-8")
    code, rep, _, _ = run(["fano", "V5", "charpoly", "--seed-file", str(path)], capsys)
    assert code == 2 and rep.status == "verification-failure"
    assert any("undetermined" in d for d in rep.diagnostics)


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, _, out, _ = run(["delpezzo", "4", "cardinalities", "--format", "csv"], capsys)
    assert code == 0 and out == ""
    written = tmp_path / "delpezzo-4-cardinalities.csv"
    assert written.read_text().startswith("# action,cardinalities")


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.tex"
    code, _, out, _ = run(["fano", "Q", "charpoly", "--format", "tex", "-o", str(target)], capsys)
    assert code == 0 and out == "" and "u^{4} - 108 q u" in target.read_text()


def test_orbit_dump_dir(tmp_path, capsys):
    code, _, _, _ = run(["delpezzo", "4", "orbits", "--dump-dir", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "I_4.txt").read_text().splitlines()
    assert len(lines) == 10


def test_main_exit_code(capsys):
    assert cli.main(["delpezzo", "3", "cardinalities"]) == 0
    capsys.readouterr()


# -- report rendering ---------------------------------------------------------------


def test_empty_report_is_header_only():
    rep = new_report({"subject": "fano", "target": "Q", "action": "charpoly"})
    for fmt in ("csv", "tex"):
        lines = render(rep, fmt).splitlines()
        assert lines and all(l.startswith("#") or l.startswith("%") for l in lines)
    data = json.loads(render(rep, "json"))
    assert data["tables"] == [] and data["diagnostics"] == []


def test_table_rejects_wrong_width():
    t = Table("t", ["a", "b"])
    with pytest.raises(ValueError):
        t.add(1)


def test_tex_expressions():
    assert tex_expr("-1/2*q^-1") == "-\\frac{1}{2} q^{-1}"
    assert tex_expr("u^1") == "u"
    assert tex_expr("lam^3 - Delta2") == "\\lambda^{3} - \\Delta2"


def test_v22_special_reports_eta_normalization(capsys):
    code, rep, _, _ = run(["fano", "V22", "special"], capsys)
    assert code == 0
    (diag,) = [d for d in rep.diagnostics if "5324*q^4" in d]
    assert diag.endswith("(49346*q^1) + (16192)*u^1 + (-1562*q^-1)*u^2")
