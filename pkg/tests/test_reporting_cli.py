import json
import math
from fractions import Fraction

import numpy as np
import pytest

from charfield import cli
from charfield.characters import AddCharQ, MultChar
from charfield.charsum import SumRecord, mixed_sum
from charfield.errors import SearchExhausted
from charfield.freeness import normal_mask, primitive_mask
from charfield.reporting import (
    CSV_COLUMNS,
    canonicalize,
    format_float,
    record_from_row,
    record_json,
    record_row,
    records_to_csv,
    to_json,
)
from charfield.tower import FFElement, build_tower


def sample_record(ctx):
    theta = next(
        FFElement(ctx, h) for h in range(ctx.Q)
        if FFElement(ctx, h).is_extension_generator()
    )
    return mixed_sum(theta, MultChar(ctx, 1), AddCharQ(ctx, 1))


# ------------------------------------------------------------- reporting


def test_csv_header_only_when_empty():
    assert records_to_csv([]) == ",".join(CSV_COLUMNS) + "\n"


def test_csv_column_order_and_values(tower):
    ctx = tower(2, 1, 2)
    rec = sample_record(ctx)
    text = records_to_csv([rec])
    lines = text.splitlines()
    assert lines[0] == "q,m,theta,chi_index,psi_param,re,im,modulus,bound,slack,bound_kind"
    cells = lines[1].split(",")
    assert cells[0] == "2" and cells[1] == "2"
    assert cells[2] == str(rec.theta.h)
    assert cells[-1] == rec.bound_kind


def test_unbounded_record_prints_empty_cells(tower):
    ctx = tower(2, 1, 2)
    theta = sample_record(ctx).theta
    rec = mixed_sum(theta, MultChar(ctx, 0), AddCharQ(ctx, 0))
    assert rec.bound is None
    row = record_row(rec)
    assert row["bound"] == "" and row["slack"] == ""
    js = record_json(rec)
    assert js["bound"] is None and js["slack"] is None
    assert isinstance(js["re"], float)


def test_row_roundtrip(tower):
    ctx = tower(3, 1, 2)
    rec = sample_record(ctx)
    back = record_from_row(record_row(rec), ctx)
    assert (back.q, back.m) == (rec.q, rec.m)
    assert back.theta == rec.theta and back.psi_param == rec.psi_param
    assert back.chi_index == rec.chi_index
    assert back.value == pytest.approx(rec.value, abs=1e-9)
    assert back.bound == pytest.approx(rec.bound, abs=1e-9)
    assert back.slack == pytest.approx(rec.slack, abs=1e-9)
    assert back.bound_kind == rec.bound_kind


def test_format_float_sig_digits():
    assert format_float(math.pi) == "3.14159265359"
    assert format_float(2.0) == "2"
    assert format_float(-1e-7) == "-1e-07"


def test_canonicalize_types(tower):
    ctx = tower(2, 1, 2)
    out = canonicalize(
        {
            "frac": Fraction(3, 7),
            "elem": FFElement(ctx, 3),
            "value": complex(1.5, -2.0),
            "arr": np.array([1, 2]),
            "flag": np.bool_(True),
            "num": np.int64(9),
            "x": 0.1 + 0.2,
        }
    )
    assert out["frac"] == "3/7"
    assert out["elem"] == 3
    assert out["value"] == {"im": -2.0, "re": 1.5}
    assert out["arr"] == [1, 2]
    assert out["flag"] is True and out["num"] == 9
    assert out["x"] == 0.3  # 12 significant digits collapse the artifact


def test_to_json_shape():
    text = to_json({"b": 1, "a": [2.5]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [2.5], "b": 1}


# ------------------------------------------------------------------ CLI


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_field_info_counts(capsys):
    code, out, err = run_cli(
        ["field-info", "--p", "2", "--s", "1", "--m", "2"], capsys
    )
    assert code == 0 and err == ""
    data = json.loads(out)
    ctx = build_tower(2, 1, 2)
    assert data["field_size"] == 4 and data["group_order"] == 3
    assert data["n_primitive"] == int(primitive_mask(ctx).sum()) == 2
    assert data["n_normal"] == int(normal_mask(ctx).sum()) == 2
    assert data["n_primitive_normal"] == 2
    assert data["group_order_factorization"] == {"3": 1}


def test_verify_mixed_bound_passes(capsys):
    code, out, _ = run_cli(
        ["verify-mixed-bound", "--p", "2", "--s", "1", "--m", "2"], capsys
    )
    assert code == 0
    data = json.loads(out)
    assert data["summary"]["passed"] is True
    assert data["summary"]["n_records"] == len(data["records"]) == 12
    assert data["summary"]["min_slack"] > -1e-6


def test_verify_mixed_bound_failure_exit(monkeypatch, capsys):
    def fake(ctx, **kwargs):
        return [], {"passed": False, "min_slack": -1.0}

    monkeypatch.setattr(cli, "verify_bounds_sweep", fake)
    code, out, _ = run_cli(
        ["verify-mixed-bound", "--p", "2", "--s", "1", "--m", "2"], capsys
    )
    assert code == 1
    assert json.loads(out)["summary"]["passed"] is False


def test_search_exhausted_exits_one(monkeypatch, capsys):
    def raising(args, config):
        raise SearchExhausted("nothing found")

    monkeypatch.setitem(cli._HANDLERS, "field-info", raising)
    code, out, err = run_cli(
        ["field-info", "--p", "2", "--s", "1", "--m", "2"], capsys
    )
    assert code == 1 and out == ""
    assert "verification failed" in err


def test_usage_error_zero_alpha(capsys):
    code, out, err = run_cli(
        ["count-line", "--p", "2", "--s", "1", "--m", "2",
         "--theta", "2", "--alpha", "0", "--type", "primitive"],
        capsys,
    )
    assert code == 2 and out == ""
    assert "usage error" in err


def test_usage_error_bad_tolerance(capsys):
    with pytest.raises(SystemExit) as ex:
        cli.main(["field-info", "--p", "2", "--s", "1", "--m", "2",
                  "--tolerance", "-1"])
    assert ex.value.code == 2


def test_usage_error_unknown_flag(capsys):
    with pytest.raises(SystemExit) as ex:
        cli.main(["field-info", "--p", "2", "--s", "1", "--m", "2", "--bogus"])
    assert ex.value.code == 2


def test_count_line_payload(capsys):
    code, out, _ = run_cli(
        ["count-line", "--p", "2", "--s", "1", "--m", "2",
         "--theta", "2", "--alpha", "1", "--type", "primitive-normal"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["element_type"] == "primitive-normal"
    assert data["count"] == 2


def test_lower_bound_payload(capsys):
    code, out, _ = run_cli(
        ["lower-bound", "--p", "2", "--s", "1", "--m", "2"], capsys
    )
    assert code == 0
    data = json.loads(out)
    assert data["value"] == pytest.approx((4 - 4 * math.sqrt(2)) / 3, abs=1e-9)
    assert data["positive"] is False
    assert data["eps_group"] == "2/3"
    assert data["W_group"] == 2


def test_scan_exits_zero_with_failures(capsys):
    code, out, _ = run_cli(
        ["scan", "--m", "3", "--q-max", "5", "--property", "tp",
         "--type", "primitive"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["largest_failing_q"] in (None, 2, 3, 4, 5)
    assert [e["q"] for e in data["entries"]] == [2, 3, 4, 5]


def test_verify_fuwan_quadratic_example(capsys):
    code, out, _ = run_cli(
        ["verify-fuwan", "--p", "3", "--s", "1", "--m", "2",
         "--f", "0,0,1/1", "--g", "0,1/1", "--chi", "4", "--psi", "1"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert data["degrees"]["D1"] >= 0


def test_ray_check_roundtrip(capsys):
    code, out, _ = run_cli(
        ["ray-check", "--p", "2", "--s", "1", "--m", "2",
         "--theta", "2", "--chi", "1", "--psi", "1", "--samples", "20"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert data["ray_triviality"]["passed"] == 20
    assert data["nonsingularity"]["found"] is True
    assert data["degree_one_sum"]["matches_mixed_sum"] is True


def test_print_basis_section(capsys):
    code, out, _ = run_cli(
        ["field-info", "--p", "2", "--s", "2", "--m", "2", "--print-basis"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert "basis" in data
    assert any("digits" in str(k) or isinstance(v, list)
               for k, v in data["basis"].items())


def test_byte_identical_reports(tmp_path, capsys):
    args = ["verify-mixed-bound", "--p", "3", "--s", "1", "--m", "2",
            "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.csv", tmp_path / "d.csv"
    assert cli.main(args + ["--output", "csv", "--out", str(c)]) == 0
    assert cli.main(args + ["--output", "csv", "--out", str(d)]) == 0
    capsys.readouterr()
    assert c.read_bytes() == d.read_bytes()
    assert c.read_bytes() != a.read_bytes()


def test_csv_output_is_records_table(capsys):
    code, out, _ = run_cli(
        ["verify-mixed-bound", "--p", "2", "--s", "1", "--m", "2",
         "--output", "csv"],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 13  # header + 12 records


def test_text_output_renders(capsys):
    code, out, _ = run_cli(
        ["lower-bound", "--p", "2", "--s", "1", "--m", "2",
         "--output", "text"],
        capsys,
    )
    assert code == 0
    assert "value:" in out and "command: lower-bound" in out
