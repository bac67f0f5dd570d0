"""End-to-end command flows, run in process through main().

Subcommand wiring, exit codes, and file hand-off between steps. One test at
the bottom goes through a real subprocess to cover the console entry point.
"""

from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from btembed import (
    BTVector,
    Tree,
    balanced_parens_grammar,
    balanced_parens_schema,
    load_embedding,
    load_vector,
    save_grammar,
    save_vector,
    symbolic_parse,
    validate_schema,
)
from btembed.cli import main


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    """Shared workspace: schema, embedding, a tree, and its vector."""
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "schema": root / "schema.json",
        "emb": root / "a.bte",
        "emb2": root / "b.bte",
        "tree": root / "tree.json",
        "vec": root / "tree.btv",
    }
    assert main(["gen-schema", "--tokens", "10", "--attributes", "2",
                 "-o", str(paths["schema"])]) == 0
    assert main(["embed", "--schema", str(paths["schema"]), "--dim", "256",
                 "--seed", "3", "-o", str(paths["emb"])]) == 0
    assert main(["embed", "--schema", str(paths["schema"]), "--dim", "256",
                 "--seed", "4", "-o", str(paths["emb2"])]) == 0
    tree = {
        "label": "t1",
        "children": {
            "next": {"label": "t2", "children": {}},
            "arg1": {"label": "t3", "children": {"next": {"label": "t0", "children": {}}}},
        },
    }
    paths["tree"].write_text(json.dumps(tree))
    assert main(["encode", "--embedding", str(paths["emb"]), "--tree", str(paths["tree"]),
                 "-o", str(paths["vec"])]) == 0
    paths["root"] = root
    return paths


class TestGenSchema:
    def test_output_is_valid_schema(self, ws):
        blob = json.loads(ws["schema"].read_text())
        schema = validate_schema(blob)
        assert schema.n_tokens == 12
        assert schema.n_attributes == 2
        assert schema.attributes == ("next", "arg1")


class TestEncodeDecode:
    def test_round_trip_through_files(self, ws):
        out = ws["root"] / "decoded.json"
        rc = main(["decode", "--embedding", str(ws["emb"]), "--vector", str(ws["vec"]),
                   "-o", str(out)])
        assert rc == 0
        e = load_embedding(ws["emb"])
        got = Tree.from_dict(json.loads(out.read_text()), e.schema)
        want = Tree.from_dict(json.loads(ws["tree"].read_text()), e.schema)
        assert got == want

    def test_decode_to_stdout(self, ws, capsys):
        rc = main(["decode", "--embedding", str(ws["emb"]), "--vector", str(ws["vec"])])
        assert rc == 0
        blob = json.loads(capsys.readouterr().out)
        assert blob["label"] == "t1"

    def test_absent_vector_exits_4(self, ws):
        e = load_embedding(ws["emb"])
        p = ws["root"] / "zero.btv"
        save_vector(BTVector(np.zeros(e.dim), e.fingerprint), p)
        assert main(["decode", "--embedding", str(ws["emb"]), "--vector", str(p)]) == 4

    def test_mismatched_embedding_exits_3(self, ws):
        rc = main(["decode", "--embedding", str(ws["emb2"]), "--vector", str(ws["vec"])])
        assert rc == 3

    def test_corrupt_vector_exits_2(self, ws):
        p = ws["root"] / "junk.btv"
        p.write_bytes(b"not a vector at all")
        assert main(["decode", "--embedding", str(ws["emb"]), "--vector", str(p)]) == 2

    def test_unknown_label_exits_2(self, ws):
        bad = ws["root"] / "bad_tree.json"
        bad.write_text('{"label": "nope", "children": {}}')
        out = ws["root"] / "bad.btv"
        rc = main(["encode", "--embedding", str(ws["emb"]), "--tree", str(bad),
                   "-o", str(out)])
        assert rc == 2

    def test_tight_budget_exits_6(self, ws):
        rc = main(["decode", "--embedding", str(ws["emb"]), "--vector", str(ws["vec"]),
                   "--max-nodes", "1"])
        assert rc == 6


@pytest.fixture(scope="module")
def parse_ws(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_parse")
    schema_path = root / "parens.json"
    schema_path.write_text(json.dumps(balanced_parens_schema().to_dict()))
    rules_path = root / "rules.json"
    save_grammar(balanced_parens_grammar(), rules_path)
    emb_path = root / "parens.bte"
    assert main(["embed", "--schema", str(schema_path), "--dim", "512",
                 "--seed", "5", "-o", str(emb_path)]) == 0
    return {"root": root, "schema": schema_path, "rules": rules_path, "emb": emb_path}


class TestParse:
    def test_parse_then_decode(self, parse_ws):
        v_path = parse_ws["root"] / "word.btv"
        rc = main(["parse", "--embedding", str(parse_ws["emb"]), "--rules", str(parse_ws["rules"]),
                   "--input", "L L R R", "-o", str(v_path)])
        assert rc == 0
        e = load_embedding(parse_ws["emb"])
        out = parse_ws["root"] / "word.json"
        assert main(["decode", "--embedding", str(parse_ws["emb"]), "--vector", str(v_path),
                     "-o", str(out)]) == 0
        got = Tree.from_dict(json.loads(out.read_text()), e.schema)
        want = symbolic_parse(balanced_parens_grammar(), ["L", "L", "R", "R"], e.schema)
        assert got == want

    def test_unbalanced_exits_5(self, parse_ws):
        rc = main(["parse", "--embedding", str(parse_ws["emb"]), "--rules", str(parse_ws["rules"]),
                   "--input", "L L", "-o", str(parse_ws["root"] / "x.btv")])
        assert rc == 5

    def test_step_budget_exits_6(self, parse_ws):
        rc = main(["parse", "--embedding", str(parse_ws["emb"]), "--rules", str(parse_ws["rules"]),
                   "--input", "L R L R L R", "--max-steps", "4",
                   "-o", str(parse_ws["root"] / "y.btv")])
        assert rc == 6

    def test_empty_input_exits_2(self, parse_ws):
        rc = main(["parse", "--embedding", str(parse_ws["emb"]), "--rules", str(parse_ws["rules"]),
                   "--input", "   ", "-o", str(parse_ws["root"] / "z.btv")])
        assert rc == 2


class TestTransformerQuery:
    def test_path_query(self, ws, capsys):
        rc = main(["transformer-query", "--embedding", str(ws["emb"]),
                   "--vector", str(ws["vec"]), "--path", "arg1,next"])
        assert rc == 0
        names = json.loads(capsys.readouterr().out)
        assert names == ["t1", "t3", "t0"]

    def test_empty_path(self, ws, capsys):
        rc = main(["transformer-query", "--embedding", str(ws["emb"]),
                   "--vector", str(ws["vec"])])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)[0] == "t1"

    def test_mismatch_exits_3(self, ws):
        rc = main(["transformer-query", "--embedding", str(ws["emb2"]),
                   "--vector", str(ws["vec"])])
        assert rc == 3

    def test_dump_weights(self, tmp_path, capsys):
        schema = tmp_path / "s.json"
        emb = tmp_path / "e.bte"
        vec = tmp_path / "v.btv"
        tree = tmp_path / "t.json"
        assert main(["gen-schema", "--tokens", "6", "--attributes", "2", "-o", str(schema)]) == 0
        assert main(["embed", "--schema", str(schema), "--dim", "48", "-o", str(emb)]) == 0
        tree.write_text('{"label": "t2", "children": {}}')
        assert main(["encode", "--embedding", str(emb), "--tree", str(tree), "-o", str(vec)]) == 0
        wdir = tmp_path / "weights"
        rc = main(["transformer-query", "--embedding", str(emb), "--vector", str(vec),
                   "--k", "16", "--dump-weights", str(wdir)])
        assert rc == 0
        assert json.loads(capsys.readouterr().out) == ["t2"]
        manifest = json.loads((wdir / "manifest.json").read_text())
        names = {t["name"] for t in manifest["tensors"]}
        assert names == {"Wq", "Wk", "Wv", "f1_lin", "f1_bias", "f1_out",
                         "f2_lin", "f2_bias", "f2_out"}
        for t in manifest["tensors"]:
            size = 8 * int(np.prod(t["shape"]))
            assert (wdir / t["file"]).stat().st_size == size


class TestExperiment:
    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["experiment", "--kind", "list", "--dims", "128", "--sizes", "2,3",
                   "--trials", "3", "-o", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "kind,d,l,trials,successes,success_rate,wall_time_ms"
        assert len(lines) == 3
        assert lines[1].startswith("list,128,2,3,")
        assert lines[1].endswith(",")  # timings blank by default

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["experiment", "--kind", "tree", "--dims", "128", "--sizes", "2",
                "--trials", "3"]
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_timings_flag_fills_last_field(self, tmp_path):
        out = tmp_path / "t.csv"
        rc = main(["experiment", "--kind", "list", "--dims", "128", "--sizes", "2",
                   "--trials", "2", "--timings", "-o", str(out)])
        assert rc == 0
        last = out.read_text().splitlines()[1].rsplit(",", 1)[1]
        assert float(last) >= 0.0

    def test_bad_spec_exits_2(self, tmp_path):
        rc = main(["experiment", "--kind", "parse", "--dims", "128", "--sizes", "3",
                   "--trials", "2", "-o", str(tmp_path / "x.csv")])
        assert rc == 2


class TestSeparation:
    def test_probe_csv(self, tmp_path):
        out = tmp_path / "sep.csv"
        rc = main(["separation", "--dim", "128", "--depth", "2", "--samples", "30",
                   "--runs", "2", "-o", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "d,depth,samples,max_abs_ip,jl_bound,violations"
        assert len(lines) == 3
        for line in lines[1:]:
            assert line.endswith(",0")  # no violations at this dimension

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["separation", "--dim", "128", "--depth", "2", "--samples", "30", "--runs", "2"]
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestUsage:
    def test_no_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_argument(self):
        with pytest.raises(SystemExit) as exc:
            main(["embed", "--dim", "64"])
        assert exc.value.code == 2

    def test_missing_file_exits_2(self, tmp_path):
        rc = main(["decode", "--embedding", str(tmp_path / "none.bte"),
                   "--vector", str(tmp_path / "none.btv")])
        assert rc == 2


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "btembed", "--version"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip().startswith("btembed ")
