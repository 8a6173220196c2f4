"""CLI contract: documents round-trip, exit codes, determinism, DOT export."""

from __future__ import annotations

import json

import pytest

from finstruct import cli
from finstruct.core import Signature, Structure
from finstruct.families import AbelianGroup, diagram_Fn, diagram_lineq, gen_Fn


def run(capsys, *argv) -> tuple[int, str]:
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_round_trip_is_byte_identical(tmp_path):
    doc = cli.structure_to_doc(gen_Fn(3))
    text = cli.dump_canonical(doc)
    reparsed = cli.structure_from_doc(json.loads(text))
    assert cli.dump_canonical(cli.structure_to_doc(reparsed)) == text


def test_diagram_document_round_trip():
    d = diagram_Fn(3)
    doc = cli.diagram_to_doc(d)
    again = cli.diagram_from_doc(json.loads(cli.dump_canonical(doc)))
    assert again == d


def test_diagram_document_validates_embeddings():
    d = diagram_Fn(3)
    doc = cli.diagram_to_doc(d)
    doc["leftEmb"]["v1"] = "v2"  # no longer injective
    with pytest.raises(Exception):
        cli.diagram_from_doc(doc)


def test_gen_fn(tmp_path, capsys):
    out = tmp_path / "f3.json"
    code, _ = run(capsys, "gen", "fn", "--n", "3", "-o", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["domain"]) == 5


def test_gen_lineq_diagram(capsys):
    code, text = run(capsys, "gen", "lineq", "--n", "8", "--group", "2", "--diagram")
    assert code == 0
    doc = json.loads(text)
    assert len(doc["base"]["domain"]) == 8
    assert len(doc["left"]["domain"]) == 22


def test_gen_template(capsys):
    code, text = run(capsys, "gen", "template", "--group", "2")
    assert code == 0
    assert len(json.loads(text)["domain"]) == 6


def test_gen_bad_params_exit_2(capsys):
    code, _ = run(capsys, "gen", "fn")
    assert code == 2
    code, _ = run(capsys, "gen", "lineq", "--n", "3", "--group", "2")
    assert code == 2


def test_hom_exit_codes(tmp_path, capsys):
    f3 = tmp_path / "f3.json"
    f4 = tmp_path / "f4.json"
    run(capsys, "gen", "fn", "--n", "3", "-o", str(f3))
    run(capsys, "gen", "fn", "--n", "4", "-o", str(f4))
    code, _ = run(capsys, "hom", "--from", str(f3), "--to", str(f4))
    assert code == 1
    code, _ = run(capsys, "hom", "--from", str(f3), "--to", str(f3))
    assert code == 0
    code, text = run(capsys, "hom", "--from", str(f3), "--to", str(f3), "--all", "--count")
    assert code == 0
    lines = text.strip().splitlines()
    assert int(lines[-1]) == len(lines) - 1 >= 1
    code, _ = run(capsys, "hom", "--from", str(f3), "--to", "/nonexistent.json")
    assert code == 2
    code, _ = run(capsys, "hom", "--from", str(f3), "--to", str(f3), "--kind", "isomorphism")
    assert code == 0
    code, text = run(
        capsys, "hom", "--from", str(f3), "--to", str(f3), "--kind", "embedding", "--count"
    )
    assert code == 0 and int(text.strip()) >= 1
    code, _ = run(capsys, "hom", "--from", str(f3), "--to", str(f4), "--kind", "monomorphism")
    assert code == 1


def test_consist_exit_codes(tmp_path, capsys):
    template = tmp_path / "t2.json"
    run(capsys, "gen", "template", "--group", "2", "-o", str(template))
    solvable = tmp_path / "m0.json"
    run(capsys, "gen", "lineq", "--n", "4", "--group", "2", "-o", str(solvable))
    code, _ = run(capsys, "consist", str(solvable), str(template), "--k", "2", "--l", "3")
    assert code == 0

    amalgam_doc = cli.structure_to_doc(
        diagram_lineq(2, AbelianGroup([2])).free_amalgam().amalgam
    )
    amalgam = tmp_path / "am.json"
    amalgam.write_text(cli.dump_canonical(amalgam_doc))
    trace_out = tmp_path / "trace.json"
    code, _ = run(
        capsys,
        "consist", str(amalgam), str(template), "--k", "2", "--l", "3",
        "--trace", str(trace_out),
    )
    assert code == 1
    trace_doc = json.loads(trace_out.read_text())
    assert trace_doc["pebbles"] == [] and trace_doc["action"] == "extend"

    code, _ = run(capsys, "consist", str(solvable), str(template), "--k", "3", "--l", "2")
    assert code == 2


def test_confuse_fn_small(tmp_path, capsys):
    diagram = tmp_path / "d2.json"
    run(capsys, "gen", "fn", "--n", "2", "--diagram", "-o", str(diagram))
    code, text = run(
        capsys,
        "confuse", "--diagram", str(diagram), "--m", "2", "--class", "fn", "--jobs", "1",
    )
    assert code == 0
    report = json.loads(text)
    assert report["colorings_tested"] == 16 and report["verdict"] is True


def test_confuse_lineq_failures_exit_1(tmp_path, capsys):
    diagram = tmp_path / "dl2.json"
    run(capsys, "gen", "lineq", "--n", "2", "--group", "2", "--diagram", "-o", str(diagram))
    code, text = run(
        capsys,
        "confuse", "--diagram", str(diagram), "--m", "2",
        "--class", "lineq:2,3,2", "--jobs", "1",
    )
    assert code == 1
    report = json.loads(text)
    assert len(report["failures"]) == 8


def test_confuse_budget_exit_2(tmp_path, capsys):
    diagram = tmp_path / "d3.json"
    run(capsys, "gen", "fn", "--n", "3", "--diagram", "-o", str(diagram))
    code, _ = run(
        capsys,
        "confuse", "--diagram", str(diagram), "--m", "3", "--class", "fn", "--jobs", "1",
    )
    assert code == 2


def test_confuse_sample_deterministic(tmp_path, capsys):
    diagram = tmp_path / "d3.json"
    run(capsys, "gen", "fn", "--n", "3", "--diagram", "-o", str(diagram))
    outputs = []
    for _ in range(2):
        code, text = run(
            capsys,
            "confuse", "--diagram", str(diagram), "--m", "2", "--mode", "sample",
            "--samples", "10", "--seed", "7", "--class", "fn", "--jobs", "1",
        )
        assert code == 0
        outputs.append(text)
    assert outputs[0] == outputs[1]


def test_bounds_command(capsys):
    code, text = run(capsys, "bounds", "--n", "2", "--r", "1", "--t", "1", "--find-m")
    assert code == 0
    doc = json.loads(text)
    assert doc["minimal_m"] == "12"
    assert doc["report"]["q"] == "8" and doc["report"]["p"] == 3

    code, text = run(capsys, "bounds", "--n", "2", "--r", "1", "--t", "1", "--m", "11")
    assert code == 0
    assert json.loads(text)["verdict"] is False

    code, text = run(capsys, "bounds", "--n", "1", "--r", "1", "--t", "0", "--m", "3")
    assert code == 0
    assert json.loads(text)["verdict"] is False

    code, _ = run(capsys, "bounds", "--n", "1", "--r", "2", "--t", "0", "--m", "3")
    assert code == 2


def test_export_dot(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text(
        cli.dump_canonical(cli.structure_to_doc(Structure(Signature([("E", 2)]), [], {})))
    )
    code, text = run(capsys, "export-dot", str(empty))
    assert code == 0
    assert "->" not in text

    f3 = tmp_path / "f3.json"
    run(capsys, "gen", "fn", "--n", "3", "-o", str(f3))
    code, text = run(capsys, "export-dot", str(f3), "--symmetric", "E")
    assert code == 0
    undirected = [line for line in text.splitlines() if "dir=none" in line]
    directed = [line for line in text.splitlines() if '"Ed"' in line]
    assert len(undirected) == 6 and len(directed) == 2

    t2 = tmp_path / "t2.json"
    run(capsys, "gen", "template", "--group", "2", "-o", str(t2))
    code, text = run(capsys, "export-dot", str(t2))
    projections = [line for line in text.splitlines() if '"pi' in line]
    assert len(projections) == 12


def test_export_dot_factor_nodes(tmp_path, capsys):
    ternary = Structure(
        Signature([("W", 3)]), ["a", "b", "c"], {"W": [("a", "b", "c")]}
    )
    path = tmp_path / "ternary.json"
    path.write_text(cli.dump_canonical(cli.structure_to_doc(ternary)))
    code, text = run(capsys, "export-dot", str(path))
    assert code == 0
    assert 'label="1"' in text and 'label="3"' in text
    assert '"W#0"' in text


def test_same_inputs_same_bytes(tmp_path, capsys):
    first = run(capsys, "gen", "g", "--shape", "((..)(..))")[1]
    second = run(capsys, "gen", "g", "--shape", "((..)(..))")[1]
    assert first == second
