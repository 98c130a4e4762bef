"""Command surface: config ingestion, dispatch, exit codes, and artifacts."""
from __future__ import annotations

import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from infochain import (
    BinaryPrior,
    Kind,
    conformist_table,
    receiver_class,
    sender_classes,
)
from infochain.cli import (
    ParseError,
    RunConfig,
    ValidationError,
    hierarchy_doc,
    hierarchy_from_doc,
    ingest,
    main,
)
from infochain.oracle import ResolutionTooCoarse, SeedRequired

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
ORDERING = CONFIGS / "binary_ordering.json"
PARTIAL = CONFIGS / "binary_partial.json"
INTERIOR = CONFIGS / "uniform_interior.json"
SILENT = CONFIGS / "uniform_silent.json"


def run_json(capsys, *args):
    code = main([*map(str, args)])
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestIngest:
    def test_well_formed_binary(self):
        h = ingest(ORDERING)
        assert h.prior == BinaryPrior(F(3, 5))
        assert [c.kind for c in sender_classes(h)] == [
            Kind.CONFORMIST, Kind.CONTRARIAN, Kind.CONFORMIST,
        ]
        assert receiver_class(h).threshold == F(2, 5)
        assert h.senders[0].label == "analyst"

    def test_duplicate_thresholds(self, tmp_path):
        doc = json.loads(ORDERING.read_text())
        doc["senders"][1] = doc["senders"][2]
        path = tmp_path / "dup.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="thresholds must be pairwise distinct"):
            ingest(path)

    def test_threshold_collides_with_prior(self, tmp_path):
        doc = json.loads(ORDERING.read_text())
        u = conformist_table(F(3, 5))
        doc["senders"][0]["params"] = {
            k: str(getattr(u, k)) for k in ("u00", "u10", "u01", "u11")
        }
        path = tmp_path / "collide.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError, match="threshold collides with prior"):
            ingest(path)

    def test_malformed_json_carries_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"prior": {"kind": "uniform"},\n  "senders": [}')
        with pytest.raises(ParseError) as err:
            ingest(path)
        assert err.value.line == 2

    def test_schema_errors_name_the_field(self, tmp_path):
        base = json.loads(SILENT.read_text())
        for mutate, field in [
            (lambda d: d["senders"][0].pop("model"), "senders[0].model"),
            (lambda d: d["senders"][1]["params"].pop("beta"), "senders[1].params.beta"),
            (lambda d: d["receiver"]["params"].update(alpha="x/y"), "receiver.params.alpha"),
            (lambda d: d.update(prior={"kind": "gaussian"}), "prior.kind"),
            (lambda d: d.update(senders=[]), "senders"),
        ]:
            doc = json.loads(json.dumps(base))
            mutate(doc)
            path = tmp_path / "mut.json"
            path.write_text(json.dumps(doc))
            with pytest.raises(ParseError) as err:
                ingest(path)
            assert err.value.field == field

    @pytest.mark.parametrize("fixture", ["binary_ordering", "binary_partial",
                                         "uniform_interior", "uniform_silent"])
    def test_documents_round_trip(self, fixture):
        h = ingest(CONFIGS / f"{fixture}.json")
        assert hierarchy_from_doc(hierarchy_doc(h)) == h


class TestRunConfig:
    def test_simulate_needs_seed(self):
        with pytest.raises(SeedRequired):
            RunConfig(ORDERING, "simulate").validate()

    def test_grid_floor_for_oracle_commands(self):
        for command in ("oracle", "compare"):
            with pytest.raises(ResolutionTooCoarse):
                RunConfig(ORDERING, command, grid=9).validate()
            RunConfig(ORDERING, command, grid=10).validate()

    def test_delta_domain(self):
        with pytest.raises(ValidationError):
            RunConfig(ORDERING, "vp", delta=F(3, 2)).validate()

    def test_unknown_command(self):
        with pytest.raises(ValidationError):
            RunConfig(ORDERING, "meditate").validate()


class TestCommands:
    def test_classify(self, capsys):
        code, doc = run_json(capsys, "classify", "--config", ORDERING)
        assert code == 0
        kinds = [a["kind"] for a in doc["agents"]]
        assert kinds == ["conformist", "contrarian", "conformist", "conformist"]
        assert doc["pivotal"]["a_star"] == 1
        assert doc["pivotal"]["a_star_threshold"] == "1/4"
        assert doc["pivotal"]["e_star"] == 2
        assert doc["relabeling"] == {"flip_action": False, "flip_state": False}

    def test_solve_binary(self, capsys):
        code, doc = run_json(capsys, "solve", "--config", ORDERING)
        assert code == 0
        assert doc["game"] == "binary"
        assert doc["kind"] == "no-info"
        assert doc["cause"] == "ordering"
        assert doc["support"] == ["3/5"]
        assert doc["witness"] == ["1/10", "1/4"]
        assert doc["labels"][-1] == "board"

    def test_solve_uniform(self, capsys):
        code, doc = run_json(capsys, "solve", "--config", INTERIOR)
        assert code == 0
        assert doc["game"] == "uniform"
        assert doc["support"] == ["4/25", "33/50"]
        assert doc["cut"] == "8/25"
        assert doc["condition_trace"] == "c"
        assert doc["efficient"] is True

    def test_oracle_binary(self, capsys):
        code, doc = run_json(capsys, "oracle", "--config", ORDERING, "--grid", 20)
        assert code == 0
        assert doc["spe"] == [["3/5"]]
        assert set(doc["pass_levels"]) == {"2", "3"}
        assert doc["garble_proof_size"] <= int(doc["pass_levels"]["2"])

    def test_oracle_uniform(self, capsys):
        code, doc = run_json(capsys, "oracle", "--config", INTERIOR, "--grid", 100)
        assert code == 0
        assert ["4/25", "33/50"] in doc["spe"]

    @pytest.mark.parametrize("fixture", [PARTIAL, INTERIOR, SILENT])
    def test_compare_agrees_on_fixtures(self, capsys, fixture):
        code, doc = run_json(capsys, "compare", "--config", fixture, "--grid", 100)
        assert code == 0
        assert doc["matched"] is True

    def test_compare_flags_off_grid_support(self, capsys, tmp_path):
        doc = json.loads(PARTIAL.read_text())
        u = conformist_table(F(23, 100))
        doc["senders"][1]["params"] = {
            k: str(getattr(u, k)) for k in ("u00", "u10", "u01", "u11")
        }
        path = tmp_path / "offgrid.json"
        path.write_text(json.dumps(doc))
        code, out = run_json(capsys, "compare", "--config", path, "--grid", 20)
        assert code == 2
        assert out["matched"] is False
        assert out["closed_form"]["support"] == ["23/100", "1"]
        code, out = run_json(capsys, "compare", "--config", path, "--grid", 100)
        assert code == 0

    def test_vp_binary(self, capsys):
        code, doc = run_json(capsys, "vp", "--config", ORDERING)
        assert code == 0
        assert doc["improvable"] is True
        assert doc["rule"] == "bridge-blocker-gap"
        assert doc["interval"] == ["1/10", "1/4"]
        vp = conformist_table(F(23, 200))
        assert doc["appointees"][0]["params"]["u11"] == str(vp.u11)
        assert doc["after"]["support"] == ["23/200", "1"]
        assert doc["receiver_gain"] == "76/295"

    def test_vp_uniform(self, capsys):
        code, doc = run_json(capsys, "vp", "--config", SILENT)
        assert code == 0
        assert doc["rule"] == "tighten-pivot"
        assert doc["appointees"][0]["params"] == {"alpha": "1", "beta": "-3/20"}
        assert doc["after"]["support"] == ["3/20", "13/20"]
        assert doc["before"]["efficient"] is False and doc["after"]["efficient"] is True

    def test_vp_no_improvement_is_a_clean_exit(self, capsys, tmp_path):
        doc = json.loads(PARTIAL.read_text())
        doc["senders"] = doc["senders"][1:]  # all conformists: already full info
        path = tmp_path / "allconf.json"
        path.write_text(json.dumps(doc))
        code, out = run_json(capsys, "vp", "--config", path)
        assert code == 0
        assert out["improvable"] is False
        assert out["reason"]

    def test_vp_respects_delta_flag(self, capsys):
        code, doc = run_json(capsys, "vp", "--config", ORDERING, "--delta", "1/2")
        assert code == 0
        assert doc["after"]["support"] == ["7/40", "1"]

    def test_simulate_matches_analytic(self, capsys):
        code, doc = run_json(capsys, "simulate", "--config", INTERIOR,
                             "--trials", 20000, "--seed", 7)
        assert code == 0
        assert doc["equilibrium_support"] == ["4/25", "33/50"]
        for row in doc["rows"]:
            assert abs(row["z"]) < 4
            assert row["stderr"] > 0

    def test_simulate_is_deterministic(self, capsys, tmp_path):
        outs = []
        for name in ("a", "b"):
            out_dir = tmp_path / name
            code = main(["simulate", "--config", str(PARTIAL), "--trials", "5000",
                         "--seed", "42", "--out", str(out_dir)])
            capsys.readouterr()
            assert code == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out_dir.iterdir())})
        assert outs[0] == outs[1]
        assert set(outs[0]) == {"simulate.csv", "simulate.json"}

    def test_curve(self, capsys, tmp_path):
        out_dir = tmp_path / "curve"
        code = main(["curve", "--config", str(INTERIOR), "--out", str(out_dir)])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["argmax_m0"] == "4/25"
        assert doc["argmax_value"] == "289/1250"
        assert len(doc["rows"]) == 51
        by_m0 = {row["m0"]: row for row in doc["rows"]}
        assert by_m0["4/25"]["subgame_kind"] == "pass"
        assert by_m0["0"]["subgame_kind"] == "blocked"
        lines = (out_dir / "curve.csv").read_text().splitlines()
        assert lines[0] == "m0,m1,player1_value,subgame_kind"
        assert "0.16,0.66,0.2312,pass" in lines

    def test_curve_rejects_binary_chains(self, capsys):
        assert main(["curve", "--config", str(ORDERING)]) == 1
        assert "uniform-state" in capsys.readouterr().err

    def test_csv_format_curve(self, capsys):
        code = main(["curve", "--config", str(INTERIOR), "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("m0,m1,player1_value,subgame_kind\n")

    def test_csv_format_flattens_scalar_reports(self, capsys):
        code = main(["solve", "--config", str(SILENT), "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("key,value\n")
        assert "kind,no-info" in out

    @pytest.mark.parametrize("args", [
        ("classify", "--config", ORDERING),
        ("solve", "--config", INTERIOR),
        ("oracle", "--config", ORDERING, "--grid", 20),
        ("compare", "--config", PARTIAL, "--grid", 100),
        ("vp", "--config", SILENT),
        ("simulate", "--config", INTERIOR, "--seed", 3, "--trials", 1000),
        ("curve", "--config", INTERIOR),
    ])
    def test_reports_reparse_under_the_schema(self, capsys, args):
        code, doc = run_json(capsys, *args)
        assert code == 0
        assert hierarchy_from_doc(doc["hierarchy"]) == ingest(Path(str(args[2])))
        assert doc["command"] == args[0]


class TestExitCodes:
    def test_validation_failures_exit_one(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["solve", "--config", str(bad)]) == 1
        assert main(["simulate", "--config", str(PARTIAL)]) == 1
        assert main(["oracle", "--config", str(PARTIAL), "--grid", "3"]) == 1
        assert main(["vp", "--config", str(ORDERING), "--delta", "7"]) == 1
        assert main(["vp", "--config", str(ORDERING), "--delta", "abc"]) == 1
        capsys.readouterr()

    def test_internal_faults_exit_three(self, capsys, monkeypatch):
        from infochain import cli

        def boom(h, cfg):
            raise RuntimeError("wires crossed")

        monkeypatch.setitem(cli._COMMANDS, "solve", boom)
        assert main(["solve", "--config", str(ORDERING)]) == 3
        assert "internal error" in capsys.readouterr().err
