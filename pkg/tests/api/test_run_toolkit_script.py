import json

from scripts.run_toolkit import build_parser, main


def test_parser_defaults() -> None:
    args = build_parser().parse_args(["--config", "c.json"])
    assert args.out is None and args.quad_order is None and args.seed is None


def test_main_runs_a_config_with_overrides(tmp_path, capsys) -> None:
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"command": "ode-verify"}), encoding="utf-8")
    out = tmp_path / "out"
    code = main(["--config", str(config), "--out", str(out), "--seed", "3"])
    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["exit_code"] == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["seed"] == 3
    assert (out / "metadata.json").exists() and (out / "metrics.jsonl").exists()


def test_main_reports_schema_errors(tmp_path, capsys) -> None:
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"command": "ode-verify", "numeric": {"radii": [1.0]}}))
    assert main(["--config", str(config)]) == 2
    assert json.loads(capsys.readouterr().out)["exit_code"] == 2
