from evmech.app import SETTINGS
from evmech.cli import EXIT_PARSE, EXIT_USAGE, cli, run
from evmech.version import __version__
from click.testing import CliRunner
import json
import pathlib
import pytest
import textwrap


def test_version():
    runner = CliRunner()
    result = runner.invoke(cli, ["--version"])
    assert 0 == result.exit_code
    assert __version__ in result.output


def test_validate(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["validate", env_file("env_a")])
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert data["ok"]
    assert data["normal"]
    assert data["measurable"]
    assert [] == data["e1"]


def test_validate_is_the_default_command(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, [env_file("env_b")])
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert not data["measurable"]
    assert ["s1", "s2"] == data["violating_pair"]


def test_validate_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "states": ["s1", "s2"],\n  "agents": ,\n}', encoding="utf-8")
    runner = CliRunner()
    result = runner.invoke(cli, ["validate", str(path)])
    assert EXIT_PARSE == result.exit_code
    assert "broken.json:3:" in result.output


def test_run_returns_usage_exit_code(env_file):
    assert EXIT_USAGE == run(["verify", env_file("env_a")])
    assert EXIT_USAGE == run(["validate", "does-not-exist.json"])
    assert EXIT_USAGE == run(["verify", env_file("env_a"), "--variant", "nope"])


def test_run_returns_verdict_exit_code(env_file):
    assert 0 == run(["verify", env_file("env_a"), "--variant", "theorem1", "--samples", "1", "--no-mixed", "-o", "/dev/null"])


def test_classify(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["classify", env_file("env_a"), "--state", "s2"])
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert "s2" == data["truth"]
    assert ["s1"] == data["per_agent"]["1"]["RL"]


def test_classify_every_state(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["classify", env_file("env_a")])
    assert 0 == result.exit_code, result.output
    assert ["s1", "s2"] == [partition["truth"] for partition in json.loads(result.output)["partitions"]]


def test_classify_unknown_state(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["classify", env_file("env_a"), "--state", "s9"])
    assert 2 == result.exit_code


def test_synthesize_small_transfers(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["synthesize", env_file("env_3agents"), "--variant", "small:1/10"])
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert "small" == data["variant"]
    assert 63 == data["parameters"]["rounds"]
    assert "1/10" == data["parameters"]["dbar"]


def test_synthesize_refuses_nonmeasurable(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["synthesize", env_file("env_b"), "--variant", "theorem1"])
    assert 1 == result.exit_code
    assert "NotMeasurable" in result.output


def test_check_em(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["check-em", env_file("env_c")])
    assert 1 == result.exit_code
    data = json.loads(result.output)
    assert data["em_cp"] is False
    assert ["s4", "s2"] == data["violation"]
    result = runner.invoke(cli, ["check-em", env_file("env_e")])
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert data["em_cp"] and data["em_star"]


def test_check_rp(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["check-rp", env_file("env_d")])
    assert 1 == result.exit_code
    data = json.loads(result.output)
    assert "d" == data["pairs"][0]["case"]
    result = runner.invoke(cli, ["check-rp", env_file("env_d_modified")])
    assert 0 == result.exit_code
    assert json.loads(result.output)["ok"]


def test_verify(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", env_file("env_a"), "--variant", "theorem1", "--samples", "2", "--no-mixed"])
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert data["verdict"] in ("IMPLEMENTS", "CERTIFIED_ALL_V")
    assert 2 == data["samples"]


def test_verify_forced_failure(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", env_file("env_b"), "--variant", "theorem1", "--force", "--samples", "1"])
    assert 1 == result.exit_code
    data = json.loads(result.output)
    assert "FAILS" == data["verdict"]
    assert "indistinguishable" in data["witness"]


def test_verify_without_force_reports_the_gate(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", env_file("env_b"), "--variant", "theorem1"])
    assert 1 == result.exit_code
    assert "NotMeasurable" in result.output


def test_verify_help_settings():
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", "--help-settings"])
    assert 0 == result.exit_code
    for setting in SETTINGS:
        assert setting.name in result.output


def test_setting_option(env_file):
    runner = CliRunner()
    result = runner.invoke(
        cli,
        ["verify", env_file("env_a"), "--variant", "theorem1", "-s", "samples", "1", "-s", "mixed", "off", "--state", "s2"],
    )
    assert 0 == result.exit_code, result.output
    data = json.loads(result.output)
    assert 1 == data["samples"]
    assert ["s2"] == [state["state"] for state in data["states"]]


@pytest.mark.parametrize(
    "args,message",
    (
        (["-s", "samples", "many"], '"settings.samples" should be an integer'),
        (["-s", "mixed", "maybe"], '"settings.mixed" should be on/off/true/false/1/0'),
        (["-s", "eta", "1.5"], '"settings.eta" should be a rational such as 1/2'),
    ),
)
def test_setting_type_validation(env_file, args, message):
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", env_file("env_a"), "--variant", "theorem1"] + args)
    assert 2 == result.exit_code
    assert message in result.output


def test_config_file(env_file, tmp_path):
    config = tmp_path / "config.yml"
    config.write_text(
        textwrap.dedent(
            """
            settings:
              samples: 1
              mixed: false
            """
        ),
        encoding="utf-8",
    )
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", env_file("env_a"), "--variant", "theorem1", "-c", str(config)])
    assert 0 == result.exit_code, result.output
    assert 1 == json.loads(result.output)["samples"]


def test_config_file_invalid_setting(env_file, tmp_path):
    config = tmp_path / "config.yml"
    config.write_text("settings:\n  nope: 1\n", encoding="utf-8")
    runner = CliRunner()
    result = runner.invoke(cli, ["validate", env_file("env_a"), "-c", str(config)])
    assert 2 == result.exit_code
    assert "Invalid setting 'nope' in config" in result.output


def test_trace(env_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["verify", env_file("env_a"), "--variant", "theorem1", "--samples", "1", "--no-mixed", "--trace"])
    assert 0 == result.exit_code, result.output
    trace = json.loads(result.output)["_trace"]
    assert trace["num_traces"] == len(trace["traces"])
    assert "verify" in {t["type"] for t in trace["traces"]}


def test_output_file(env_file, tmp_path):
    output = tmp_path / "out.json"
    runner = CliRunner()
    result = runner.invoke(cli, ["check-rp", env_file("env_d_modified"), "-o", str(output)])
    assert 0 == result.exit_code
    assert "" == result.output
    assert json.loads(output.read_text())["ok"]


def test_corpus(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli, ["corpus", str(tmp_path / "fixtures")])
    assert 0 == result.exit_code, result.output
    written = json.loads(result.output)["written"]
    assert 58 == len(written)
    assert all(pathlib.Path(path).exists() for path in written)


def test_plugins():
    runner = CliRunner()
    result = runner.invoke(cli, ["plugins"])
    assert 0 == result.exit_code
    data = json.loads(result.output)
    names = [variant["name"] for variant in data["variants"]]
    assert ["balanced", "emstar", "rp", "small", "theorem1", "theorem3", "theorem4", "theorem4multi"] == names
    assert "evmech.mechanisms.hard" in [plugin["name"] for plugin in data["plugins"]]


@pytest.mark.parametrize("command", ("synthesize", "verify"))
def test_epsilon_help(command):
    runner = CliRunner()
    result = runner.invoke(cli, [command, "--help"])
    assert 0 == result.exit_code
    assert "Slack parameter for the cost-robust penalties" in " ".join(result.output.split())
