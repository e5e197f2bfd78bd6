import json

import jsonschema
import pytest

from nearopt.commands import run
from nearopt.config import ConfigError, RunConfig, load_config
from nearopt.reporting import RESULT_SCHEMA, load_result, result_document, to_json

GOOD = """\
command = "scenario"
design = [100, 99]
rules = ["ttest", "es"]
orientation = "mortality"
states = [[0.25, 0.40], [0.25, 0.15]]
"""


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestParsing:
    def test_mortality_is_converted(self, tmp_path):
        cfg = load_config(write(tmp_path, GOOD))
        assert cfg.states == [(0.75, 0.6), (0.75, 0.85)]
        assert cfg.input_orientation == "mortality"
        assert cfg.designs == [(100, 99)] and cfg.rules == ("ttest", "es")

    def test_success_orientation(self, tmp_path):
        cfg = load_config(write(tmp_path, GOOD.replace('"mortality"', '"success"')))
        assert cfg.states == [(0.25, 0.40), (0.25, 0.15)]

    @pytest.mark.parametrize("line,bad,message", [
        (4, 'orientation = "mortality"', "orientation"),
        (3, 'rules = ["ttest", "es"]', "rules"),
        (2, 'design = [100, 99]', "design"),
        (5, 'states = [[0.25, 0.40], [0.25, 0.15]]', "probabilities"),
    ])
    def test_errors_name_the_line(self, tmp_path, line, bad, message):
        replacement = {
            "orientation": 'orientation = "survival"',
            "rules": 'rules = ["ttest", "bayes"]',
            "design": "design = [100]",
            "probabilities": "states = [[0.25, 1.40]]",
        }[message]
        p = write(tmp_path, GOOD.replace(bad, replacement))
        with pytest.raises(ConfigError, match=rf"run\.toml:{line}:"):
            load_config(p)

    def test_missing_orientation(self, tmp_path):
        p = write(tmp_path, GOOD.replace('orientation = "mortality"\n', ""))
        with pytest.raises(ConfigError, match=r"run\.toml:4: .*orientation"):
            load_config(p)

    def test_unknown_key(self, tmp_path):
        p = write(tmp_path, GOOD + "colour = 3\n")
        with pytest.raises(ConfigError, match=r"run\.toml:6: unknown key 'colour'"):
            load_config(p)

    def test_toml_syntax_error_position(self, tmp_path):
        p = write(tmp_path, GOOD + "n_sims = \n")
        with pytest.raises(ConfigError, match=r"run\.toml:6:\d+:"):
            load_config(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.toml")

    @pytest.mark.parametrize("raw", [
        {"command": "scenario", "seed": -1},
        {"command": "scenario", "seed": 2 ** 64},
        {"command": "scenario", "alpha": 1.2},
        {"command": "scenario", "n_sims": 0},
        {"command": "scenario", "n_sims": True},
        {"command": "dance"},
        {"design": [2, 2]},
        {"command": "reproduce", "table": 5},
        {"command": "near-optimality", "step1_points": 0},
        {"command": "near-optimality", "step1": "yes"},
        {"command": "bounds", "V": -1},
        {"command": "plan", "target": 0},
    ])
    def test_invalid_values(self, raw):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(raw)

    def test_pipeline_overrides(self):
        cfg = RunConfig.from_dict({"command": "near-optimality", "pipeline": "desk",
                                   "step3_sims": 5000})
        assert cfg.pipeline_config().step3_sims == 5000
        assert cfg.pipeline_config().step1_points == 11


class TestRoundTrip:
    @pytest.mark.parametrize("raw", [
        {"command": "scenario", "design": [100, 99], "orientation": "mortality",
         "states": [[0.25, 0.7]], "rules": ["es"]},
        {"command": "near-optimality", "designs": [[20, 20], [6, 3, 3]], "seed": 5,
         "pipeline": "desk", "step1_sims": 100, "threads": 2},
        {"command": "bounds", "V": 0, "L": [2, 5], "n": [60]},
        {"command": "plan", "rule": "es", "shape": [2, 1, 1], "target": 0.03, "decimals": 4},
        {"command": "reproduce", "table": 3, "budget": "full", "format": "csv"},
    ])
    def test_dict_round_trip(self, raw):
        cfg = RunConfig.from_dict(raw)
        again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert again == cfg

    def test_result_document_round_trip(self):
        cfg = RunConfig.from_dict({"command": "scenario", "design": [10, 10],
                                   "orientation": "mortality", "states": [[0.3, 0.2]]})
        result = run(cfg)
        text = to_json(result)
        jsonschema.validate(json.loads(text), RESULT_SCHEMA)
        cfg2, records, _ = load_result(text)
        assert cfg2 == cfg
        assert records == json.loads(json.dumps(result_document(result)["records"]))
        # re-running the parsed config reproduces the document
        assert to_json(run(cfg2)) == text

    def test_result_file_is_a_config(self, tmp_path):
        cfg = RunConfig.from_dict({"command": "bounds", "L": [3], "n": [100]})
        p = write(tmp_path, to_json(run(cfg)), "result.json")
        assert load_config(p) == cfg

    def test_invalid_result_rejected(self):
        with pytest.raises(Exception):
            load_result(json.dumps({"schema_version": 1, "config": {}}))
