"""Config document parsing/validation and scenario script loading."""

import json

import pytest

from flexlab.config import (
    asset_path,
    config_from_dict,
    default_config,
    default_config_document,
    load_config,
)
from flexlab.control import OverrideKind
from flexlab.errors import ValidationError
from flexlab.scenario import ScenarioScript


def doc_with(**updates):
    doc = default_config_document()
    doc.update(updates)
    return doc


class TestDefaultConfig:
    def test_loads_and_validates(self):
        config = default_config()
        assert len(config.zones) == 4
        assert config.validate() == []
        assert config.dt_s == 60.0
        assert config.baseline.cooling_setpoint_c == 24.0
        assert config.baseline.start_min == 420

    def test_document_round_trips(self):
        config = config_from_dict(default_config_document())
        assert [z.id for z in config.zones] == \
            [v.zone_id for v in config.plant.vavs]


class TestConfigFromDict:
    def test_collects_violations_across_sections(self):
        doc = default_config_document()
        doc["zones"][0]["capacitance_j_per_k"] = -1.0
        del doc["plant"]["pi"]["kp"]
        doc["baseline"]["heating_setpoint_c"] = 30.0   # deadband break
        doc["dt_s"] = 0
        with pytest.raises(ValidationError) as exc:
            config_from_dict(doc)
        joined = "\n".join(exc.value.violations)
        assert "zones[0].capacitance_j_per_k" in joined
        assert "plant.pi.kp" in joined
        assert "deadband" in joined
        assert "dt_s" in joined
        assert len(exc.value.violations) >= 4

    def test_missing_sections_named(self):
        with pytest.raises(ValidationError) as exc:
            config_from_dict({"zones": []})
        joined = "\n".join(exc.value.violations)
        assert "config.plant" in joined
        assert "config.baseline" in joined
        assert "config.weather_path" in joined

    def test_non_object_rejected(self):
        with pytest.raises(ValidationError):
            config_from_dict([1, 2, 3])

    def test_dt_must_divide_day(self):
        with pytest.raises(ValidationError, match="divide"):
            config_from_dict(doc_with(dt_s=7.0))

    def test_vav_zone_mismatch(self):
        doc = default_config_document()
        doc["plant"]["vavs"][0]["zone_id"] = "elsewhere"
        with pytest.raises(ValidationError, match="does not match"):
            config_from_dict(doc)

    def test_initial_temp_guarded(self):
        with pytest.raises(ValidationError, match="initial_temp_c"):
            config_from_dict(doc_with(initial_temp_c=99.0))

    def test_weather_bare_name_falls_back_to_bundled(self):
        config = config_from_dict(doc_with(weather_path="weather_hot_day.csv"),
                                  base_dir="/nonexistent")
        assert config.weather.at(900).t_out_c == 34.0

    def test_weather_missing_file_named(self):
        with pytest.raises(ValidationError, match="file not found"):
            config_from_dict(doc_with(weather_path="gone/missing.csv"))

    def test_weather_violations_prefixed(self, tmp_path):
        (tmp_path / "w.csv").write_text(
            "minute,t_out_c,solar_w_m2\n10,20,0\n5,20,0\n", encoding="utf-8")
        with pytest.raises(ValidationError) as exc:
            config_from_dict(doc_with(weather_path="w.csv"), base_dir=tmp_path)
        assert any(v.startswith("weather_path: ") for v in exc.value.violations)


class TestLoadConfig:
    def test_file_not_found(self, tmp_path):
        with pytest.raises(ValidationError, match="file not found"):
            load_config(tmp_path / "missing.json")

    def test_json_error_carries_position(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{"zones": [,]}', encoding="utf-8")
        with pytest.raises(ValidationError, match=r"line 1 column 12"):
            load_config(p)

    def test_relative_weather_resolves_against_config_dir(self, tmp_path):
        (tmp_path / "w.csv").write_text(
            "minute,t_out_c,solar_w_m2\n0,21,0\n", encoding="utf-8")
        doc = doc_with(weather_path="w.csv")
        p = tmp_path / "config.json"
        p.write_text(json.dumps(doc), encoding="utf-8")
        config = load_config(p)
        assert config.weather.at(500).t_out_c == 21.0


class TestScenarioScript:
    def test_bundled_shed_script(self):
        script = ScenarioScript.load(asset_path("shed.json"))
        assert [e.t_min for e in script.events] == [720.0, 840.0]
        assert [e.command.mode for e in script.events] == [1.0, 0.0]

    def test_bundled_shift_script(self):
        script = ScenarioScript.load(asset_path("shift.json"))
        kinds = [e.command.kind for e in script.events]
        assert kinds == [OverrideKind.SCHEDULE_START, OverrideKind.COOLING_MODE,
                         OverrideKind.COOLING_MODE]

    def test_dump_load_round_trip(self, tmp_path):
        script = ScenarioScript.load(asset_path("shift.json"))
        p = tmp_path / "copy.json"
        script.dump(p)
        assert ScenarioScript.load(p) == script

    def test_ndjson_command_log_loads(self, tmp_path):
        p = tmp_path / "log.ndjson"
        p.write_text(
            '{"t_min":720,"command":{"kind":"cooling_mode","mode":1}}\n'
            '{"t_min":840,"command":{"kind":"clear_all"}}\n',
            encoding="utf-8")
        script = ScenarioScript.load(p)
        assert len(script.events) == 2
        assert script.events[1].command.kind is OverrideKind.CLEAR_ALL

    def test_unsorted_events_rejected(self):
        with pytest.raises(ValidationError, match="sorted ascending"):
            ScenarioScript.from_dict({"events": [
                {"t_min": 100, "command": {"kind": "clear_all"}},
                {"t_min": 50, "command": {"kind": "clear_all"}},
            ]})

    def test_violations_collected_with_paths(self):
        with pytest.raises(ValidationError) as exc:
            ScenarioScript.from_dict({"events": [
                {"t_min": -5, "command": {"kind": "clear_all"}},
                {"t_min": 10, "command": {"kind": "wat"}},
                "not an object",
            ]})
        joined = "\n".join(exc.value.violations)
        assert "events[0].t_min" in joined
        assert "events[1].command.kind" in joined
        assert "events[2]" in joined

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="file not found"):
            ScenarioScript.load(tmp_path / "none.json")

    def test_duplicate_times_apply_in_order(self):
        script = ScenarioScript.from_dict({"events": [
            {"t_min": 360, "command": {"kind": "schedule_start", "value": 360}},
            {"t_min": 360, "command": {"kind": "cooling_mode", "mode": -2}},
        ]})
        assert [e.command.kind for e in script.events] == \
            [OverrideKind.SCHEDULE_START, OverrideKind.COOLING_MODE]
