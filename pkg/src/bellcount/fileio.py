"""Experiment / simulation-config JSON files and report rendering.

Experiment file layout::

    {
      "reference_trials": 28000000,            # optional
      "model": {"r": 0.26},
      "angles_deg": {"a": 3.8, "a_prime": -25.2, "b": -3.8, "b_prime": 25.2},
      "settings": [{"alice": "a", "bob": "b", "trials": 27220875, "coincidences": 29173}, ...],
      "singles": {"alice": {"label": "a", "count": 0}, "bob": {"label": "b", "count": 0}}  # optional
    }

Unknown keys are rejected.  Reals are written with ``repr`` (shortest string
that round-trips exactly); display rounding happens only in the text report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from typing import Any

from .anomaly_report import ComparisonTable
from .count_pipeline import (
    DEFAULT_REFERENCE_TRIALS,
    ExperimentRecord,
    SettingData,
    SinglesCount,
)
from .errors import InvalidArgumentError, ParseError, SchemaError, UsageError, ValidationError
from .experiment_sim import SimConfig
from .quantum_model import PairSourceModel, SettingsQuad

REPORT_FORMATS = ("text", "csv", "json")
ANGLE_KEYS = ("a", "a_prime", "b", "b_prime")


def _load_json(document) -> Any:
    if isinstance(document, (bytes, bytearray)):
        try:
            text = bytes(document).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not valid UTF-8: {exc.reason} at byte {exc.start}") from exc
    else:
        text = document
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from exc


def _require(obj, key, where):
    if key not in obj:
        path = f"{where}.{key}" if where else key
        raise SchemaError(f"missing required field {path!r}", field=path)
    return obj[key]


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where or 'document'} must be a JSON object", field=where or None)
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        path = f"{where}.{unknown[0]}" if where else unknown[0]
        raise SchemaError(f"unknown field {path!r}", field=path)


def _int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field {path!r} must be an integer, got {value!r}", field=path)
    return value


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"field {path!r} must be a number, got {value!r}", field=path)
    if not math.isfinite(value):
        raise ValidationError(f"field {path!r} must be finite")
    return value


def _str(value, path):
    if not isinstance(value, str):
        raise SchemaError(f"field {path!r} must be a string, got {value!r}", field=path)
    return value


def _model(obj, where="model"):
    _check_keys(obj, ("r",), where)
    r = _real(_require(obj, "r", where), f"{where}.r")
    try:
        return PairSourceModel(r)
    except InvalidArgumentError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _angles(obj, where="angles_deg"):
    _check_keys(obj, ANGLE_KEYS, where)
    values = {k: _real(_require(obj, k, where), f"{where}.{k}") for k in ANGLE_KEYS}
    return SettingsQuad(**values)


def record_from_dict(data: dict) -> ExperimentRecord:
    _check_keys(data, ("reference_trials", "model", "angles_deg", "settings", "singles"), "")
    reference = _int(data.get("reference_trials", DEFAULT_REFERENCE_TRIALS), "reference_trials")
    model = _model(_require(data, "model", ""))
    angles = _angles(_require(data, "angles_deg", ""))
    items = _require(data, "settings", "")
    if not isinstance(items, list):
        raise SchemaError("field 'settings' must be an array", field="settings")
    if len(items) != 4:
        raise ValidationError(f"settings must hold exactly four entries, got {len(items)}")
    settings = []
    for i, item in enumerate(items):
        where = f"settings[{i}]"
        _check_keys(item, ("alice", "bob", "trials", "coincidences"), where)
        settings.append(
            SettingData(
                alice_label=_str(_require(item, "alice", where), f"{where}.alice"),
                bob_label=_str(_require(item, "bob", where), f"{where}.bob"),
                trials=_int(_require(item, "trials", where), f"{where}.trials"),
                coincidences=_int(_require(item, "coincidences", where), f"{where}.coincidences"),
            )
        )
    singles_alice = singles_bob = None
    if "singles" in data:
        singles = data["singles"]
        _check_keys(singles, ("alice", "bob"), "singles")
        parsed = []
        for party in ("alice", "bob"):
            where = f"singles.{party}"
            entry = _require(singles, party, "singles")
            _check_keys(entry, ("label", "count"), where)
            parsed.append(
                SinglesCount(
                    label=_str(_require(entry, "label", where), f"{where}.label"),
                    count=_int(_require(entry, "count", where), f"{where}.count"),
                )
            )
        singles_alice, singles_bob = parsed
    return ExperimentRecord(
        angles=angles,
        settings=tuple(settings),
        reference_trials=reference,
        singles_alice=singles_alice,
        singles_bob=singles_bob,
        model=model,
    )


def parse_experiment_file(document: bytes | str) -> ExperimentRecord:
    """Parse and fully validate an experiment document.

    Raises ParseError (bad JSON), SchemaError (missing / unknown / mistyped
    field) or ValidationError (value out of range, duplicate setting, ...).
    """
    return record_from_dict(_load_json(document))


def record_to_dict(record: ExperimentRecord) -> dict:
    if record.model is None:
        raise InvalidArgumentError("record has no model; the file format requires one")
    out = {
        "reference_trials": record.reference_trials,
        "model": {"r": record.model.r},
        "angles_deg": {k: record.angles.angle(k) for k in ANGLE_KEYS},
        "settings": [
            {"alice": s.alice_label, "bob": s.bob_label, "trials": s.trials, "coincidences": s.coincidences}
            for s in record.settings
        ],
    }
    if record.has_singles:
        out["singles"] = {
            "alice": {"label": record.singles_alice.label, "count": record.singles_alice.count},
            "bob": {"label": record.singles_bob.label, "count": record.singles_bob.count},
        }
    return out


def serialize_experiment(record: ExperimentRecord) -> bytes:
    return (json.dumps(record_to_dict(record), indent=2) + "\n").encode("utf-8")


def load_bundled(name: str = "christensen_table1.json") -> ExperimentRecord:
    """Load a fixture shipped in ``bellcount/data``."""
    return parse_experiment_file(resources.files("bellcount").joinpath("data", name).read_bytes())


def parse_sim_config(document: bytes | str) -> SimConfig:
    data = _load_json(document)
    allowed = (
        "model", "angles_deg", "trials_per_setting", "pair_probability", "eta1", "eta2",
        "anomaly_multiplier", "seed", "reference_trials",
    )
    _check_keys(data, allowed, "")
    trials = _require(data, "trials_per_setting", "")
    if isinstance(trials, int) and not isinstance(trials, bool):
        trials = [trials] * 4
    if not isinstance(trials, list):
        raise SchemaError("field 'trials_per_setting' must be an integer or an array of four", field="trials_per_setting")
    trials = [_int(t, f"trials_per_setting[{i}]") for i, t in enumerate(trials)]
    try:
        return SimConfig(
            model=_model(_require(data, "model", "")),
            angles=_angles(_require(data, "angles_deg", "")),
            trials_per_setting=tuple(trials),
            pair_probability=_real(_require(data, "pair_probability", ""), "pair_probability"),
            eta1=_real(_require(data, "eta1", ""), "eta1"),
            eta2=_real(_require(data, "eta2", ""), "eta2"),
            anomaly_multiplier=_real(data.get("anomaly_multiplier", 1.0), "anomaly_multiplier"),
            seed=_int(data.get("seed", 0), "seed"),
            reference_trials=_int(data.get("reference_trials", DEFAULT_REFERENCE_TRIALS), "reference_trials"),
        )
    except ValidationError:
        raise
    except InvalidArgumentError as exc:
        raise ValidationError(f"simulation config: {exc}") from exc


# ---------------------------------------------------------------- reports


def round_half_up(value: float, places: int = 0) -> Decimal:
    quantum = Decimal(1).scaleb(-places)
    return Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)


def _fmt(value, places):
    if value is None:
        return "n/a"
    return str(round_half_up(value, places))


def _num(value):
    # exact round-trip text for csv
    if value is None:
        return "n/a"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _render_text(table: ComparisonTable) -> str:
    headers = ["Settings"] + [f"C({row.label})" for row in table.rows]
    lines = [
        ["Experiment"] + [str(row.raw) for row in table.rows],
        ["Exper.corrected"] + [_fmt(row.corrected, 0) for row in table.rows],
        ["Quantum"] + [_fmt(row.predicted, 0) for row in table.rows],
        ["z-score"] + [_fmt(row.z_score, 2) for row in table.rows],
        ["ratio"] + [_fmt(row.ratio, 2) for row in table.rows],
    ]
    first = max(len(r[0]) for r in [headers] + lines)
    width = max(10, max(len(c) for r in [headers] + lines for c in r[1:]))
    a = table.angles
    out = [
        f"r = {table.model.r!r}",
        f"angles (deg): a = {a.a!r}, a' = {a.a_prime!r}, b = {a.b!r}, b' = {a.b_prime!r}",
        f"reference trials = {table.reference_trials}",
        f"fitted scale N*eta1*eta2 = {_fmt(table.scale, 0)}",
        "",
    ]
    for r in [headers] + lines:
        out.append(r[0].ljust(first) + "".join(c.rjust(width + 2) for c in r[1:]))
    out.append("")
    out.append("Q (probability)".ljust(first) + "".join(_fmt(row.probability, 6).rjust(width + 2) for row in table.rows))
    return "\n".join(out) + "\n"


def _render_csv(table: ComparisonTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["setting", "alice", "bob", "raw", "trials", "corrected", "probability", "predicted", "z_score", "ratio"])
    for row in table.rows:
        writer.writerow([
            row.label, row.alice, row.bob, row.raw, row.trials,
            _num(row.corrected), _num(row.probability), _num(row.predicted),
            _num(row.z_score), _num(row.ratio),
        ])
    writer.writerow(["# scale", _num(table.scale)])
    writer.writerow(["# reference_trials", table.reference_trials])
    writer.writerow(["# r", _num(table.model.r)])
    return buf.getvalue()


def table_to_dict(table: ComparisonTable) -> dict:
    return {
        "model": {"r": table.model.r},
        "angles_deg": {k: table.angles.angle(k) for k in ANGLE_KEYS},
        "reference_trials": table.reference_trials,
        "scale": table.scale,
        "sse": table.sse,
        "rows": [
            {
                "setting": row.label,
                "alice": row.alice,
                "bob": row.bob,
                "raw": row.raw,
                "trials": row.trials,
                "corrected": row.corrected,
                "probability": row.probability,
                "predicted": row.predicted,
                "z_score": row.z_score,
                "ratio": row.ratio,
            }
            for row in table.rows
        ],
    }


def render_report(table: ComparisonTable, format: str = "text") -> bytes:
    if format == "text":
        text = _render_text(table)
    elif format == "csv":
        text = _render_csv(table)
    elif format == "json":
        text = json.dumps(table_to_dict(table), indent=2) + "\n"
    else:
        raise UsageError(f"unknown report format {format!r}; choose from {', '.join(REPORT_FORMATS)}")
    return text.encode("utf-8")
