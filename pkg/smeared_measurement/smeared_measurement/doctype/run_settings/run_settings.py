# Copyright (c) 2024, Palak P and contributors
# For license information, please see license.txt

import dataclasses
import json
import math
import os
from dataclasses import dataclass

import yaml

from smeared_measurement.exceptions import ConfigError

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "run_settings.json")


@dataclass(frozen=True)
class GridSpec:
	x_min: float
	x_max: float
	n: int


@dataclass(frozen=True)
class WavefunctionSpec:
	type: str
	s: float
	x0: float
	p0: float


@dataclass(frozen=True)
class ChannelSpec:
	sigma: float
	convention: str
	transform: str


@dataclass(frozen=True)
class AnalysisSpec:
	widths: bool
	purity: bool
	entropy: bool
	momentum: bool
	classify: bool
	classical: bool


@dataclass(frozen=True)
class RegimeSpec:
	ref_x: float
	ref_p: float
	factor: float


@dataclass(frozen=True)
class CoarseGrainingSpec:
	sigma_si: float
	N: float
	velocity: float


@dataclass(frozen=True)
class SweepSpec:
	s_values: tuple
	sigma_values: tuple
	mode: str
	adaptive_grid: bool
	box_factor: float


@dataclass(frozen=True)
class PovmSpec:
	dim_s: int
	dim_a: int
	seed: int
	unitary: str
	trials: int


@dataclass(frozen=True)
class OutputSpec:
	path: str
	format: str


@dataclass(frozen=True)
class RunSpec:
	threads: int


@dataclass(frozen=True)
class RunConfig:
	grid: GridSpec
	wavefunction: WavefunctionSpec
	channel: ChannelSpec
	analysis: AnalysisSpec
	regime: RegimeSpec
	coarse_graining: CoarseGrainingSpec
	sweep: SweepSpec
	povm: PovmSpec
	output: OutputSpec
	run: RunSpec
	source: str = "<defaults>"

	def to_dict(self):
		data = dataclasses.asdict(self)
		data.pop("source")
		return data


SECTION_CLASSES = {
	"grid": GridSpec,
	"wavefunction": WavefunctionSpec,
	"channel": ChannelSpec,
	"analysis": AnalysisSpec,
	"regime": RegimeSpec,
	"coarse_graining": CoarseGrainingSpec,
	"sweep": SweepSpec,
	"povm": PovmSpec,
	"output": OutputSpec,
	"run": RunSpec,
}


class RunSettings:
	"""Field schema of a run file, read from run_settings.json."""

	def __init__(self, schema_path=SCHEMA_PATH):
		with open(schema_path) as f:
			schema = json.load(f)
		self.sections = {}
		section = None
		for field in schema["fields"]:
			if field["fieldtype"] == "Section Break":
				section = field["fieldname"]
				self.sections[section] = {}
			else:
				self.sections[section][field["fieldname"]] = field

	def load(self, path, command, overrides=None):
		"""
		Parse and validate a YAML run file.

		Args:
		    path (str): YAML file, or None for defaults only
		    command (str): Subcommand, selects which fields are mandatory
		    overrides (dict, optional): ``section.field`` -> value from the command line

		Returns:
		    RunConfig: Validated configuration

		Raises:
		    ConfigError: With field name and line of the first problem
		"""
		data, lines = {}, {}
		if path:
			try:
				with open(path) as f:
					text = f.read()
			except OSError as e:
				raise ConfigError(f"cannot read run file: {e}")
			data, lines = parse_yaml(text)
		if not isinstance(data, dict):
			raise ConfigError("run file must be a mapping of sections", line=1)
		for key, value in (overrides or {}).items():
			if value is not None:
				section, _, fieldname = key.partition(".")
				if data.get(section) is None:
					data[section] = {}
				elif not isinstance(data[section], dict):
					raise ConfigError("section must be a mapping", fieldname=section, line=lines.get(section, 0))
				data[section][fieldname] = value
		return self.validate(data, lines, command, source=path or "<defaults>")

	def validate(self, data, lines, command, source="<memory>"):
		if not isinstance(data, dict):
			raise ConfigError("run file must be a mapping of sections", line=1)
		for section in data:
			if section not in self.sections:
				raise ConfigError("unknown section", fieldname=section, line=lines.get(section, 0))

		sections = {}
		for section, fields in self.sections.items():
			raw = data.get(section) or {}
			if not isinstance(raw, dict):
				raise ConfigError("section must be a mapping", fieldname=section, line=lines.get(section, 0))
			for key in raw:
				if key not in fields:
					path = f"{section}.{key}"
					raise ConfigError("unknown field", fieldname=path, line=lines.get(path, 0))
			values = {}
			for fieldname, field in fields.items():
				path = f"{section}.{fieldname}"
				line = lines.get(path, lines.get(section, 0))
				values[fieldname] = coerce_field(field, raw.get(fieldname), command, path, line)
			sections[section] = SECTION_CLASSES[section](**values)

		if sections["grid"].x_max <= sections["grid"].x_min:
			raise ConfigError("x_max must exceed x_min", fieldname="grid.x_max", line=lines.get("grid.x_max", 0))
		if sections["regime"].ref_p is None:
			regime = sections["regime"]
			sections["regime"] = dataclasses.replace(regime, ref_p=1.0 / regime.ref_x)
		return RunConfig(source=source, **sections)


def parse_yaml(text):
	"""
	Load YAML and remember the line of every ``section`` and ``section.field`` key.

	Raises:
	    ConfigError: On YAML syntax errors
	"""
	try:
		node = yaml.compose(text, Loader=yaml.SafeLoader)
		data = yaml.safe_load(text)
	except yaml.YAMLError as e:
		mark = getattr(e, "problem_mark", None)
		raise ConfigError(f"invalid YAML: {getattr(e, 'problem', e)}", line=mark.line + 1 if mark else 0)
	lines = {}
	if isinstance(node, yaml.MappingNode):
		for key_node, value_node in node.value:
			lines[key_node.value] = key_node.start_mark.line + 1
			if isinstance(value_node, yaml.MappingNode):
				for sub_key, _ in value_node.value:
					lines[f"{key_node.value}.{sub_key.value}"] = sub_key.start_mark.line + 1
	return data if data is not None else {}, lines


def _to_float(value, path, line):
	if isinstance(value, bool):
		raise ConfigError(f"expected a number, got {value!r}", fieldname=path, line=line)
	try:
		number = float(value)
	except (TypeError, ValueError):
		raise ConfigError(f"expected a number, got {value!r}", fieldname=path, line=line)
	if not math.isfinite(number):
		raise ConfigError("value must be finite", fieldname=path, line=line)
	return number


def _check_range(field, number, path, line):
	if field.get("positive") and not number > 0:
		raise ConfigError(f"value must be positive, got {number}", fieldname=path, line=line)
	if field.get("non_negative") and number < 0:
		raise ConfigError(f"value must be non-negative, got {number}", fieldname=path, line=line)
	if "min" in field and number < field["min"]:
		raise ConfigError(f"value must be at least {field['min']}, got {number}", fieldname=path, line=line)
	if "max" in field and number > field["max"]:
		raise ConfigError(f"value must be at most {field['max']}, got {number}", fieldname=path, line=line)


def coerce_field(field, value, command, path, line):
	"""Apply default, mandatory rule, type and range of one schema field."""
	if value is None:
		if command in field.get("mandatory_for", []):
			raise ConfigError(f"required for '{command}' but missing", fieldname=path, line=line)
		value = field.get("default")
		if value is None:
			return None

	fieldtype = field["fieldtype"]
	if fieldtype == "Float":
		number = _to_float(value, path, line)
		_check_range(field, number, path, line)
		return number
	if fieldtype == "Int":
		number = _to_float(value, path, line)
		if number != int(number):
			raise ConfigError(f"expected an integer, got {value!r}", fieldname=path, line=line)
		_check_range(field, number, path, line)
		return int(number)
	if fieldtype == "Check":
		if isinstance(value, str):
			value = value.strip() not in ("0", "", "false", "no")
		return bool(value)
	if fieldtype == "Select":
		options = field.get("options", "").split("\n")
		if str(value) not in options:
			allowed = ", ".join(o for o in options if o)
			raise ConfigError(f"expected one of {allowed}, got {value!r}", fieldname=path, line=line)
		return str(value) or None
	if fieldtype == "Float List":
		if not isinstance(value, (list, tuple)) or not value:
			raise ConfigError("expected a non-empty list of numbers", fieldname=path, line=line)
		numbers = tuple(_to_float(v, path, line) for v in value)
		for number in numbers:
			_check_range(field, number, path, line)
		return numbers
	return str(value)


def get_run_settings():
	return RunSettings()
