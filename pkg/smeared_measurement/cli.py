# Copyright (c) 2024, Palak P and contributors
# For license information, please see license.txt

import argparse
import logging
import sys

import yaml

from smeared_measurement import __version__, hooks
from smeared_measurement.config import configure_logging
from smeared_measurement.exceptions import ConfigError, ValidationError
from smeared_measurement.smeared_measurement.doctype.run_settings.run_settings import get_run_settings
from smeared_measurement.utils import get_attr, log_error


def build_parser():
	parser = argparse.ArgumentParser(
		prog="smeared-measurement",
		description="Smeared von Neumann measurements: channel, regimes, classical estimates and POVMs.",
	)
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	subparsers = parser.add_subparsers(dest="command", required=True)
	for command in hooks.commands:
		sub = subparsers.add_parser(command)
		sub.add_argument("--config", help="YAML run file")
		sub.add_argument("--output", help="output file, stdout when omitted")
		sub.add_argument("--format", choices=["csv", "report", "bin"])
		sub.add_argument("--seed", type=int, help="seed for random constructions")
		sub.add_argument("--threads", type=int, help="workers for sweep points")
		sub.add_argument(
			"--set",
			action="append",
			default=[],
			metavar="SECTION.FIELD=VALUE",
			help="override one run-file field, value parsed as YAML",
		)
		sub.add_argument("-v", "--verbose", action="store_true")
		if command == "povm-demo":
			sub.add_argument("--unitary", choices=["random", "identity"])
	return parser


def collect_overrides(args):
	"""Map command-line flags onto ``section.field`` keys of the run file."""
	overrides = {
		"output.path": args.output,
		"output.format": args.format,
		"povm.seed": args.seed,
		"run.threads": args.threads,
		"povm.unitary": getattr(args, "unitary", None),
	}
	for item in args.set:
		key, sep, value = item.partition("=")
		if not sep or "." not in key:
			raise ConfigError(f"expected SECTION.FIELD=VALUE, got {item!r}", fieldname="--set")
		overrides[key.strip()] = yaml.safe_load(value)
	return overrides


def format_config_error(e, source):
	location = f"{source}:{e.line}" if e.line else source
	return f"{location}: {e}"


def main(argv=None):
	args = build_parser().parse_args(argv)
	configure_logging(logging.DEBUG if args.verbose else logging.INFO)
	source = args.config or "<command line>"

	try:
		config = get_run_settings().load(args.config, args.command, collect_overrides(args))
		handler = get_attr(hooks.commands[args.command])
		return handler(config, args)
	except ConfigError as e:
		print(format_config_error(e, source), file=sys.stderr)
		return e.exit_code
	except ValidationError as e:
		log_error(message=str(e), title=f"{args.command} failed")
		return e.exit_code


if __name__ == "__main__":
	sys.exit(main())
