# Copyright (c) 2024, Palak P and contributors
# For license information, please see license.txt

import importlib
import logging

from smeared_measurement.exceptions import ValidationError

logger = logging.getLogger("smeared_measurement")

_INDICATOR_LEVELS = {
	"red": logging.ERROR,
	"orange": logging.WARNING,
	"green": logging.INFO,
	"blue": logging.INFO,
}


def log_error(message=None, title=None):
	"""
	Record an error entry with a short title.

	Args:
	    message (str): Detailed message, may span several lines
	    title (str): One-line summary used to group entries
	"""
	logger.error("[%s] %s", title or "Error", message or "")


def msgprint(msg, title=None, indicator="blue"):
	"""
	Report a user-facing message; the indicator colour picks the log level.

	Args:
	    msg (str): Message text
	    title (str, optional): Message heading
	    indicator (str): One of red, orange, green, blue
	"""
	level = _INDICATOR_LEVELS.get(indicator, logging.INFO)
	if title:
		logger.log(level, "%s: %s", title, msg)
	else:
		logger.log(level, "%s", msg)


def throw(msg, exc=ValidationError, title=None):
	"""Log ``msg`` and raise it as ``exc``."""
	# ! EVERY RAISE THROUGH HERE LEAVES A LOG ENTRY
	log_error(message=msg, title=title or exc.__name__)
	raise exc(msg)


def get_attr(method_string):
	"""
	Resolve a dotted path such as ``pkg.module.function`` to the object.

	Raises:
	    ValidationError: If the module or attribute does not exist
	"""
	module_name, _, attr = method_string.rpartition(".")
	try:
		module = importlib.import_module(module_name)
		return getattr(module, attr)
	except (ImportError, AttributeError) as e:
		throw(f"Cannot resolve hook {method_string}: {e}", title="Hook Resolution Error")
