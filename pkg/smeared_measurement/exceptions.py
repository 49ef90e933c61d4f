# Copyright (c) 2024, Palak P and contributors
# For license information, please see license.txt


class ValidationError(Exception):
	"""Root of every domain failure raised by the package."""

	exit_code = 1


class GridError(ValidationError):
	pass


class BasisMismatchError(ValidationError):
	pass


class NormalizationError(ValidationError):
	pass


class CompletenessError(ValidationError):
	pass


class UnitarityError(ValidationError):
	pass


class NegligibleOutcomeError(ValidationError):
	"""Conditional state requested for an outcome that cannot occur."""


class ConfigError(ValidationError):
	"""
	Invalid run file.

	Args:
	    message (str): What is wrong with the field
	    fieldname (str): Dotted path of the offending field, e.g. ``channel.sigma``
	    line (int): 1-based line in the YAML file, 0 when unknown
	"""

	exit_code = 2

	def __init__(self, message, fieldname=None, line=0):
		super().__init__(message)
		self.fieldname = fieldname
		self.line = line

	def __str__(self):
		prefix = f"{self.fieldname}: " if self.fieldname else ""
		return f"{prefix}{self.args[0]}"


class CheckFailedError(ValidationError):
	exit_code = 1
