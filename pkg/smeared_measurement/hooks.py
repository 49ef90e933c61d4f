app_name = "smeared_measurement"
app_title = "Smeared Measurement"
app_publisher = "Palak P"
app_description = "Smeared von Neumann measurements and decoherence of conjugate observables"
app_email = "palak@sanskartechnolab.com"
app_license = "mit"

# Commands
# ------------------
# Subcommand name -> handler(config, args) returning an exit code

commands = {
	"simulate": "smeared_measurement.smeared_measurement.py.commands.cmd_simulate",
	"sweep": "smeared_measurement.smeared_measurement.py.commands.cmd_sweep",
	"validate": "smeared_measurement.smeared_measurement.py.commands.cmd_validate",
	"classify": "smeared_measurement.smeared_measurement.py.commands.cmd_classify",
	"classical": "smeared_measurement.smeared_measurement.py.commands.cmd_classical",
	"povm-demo": "smeared_measurement.smeared_measurement.py.commands.cmd_povm_demo",
}

# Validation Checks
# ------------------
# Run in order by `validate`; each returns a CheckResult

validation_checks = {
	"closed_form_x": "smeared_measurement.smeared_measurement.py.checks.check_closed_form_x",
	"closed_form_p": "smeared_measurement.smeared_measurement.py.checks.check_closed_form_p",
	"fast_transform": "smeared_measurement.smeared_measurement.py.checks.check_fast_transform",
	"purity_law": "smeared_measurement.smeared_measurement.py.checks.check_purity_law",
	"width_products": "smeared_measurement.smeared_measurement.py.checks.check_width_products",
	"composition_law": "smeared_measurement.smeared_measurement.py.checks.check_composition_law",
	"sigma_zero_position": "smeared_measurement.smeared_measurement.py.checks.check_sigma_zero_position",
	"sigma_zero_momentum": "smeared_measurement.smeared_measurement.py.checks.check_sigma_zero_momentum",
	"entangling_evolution": "smeared_measurement.smeared_measurement.py.checks.check_entangling_evolution",
}

# Default Formats
# ------------------

default_formats = {
	"simulate": "report",
	"sweep": "csv",
	"classify": "report",
	"classical": "report",
	"povm-demo": "report",
	"validate": "report",
}
