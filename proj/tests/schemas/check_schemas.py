import json
import pathlib
import subprocess
import sys

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

schemas_dir, fixtures_dir, cli = map(pathlib.Path, sys.argv[1:4])

registry = Registry()
schemas = {}
for path in sorted(schemas_dir.glob("*.schema.json")):
    doc = json.loads(path.read_text())
    Draft202012Validator.check_schema(doc)
    registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    schemas[path.name.removesuffix(".schema.json")] = doc


def validator(name):
    return Draft202012Validator(schemas[name], registry=registry)


expected = {
    "ones.json": "weights",
    "sqrt2.json": "weights",
    "sqrt_n.json": "weights",
    "unilateral_refuted.json": "weights",
    "bilateral_pow2.json": "weights",
    "branch.json": "branch",
    "branch_doubled.json": "branch",
    "branch_weights_only.json": "branch",
    "moments_refuted.json": "moments",
    "moments_two_atoms.json": "moments",
    "system_two_atoms.json": "input",
    "system_perturbed.json": "input",
    "measure.json": "input",
    "tree_valid.json": "input",
    "tree_cycle.json": "input",
}
failures = 0
for name, schema in expected.items():
    errors = list(validator(schema).iter_errors(json.loads((fixtures_dir / name).read_text())))
    if errors:
        failures += 1
        print(f"FAIL {name}: {errors[0].message}")
if validator("weights").is_valid(json.loads((fixtures_dir / "schema_violation.json").read_text())):
    failures += 1
    print("FAIL schema_violation.json validates")

report = validator("report")
for cmd in json.loads((fixtures_dir / "commands.json").read_text()):
    args = [a.replace("{fixtures}", str(fixtures_dir)) for a in cmd["args"]]
    if "text" in args:
        continue
    out = subprocess.run([str(cli), *args], capture_output=True, text=True)
    errors = list(report.iter_errors(json.loads(out.stdout)))
    if errors:
        failures += 1
        print(f"FAIL report of {' '.join(cmd['args'])}: {errors[0].message}")

print(f"{failures} schema failures")
sys.exit(1 if failures else 0)
