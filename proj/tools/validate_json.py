"""Validate toast --json outputs against docs/cli.schema.json."""
import json
import sys

import jsonschema


def main() -> int:
    schema_path, *outputs = sys.argv[1:]
    with open(schema_path) as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for path in outputs:
        with open(path) as fh:
            doc = json.load(fh)
        for err in validator.iter_errors(doc):
            print(f"{path}: {err.json_path}: {err.message}")
            bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
