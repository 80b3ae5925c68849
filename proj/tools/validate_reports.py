#!/usr/bin/env python3
"""Validates every --json golden report, and fresh CLI output for the same
invocations, against schema/report.schema.json.

usage: validate_reports.py BINARY SOURCE_DIR
"""
import copy
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    binary, root = sys.argv[1], pathlib.Path(sys.argv[2])
    schema = json.loads((root / "schema" / "report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    golden = root / "tests" / "golden"
    cases = [c for c in json.loads((golden / "manifest.json").read_text()) if "--json" in c["args"]]
    failures = 0

    def check(label, doc):
        nonlocal failures
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors[:3]:
            print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)

    for case in cases:
        check(case["name"] + " (golden)", json.loads((golden / (case["name"] + ".json")).read_text()))
        proc = subprocess.run([binary, *case["args"]], cwd=root, capture_output=True)
        check(case["name"] + " (fresh)", json.loads(proc.stdout))

    # The schema must reject malformed reports, not just accept everything.
    sample = json.loads((golden / "lim1_solenoid_3_json.json").read_text())
    mutations = {
        "missing digest": lambda d: d.pop("input_digest"),
        "short digest": lambda d: d.update(input_digest="sha256:abc"),
        "unknown tag": lambda d: d["result"].update(tag="Mystery"),
        "integer not a string": lambda d: d["result"].update(det=3),
        "extra field": lambda d: d.update(extra=1),
    }
    for label, mutate in mutations.items():
        doc = copy.deepcopy(sample)
        mutate(doc)
        if validator.is_valid(doc):
            print(f"FAIL schema accepts a report with {label}")
            failures += 1

    print(f"{2 * len(cases)} reports checked, {len(mutations)} mutations rejected, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
