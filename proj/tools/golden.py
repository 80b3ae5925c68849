#!/usr/bin/env python3
"""Replays the golden manifest against the CLI and compares stdout byte-for-byte.

usage: golden.py BINARY SOURCE_DIR [--update]
"""
import json
import pathlib
import subprocess
import sys


def main() -> int:
    if len(sys.argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    binary, root = sys.argv[1], pathlib.Path(sys.argv[2])
    update = "--update" in sys.argv[3:]
    golden = root / "tests" / "golden"
    cases = json.loads((golden / "manifest.json").read_text())
    failures = 0
    for case in cases:
        proc = subprocess.run([binary, *case["args"]], cwd=root, capture_output=True)
        path = golden / (case["name"] + (".json" if "--json" in case["args"] else ".txt"))
        if proc.returncode != case["exit"]:
            print(f"FAIL {case['name']}: exit {proc.returncode}, expected {case['exit']}")
            sys.stderr.write(proc.stderr.decode())
            failures += 1
            continue
        if update:
            path.write_bytes(proc.stdout)
            print(f"wrote {path.name}")
            continue
        if not path.exists():
            print(f"FAIL {case['name']}: missing {path.name}")
            failures += 1
        elif path.read_bytes() != proc.stdout:
            print(f"FAIL {case['name']}: output differs from {path.name}")
            failures += 1
        else:
            print(f"ok   {case['name']}")
    print(f"{len(cases) - failures}/{len(cases)} golden cases reproduce")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
