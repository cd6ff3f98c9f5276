"""Validate a dump of wire messages (one JSON object per line) against the shared schema."""

import base64
import json
import sys

import jsonschema


def main() -> int:
    schema_path, wire_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    counts: dict[str, int] = {}
    with open(wire_path) as f:
        for number, line in enumerate(f, 1):
            message = json.loads(line)
            errors = list(validator.iter_errors(message))
            if errors:
                print(f"line {number}: {errors[0].message}")
                return 1
            if message["type"] == "tactile":
                raw = base64.b64decode(message["data"], validate=True)
                if len(raw) != 3 * message["width"] * message["height"]:
                    print(f"line {number}: tactile payload has {len(raw)} bytes")
                    return 1
            counts[message["type"]] = counts.get(message["type"], 0) + 1
    missing = {"input", "telemetry", "tactile"} - counts.keys()
    if missing:
        print(f"no {sorted(missing)} messages in the dump")
        return 1
    print(json.dumps(counts, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
