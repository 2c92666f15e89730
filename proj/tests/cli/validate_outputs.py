"""Validates every JSON output against its schema and checks CSV headers."""
import json
import pathlib
import sys

import jsonschema

ALIASES = {"montecarlo_fidelity": "fidelity"}


def main(schema_dir, out_dir):
    schema_dir = pathlib.Path(schema_dir)
    out_dir = pathlib.Path(out_dir)
    failures = []
    jsons = sorted(out_dir.rglob("*.json"))
    csvs = sorted(out_dir.rglob("*.csv"))
    if not jsons or not csvs:
        failures.append(f"no outputs found under {out_dir}")
    for path in jsons:
        name = ALIASES.get(path.stem, path.stem)
        schema_path = schema_dir / f"{name}.schema.json"
        if not schema_path.exists():
            failures.append(f"{path}: no schema {schema_path.name}")
            continue
        schema = json.loads(schema_path.read_text())
        try:
            jsonschema.validate(json.loads(path.read_text()), schema)
        except jsonschema.ValidationError as e:
            failures.append(f"{path}: {e.message}")
    for path in csvs:
        lines = path.read_text().splitlines()
        header = lines[0].split(",") if lines else []
        if not header or any(not h or h[0].isdigit() or h[0] in "-." for h in header):
            failures.append(f"{path}: missing header row")
            continue
        for i, line in enumerate(lines[1:], start=2):
            cells = line.split(",")
            if len(cells) != len(header):
                failures.append(f"{path}:{i}: {len(cells)} cells, header has {len(header)}")
                break
            try:
                [float(c) for c in cells]
            except ValueError:
                failures.append(f"{path}:{i}: non-numeric cell")
                break
    for f in failures:
        print(f, file=sys.stderr)
    print(f"checked {len(jsons)} json and {len(csvs)} csv files")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
