"""Run the wittenlab binary end to end and validate its JSON against the schemas."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

tool, schemas = sys.argv[1], pathlib.Path(sys.argv[2])


def run(args, expect):
    p = subprocess.run([tool, *args], capture_output=True, text=True)
    if p.returncode != expect:
        sys.exit(f"{args}: exit {p.returncode}, expected {expect}\n{p.stdout}{p.stderr}")
    return p


def load(name):
    return json.loads((schemas / name).read_text())


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    cfg_schema = load("experiment-config.schema.json")
    cfg = {"preset": "circle-sin2", "grid": {"t_max": 15, "step": 0.25}, "check_times": [0, 1, 5], "format": "json"}
    jsonschema.validate(cfg, cfg_schema)
    (tmp / "cfg.json").write_text(json.dumps(cfg))

    out1, out2 = tmp / "a", tmp / "b"
    run(["torsion", "--config", str(tmp / "cfg.json"), "--out", str(out1), "--duality"], 0)
    run(["torsion", "--config", str(tmp / "cfg.json"), "--out", str(out2), "--duality"], 0)
    report = json.loads((out1 / "torsion_report.json").read_text())
    jsonschema.validate(report, load("torsion-report.schema.json"))
    for f in sorted(out1.iterdir()):
        if f.read_bytes() != (out2 / f.name).read_bytes():
            sys.exit(f"{f.name} differs between identical runs")

    run(["spectrum", "--preset", "circle-sin2", "--modes", "8", "--out", str(tmp / "s")], 0)
    run(["package", "--preset", "circle-sin2", "--out", str(tmp / "p")], 0)
    if not list((tmp / "p").glob("*.svg")):
        sys.exit("package wrote no plots")
    run(["verify-anomaly", "--seed", "3", "--out", str(tmp / "v")], 0)

    # bad input: unknown key, cutoff out of range, constant function, gap not reached
    (tmp / "bad.json").write_text(json.dumps({"cutof": 3}))
    run(["spectrum", "--config", str(tmp / "bad.json"), "--out", str(tmp / "x")], 2)
    run(["spectrum", "--modes", "1", "--out", str(tmp / "x")], 2)
    (tmp / "zero.json").write_text(json.dumps({"function": {"preset": "zero-circle"}}))
    run(["morse", "--config", str(tmp / "zero.json"), "--out", str(tmp / "x")], 2)
    run(["package", "--preset", "circle-sin2", "--tmax", "0.5", "--out", str(tmp / "x")], 4)

print("cli smoke ok")
