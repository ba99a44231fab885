"""Exit codes, report headers and determinism of the lcsmech CLI."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

CLI = os.environ.get("LCSMECH_CLI", "lcsmech")

FLAT1 = '{"cotangent":{"base_dim":1}}'
FLAT2 = '{"cotangent":{"base_dim":2}}'
DEGENERATE_AT_ZERO = json.dumps(
    {
        "coordinates": ["x", "y"],
        "omega": {"degree": 2, "terms": [{"indices": [0, 1], "coeff": "x"}]},
        "theta": {"degree": 1, "terms": []},
    }
)
NOT_CLOSED = json.dumps(
    {
        "coordinates": ["x", "y"],
        "omega": {"degree": 2, "terms": [{"indices": [0, 1], "coeff": "1"}]},
        "theta": {"degree": 1, "terms": [{"indices": [0], "coeff": "y"}]},
    }
)
FIBER = json.dumps(
    {
        "structure": {"cotangent": {"base_dim": 1}},
        "map": ["q1", "p1 + 2*t", "t"],
        "hamiltonian": "p1^2/2",
        "potentials": "liouville",
    }
)


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("LCSMECH_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env)


class ExitCodes(unittest.TestCase):
    def test_validate_builtin(self):
        r = run("validate", "--structure", "g41-rep1")
        self.assertEqual(r.returncode, 0, r.stderr)
        report = json.loads(r.stdout)
        for key in ("command", "seed", "samples", "tolerance"):
            self.assertIn(key, report)
        self.assertEqual(report["seed"], 1729)

    def test_validate_not_closed(self):
        self.assertEqual(run("validate", "--structure", NOT_CLOSED).returncode, 1)

    def test_parse_errors(self):
        self.assertEqual(run("validate", "--structure", "{bad").returncode, 2)
        self.assertEqual(run("integrate").returncode, 2)
        self.assertEqual(run("no-such-command").returncode, 2)
        bad_dt = run("integrate", "--structure", FLAT1, "--hamiltonian", "p1", "--x0", "0,0", "--dt", "-1")
        self.assertEqual(bad_dt.returncode, 2)
        self.assertEqual(run("validate", "--structure", "g41-rep1", env={"LCSMECH_SEED": "abc"}).returncode, 2)

    def test_singular_integration_keeps_partial_output(self):
        r = run("integrate", "--structure", DEGENERATE_AT_ZERO, "--hamiltonian", "-y",
                "--x0", "1,0", "--t1", "3", "--dt", "0.01")
        self.assertEqual(r.returncode, 3)
        lines = r.stdout.strip().splitlines()
        self.assertEqual(lines[0], "t,x1,x2")
        self.assertGreater(len(lines), 40)
        self.assertIn("aborted", json.loads(r.stderr))

    def test_canonical(self):
        r = run("canonical", "--candidate", FIBER)
        self.assertEqual(r.returncode, 0, r.stderr)
        report = json.loads(r.stdout)
        self.assertIn("2*q1", json.dumps(report))
        wrong = json.loads(FIBER)
        wrong["K_F"] = "-2*q1"
        self.assertEqual(run("canonical", "--candidate", json.dumps(wrong)).returncode, 1)
        collapse = {"structure": {"cotangent": {"base_dim": 1}}, "map": ["q1", "0", "t"], "K_F": "0"}
        self.assertEqual(run("canonical", "--candidate", json.dumps(collapse)).returncode, 3)

    def test_hj_strict(self):
        args = ["hj", "--structure", FLAT2, "--hamiltonian", "p1^2/2", "--section", '["q2^2","0"]']
        self.assertEqual(run(*args).returncode, 0)
        self.assertEqual(run(*args, "--strict").returncode, 1)

    def test_example_list(self):
        r = run("example", "--list")
        self.assertEqual(r.returncode, 0)
        self.assertIn("g41-rep4", json.loads(r.stdout)["examples"])


class Reports(unittest.TestCase):
    def test_seed_override(self):
        r = run("validate", "--structure", "g41-rep2", env={"LCSMECH_SEED": "42"})
        self.assertEqual(json.loads(r.stdout)["seed"], 42)
        r = run("validate", "--structure", "g41-rep2", "--seed", "7", env={"LCSMECH_SEED": "42"})
        self.assertEqual(json.loads(r.stdout)["seed"], 7)

    def test_report_file_replaces_stdout(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "report.json")
            r = run("validate", "--structure", "g41-rep4", "--report", path)
            self.assertEqual(r.stdout, "")
            plain = run("validate", "--structure", "g41-rep4")
            with open(path) as f:
                self.assertEqual(f.read().strip(), plain.stdout.strip())

    def test_deterministic(self):
        for args in (
            ("validate", "--structure", "g41-rep1"),
            ("integrate", "--lie-system", "g41-rep2", "--coefficients", "1,t,1,1", "--x0", "0,0,0,0", "--dt", "0.01",
             "--format", "json"),
            ("canonical", "--candidate", FIBER, "--samples", "20"),
        ):
            a, b = run(*args), run(*args)
            self.assertEqual(a.stdout, b.stdout)
            self.assertEqual(a.stderr, b.stderr)

    def test_system1_endpoint(self):
        r = run("integrate", "--lie-system", "g41-rep1", "--coefficients", "1,1,1,1", "--x0", "0,0,0,0",
                "--t1", "1", "--dt", "0.001")
        last = [float(v) for v in r.stdout.strip().splitlines()[-1].split(",")]
        for got, want in zip(last[1:], (5 / 3, 1.5, 1.0, 1.0)):
            self.assertAlmostEqual(got, want, delta=1e-8)


if __name__ == "__main__":
    if len(sys.argv) > 1:
        CLI = sys.argv.pop(1)
    unittest.main()
