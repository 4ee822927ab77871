"""Smoke test for the circ_py extension.

Build with `cargo build -p circ-py --features extension-module --release`
and put the shared library on the path as `circ_py.so` (see README).
"""

import json

import circ_py

h = circ_py.build_h(2)
assert (h.params, h.inputs) == (3, 2), h
assert h.eval(["1", "2", "3"], ["1", "1"]) == ["9"]
assert h.cost()["essential_mults"] == 1

back = circ_py.Circuit.from_json(h.to_json())
assert back.eval(["1/2", "2", "3"], ["0", "1"]) == h.eval(["1/2", "2", "3"], ["0", "1"])
assert len(h.reduce()) <= len(h)
assert json.loads(h.gc().to_json())["params"] == 3

assert circ_py.eval_f(2, "0", ["5", "7"]) == ["0", "-6", "11", "-6", "1"]
assert circ_py.verify_identity(3, "2/3", ["1", "-4", "5/2"])

cert = circ_py.rank_certificate(3)
assert cert["pass"] and cert["rank"] == 8

naive = circ_py.naive_evaluator(2)
report = circ_py.audit(naive, 2, trials=3)
assert report["verdict"]["verdict"] == "consistent", report
assert report["m"] == 4

try:
    h.eval(["1"], ["1", "1"])
except ValueError:
    pass
else:
    raise AssertionError("arity error not raised")

print("circ_py smoke test passed")
