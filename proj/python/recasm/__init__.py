"""Python access to the recasm engine.

Values cross the boundary as JSON; these helpers decode them.
"""

import json

from ._recasm import SpecError, cli, format_program, transform
from ._recasm import Engine as _Engine
from ._recasm import check_postulates as _check_postulates
from ._recasm import enumerate_runs as _enumerate_runs

__all__ = ["Engine", "SpecError", "check_postulates", "cli", "enumerate_runs", "format_program", "run", "transform"]


class Engine:
    def __init__(self, source, inputs=None, policy="synchronous", seed=0, on_inconsistency="halt"):
        self._e = _Engine(source, json.dumps(inputs or {}), policy, seed, on_inconsistency)

    def run(self, max_steps=10000):
        return self._e.run(max_steps)

    def step(self):
        self._e.step()

    @property
    def status(self):
        return self._e.status

    @property
    def steps(self):
        return self._e.steps

    def output(self):
        return json.loads(self._e.output_json())

    def state(self):
        return json.loads(self._e.state_json())

    def trace(self):
        return self._e.trace_jsonl()


def run(source, inputs=None, **kwargs):
    max_steps = kwargs.pop("max_steps", 10000)
    e = Engine(source, inputs, **kwargs)
    e.run(max_steps)
    return e


def enumerate_runs(source, inputs=None, depth=5, max_runs=1000000):
    return json.loads(_enumerate_runs(source, json.dumps(inputs or {}), depth, max_runs))


def check_postulates(trace_jsonl):
    return json.loads(_check_postulates(trace_jsonl))
