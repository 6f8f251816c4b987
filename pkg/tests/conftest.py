import copy

import pytest

from opentcft import corpus, specio


def _unit_m2(names, unit="1"):
    rows = [{"inputs": [unit, x], "output": x} for x in names]
    rows += [{"inputs": [x, unit], "output": x} for x in names if x != unit]
    return rows


# m3(a,a,a) = b on top of a strictly unital square-zero product
M3_SPEC = {
    "objects": ["o"],
    "homs": [{"source": "o", "target": "o",
              "basis": [{"name": "1", "degree": 0}, {"name": "a", "degree": 0}, {"name": "b", "degree": 1}]}],
    "m2": _unit_m2(["1", "a", "b"]),
    "higher": [{"arity": 3, "inputs": ["a", "a", "a"], "output": "b"}],
    "units": {"o": "1"},
    "maxArity": 4,
}

# same data plus a*a = a, which breaks the arity-4 relation
M3_BROKEN_SPEC = copy.deepcopy(M3_SPEC)
M3_BROKEN_SPEC["m2"].append({"inputs": ["a", "a"], "output": "a"})

# dg algebra with m1(x) = y
DG_SPEC = {
    "objects": ["o"],
    "homs": [{"source": "o", "target": "o",
              "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 1}, {"name": "y", "degree": 0}]}],
    "m1": [{"inputs": ["x"], "output": "y"}],
    "m2": _unit_m2(["1", "x", "y"]),
    "units": {"o": "1"},
    "maxArity": 4,
}

# exterior algebra on one odd generator
ODD_SPEC = {
    "objects": ["o"],
    "homs": [{"source": "o", "target": "o",
              "basis": [{"name": "1", "degree": 0}, {"name": "e", "degree": 1}]}],
    "m2": _unit_m2(["1", "e"]),
    "units": {"o": "1"},
}

# two objects, one odd arrow each way, composite g.f of degree 1 at a
TWO_SPEC = {
    "objects": ["a", "b"],
    "homs": [
        {"source": "a", "target": "a", "basis": [{"name": "1a", "degree": 0}, {"name": "gf", "degree": 1}]},
        {"source": "b", "target": "b", "basis": [{"name": "1b", "degree": 0}]},
        {"source": "a", "target": "b", "basis": [{"name": "f", "degree": 1}]},
        {"source": "b", "target": "a", "basis": [{"name": "g", "degree": 0}]},
    ],
    "m2": [
        {"inputs": ["1a", "1a"], "output": "1a"}, {"inputs": ["1b", "1b"], "output": "1b"},
        {"inputs": ["1a", "f"], "output": "f"}, {"inputs": ["f", "1b"], "output": "f"},
        {"inputs": ["1b", "g"], "output": "g"}, {"inputs": ["g", "1a"], "output": "g"},
        {"inputs": ["f", "g"], "output": "gf"},
        {"inputs": ["1a", "gf"], "output": "gf"}, {"inputs": ["gf", "1a"], "output": "gf"},
    ],
    "units": {"a": "1a", "b": "1b"},
}


def associator_spec(sign=1):
    """m1(h) = sign*c and m3(a,a,a) = h, with a*a = s, s*a = c; valid only for one sign."""
    return {
        "objects": ["o"],
        "homs": [{"source": "o", "target": "o",
                  "basis": [{"name": n, "degree": 1 if n == "h" else 0} for n in ("1", "a", "s", "c", "h")]}],
        "m1": [{"inputs": ["h"], "output": "c", "coeff": str(sign)}],
        "m2": _unit_m2(["1", "a", "s", "c", "h"]) + [{"inputs": ["a", "a"], "output": "s"},
                                                     {"inputs": ["s", "a"], "output": "c"}],
        "higher": [{"arity": 3, "inputs": ["a", "a", "a"], "output": "h"}],
        "units": {"o": "1"},
        "maxArity": 5,
    }


EXTRA_DG = {"dg": DG_SPEC, "odd": ODD_SPEC, "two": TWO_SPEC}


@pytest.fixture(scope="session")
def corpus_built():
    return {e.name: e.build() for e in corpus.list_corpus()}


def build(doc):
    return specio.build(doc)
