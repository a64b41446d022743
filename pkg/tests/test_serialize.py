import json
import random

import pytest

from isocrystals import CoeffContext, standard_form
from isocrystals.errors import SchemaError
from isocrystals.filtration import Filtration
from isocrystals.generate import generate, random_isocrystal
from isocrystals.lattice import Lattice
from isocrystals.phin import random_phi_n_module
from isocrystals.serialize import (dumps, filtration_from_json, filtration_to_json,
                                   isocrystal_from_json, isocrystal_to_json, lattice_from_json,
                                   lattice_to_json, phin_from_json, phin_to_json,
                                   standard_form_to_json)


def test_isocrystal_round_trip(c2):
    X, summands, g = random_isocrystal(c2, random.Random(1), 4)
    for doc in (isocrystal_to_json(X), standard_form_to_json(c2, summands, g)):
        Y = isocrystal_from_json(json.loads(dumps(doc)))
        assert Y.A.equal_at_precision(X.A)
        assert Y.newton_vector() == X.newton_vector()


def test_filtration_and_lattice_round_trip(c2):
    rng = random.Random(2)
    X = standard_form(c2, [(0, 1, 2), (1, 1, 1)])
    F = Filtration.random(X, [1, 0, 0], rng)
    G = filtration_from_json(X, json.loads(dumps(filtration_to_json(F))))
    assert G.mu == F.mu and G.flag.equal_at_precision(F.flag)
    M = Lattice.random(X, rng)
    assert lattice_from_json(X, json.loads(dumps(lattice_to_json(M)))) == M


def test_phin_round_trip(c2):
    m = random_phi_n_module(c2, random.Random(3))
    n = phin_from_json(json.loads(dumps(phin_to_json(m))))
    assert n.N.equal_at_precision(m.N)


def test_integers_are_strings(c2):
    doc = standard_form_to_json(c2, [(1, 2, 1)])
    assert doc["standard_form"] == [{"a": "1", "b": "2", "mult": "1"}]


@pytest.mark.parametrize("doc", [
    {},
    {"context": {"p": "2", "r": "1"}},
    {"context": {"p": "2", "r": "1"}, "standard_form": []},
    {"context": {"p": "2", "r": "1"}, "standard_form": [{"a": "2", "b": "4"}]},
    {"context": {"p": "2", "r": "1"}, "standard_form": [{"b": "1"}]},
    {"context": {"p": "2", "r": "1"}, "matrix": [["1", "0"], ["0"]]},
    {"context": {"p": "2", "r": "1"}, "matrix": [["1", "0"]]},
    {"context": {"p": "x", "r": "1"}, "matrix": [["1"]]},
])
def test_schema_errors(doc):
    with pytest.raises(SchemaError):
        isocrystal_from_json(doc)


def test_generate_kinds():
    for kind in ("multfree", "standard", "lattice", "filtration", "phin"):
        assert generate(kind, 3, 1) == generate(kind, 3, 1)
    with pytest.raises(ValueError):
        generate("bogus", 3, 1)
