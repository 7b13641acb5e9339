"""Input documents for the worked switched-system examples.

Each builder returns a dict in the CLI input schema. The certificate
blocks carry the reference lambda/mu estimates so the examples can be
rerun on exactly those weights.
"""

from __future__ import annotations

import copy

_EX1_A = {
    1: [[0.2, -0.7], [0.8, 0.3]],
    2: [[0.5, 0.1], [0.4, 0.2]],
    3: [[1.2, 0.9], [1.4, 0.2]],
    4: [[1.1, 0.2], [0.2, 0.7]],
}
_EX1_EDGES = [
    (1, 2), (1, 3), (1, 4),
    (2, 1), (2, 3), (2, 4),
    (3, 1), (3, 2), (3, 3), (3, 4),
    (4, 1), (4, 2), (4, 3), (4, 4),
]
_EX1_LAMBDA = {1: 0.6480, 2: 0.4200, 3: 4.9946, 4: 3.3657}
# the reference table lists mu_13, mu_14 twice; the second pair belongs to vertex 2
_EX1_MU = {
    (1, 2): 0.6094, (1, 3): 0.4067, (1, 4): 0.4067,
    (2, 1): 2.4470, (2, 3): 0.9914, (2, 4): 0.9914,
    (3, 1): 2.8406, (3, 2): 1.7241, (3, 3): 1.0, (3, 4): 1.0,
    (4, 1): 2.8406, (4, 2): 1.7241, (4, 3): 1.0, (4, 4): 1.0,
}

_AB_A = {
    1: [[0.2, 0.4], [0.6, 0.1]],
    2: [[0.1, 0.9], [0.8, 1.0]],
    3: [[1.0, 0.3], [0.7, 1.2]],
}


def _doc(A, edges, lambdas=None, mus=None) -> dict:
    doc = {
        "schema_version": 1,
        "subsystems": [{"index": i, "A": copy.deepcopy(m)} for i, m in A.items()],
        "edges": [list(e) for e in edges],
    }
    if lambdas is not None:
        doc["certificates"] = {
            "lambda": {str(i): v for i, v in lambdas.items()},
            "mu": {f"{i},{j}": v for (i, j), v in mus.items()},
        }
    return doc


def example1(with_certificates: bool = True) -> dict:
    """Four subsystems (two stable), all switches admissible, dwelling allowed on 3 and 4."""
    if with_certificates:
        return _doc(_EX1_A, _EX1_EDGES, _EX1_LAMBDA, _EX1_MU)
    return _doc(_EX1_A, _EX1_EDGES)


def effect_a() -> dict:
    """Only switches between the two unstable subsystems are admissible."""
    return _doc(_AB_A, [(2, 3), (3, 2)])


def effect_b() -> dict:
    """Switches 1 <-> 2 only, with the reference constants.

    Subsystem 3 is isolated and has no reference constant; its certificate
    is computed from its matrix.
    """
    return _doc(
        _AB_A,
        [(1, 2), (2, 1)],
        {1: 0.4314, 2: 4.0281},
        {(1, 2): 0.8878, (2, 1): 1.7586},
    )


def example2_model() -> dict:
    return {
        "schema_version": 1,
        "n_stable": 1000,
        "n_unstable": 0,
        "phi": {"coef": 0.1, "power": 0.5},
        "A": 2.5,
        "B": 5.0,
        "alpha": 0.0,
        "beta": 2.5,
        "out_degree": None,
        "self_loops": False,
    }


SCENARIOS = {
    "example1": example1,
    "example1-computed": lambda: example1(with_certificates=False),
    "effect-a": effect_a,
    "effect-b": effect_b,
}
