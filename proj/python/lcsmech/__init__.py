"""Hamiltonian mechanics on locally conformal symplectic charts.

Structure and candidate descriptors may be given as dicts, JSON text,
file paths or built-in ids ("g41-rep1").
"""

import json

from . import _lcsmech
from ._lcsmech import DEFAULT_SEED, ConfigError, ParseError, differentiate, example_ids, simplify

__all__ = [
    "DEFAULT_SEED",
    "ConfigError",
    "ParseError",
    "check_canonical",
    "differentiate",
    "example_ids",
    "hamilton_jacobi",
    "integrate_hamiltonian",
    "integrate_lie_system",
    "simplify",
    "validate",
]


def _text(descriptor):
    if isinstance(descriptor, (dict, list)):
        return json.dumps(descriptor)
    return descriptor


def validate(structure, seed=DEFAULT_SEED):
    return _lcsmech.validate(_text(structure), seed)


def integrate_hamiltonian(structure, hamiltonian, x0, t0=0.0, t1=1.0, dt=1e-3, method="rk4", diagnostics=False):
    return _lcsmech.integrate_hamiltonian(_text(structure), hamiltonian, list(x0), t0, t1, dt, method, diagnostics)


def integrate_lie_system(system_id, coefficients, x0, t0=0.0, t1=1.0, dt=1e-3, method="rk4"):
    return _lcsmech.integrate_lie_system(system_id, [str(c) for c in coefficients], list(x0), t0, t1, dt, method)


def hamilton_jacobi(structure, hamiltonian, section, samples=100, seed=DEFAULT_SEED, tolerance=1e-9):
    return _lcsmech.hamilton_jacobi(_text(structure), hamiltonian, list(section), samples, seed, tolerance)


def check_canonical(candidate, samples=100, seed=DEFAULT_SEED, tolerance=1e-9):
    return _lcsmech.check_canonical(_text(candidate), samples, seed, tolerance)
