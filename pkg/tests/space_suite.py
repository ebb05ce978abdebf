"""Randomized metric/space checks shared by the unit tests and the acceptance run.

Each family is a quotient decomposition; every check draws ``n`` random cases
and returns the number of failures together with the first failing case.
"""

import math

import numpy as np

from qsp.cspace import EuclideanBox, ProductSpace, QuotientDecomposition, RigidBody2D

IDENTITY_TOL = 1e-12
TRIANGLE_TOL = 1e-9
PROPORTION_TOL = 1e-9
MEASURE_RTOL = 4 * np.finfo(float).eps


def families():
    """Named decompositions covering every supported planar quotient pattern."""
    se2 = RigidBody2D((0, 0), (10, 8))
    return {
        "R2 in SE2": QuotientDecomposition([
            ProductSpace([EuclideanBox((0, 0), (10, 8))]),
            ProductSpace([se2]),
        ]),
        "R1 in R3": QuotientDecomposition([
            ProductSpace([EuclideanBox((-1,), (2,))]),
            ProductSpace([EuclideanBox((-1, 0, 0), (2, 1, 5))]),
        ]),
        "joint chain R1 in R2 in R3": QuotientDecomposition([
            ProductSpace([EuclideanBox((-2.9,), (2.9,))]),
            ProductSpace([EuclideanBox((-2.9, -2.9), (2.9, 2.9))]),
            ProductSpace([EuclideanBox((-2.9, -2.9, -0.5), (2.9, 2.9, 0.5))]),
        ]),
        "SE2 in SE2xR2": QuotientDecomposition([
            ProductSpace([se2]),
            ProductSpace([se2, EuclideanBox((-1, -1), (1, 1))], weights=(1.0, 0.5)),
        ]),
        "SE2xR1 in SE2xR3": QuotientDecomposition([
            ProductSpace([se2, EuclideanBox((0,), (1,))]),
            ProductSpace([se2, EuclideanBox((0, -3, -3), (1, 3, 3))]),
        ]),
    }


def _spaces(d):
    return [d.space(k) for k in range(1, d.K + 1)]


def check_metric_axioms(space, rng, n):
    a, b, c = (space.sample_uniform(rng, n) for _ in range(3))
    bad = []
    dab, dba = space.distance(a, b), space.distance(b, a)
    dbc, dac = space.distance(b, c), space.distance(a, c)
    daa = space.distance(a, a)
    for i in range(n):
        if not (dab[i] >= 0.0 and daa[i] <= IDENTITY_TOL and dab[i] == dba[i]):
            bad.append(i)
        elif dac[i] > dab[i] + dbc[i] + TRIANGLE_TOL:
            bad.append(i)
    return bad


def check_interpolation(space, rng, n):
    """distance(a, interpolate(a, b, t)) = t * distance(a, b); endpoints exact."""
    bad = []
    for i in range(n):
        a, b = space.sample_uniform(rng), space.sample_uniform(rng)
        t = float(rng.random())
        d = space.distance(a, b)
        q = space.interpolate(a, b, t)
        if abs(space.distance(a, q) - t * d) > PROPORTION_TOL:
            bad.append(i)
        elif not (np.array_equal(space.interpolate(a, b, 0.0), a)
                  and np.array_equal(space.interpolate(a, b, 1.0), space.normalize(b))):
            bad.append(i)
    return bad


def check_round_trips(d, rng, n):
    bad = []
    for i in range(n):
        k = int(rng.integers(2, d.K + 1))
        base = d.space(k - 1).sample_uniform(rng)
        fiber = d.fiber(k).sample_uniform(rng)
        q = d.lift(k, base, fiber)
        ok = np.array_equal(d.project(k, q), base)
        q2 = d.space(k).sample_uniform(rng)
        ok = ok and np.array_equal(d.lift(k, d.project(k, q2), d.fiber_part(k, q2)), q2)
        ok = ok and np.array_equal(d.lift(1, [], q2[: d.space(1).dim]), q2[: d.space(1).dim])
        if not ok:
            bad.append(i)
    return bad


def check_measure(d):
    bad = []
    for k in range(2, d.K + 1):
        whole = d.space(k).measure()
        parts = d.space(k - 1).measure() * d.fiber(k).measure()
        if not math.isclose(whole, parts, rel_tol=MEASURE_RTOL, abs_tol=0.0):
            bad.append(k)
    return bad


def run_suite(n=1000, seed=0):
    """All checks on all families; returns {(family, check): number of failures}."""
    rng = np.random.default_rng(seed)
    failures = {}
    for name, d in families().items():
        assert d.validate() is None, name
        for k, space in enumerate(_spaces(d), start=1):
            failures[(name, f"metric axioms M{k}")] = len(check_metric_axioms(space, rng, n))
            failures[(name, f"interpolation M{k}")] = len(check_interpolation(space, rng, n))
        failures[(name, "project/lift")] = len(check_round_trips(d, rng, n))
        failures[(name, "measure")] = len(check_measure(d))
    return failures
