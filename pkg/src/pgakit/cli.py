"""Command line front end: constructions, simulation, invariant checks.

Exit codes are a stable contract: 0 success, 1 domain error (geometry,
expression, divergence), 2 usage error (flags, malformed scene files).

A scene is a JSON file.  ``algebra`` picks the model, ``entities`` binds
names the expression language can see, and ``dynamics`` configures a
rigid-body run:

    {
      "algebra": {"model": "pga", "n": 3},
      "entities": {
        "P":  {"type": "point", "coords": [1, 0, 0]},
        "Pi": {"type": "line", "from": [0, 0, 0], "to": [0, 0, 1]},
        "F":  {"type": "plane", "coeffs": [0, 0, 1, 0]},
        "raw": {"type": "multivector", "coeffs": [0, "..."]}
      },
      "dynamics": {
        "inertia": {"moments": [1, 2, 3], "mass": 1.0},
        "pose": {"center": [0, 0, 0], "axis": [0, 0, 1],
                 "angle": 0.0, "displacement": 0.0},
        "momentum": {"angular": [12, 10, -8], "linear": [0, 0, 0]},
        "h": 1e-3, "steps": 10000, "renormalize": true
      }
    }

In a "cga" scene, points embed onto the null cone and the wedge spans
instead of meeting; ``construct`` refuses such scenes because its
expressions assume plane-based operators.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import conformal, dynamics, euclid, motors
from . import expr as dsl
from .algebra import Algebra, GAError, Multivector, cga, pga
from .duality import j_map, join, meet, polarity

DEFAULT_EXPRESSION = "((Pi | P) ^ Pi) & P"


class SceneError(GAError):
    """Malformed configuration; reported as a usage error (exit 2)."""


# -- scene loading -----------------------------------------------------------


class Scene:
    def __init__(self, algebra: Algebra, model: str,
                 entities: dict[str, Multivector], dynamics_block):
        self.algebra = algebra
        self.model = model
        self.entities = entities
        self.dynamics_block = dynamics_block


def _vector(block, key, n) -> np.ndarray:
    v = block.get(key)
    if not isinstance(v, list) or len(v) != n:
        raise SceneError(f"{key!r} must be a list of {n} numbers")
    try:
        return np.array([float(x) for x in v])
    except (TypeError, ValueError):
        raise SceneError(f"{key!r} must be a list of {n} numbers") from None


def _build_entity(alg: Algebra, model: str, name: str, block) -> Multivector:
    if not isinstance(block, dict) or "type" not in block:
        raise SceneError(f"entity {name!r} needs a 'type' field")
    kind = block["type"]
    n = alg.gens - 1 if model == "pga" else alg.gens - 2
    try:
        if kind == "point":
            coords = _vector(block, "coords", n)
            if model == "pga":
                return euclid.point(alg, *coords)
            return conformal.up(alg, coords)
        if kind == "plane" and model == "pga":
            return euclid.plane(alg, *_vector(block, "coeffs", n + 1))
        if kind == "line" and model == "pga":
            return euclid.line_from_points(
                euclid.point(alg, *_vector(block, "from", n)),
                euclid.point(alg, *_vector(block, "to", n)))
        if kind == "multivector":
            return alg.from_coeffs(_vector(block, "coeffs", alg.size))
    except SceneError:
        raise
    except GAError as e:
        raise SceneError(f"entity {name!r}: {e}") from None
    raise SceneError(f"entity {name!r}: no {kind!r} entities"
                     f" in a {model} scene")


def load_scene(path: str) -> Scene:
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as e:
        raise SceneError(f"cannot read scene: {e}") from None
    except json.JSONDecodeError as e:
        raise SceneError(f"scene is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SceneError("scene must be a JSON object")

    algebra_block = doc.get("algebra", {"model": "pga", "n": 3})
    model = algebra_block.get("model", "pga")
    n = algebra_block.get("n", 3)
    if model == "pga":
        if n not in (2, 3):
            raise SceneError("pga scenes support n = 2 or 3")
        alg = pga(n)
    elif model == "cga":
        if n != 3:
            raise SceneError("cga scenes support n = 3")
        alg = cga(n)
    else:
        raise SceneError(f"unknown algebra model {model!r}")

    entities = {}
    for name, block in doc.get("entities", {}).items():
        entities[name] = _build_entity(alg, model, name, block)
    return Scene(alg, model, entities, doc.get("dynamics"))


def _dynamics_setup(scene: Scene, args):
    block = scene.dynamics_block
    if block is None:
        raise SceneError("scene has no dynamics block")
    if scene.model != "pga" or scene.algebra.gens != 4:
        raise SceneError("dynamics runs in the 3D plane-based algebra")
    alg = scene.algebra

    inertia_block = block.get("inertia")
    if not isinstance(inertia_block, dict):
        raise SceneError("dynamics needs an 'inertia' block")
    inertia = dynamics.InertiaOperator(
        tuple(inertia_block.get("moments", ())),
        inertia_block.get("mass", 1.0))

    pose_block = block.get("pose")
    if pose_block is None:
        pose = alg.scalar(1.0)
    else:
        pose = motors.motor_from_screw(
            alg, _vector(pose_block, "center", 3),
            _vector(pose_block, "axis", 3),
            float(pose_block.get("angle", 0.0)),
            float(pose_block.get("displacement", 0.0)))

    momentum_block = block.get("momentum", {})
    momentum = dynamics.bivector_from_vectors(
        alg,
        momentum_block.get("angular", [0.0, 0.0, 0.0]),
        momentum_block.get("linear", [0.0, 0.0, 0.0]))

    h = args.h if args.h is not None else float(block.get("h", 1e-3))
    steps = args.steps if args.steps is not None else int(
        block.get("steps", 1000))
    if h <= 0.0:
        raise SceneError("step size h must be positive")
    if steps < 1:
        raise SceneError("step count must be at least 1")
    renormalize = bool(block.get("renormalize", True))
    if args.no_renormalize:
        renormalize = False
    return dynamics.BodyState(pose, momentum), inertia, h, steps, renormalize


# -- subcommands --------------------------------------------------------------


def _banner(scene: Scene) -> str:
    wedge = "meet" if scene.model == "pga" else "span"
    n = scene.algebra.gens - (1 if scene.model == "pga" else 2)
    return f"# algebra {scene.model}({n}): '^' is {wedge}, '&' is join"


def cmd_construct(args) -> int:
    scene = load_scene(args.scene)
    if scene.model != "pga":
        raise SceneError("construct needs a plane-based scene;"
                         " its operators assume the dual algebra")
    source = args.expression or DEFAULT_EXPRESSION
    result = dsl.evaluate(dsl.parse(source), scene.algebra, scene.entities)

    print(_banner(scene))
    print(f"expression: {source}")
    scale = max((e.norm() for e in scene.entities.values()), default=1.0)
    if result.norm() <= 1e-12 * max(1.0, scale):
        _fail("meet degenerates")
        return 1
    print(f"result: {result}")

    p, line = scene.entities.get("P"), scene.entities.get("Pi")
    if p is not None:
        hit = euclid.incident(result, p)
        print("incident: " + ("yes" if hit else "no"))
    if line is not None and euclid.flat_kind(result) == "line" \
            and euclid.flat_kind(line) == "line":
        u, v = euclid.direction(result), euclid.direction(line)
        ortho = abs(u @ v) <= 1e-9 * max(1e-30,
                                         np.linalg.norm(u) * np.linalg.norm(v))
        print("orthogonal: " + ("yes" if ortho else "no"))
    return 0


def cmd_simulate(args) -> int:
    scene = load_scene(args.scene)
    state, inertia, h, steps, renormalize = _dynamics_setup(scene, args)
    if args.out:
        try:
            with open(args.out, "w") as f:
                dynamics.write_trajectory(f, state, inertia, h,
                                          steps, renormalize)
        except OSError as e:
            raise SceneError(f"cannot write output: {e}") from None
    else:
        dynamics.write_trajectory(sys.stdout, state, inertia, h,
                                  steps, renormalize)
    return 0


def cmd_eval(args) -> int:
    if args.scene:
        scene = load_scene(args.scene)
    else:
        scene = Scene(pga(3), "pga", {}, None)
    print(_banner(scene))
    result = dsl.evaluate(dsl.parse(args.expression), scene.algebra,
                          scene.entities)
    print(result)
    return 0


# -- invariant suites for `check` ---------------------------------------------


def _suite_core(rng):
    alg = pga(3)
    for _ in range(5):
        a, b, c = (alg.from_coeffs(rng.uniform(-2, 2, alg.size))
                   for _ in range(3))
        left, right = a.gp(b).gp(c), a.gp(b.gp(c))
        assert left.close_to(right, tol=1e-10 * max(1.0, left.norm())), \
            "geometric product is not associative"
        dense = a.gp_dense(b)
        assert np.array_equal(dense.coeffs, a.gp(b).coeffs), \
            "dense and sparse kernels disagree"


def _suite_duality(rng):
    for alg in (pga(2), pga(3)):
        for _ in range(5):
            x = alg.from_coeffs(rng.uniform(-2, 2, alg.size))
            y = alg.from_coeffs(rng.uniform(-2, 2, alg.size))
            assert j_map(j_map(x)).close_to(x, tol=0.0), \
                "complement map is not an involution"
            lhs, rhs = j_map(meet(x, y)), join(j_map(x), j_map(y))
            assert lhs.close_to(rhs, tol=1e-12 * max(1.0, lhs.norm())), \
                "complement does not exchange meet and join"
        assert polarity(alg.pseudoscalar()).norm() == 0.0, \
            "polarity of the pseudoscalar should vanish"


def _suite_flats(rng):
    alg = pga(3)
    for _ in range(10):
        a, b = rng.uniform(-10, 10, 3), rng.uniform(-10, 10, 3)
        got = euclid.distance(euclid.point(alg, *a), euclid.point(alg, *b))
        assert abs(got - np.linalg.norm(a - b)) <= 1e-10 * max(
            1.0, got), "distance routes disagree with coordinates"
    p = euclid.point(alg, 1.0, 2.0, 0.5)
    axis = euclid.line_from_points(euclid.point(alg, 0, 0, 0),
                                   euclid.point(alg, 0, 0, 1))
    drop = euclid.perpendicular_through_point(axis, p)
    assert euclid.incident(drop, p), "perpendicular misses its point"
    assert abs(euclid.direction(drop) @ euclid.direction(axis)) < 1e-9, \
        "perpendicular is not orthogonal"


def _suite_motors(rng):
    alg = pga(3)
    for _ in range(20):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        gen = motors.screw_generator(
            motors.axis_line(alg, rng.uniform(-2, 2, 3), axis),
            rng.uniform(0.05, 3.0), rng.uniform(-2, 2))
        back = motors.log_versor(motors.exp_bivector(gen))
        assert back.close_to(gen, tol=1e-10 * max(1.0, gen.norm())), \
            "exp/log round trip failed"
    g = motors.motor_from_screw(alg, [1, 0, 0], [0, 1, 0], 0.9, 0.4)
    p = euclid.point(alg, 2.0, -1.0, 3.0)
    q = euclid.point(alg, -1.0, 0.5, 1.0)
    before = euclid.distance(p, q)
    after = euclid.distance(motors.sandwich(g, p), motors.sandwich(g, q))
    assert abs(after - before) <= 1e-10 * before, \
        "motor does not preserve distance"


def _suite_dynamics(rng):
    alg = pga(3)
    inertia = dynamics.InertiaOperator((1.0, 2.0, 3.0), 1.0)
    state = dynamics.BodyState(
        alg.scalar(1.0),
        dynamics.bivector_from_vectors(alg, [12.0, 10.0, -8.0], [0, 0, 0]))
    e0 = dynamics.energy(state, inertia)
    m0 = dynamics.spatial_momentum(state)
    final = dynamics.integrate(state, inertia, 1e-3, 200)
    assert abs(dynamics.energy(final, inertia) - e0) <= 1e-9 * e0, \
        "energy drifted"
    drift = (dynamics.spatial_momentum(final) - m0).norm()
    assert drift <= 1e-9 * m0.norm(), "spatial momentum drifted"


def _suite_conformal(rng):
    alg, calg = pga(3), cga(3)
    for _ in range(20):
        a, b = rng.uniform(-50, 50, 3), rng.uniform(-50, 50, 3)
        d_dual = euclid.distance(euclid.point(alg, *a), euclid.point(alg, *b))
        d_null = conformal.cga_distance(conformal.up(calg, a),
                                        conformal.up(calg, b))
        assert abs(d_dual - d_null) <= 1e-10 * max(1.0, d_dual), \
            "models disagree about distance"


def _suite_dsl(rng):
    alg = pga(3)
    ast = dsl.parse(DEFAULT_EXPRESSION)
    assert dsl.parse(dsl.to_text(ast)) == ast, "round trip broke the AST"
    a = alg.from_coeffs(rng.uniform(-2, 2, alg.size))
    b = alg.from_coeffs(rng.uniform(-2, 2, alg.size))
    got = dsl.evaluate(dsl.parse("a * b"), alg, {"a": a, "b": b})
    assert np.array_equal(got.coeffs, a.gp(b).coeffs), \
        "evaluator disagrees with the library"


_SUITES = (
    ("ga-core", _suite_core),
    ("duality", _suite_duality),
    ("flats", _suite_flats),
    ("motors", _suite_motors),
    ("dynamics", _suite_dynamics),
    ("conformal", _suite_conformal),
    ("dsl", _suite_dsl),
)


def cmd_check(args) -> int:
    print(f"# seed={args.seed}")
    failures = 0
    for index, (name, suite) in enumerate(_SUITES):
        rng = np.random.default_rng((args.seed, index))
        try:
            suite(rng)
        except (AssertionError, GAError) as e:
            failures += 1
            print(f"FAIL {name}: {e}")
        else:
            print(f"ok {name}")
    return 1 if failures else 0


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    print(f"# geometric product throughput, {args.reps} products per row")
    print(f"{'algebra':<8} {'coeffs':>6} {'kernel':>6} {'ops/sec':>12}")
    for label, alg in (("pga(3)", pga(3)), ("cga(3)", cga(3))):
        a = alg.from_coeffs(rng.uniform(-1, 1, alg.size))
        b = alg.from_coeffs(rng.uniform(-1, 1, alg.size))
        for kernel, op in (("sparse", a.gp), ("dense", a.gp_dense)):
            op(b)  # warm any cached tables before timing
            t0 = time.perf_counter()
            for _ in range(args.reps):
                op(b)
            dt = time.perf_counter() - t0
            print(f"{label:<8} {alg.size:>6} {kernel:>6}"
                  f" {args.reps / dt:>12.0f}")
    return 0


# -- argument plumbing ---------------------------------------------------------


def _reps(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("rep count must be at least 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgakit",
        description="plane-based geometric algebra: constructions,"
                    " rigid-body runs, invariant checks")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser(
        "construct", help="evaluate a construction against a scene")
    construct.add_argument("--scene", required=True)
    construct.add_argument("expression", nargs="?",
                           help=f"default: {DEFAULT_EXPRESSION}")
    construct.set_defaults(func=cmd_construct)

    simulate = sub.add_parser(
        "simulate", help="integrate the scene's rigid body, CSV out")
    simulate.add_argument("--scene", required=True)
    simulate.add_argument("--steps", type=int, default=None)
    simulate.add_argument("--h", type=float, default=None)
    simulate.add_argument("--no-renormalize", action="store_true")
    simulate.add_argument("--out", default=None)
    simulate.set_defaults(func=cmd_simulate)

    evaluate = sub.add_parser("eval", help="evaluate one expression")
    evaluate.add_argument("--scene", default=None)
    evaluate.add_argument("expression")
    evaluate.set_defaults(func=cmd_eval)

    check = sub.add_parser("check", help="run the invariant suites")
    check.add_argument("--seed", type=_seed, default=0)
    check.set_defaults(func=cmd_check)

    bench = sub.add_parser("bench", help="time the product kernels")
    bench.add_argument("--seed", type=_seed, default=0)
    bench.add_argument("--reps", type=_reps, default=20000)
    bench.set_defaults(func=cmd_bench)
    return parser


def _fail(message: str) -> None:
    # flush first so redirected output keeps program order
    sys.stdout.flush()
    print(f"error: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SceneError as e:
        _fail(str(e))
        return 2
    except GAError as e:
        _fail(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
