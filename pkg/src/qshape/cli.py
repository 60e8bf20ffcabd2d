"""Command-line interface: ``qshape <subcommand> ...``.

Every subcommand prints one JSON result document on stdout. Exit status
is 0 on success, 1 on a domain error (the document then carries an
``error`` entry) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diffusion import DiffusionParams, run_ensemble
from .dynamics import STATIONARY, Hamiltonian, cyclic_phases, evolve, period_of, support
from .eigenshapes import (
    CoeffVector,
    basis,
    decompose,
    degeneracy,
    exponent_table,
    superpose,
)
from .entangle import BipartiteShape, collinear_probe, combine, is_product, max_collinear, schmidt
from .errors import ShapeError
from .io import ResultDocument, complex_pairs, digest, guess_format, parse_points
from .shape_core import (
    best_relabelling,
    fs_distance,
    normalize,
    sphere_coords,
    transition_probability,
)
from .svg import render_svg


class UsageError(Exception):
    pass


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complexes(text: str) -> list:
    try:
        return [complex(t.strip().replace("i", "j")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from None


def _factors(text: str) -> tuple:
    try:
        m, n = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected m,n, got {text!r}") from None
    return m, n


class _Run:
    """Per-invocation context: input loading, digests and SVG output."""

    def __init__(self, args):
        self.args = args
        self.blobs = []

    def load(self, path):
        data = Path(path).read_bytes()
        self.blobs.append(data)
        return parse_points(data, self.args.format or guess_format(path))

    def svg(self, name: str, items) -> str | None:
        if not self.args.svg:
            return None
        out = Path(self.args.svg) / name
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(render_svg(items), encoding="utf-8")
        return str(out)


def _shape_payload(s) -> dict:
    return {"n_points": s.n_points, "amplitudes": complex_pairs(s.amplitudes)}


def cmd_normalize(run, a):
    s = normalize(run.load(a.file))
    out = _shape_payload(s)
    if s.n_points == 3:
        out["sphere"] = dict(zip(("theta", "phi"), sphere_coords(s)))
    if (p := run.svg("normalize.svg", [(s.to_config(), Path(a.file).name)])):
        out["svg"] = [p]
    return out


def cmd_dist(run, a):
    s, t = normalize(run.load(a.a)), normalize(run.load(a.b))
    return {"theta": fs_distance(s, t), "transition_probability": transition_probability(s, t)}


def cmd_unlabeled_dist(run, a):
    s, t = normalize(run.load(a.a)), normalize(run.load(a.b))
    theta, perm = best_relabelling(s, t)
    return {
        "theta": theta,
        "labelled_theta": fs_distance(s, t),
        "permutation": [i + 1 for i in perm.mapping],
    }


def cmd_basis(run, a):
    n = a.n
    b = basis(n)
    out = {
        "n_points": n,
        "exponents": [list(row) for row in exponent_table(n)],
        "degeneracy": [
            {"k": d.k, "distinct_vertices": d.distinct_vertices, "multiplicity": d.multiplicity}
            for d in (degeneracy(n, k) for k in range(1, n))
        ],
        "distinct_vertices": [degeneracy(n, k).distinct_vertices for k in range(1, n)],
        "eigenshapes": [complex_pairs(v.amplitudes) for v in b.vectors],
    }
    files = []
    for k in range(1, n):
        p = run.svg(f"eigenshape_{n}_{k}.svg", [(b[k].to_config(), f"N={n}, k={k}")])
        if p:
            files.append(p)
    if files:
        out["svg"] = files
    return out


def cmd_decompose(run, a):
    s = normalize(run.load(a.file))
    c = decompose(s)
    return {
        "n_points": s.n_points,
        "coefficients": complex_pairs(c.coefficients),
        "populations": c.populations.tolist(),
    }


def cmd_synth(run, a):
    s = superpose(CoeffVector.of(a.coeffs))
    out = _shape_payload(s)
    if (p := run.svg("synth.svg", [(s.to_config(), "")])):
        out["svg"] = [p]
    return out


def _hamiltonian(a, n_points) -> Hamiltonian:
    if a.energies is None:
        raise UsageError("--energies is required")
    return Hamiltonian(n_points, a.energies)


def cmd_evolve(run, a):
    s = normalize(run.load(a.file))
    h = _hamiltonian(a, s.n_points)
    t = evolve(s, h, a.time)
    out = _shape_payload(t)
    out.update(time=a.time, transition_probability_to_initial=transition_probability(s, t))
    return out


def cmd_phase(run, a):
    s = normalize(run.load(a.file))
    h = _hamiltonian(a, s.n_points)
    period = period_of(h, support(s))
    if period is None:
        return {"period": None, "cyclic": False}
    rep = cyclic_phases(s, h)
    return {
        "cyclic": True,
        "stationary": period is STATIONARY,
        "period": rep.period,
        "total_phase": rep.total_phase,
        "dynamical_phase": rep.dynamical_phase,
        "geometric_phase": rep.geometric_phase,
        "mean_energy": rep.mean_energy,
    }


def _schmidt_payload(bs: BipartiteShape, tol) -> dict:
    sd = schmidt(bs)
    return {
        "factors": list(bs.factors),
        "convention": bs.convention,
        "schmidt_values": sd.values.tolist(),
        "entropy": sd.entropy,
        "is_product": is_product(bs, tol),
    }


def cmd_combine(run, a):
    sa, sb = normalize(run.load(a.a)), normalize(run.load(a.b))
    bs = combine(decompose(sa), decompose(sb), a.convention)
    shape = bs.shape()
    out = _schmidt_payload(bs, a.tol or 1e-10)
    out.update(
        coefficients=complex_pairs(bs.coeffs.coefficients),
        shape=_shape_payload(shape),
        max_collinear=max_collinear(shape.to_config(), a.tol or 1e-6),
    )
    items = [(sa.to_config(), Path(a.a).name), (sb.to_config(), Path(a.b).name),
             (shape.to_config(), f"combined ({a.convention})")]
    if (p := run.svg("combine.svg", items)):
        out["svg"] = [p]
    return out


def cmd_schmidt(run, a):
    s = normalize(run.load(a.file))
    if a.factors is None:
        raise UsageError("--factors m,n is required")
    m, n = a.factors
    if m * n + 1 != s.n_points:
        raise UsageError(f"factors {m}x{n} need {m * n + 1} points, file has {s.n_points}")
    bs = BipartiteShape(decompose(s), (m, n), a.convention)
    return _schmidt_payload(bs, a.tol or 1e-10)


def cmd_collinear(run, a):
    if a.probe:
        tol = a.tol or 1e-3
        dist = {c: dict(sorted(collinear_probe(a.trials, a.seed, c, tol=tol).items()))
                for c in ("row", "column")}
        return {"trials": a.trials, "tol": tol, "distribution": dist}
    if not a.file:
        raise UsageError("collinear needs a point file or --probe")
    config = run.load(a.file)
    return {"max_collinear": max_collinear(config, a.tol or 1e-6), "n_points": config.n_points}


def cmd_diffuse(run, a):
    s = normalize(run.load(a.file))
    h = _hamiltonian(a, s.n_points)
    p = DiffusionParams(h, sigma=a.sigma, dt=a.dt, t_max=a.t_max,
                        collapse_threshold=a.threshold, seed=a.seed)
    c = decompose(s)
    rep = run_ensemble(c, p, a.trials, workers=a.workers)
    out = rep.to_dict()
    out.update(
        initial_populations=c.populations.tolist(),
        sigma=p.sigma, dt=p.dt, t_max=p.t_max, collapse_threshold=p.collapse_threshold,
    )
    return out


def cmd_render(run, a):
    items = [(run.load(f), Path(f).name) for f in a.files]
    svg = render_svg(items)
    out = {"n_configs": len(items)}
    if a.svg:
        out["svg"] = [run.svg(a.output or "render.svg", items)]
    else:
        out["svg_text"] = svg
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="point-file format (default: from file extension)")
    common.add_argument("--svg", metavar="DIR", default=None, help="write SVG drawings to DIR")
    common.add_argument("--convention", choices=("row", "column"), default="row",
                        help="combined index order for bipartite shapes")

    parser = argparse.ArgumentParser(prog="qshape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("normalize", cmd_normalize, "canonical shape vector").add_argument("file")
    for name, func, help_ in (("dist", cmd_dist, "Fubini-Study distance"),
                              ("unlabeled-dist", cmd_unlabeled_dist, "distance ignoring labels")):
        p = add(name, func, help_)
        p.add_argument("a")
        p.add_argument("b")
    add("basis", cmd_basis, "eigenshape basis for N points").add_argument("n", type=int)
    add("decompose", cmd_decompose, "coefficients in the eigenshape basis").add_argument("file")
    add("synth", cmd_synth, "shape from eigenshape coefficients").add_argument(
        "--coeffs", type=_complexes, required=True, help="comma-separated, e.g. 1,0.5+0.5j")
    p = add("evolve", cmd_evolve, "unitary evolution")
    p.add_argument("file")
    p.add_argument("--energies", type=_floats)
    p.add_argument("--time", type=float, required=True)
    p = add("phase", cmd_phase, "period and geometric phase")
    p.add_argument("file")
    p.add_argument("--energies", type=_floats)
    p = add("combine", cmd_combine, "tensor product of two shapes")
    p.add_argument("a")
    p.add_argument("b")
    p = add("schmidt", cmd_schmidt, "Schmidt analysis of an (mn+1)-point shape")
    p.add_argument("file")
    p.add_argument("--factors", type=_factors)
    p = add("collinear", cmd_collinear, "largest collinear subset")
    p.add_argument("file", nargs="?")
    p.add_argument("--probe", action="store_true", help="random product-state probe")
    p.add_argument("--trials", type=int, default=100)
    p = add("diffuse", cmd_diffuse, "stochastic reduction ensemble")
    p.add_argument("file")
    p.add_argument("--energies", type=_floats)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--threshold", type=float, default=0.999)
    p.add_argument("--workers", type=int, default=1)
    p = add("render", cmd_render, "draw point files as SVG")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output", default=None, help="file name inside the --svg directory")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    run = _Run(args)
    error = None
    try:
        payload = args.func(run, args)
        code = 0
    except UsageError as exc:
        parser.error(str(exc))
    except (ShapeError, OSError) as exc:
        payload, code = {}, 1
        error = {"type": type(exc).__name__, "message": str(exc)}
    doc = ResultDocument(
        command=argv,
        input_digest=digest(run.blobs),
        payload=payload,
        version=__version__,
        seed=args.seed,
        error=error,
    )
    sys.stdout.write(doc.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
