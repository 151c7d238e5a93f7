"""Command-line front end: verification suites and exporters.

    phasetropical verify <suite> [--n N] [--seed S] [--budget B] [--config FILE]
    phasetropical export <what> [--n N] [--format F] [--out PATH]

Reports are JSON with sorted keys preceded by one header line carrying the
timestamp and timings, so that reruns with the same inputs agree byte for
byte below the header.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from itertools import combinations

BUDGET_ENV = "PHASETROPICAL_BUDGET"

SUITES = ("w-lattice", "alcoves", "incidence", "pants-roundtrip", "psi-collapse",
          "psi-homology", "stretch-map", "covers", "glue")

DEFAULT_CONFIG = {
    "collapse_budget": 10**6,
    "samples": 10_000,
    "max_n.w-lattice": 5,
    "max_n.alcoves": 5,
    "max_n.incidence": 4,
    "max_n.pants-roundtrip": 4,
    "max_n.psi-collapse": 3,
    "max_n.psi-homology": 3,
    "max_n.stretch-map": 4,
    "max_n.covers": 3,
    "max_n.glue": 2,
}

PAPER_EXAMPLE = {
    "points": [(0, 0), (1, 0), (0, 1), (2, 3)],
    "eta": {(0, 0): 0, (1, 0): 0, (0, 1): 0, (2, 3): 1},
}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration


def _parse_value(text: str):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def load_config(path: str | None) -> dict:
    """Defaults, then the environment budget, then ``key = value`` lines."""
    cfg = dict(DEFAULT_CONFIG)
    env = os.environ.get(BUDGET_ENV)
    if env:
        cfg["collapse_budget"] = int(env)
    if path:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line or line.startswith("["):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key = value")
                key, value = line.split("=", 1)
                cfg[key.strip()] = _parse_value(value)
    return cfg


# --------------------------------------------------------------------------
# reports


@dataclass
class RunReport:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, name: str, condition: bool, detail=None) -> None:
        self.results[name] = bool(condition) if detail is None else detail
        if not condition:
            self.failures.append(name)

    def render(self) -> str:
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        header = f"# {stamp} timings={json.dumps(self.timings, sort_keys=True)}"
        body = {"command": self.command, "inputs": self.inputs, "results": self.results,
                "failures": self.failures, "ok": self.ok}
        return header + "\n" + json.dumps(body, sort_keys=True, indent=2, default=str) + "\n"


# --------------------------------------------------------------------------
# suites


def _suite_w_lattice(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .cyclic import W_lower_interval, build_W, maximal_labels
    from .poset import all_intervals_boolean

    w = build_W(n)
    rep.results["f_vector"] = w.f_vector()
    rep.check("rank_formula", all(w.rank[i] == e.sigma.k + len(e.j) - 4 for i, e in enumerate(w.elements)))
    ok, bad = all_intervals_boolean(w)
    rep.check("intervals_boolean", ok)
    rep.check("euler", w.euler() == (-1) ** (n - 1), w.euler())
    fvs = sorted({tuple(W_lower_interval(x).f_vector()) for x in maximal_labels(n)})
    rep.results["maximal_interval_f_vectors"] = [list(f) for f in fvs]
    if n == 2:
        rep.check("hexagon_intervals", fvs == [(6, 6, 1)])


def _suite_alcoves(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from math import factorial

    from .coamoeba import count_chambers

    cc = count_chambers(n)
    rep.results["chambers"] = cc.chambers
    rep.results["in_zonotope"] = cc.in_zonotope
    rep.results["maximal_octahedra"] = cc.maximal_octahedra
    rep.results["alcoves_per_octahedron"] = sorted(set(cc.per_octahedron.values()))
    rep.check("chambers_eq_n!2^n", cc.chambers == factorial(n) * 2 ** n)
    rep.check("zonotope_eq_(n+1)!", cc.in_zonotope == factorial(n + 1))
    rep.check("octahedra_eq_n!", cc.maximal_octahedra == factorial(n))
    rep.check("per_octahedron_eq_2^n-n-1", set(cc.per_octahedron.values()) == {2 ** n - n - 1})


def _suite_incidence(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .coamoeba import TorusRegion, alcove_in_partial_octahedron, region_contains
    from .cyclic import W_elements
    from .nets import enumerate_nets

    nets = enumerate_nets(n)
    labels = list(W_elements(n))
    mismatches = 0
    positives = 0
    for x in labels:
        outer = TorusRegion.partial_octahedron(x.sigma, x.j)
        for t in nets:
            comb = alcove_in_partial_octahedron(t, x.sigma, x.j)
            geo = region_contains(outer, TorusRegion.alcove(t))
            positives += comb
            mismatches += comb != geo
    rep.results["pairs"] = len(nets) * len(labels)
    rep.results["incident_pairs"] = positives
    rep.check("combinatorial_eq_geometric", mismatches == 0, mismatches == 0)


def _suite_pants_roundtrip(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .cyclic import W_elements
    from .pants import classify, witness

    bad = [str(x) for x in W_elements(n) if classify(witness(x)) != x]
    rep.results["labels"] = sum(1 for _ in W_elements(n))
    rep.check("witness_roundtrip", not bad, bad[:5] if bad else True)


def _suite_psi_collapse(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .cyclic import W_elements
    from .phasetrop import build_psi
    from .poset import greedy_collapse

    budget = int(cfg["collapse_budget"])
    failed = []
    count = 0
    for x in sorted(W_elements(n)):
        psi = build_psi(x.sigma, x.j)
        res = greedy_collapse(psi.complex, budget=budget)
        count += 1
        if not res.success or any(t == "other" for t in psi.types.values()):
            failed.append(str(x))
    rep.results["strata"] = count
    rep.check("all_collapse", not failed, failed[:5] if failed else True)


def _suite_psi_homology(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .cyclic import W_elements
    from .phasetrop import psi_complex_boundary_homology

    failed = []
    for x in sorted(W_elements(n)):
        h = psi_complex_boundary_homology(x.sigma, x.j)
        if not (h.is_ball and h.boundary_is_sphere):
            failed.append(str(x))
    rep.check("balls_with_sphere_boundary", not failed, failed[:5] if failed else True)


def _suite_stretch_map(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .phasetrop import check_psi_injective, two_partition_cone, two_partitions

    samples = int(cfg["samples"])
    out = {}
    ok = True
    for minus, plus in two_partitions(n):
        c = two_partition_cone(minus, plus)
        r = check_psi_injective(c, samples=samples, seed=seed)
        name = "".join(map(str, sorted(minus))) + "|" + "".join(map(str, sorted(plus)))
        out[name] = {"samples": r.samples, "collisions": len(r.collisions), "shared_second": r.shared_second}
        ok = ok and r.ok
    rep.results["cones"] = out
    rep.check("injective", ok)


def _suite_covers(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    import random

    from .assembly import cover_complex, deck_action_is_free, simplex_cover
    from .cyclic import build_W

    rng = random.Random(seed)
    base = build_W(n).euler()
    results = []
    ok = True
    for _ in range(3):
        while True:
            pts = [tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(n + 1)]
            try:
                data = simplex_cover(pts)
                break
            except ValueError:
                continue
        args = [Fraction(rng.randrange(1, 194), 97) for _ in range(n + 1)]
        cx = cover_complex(data, args)
        good = cx.euler() == data.degree * base and deck_action_is_free(cx)
        ok = ok and good
        results.append({"simplex": [list(p) for p in pts], "degree": data.degree,
                        "deck": data.deck_group(), "euler": cx.euler()})
    rep.results["simplices"] = results
    rep.check("euler_multiplicative_and_free", ok)


def _suite_glue(n: int, seed: int, cfg: dict, rep: RunReport, example=None) -> None:
    from .assembly import CoefficientData, glue, lattice_counts
    from .tropical import MarkedPolytope

    if example not in (None, "paper-3.1"):
        raise UsageError(f"unknown example {example!r}")
    mp = MarkedPolytope(PAPER_EXAMPLE["points"])
    coeffs = CoefficientData.generic(mp.points, PAPER_EXAMPLE["eta"], seed=seed)
    s = glue(mp, coeffs).summary()
    area, interior, boundary = lattice_counts(mp)
    rep.results.update({"euler": s["euler"], "genus": int(s["genus"]),
                        "boundary_components": s["boundary_components"], "degrees": s["degrees"]})
    rep.check("euler_eq_-2area", s["euler"] == -2 * area)
    rep.check("genus_eq_interior_points", s["genus"] == interior)
    rep.check("boundary_eq_boundary_points", s["boundary_components"] == boundary)


_SUITE_FUNCS = {
    "w-lattice": _suite_w_lattice,
    "alcoves": _suite_alcoves,
    "incidence": _suite_incidence,
    "pants-roundtrip": _suite_pants_roundtrip,
    "psi-collapse": _suite_psi_collapse,
    "psi-homology": _suite_psi_homology,
    "stretch-map": _suite_stretch_map,
    "covers": _suite_covers,
    "glue": _suite_glue,
}


def run_suite(suite: str, n: int, seed: int, cfg: dict, example: str | None = None) -> RunReport:
    if suite not in _SUITE_FUNCS:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    limit = int(cfg.get(f"max_n.{suite}", 0))
    if n > limit:
        raise UsageError(f"n = {n} exceeds the configured budget max_n.{suite} = {limit}")
    if n < 1:
        raise UsageError("n must be at least 1")
    inputs = {"suite": suite, "n": n, "seed": seed}
    if example:
        inputs["example"] = example
    rep = RunReport("verify", inputs)
    start = time.perf_counter()
    _SUITE_FUNCS[suite](n, seed, cfg, rep, example)
    rep.timings[suite] = round(time.perf_counter() - start, 3)
    return rep


def _run_one(args):
    suite, n, seed, cfg = args
    return run_suite(suite, min(n, int(cfg.get(f"max_n.{suite}", n))), seed, cfg)


def run_all(n: int, seed: int, cfg: dict, workers: int | None = None) -> RunReport:
    """Every suite at min(n, its budget), in parallel; merged by name."""
    jobs = [(s, n, seed, cfg) for s in SUITES]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(_run_one, jobs))
    merged = RunReport("verify", {"suite": "all", "n": n, "seed": seed})
    for s, r in sorted(zip(SUITES, reports)):
        merged.results[s] = {"inputs": r.inputs, "results": r.results}
        merged.failures.extend(f"{s}:{f}" for f in r.failures)
        merged.timings.update(r.timings)
    return merged


# --------------------------------------------------------------------------
# exporters


def _alcoves_off(n: int) -> str:
    from .coamoeba import TorusRegion
    from .nets import enumerate_nets

    verts: dict = {}
    faces = []
    for t in enumerate_nets(n):
        if t.rank != n:
            continue
        vs = [tuple(v[1:]) for v in TorusRegion.alcove(t).vertices()]
        idx = [verts.setdefault(v, len(verts)) for v in vs]
        for tri in combinations(idx, min(3, len(idx))):
            faces.append(tri)
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    for v in sorted(verts, key=verts.get):
        coords = list(v) + [0] * (3 - len(v))
        lines.append(" ".join(str(float(c)) for c in coords[:3]))
    for f in faces:
        lines.append(f"{len(f)} " + " ".join(map(str, f)))
    return "\n".join(lines) + "\n"


def export(what: str, fmt: str, n: int, seed: int) -> str:
    from .cyclic import build_W, maximal_labels

    if what == "w":
        w = build_W(n)
        if fmt == "dot":
            return w.to_dot("W")
        if fmt == "json":
            return w.to_json()
    elif what == "psi":
        from .phasetrop import build_psi
        x = maximal_labels(n)[0]
        psi = build_psi(x.sigma, x.j)
        if fmt == "json":
            return psi.to_json()
        if fmt == "dot":
            return psi.to_dot()
    elif what == "alcoves":
        if fmt == "off":
            return _alcoves_off(n)
    elif what in ("curve", "subdivision", "glued"):
        from .tropical import MarkedPolytope, curve_svg, regular_subdivision, tropical_hypersurface
        mp = MarkedPolytope(PAPER_EXAMPLE["points"])
        eta = PAPER_EXAMPLE["eta"]
        if what == "curve":
            model = tropical_hypersurface(mp, eta)
            if fmt == "svg":
                return curve_svg(model)
            if fmt == "json":
                return model.to_json()
        elif what == "subdivision" and fmt == "json":
            return regular_subdivision(mp, eta).to_json()
        elif what == "glued" and fmt == "json":
            from .assembly import CoefficientData, glue
            return glue(mp, CoefficientData.generic(mp.points, eta, seed=seed)).to_json()
    elif what == "pants":
        from .pants import to_svg, witness
        x = maximal_labels(n)[0]
        if fmt == "svg":
            return to_svg(witness(x))
        if fmt == "json":
            return witness(x).to_json()
    else:
        raise UsageError(f"unknown export target {what!r}")
    raise UsageError(f"format {fmt!r} is not available for {what!r}")


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasetropical",
                                     description="Verification suites and exporters for the phase tropical pair-of-pants.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES + ("all",)))
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget", type=int, default=None, help="collapse search node budget")
    v.add_argument("--config", default=None, help="key = value file of budgets")
    v.add_argument("--example", default=None, help="named example (glue: paper-3.1)")
    v.add_argument("--format", choices=("json",), default="json")
    v.add_argument("--out", default=None)

    e = sub.add_parser("export", help="write an object to a file")
    e.add_argument("what", choices=("w", "psi", "alcoves", "curve", "subdivision", "glued", "pants"))
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--format", choices=("json", "dot", "svg", "off"), default="json")
    e.add_argument("--out", default=None)
    return parser


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            cfg = load_config(args.config)
            if args.budget is not None:
                cfg["collapse_budget"] = args.budget
            if args.suite == "all":
                rep = run_all(args.n, args.seed, cfg)
            else:
                rep = run_suite(args.suite, args.n, args.seed, cfg, args.example)
            _write(rep.render(), args.out)
            return 0 if rep.ok else 1
        text = export(args.what, args.format, args.n, args.seed)
        _write(text if text.endswith("\n") else text + "\n", args.out)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
