"""Command-line interface.

Every subcommand prints one JSON report (sorted keys, indented) to stdout.
Exit status: 0 on success, 1 when a search budget ran out (a partial report
is still printed), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Callable, Sequence

import numpy as np

from . import cones, matstar, words
from .errors import ConesheafError, InputError, InvalidGroup, NonCommuting, NotNormal, DomainGap
from .finspace import DEFAULT_NODE_BUDGET, Cone, FinMap, enumerate_compatible_families
from .groups import enumerate_almost_endos
from .piecewise import ks_assignment_search
from .serialize import (
    SCHEMA,
    cone_from_json,
    cone_to_json,
    dumps,
    group_from_json,
    matrix_from_json,
    matrix_to_json,
    pou_from_json,
    pou_to_json,
    quotient_from_json,
    rays_from_json,
    read_json,
)

EXIT_OK, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2
DIGITS = 12


class Report:
    """Accumulates one report; ``render`` gives the canonical text."""

    def __init__(self, command: str, args: dict):
        self.doc: dict = {
            "schema": SCHEMA,
            "command": command,
            "inputs": {"args": args, "files": {}},
            "seeds": {},
            "budgets": {},
            "verdicts": {},
            "witnesses": {},
        }
        self.exit = EXIT_OK

    def load(self, role: str, path: str):
        doc, digest = read_json(path)
        self.doc["inputs"]["files"][role] = {"path": path, "sha256": digest}
        return doc

    def render(self, wall_time: float | None) -> str:
        if wall_time is not None:
            self.doc["wall_time"] = round(wall_time, 6)
        return dumps(self.doc)


def _r(x: float) -> float:
    v = round(float(x), DIGITS)
    return 0.0 if v == 0 else v


def _c(z: complex) -> list[float]:
    return [_r(z.real), _r(z.imag)]


def _partition_json(f: FinMap) -> dict:
    return {"codomain": list(f.codomain.points), "map": f.as_dict()}


# --- cone commands ----------------------------------------------------------


def _load_cone(rep: Report, path: str) -> Cone:
    return cone_from_json(rep.load("cone", path))


def cmd_cone_analyze(ns, rep: Report) -> None:
    cone = _load_cone(rep, ns.file)
    rep.doc["budgets"] = {"nodes": ns.budget, "trials": ns.trials}
    rep.doc["seeds"] = {"matrix_search": ns.seed}
    v = rep.doc["verdicts"]
    v["legs"] = len(cone.legs)
    v["apex_points"] = len(cone.apex)
    v["jointly_injective"] = cones.is_jointly_injective(cone)
    v["malcev"] = cones.malcev_check(cone) if len(cone.legs) == 2 else None
    em = cones.is_effective_monic(cone, ns.budget)
    v["effective_monic"] = em.effective_monic
    v["compatible_families"] = em.n_families
    if em.witness is not None:
        rep.doc["witnesses"]["effective_monic"] = {
            "family": list(em.witness),
            "kind": em.witness_kind,
            "apex_points": list(em.witness_points),
        }
    v["locally_injective"] = cones.is_locally_injective(cone)
    dv = cones.is_directed(cone)
    v["directed"] = dv.status
    v["directed_exhaustive"] = dv.exhaustive
    v["directed_reason"] = dv.reason
    if dv.witness is not None:
        rep.doc["witnesses"]["directed"] = [[_partition_json(g) for g in per] for per in dv.witness]
    if em.effective_monic == cones.BUDGET:
        v["guarantee"] = None
        rep.exit = EXIT_BUDGET
        return
    if em.effective_monic != cones.YES:
        v["guarantee"] = "NOT_APPLICABLE"
        return
    gv = cones.classify_guarantee(cone, tuple(ns.dims), ns.trials, ns.seed, ns.jobs, ns.budget)
    v["guarantee"] = gv.status
    v["guarantee_searched"] = gv.searched
    if gv.witness is not None:
        rep.doc["witnesses"]["guarantee"] = _nc_witness_json(gv.witness)


def cmd_cone_refine(ns, rep: Report) -> None:
    cone = _load_cone(rep, ns.file)
    h = quotient_from_json(rep.load("quotient", ns.quotient), cone.apex)
    rep.doc["budgets"] = {
        "nodes": ns.budget,
        "max_codomain": ns.max_codomain,
        "max_legs": ns.max_legs,
        "max_candidates": ns.max_candidates,
    }
    res = cones.search_refinement(
        cone, h, ns.max_codomain, ns.max_legs, ns.requested, ns.budget, ns.jobs, ns.max_candidates
    )
    v = rep.doc["verdicts"]
    v["refinement"] = res.status
    v["requested"] = res.requested
    v["certificate"] = {
        "admissible_partitions": res.admissible_partitions,
        "subsets_checked": res.subsets_checked,
        "bounds": res.bounds,
    }
    if res.witness is not None:
        rep.doc["witnesses"]["refinement"] = cone_to_json(res.witness)
    if res.status == "BUDGET":
        rep.exit = EXIT_BUDGET


# --- matrix commands --------------------------------------------------------


def _pou_json(p) -> dict:
    return pou_to_json(p, DIGITS)


def _nc_witness_json(w: matstar.NoncommutingWitness) -> dict:
    (i, y), (j, y2) = w.pair
    return {
        "trial": w.trial,
        "pair": [[i, y], [j, y2]],
        "commutator_norm": _r(w.residual),
        "family": [_pou_json(m) for m in w.family.members],
    }


def cmd_mat_check(ns, rep: Report) -> None:
    doc = rep.load("matrices", ns.file)
    if not isinstance(doc, dict) or not ("matrices" in doc or "cone" in doc):
        raise InputError("expected a document with 'matrices' and/or 'cone' plus 'family'")
    v = rep.doc["verdicts"]
    mats = [matrix_from_json(m) for m in doc.get("matrices", [])]
    per = []
    for m in mats:
        entry = {
            "dim": len(m),
            "normality_residual": _r(matstar.normality_residual(m)),
            "normal": matstar.is_normal(m),
            "unitary": matstar.is_unitary(m),
        }
        if entry["normal"]:
            dec = matstar.spectral_decompose(m)
            entry["eigenvalues"] = [_c(z) for z in dec.eigenvalues]
            entry["reconstruction_residual"] = _r(matstar.frob(dec.reconstruct() - m))
        per.append(entry)
    v["matrices"] = per
    if len(mats) > 1 and all(e["normal"] for e in per):
        try:
            jd = matstar.joint_diagonalize(mats)
            v["joint_diagonalization"] = {"status": "OK", "blocks": len(jd.blocks)}
        except NonCommuting as exc:
            v["joint_diagonalization"] = {"status": exc.code, "pair": list(exc.pair), "residual": _r(exc.residual)}
    if "cone" in doc:
        cone = cone_from_json(doc["cone"])
        spaces = {leg.codomain.name: leg.codomain for leg in cone.legs}
        fam_doc = doc.get("family", [])
        if len(fam_doc) != len(cone.legs):
            raise InputError("need one partition of unity per leg")
        members = []
        for leg, pd in zip(cone.legs, fam_doc):
            p = pou_from_json(pd, {leg.codomain.name: leg.codomain} | spaces)
            members.append(p)
        try:
            fam = matstar.MatrixFamily(cone, tuple(members))
        except (ValueError, ConesheafError) as exc:
            raise InputError(str(exc)) from exc
        v["partitions_valid"] = [m.is_valid() for m in members]
        comp = matstar.check_compatibility(fam)
        v["compatible"] = comp.compatible
        if not comp.compatible:
            rep.doc["witnesses"]["compatibility"] = {"pair": list(comp.pair), "residual": _r(comp.residual)}
        try:
            lifted = matstar.lift_family(fam)
            v["lift"] = "OK"
            rep.doc["witnesses"]["lift"] = _pou_json(lifted)
        except ConesheafError as exc:
            v["lift"] = exc.code
            if isinstance(exc, NonCommuting):
                (i, y), (j, y2) = exc.pair
                rep.doc["witnesses"]["lift"] = {"pair": [[i, y], [j, y2]], "residual": _r(exc.residual)}


def cmd_mat_search(ns, rep: Report) -> None:
    cone = _load_cone(rep, ns.file)
    rep.doc["seeds"] = {"matrix_search": ns.seed}
    rep.doc["budgets"] = {"nodes": ns.budget, "trials": ns.trials}
    v = rep.doc["verdicts"]
    v["dim"] = ns.dim
    wit = matstar.search_noncommuting_family(cone, ns.dim, ns.trials, ns.seed, ns.jobs, ns.budget)
    v["witness_found"] = wit is not None
    if wit is not None:
        rep.doc["witnesses"]["noncommuting_family"] = _nc_witness_json(wit)


_FUNCTIONS: dict[str, Callable[[complex], complex]] = {
    "identity": lambda z: z,
    "square": lambda z: z * z,
    "conj": lambda z: z.conjugate(),
    "abs": lambda z: abs(z),
    "exp": lambda z: complex(np.exp(z)),
}


def cmd_fc_apply(ns, rep: Report) -> None:
    doc = rep.load("input", ns.file)
    a = matrix_from_json(doc["matrix"] if "matrix" in doc else doc)
    v = rep.doc["verdicts"]
    if ns.op:
        if "matrix2" not in doc:
            raise InputError("--op needs a second matrix under 'matrix2'")
        b = matrix_from_json(doc["matrix2"])
        try:
            out = matstar.bivariate_op(a, b, ns.op)
        except NonCommuting as exc:
            v["status"] = exc.code
            v["residual"] = _r(exc.residual)
            return
        v["operation"] = ns.op
    else:
        fn: object
        if ns.fn == "table":
            if "table" not in doc:
                raise InputError("--fn table needs a 'table' of [point, value] pairs")
            fn = [(complex(*p), complex(*q)) for p, q in doc["table"]]
        else:
            fn = _FUNCTIONS[ns.fn]
        try:
            out = matstar.apply_function(a, fn)
        except (NotNormal, DomainGap) as exc:
            v["status"] = exc.code
            return
        v["function"] = ns.fn
    v["status"] = "OK"
    v["result"] = matrix_to_json(out, DIGITS)


# --- group commands ---------------------------------------------------------


def cmd_group_zeta(ns, rep: Report) -> None:
    w = words.check_word(ns.word)
    v = rep.doc["verdicts"]
    v["word"] = w
    v["reduced"] = words.reduce(w)
    v["cyclic_word"] = words.cyclic_reduce(w)
    v["zeta"] = words.zeta(w)


def cmd_group_verify(ns, rep: Report) -> None:
    rep.doc["seeds"] = {"samples": ns.seed}
    rep.doc["budgets"] = {"samples": ns.samples}
    r = words.verify_zeta_counterexample(ns.samples, ns.seed)
    v = rep.doc["verdicts"]
    v["generators"] = r.generators
    v["power_law"] = r.power_law
    v["conjugation_invariant"] = r.conjugation_invariant
    v["inverse_symmetric"] = not r.inversion_failures
    v["not_a_homomorphism"] = r.not_a_homomorphism
    v["passed"] = r.passed
    rep.doc["witnesses"] = {
        "power_failures": [list(x) for x in r.power_failures[:10]],
        "conjugation_failures": [list(x) for x in r.conjugation_failures[:10]],
    }


def cmd_group_explore(ns, rep: Report) -> None:
    g = group_from_json(rep.load("cayley", ns.file))
    rep.doc["budgets"] = {"nodes": ns.budget}
    res = enumerate_almost_endos(g, ns.budget, ns.jobs)
    v = rep.doc["verdicts"]
    v["status"] = res.status
    v["order"] = g.order
    v["almost_endomorphisms"] = len(res.maps)
    v["group_endomorphisms"] = len(res.group_homs)
    v["nodes"] = res.nodes
    rep.doc["witnesses"]["maps"] = [
        {"map": {g.labels[x]: g.labels[m[x]] for x in range(g.order)}, "flag": f}
        for m, f in zip(res.maps, res.flags)
    ]
    if res.status == "BUDGET":
        rep.exit = EXIT_BUDGET


def cmd_ks_search(ns, rep: Report) -> None:
    system = rays_from_json(rep.load("rays", ns.file))
    rep.doc["budgets"] = {"nodes": ns.budget}
    res = ks_assignment_search(system, ns.budget)
    v = rep.doc["verdicts"]
    v["status"] = res.status
    v["rays"] = len(system.rays)
    v["bases"] = len(system.bases)
    v["orthonormality_residual"] = _r(system.orthonormality_residual())
    v["solutions"] = res.solutions
    v["nodes"] = res.nodes
    if res.assignment is not None:
        rep.doc["witnesses"]["assignment"] = list(res.assignment)
    if res.status == "BUDGET":
        rep.exit = EXIT_BUDGET


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomized steps (default 0)")
    common.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="search node budget (default 1e7)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads; results do not depend on it")
    common.add_argument("--no-timing", action="store_true", help="omit the wall_time field")

    p = argparse.ArgumentParser(prog="conesheaf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cone-analyze", parents=[common], help="classify a cone")
    s.add_argument("file")
    s.add_argument("--trials", type=int, default=10**4)
    s.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    s.set_defaults(func=cmd_cone_analyze)

    s = sub.add_parser("cone-refine", parents=[common], help="search a refinement along a map")
    s.add_argument("file")
    s.add_argument("--quotient", required=True)
    s.add_argument("--max-codomain", type=int, default=4)
    s.add_argument("--max-legs", type=int, default=6)
    s.add_argument("--max-candidates", type=int, default=10**6)
    s.add_argument("--requested", choices=["effective_monic", "directed"], default="effective_monic")
    s.set_defaults(func=cmd_cone_refine)

    s = sub.add_parser("mat-check", parents=[common], help="inspect matrices and matrix families")
    s.add_argument("file")
    s.set_defaults(func=cmd_mat_check)

    s = sub.add_parser("mat-search", parents=[common], help="search a noncommuting compatible family")
    s.add_argument("file")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--trials", type=int, default=10**4)
    s.set_defaults(func=cmd_mat_search)

    s = sub.add_parser("fc-apply", parents=[common], help="functional calculus on a normal matrix")
    s.add_argument("file")
    s.add_argument("--fn", choices=sorted(_FUNCTIONS) + ["table"], default="identity")
    s.add_argument("--op", choices=["add", "mul"])
    s.set_defaults(func=cmd_fc_apply)

    s = sub.add_parser("group-zeta", parents=[common], help="evaluate the free-group zeta map")
    s.add_argument("word")
    s.set_defaults(func=cmd_group_zeta)

    s = sub.add_parser("group-verify", parents=[common], help="check the zeta counterexample")
    s.add_argument("--samples", type=int, default=10**4)
    s.set_defaults(func=cmd_group_verify)

    s = sub.add_parser("group-explore", parents=[common], help="enumerate almost endomorphisms")
    s.add_argument("file")
    s.set_defaults(func=cmd_group_explore)

    s = sub.add_parser("ks-search", parents=[common], help="search 0/1 valuations of a ray system")
    s.add_argument("file")
    s.set_defaults(func=cmd_ks_search)
    return p


_ECHO_SKIP = {"func", "jobs", "no_timing", "command"}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    args = {k: v for k, v in sorted(vars(ns).items()) if k not in _ECHO_SKIP}
    rep = Report(ns.command, args)
    start = time.perf_counter()
    try:
        ns.func(ns, rep)
    except (InputError, InvalidGroup, KeyError, TypeError, ValueError) as exc:
        code = getattr(exc, "code", "INPUT_ERROR")
        rep.doc["error"] = {"code": code, "message": str(exc)}
        rep.exit = EXIT_INPUT
        print(f"conesheaf: {exc}", file=sys.stderr)
    except ConesheafError as exc:
        rep.doc["error"] = {"code": exc.code, "message": str(exc)}
        rep.exit = EXIT_INPUT
        print(f"conesheaf: {exc}", file=sys.stderr)
    elapsed = None if ns.no_timing else time.perf_counter() - start
    sys.stdout.write(rep.render(elapsed))
    return rep.exit


if __name__ == "__main__":
    raise SystemExit(main())
