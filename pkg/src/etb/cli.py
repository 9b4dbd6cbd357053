"""Command-line front end: ``etb {build,homology,ss,bloch,claim,verify,probe}``.

Exit codes: 0 ok, 1 a check failed, 2 usage or configuration error, 3 budget exceeded.
Every JSON report carries ``"schema": 1``; timing lives in its own field and is
left out of the digest so reports are reproducible byte for byte otherwise.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .budget import Budget, BudgetExceeded, set_budget
from .config import KINDS, PROBES, ConfigError, ExperimentConfig
from .modlin import Flag, Line, PartialFlagSplit, Splitting, Submodule
from .ring import RingError, ring_make

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _source_hash() -> str:
    h = hashlib.sha256()
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:16]


def label(x):
    """JSON-friendly rendering of lines, submodules, flags and enriched-poset elements."""
    if isinstance(x, Line):
        return list(x.gen)
    if isinstance(x, Submodule):
        return [list(r) for r in x.rows]
    if isinstance(x, Flag):
        return [label(s) for s in x.steps]
    if isinstance(x, Splitting):
        return [label(L) for L in x.lines]
    if isinstance(x, PartialFlagSplit):
        return {"steps": [label(s) for s in x.steps], "splittings": [[label(w) for w in blk] for blk in x.splittings]}
    if isinstance(x, tuple):
        return [label(y) for y in x]
    return x


@dataclass
class RunReport:
    command: str
    inputs: dict
    results: dict
    checks: dict = field(default_factory=dict)
    seconds: float = 0.0
    table: list = field(default_factory=list)  # CSV rows; not part of the JSON payload

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def payload(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "version": __version__,
            "source_hash": _source_hash(),
            "inputs": self.inputs,
            "results": self.results,
            "checks": self.checks,
            "passed": self.passed,
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.payload(), sort_keys=True).encode()).hexdigest()

    def to_json(self) -> str:
        out = self.payload()
        out["digest"] = self.digest()
        out["timing"] = {"seconds": round(self.seconds, 3)}
        return json.dumps(out, indent=2, sort_keys=True)


# ------------------------------------------------------------------------------------
# complexes


def _sphere(dim: int):
    from itertools import combinations

    from .complexes import SimplicialComplex

    verts = list(range(dim + 2))
    return SimplicialComplex.from_maximal(verts, list(combinations(verts, dim + 1)))


def _complex(cfg: ExperimentConfig):
    """The simplicial complex (or cell structure) named by ``cfg.kind``."""
    from .complexes import build_e_poset, build_fl, build_spl, cells_of_et
    from .grassmann import build_k_complex

    if cfg.kind == "sphere":
        return _sphere(cfg.n)
    ring = ring_make(cfg.ring_name)
    if cfg.kind == "fl":
        return build_fl(ring, cfg.n)
    if cfg.kind == "spl":
        return build_spl(ring, cfg.n)
    if cfg.kind == "et":
        return build_e_poset(ring, cfg.n).poset.nerve()
    if cfg.kind == "k":
        return build_k_complex(ring, cfg.n, cfg.n).complex
    return cells_of_et(ring, cfg.n)


def _chain_complex(obj):
    from .complexes import CellStructure
    from .homology import cellular_chain_complex, simplicial_chain_complex

    if isinstance(obj, CellStructure):
        return cellular_chain_complex(obj)
    return simplicial_chain_complex(obj)


def cmd_build(cfg: ExperimentConfig) -> RunReport:
    from .complexes import CellStructure

    obj = _complex(cfg)
    if isinstance(obj, CellStructure):
        res = {
            "ring": cfg.ring_name,
            "rank": cfg.n,
            "kind": cfg.kind.upper(),
            "counts": list(obj.counts),
            "dimension": obj.dimension,
            "cells": [
                {"id": c.id, "dim": c.dim, "level": c.level, "element": label(c.element),
                 "boundary": [[f, v] for f, v in sorted(c.boundary.items())]}
                for c in obj.cells
            ],
        }
    else:
        res = {
            "ring": cfg.ring_name,
            "rank": cfg.n,
            "kind": cfg.kind.upper(),
            "vertices": [label(v) for v in obj.vertices],
            "maximal_simplices": [list(s) for s in sorted(obj.maximal_simplices())],
            "f_vector": list(obj.f_vector),
            "dimension": obj.dimension,
            "euler_characteristic": obj.euler_characteristic,
        }
    return RunReport("build", cfg.echo(), res)


def cmd_homology(cfg: ExperimentConfig) -> RunReport:
    from .homology import homology

    c = _chain_complex(_complex(cfg))
    hs = homology(c, cfg.coeff)
    res = {"kind": cfg.kind, "coeff": cfg.coeff, "homology": [h.to_dict() for h in hs],
           "ranks": [c.rank(d) for d in range(c.top + 1)]}
    return RunReport("homology", cfg.echo(), res, {"d_squared_zero": c.squares_to_zero()})


def homology_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "betti", "torsion"])
    for h in report.results["homology"]:
        w.writerow([h["degree"], h["betti"], " ".join(str(t) for t in h["torsion"])])
    return buf.getvalue()


# ------------------------------------------------------------------------------------
# spectral sequence


def cmd_ss(cfg: ExperimentConfig) -> RunReport:
    from .spectral import bottom_row_check, e1_structural, spectral_for

    coeff = "q" if cfg.coeff in ("z", "Z") else cfg.coeff
    ring = ring_make(cfg.ring_name)
    fc, res = spectral_for(ring, cfg.n, coeff)
    pages = []
    for pg in res.pages:
        pages.append({
            "r": pg.r,
            "dims": [[p, q, d] for (p, q), d in sorted(pg.dims.items())],
            "ranks": [[p, q, k] for (p, q), k in sorted(pg.ranks.items()) if k],
        })
    checks = dict(res.checks)
    checks["e1_structural"] = res.page(1).dims == e1_structural(ring, cfg.n, coeff)
    results = {
        "field": res.field,
        "levels": {str(k): v for k, v in sorted(fc.level_counts().items())},
        "pages": pages,
        "einf": [[p, q, d] for (p, q), d in sorted(res.einf.items())],
        "homology_dims": res.homology_dims,
    }
    if cfg.n >= 2:
        br = bottom_row_check(ring, cfg.n, coeff, res)
        results["bottom_row"] = br.to_dict()
        checks["bottom_row"] = br.passed
    return RunReport("ss", dict(cfg.echo(), coeff=coeff), results, checks, table=res.csv_rows())


def ss_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "p", "q", "dim"])
    for row in report.table:
        w.writerow(row)
    return buf.getvalue()


# ------------------------------------------------------------------------------------
# Grassmann complex


def cmd_bloch(cfg: ExperimentConfig) -> RunReport:
    from .grassmann import bloch_cokernel, build_total_complex

    ring = ring_make(cfg.ring_name)
    rep = bloch_cokernel(ring)
    tc = build_total_complex(ring, cfg.max_r, 2)
    sq = all(tc.square_is_zero(r) for r in range(cfg.max_r + 1))
    res = rep.to_dict()
    res["total_ranks"] = [tc.rank(r) for r in range(cfg.max_r + 1)]
    return RunReport("bloch", cfg.echo(), res, {"total_square_zero": sq})


def cmd_claim(cfg: ExperimentConfig) -> RunReport:
    from .grassmann import claim_check

    rep = claim_check(ring_make(cfg.ring_name))
    return RunReport("claim", cfg.echo(), rep.to_dict(), {"claim": rep.passed})


# ------------------------------------------------------------------------------------
# verification suites and probes


def _init_worker(b: Budget):
    set_budget(b)


def cmd_verify(cfg: ExperimentConfig) -> RunReport:
    from .suites import cases_for, run_case

    cases = cases_for(cfg.suite, cfg.ring, cfg.rank)
    if cfg.jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs, initializer=_init_worker, initargs=(cfg.budget(),)) as ex:
            futures = [ex.submit(run_case, cfg.suite, r, n) for r, n in cases]
            rows = [f.result() for f in futures]
    else:
        rows = [run_case(cfg.suite, r, n) for r, n in cases]
    flat = [r for rs in rows for r in rs]
    checks = {f"{r['case']}:{r['name']}": r["passed"] for r in flat}
    res = {"suite": cfg.suite, "cases": [f"{r},n={n}" for r, n in cases], "rows": flat}
    return RunReport("verify", cfg.echo(), res, checks)


def cmd_probe(cfg: ExperimentConfig) -> RunReport:
    ring = ring_make(cfg.ring_name)
    checks = {}
    if cfg.probe == "stabilization":
        from .equivariant import stabilization_probe

        res = stabilization_probe(ring, cfg.m, cfg.d).to_dict()
    elif cfg.probe == "kh":
        from .spectral import kh_probe

        coeff = "q" if cfg.coeff in ("z", "Z") else cfg.coeff
        res = kh_probe(ring, cfg.n, cfg.m, coeff).to_dict()
    elif cfg.probe == "elementary":
        from .equivariant import elementary_triviality_check

        rep = elementary_triviality_check(ring, cfg.n)
        res = rep.to_dict()
        checks["elementary_triviality"] = rep.passed
    elif cfg.probe == "d":
        from .grassmann import compute_d

        res = compute_d(ring, cfg.n).to_dict()
    else:
        from .grassmann import build_k_complex

        K = build_k_complex(ring, cfg.n, cfg.n)
        res = {"f_vector": list(K.complex.f_vector),
               "reduced_homology": [h.to_dict() for h in K.reduced_homology()]}
    res["observational"] = cfg.probe != "elementary"
    return RunReport("probe", cfg.echo(), res, checks)


COMMANDS = {
    "build": cmd_build,
    "homology": cmd_homology,
    "ss": cmd_ss,
    "bloch": cmd_bloch,
    "claim": cmd_claim,
    "verify": cmd_verify,
    "probe": cmd_probe,
}


# ------------------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    from .suites import SUITES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with ExperimentConfig fields")
    common.add_argument("--ring", help="ring descriptor: fq:p, fq:p^k or zmod:m")
    common.add_argument("--rank", type=int)
    common.add_argument("--coeff", help="z, q or fp:p")
    common.add_argument("--max-simplices", type=int, dest="max_simplices")
    common.add_argument("--max-group", type=int, dest="max_group")
    common.add_argument("--max-vectors", type=int, dest="max_vectors")
    common.add_argument("--jobs", type=int)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))

    ap = argparse.ArgumentParser(prog="etb", description="Enriched Tits buildings over finite rings.")
    ap.add_argument("--version", action="version", version=f"etb {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("build", "homology"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--kind", choices=KINDS)
    sub.add_parser("ss", parents=[common])
    p = sub.add_parser("bloch", parents=[common])
    p.add_argument("--max-r", type=int, dest="max_r")
    sub.add_parser("claim", parents=[common])
    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--suite", required=True, choices=SUITES)
    p = sub.add_parser("probe", parents=[common])
    p.add_argument("--probe", choices=PROBES)
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    return ap


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    over = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    return base.merged(over)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _config_from_args(args)
        if args.command == "verify" and not cfg.suite:
            raise ConfigError("a suite name is required")
        set_budget(cfg.budget())
    except (ConfigError, ValueError) as exc:
        print(f"etb: {exc}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        report = COMMANDS[args.command](cfg)
    except BudgetExceeded as exc:
        print(f"etb: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RingError, ConfigError, ValueError) as exc:
        print(f"etb: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_budget(None)
    report.seconds = time.perf_counter() - t0
    if cfg.format == "csv" and args.command == "homology":
        _emit(homology_csv(report), cfg.out)
    elif cfg.format == "csv" and args.command == "ss":
        _emit(ss_csv(report), cfg.out)
    else:
        _emit(report.to_json(), cfg.out)
    if not report.passed:
        for k, ok in report.checks.items():
            if not ok:
                print(f"etb: check failed: {k}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
