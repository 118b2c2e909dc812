"""Command line: ``supverma run | dump-algebra | dump-module``.

Exit codes: 0 every selected check passed, 1 a verification failed (the
report carries witnesses), 2 invalid configuration or unbuildable target.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from . import verma as vm
from .cartan_witt import AlgebraError
from .modules import ModuleError
from .runner import ConfigError, Scenario, build_algebra, build_module, canonical_json, run_scenario, summary_text

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(args) -> Scenario:
    sc = Scenario.load(args.scenario)
    if getattr(args, "seed", None) is not None:
        sc.seed = args.seed
    return sc


def cmd_run(args) -> int:
    sc = _load(args)
    out_dir = Path(args.out or Path(sc.base_dir) / sc.output)
    try:
        report, timings = run_scenario(sc)
    except AlgebraError as exc:
        witnesses = {k: list(v) if isinstance(v, tuple) else v for k, v in exc.report.witnesses().items()}
        report = {"scenario": sc.to_json(), "algebra": {"pass": False, "witnesses": witnesses}, "pass": False}
        atomic_write(out_dir / "report.json", canonical_json(report))
        print(f"algebra check failed; witnesses {json.dumps(witnesses, sort_keys=True)}", file=sys.stderr)
        return EXIT_FAIL
    atomic_write(out_dir / "report.json", canonical_json(report))
    text = summary_text(report, timings)
    atomic_write(out_dir / "summary.txt", text)
    sys.stdout.write(text)
    if not report["pass"]:
        failed = [k for k, v in report["checks"].items() if not v["pass"]]
        print(f"failed checks: {', '.join(failed)}; see {out_dir / 'report.json'}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(Path(out), text)
    else:
        sys.stdout.write(text)


def cmd_dump_algebra(args) -> int:
    alg, _ = build_algebra(_load(args))
    _emit(alg.dumps() + "\n", args.out)
    return EXIT_OK


DUMP_TARGETS = ("V", "ind", "coind", "mixed")


def cmd_dump_module(args) -> int:
    sc = _load(args)
    if args.target not in DUMP_TARGETS:
        raise ConfigError(f"cannot build target {args.target!r}; choose from {list(DUMP_TARGETS)}")
    alg, _ = build_algebra(sc)
    V = build_module(sc, alg)
    if args.target == "V":
        from .modules import LModule  # noqa: F401
        data = {"kind": "K-module", "name": V.name,
                "basis": [{"label": lab, "parity": int(par), "degree": int(deg)}
                          for lab, par, deg in zip(V.space.labels, V.space.parity, V.space.degree)],
                "action": {alg.labels[a]: V.matrix(a).astype(int).tolist() for a in alg.k_indices}}
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    elif args.target == "ind":
        text = vm.induce(vm.twist(V, 1)).dumps()
    elif args.target == "coind":
        text = vm.coinduce(V).dumps()
    else:
        from .isomorphisms import verify_mixed
        text = verify_mixed(V)["mixed"].dumps()
    _emit(text + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="supverma", description="Verma and coinduced modules over W(k,l,m)")
    ap.add_argument("--version", action="version", version=f"supverma {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the checks of a scenario")
    r.add_argument("scenario")
    r.add_argument("--out", help="output directory (default: the scenario's 'output' field)")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.set_defaults(func=cmd_run)
    a = sub.add_parser("dump-algebra", help="serialize the structure constants")
    a.add_argument("scenario")
    a.add_argument("--out", help="file to write (default stdout)")
    a.set_defaults(func=cmd_dump_algebra)
    m = sub.add_parser("dump-module", help="serialize V, Ind(V_sigma), Coind(V) or the mixed product")
    m.add_argument("scenario")
    m.add_argument("--target", default="ind")
    m.add_argument("--out", help="file to write (default stdout)")
    m.set_defaults(func=cmd_dump_module)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ModuleError as exc:
        print(f"error: invalid module: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
