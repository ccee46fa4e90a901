"""Command line front end: ``lift run | export | validate``."""

from __future__ import annotations

import argparse
import os
import sys

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_FLAGGED = 0, 1, 2, 3

_THREAD_VARS = ("NUMBA_NUM_THREADS", "OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _apply_thread_cap() -> None:
    """Honour LIFT_THREADS (0 or unset = library defaults).

    Must run before numpy is first imported for the BLAS caps to take effect.
    """
    raw = os.environ.get("LIFT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"LIFT_THREADS must be an integer, got {raw!r}")
    if n > 0:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, str(n))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lift", description="Lift an open set one dimension up and analyse it.")
    ap.add_argument("--version", action="store_true", help="print the version and exit")
    sub = ap.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run every analysis in a scene file")
    run.add_argument("--scene", required=True)
    run.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    exp = sub.add_parser("export", help="write only the lifted mesh or the distance field")
    exp.add_argument("--scene", required=True)
    exp.add_argument("--what", choices=("mesh", "field"), required=True)
    exp.add_argument("--out", default=None)
    val = sub.add_parser("validate", help="check a scene file without running it")
    val.add_argument("--scene", required=True)
    return ap


def main(argv=None) -> int:
    _apply_thread_cap()
    args = build_parser().parse_args(argv)
    from . import __version__
    if args.version:
        print(__version__)
        return EXIT_OK
    if args.command is None:
        build_parser().print_help()
        return EXIT_INVALID

    from .scene import SceneError, export_only, load_scene, run_scene

    try:
        if args.command == "validate":
            load_scene(args.scene)
            print(f"{args.scene}: ok")
            return EXIT_OK
        if args.command == "export":
            for path in export_only(args.scene, args.what, args.out):
                print(path)
            return EXIT_OK
        code = run_scene(args.scene, args.out)
        if code == EXIT_FLAGGED:
            print("finished with numerical flags; see report.json", file=sys.stderr)
        return code
    except SceneError as exc:
        print(f"invalid scene: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - report and exit non-zero
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
