"""Run the worked graph examples through reduce, eval and verify; print a summary table."""
import argparse
import contextlib
import io
import json
from pathlib import Path

from gmzv.cli import main

GRAPHS = Path(__file__).resolve().parent.parent / "data" / "graphs"


def call(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = main([str(a) for a in argv])
    return code, json.loads(buf.getvalue())


def run(nmax):
    print(f"{'graph':<12} {'direct':>16} {'reduced':>16} {'verdict':>8}  combination")
    for path in sorted(GRAPHS.glob("*.json")):
        _, ev = call("eval", path, "--nmax", nmax)
        code, red = call("reduce", path)
        if code:
            print(f"{path.stem:<12} {ev.get('value', ev.get('error')):>16} {'-':>16} {'-':>8}  {red['error']}")
            continue
        _, ver = call("verify", path, "--nmax", nmax)
        print(f"{path.stem:<12} {ev['value']:>16} {ver['reduced_value']:>16} {ver['verdict']:>8}  {red['text']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=2000)
    run(ap.parse_args().nmax)
