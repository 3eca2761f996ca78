"""Regenerate tests/golden/*.json: one JSON report per (fixture, command) that succeeds.

    python scripts/regenerate_golden.py
"""
from __future__ import annotations

import contextlib
import io
import sys
from pathlib import Path

from abreu_lab.cli import run

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN = ROOT / "tests" / "golden"

COMMANDS = ["info", "moments", "extremal", "normalize", "soliton", "angles", "rationality", "delzant"]
EXTRA = {
    "square": [["check-potential"]],
    "hirzebruch": [["check-potential", "--model", "hirzebruch", "--C", "9/7"], ["delzant", "--reference"]],
}


def golden_name(fixture: str, argv: list[str]) -> str:
    return "__".join([fixture, *[a.lstrip("-").replace("/", "_") for a in argv]]) + ".json"


def cases():
    for path in sorted(FIXTURES.glob("*.json")):
        stem = path.stem
        for cmd in [[c] for c in COMMANDS] + EXTRA.get(stem, []):
            yield stem, path, cmd


def render(path: Path, argv: list[str]):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run([argv[0], "--input", str(path), "--json", *argv[1:]])
    return code, out.getvalue()


def main() -> int:
    GOLDEN.mkdir(exist_ok=True)
    for old in GOLDEN.glob("*.json"):
        old.unlink()
    written = 0
    for stem, path, argv in cases():
        code, text = render(path, argv)
        if code != 0:
            continue
        (GOLDEN / golden_name(stem, argv)).write_text(text)
        written += 1
    print(f"wrote {written} golden reports to {GOLDEN}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
