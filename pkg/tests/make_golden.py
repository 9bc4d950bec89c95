"""Regenerate ``golden/estimates.json`` from the verification scenarios.

Run ``python tests/make_golden.py`` from the repository root; the values are
produced by the code, never typed in by hand.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from scenarios import SCENARIOS  # noqa: E402

OUT = pathlib.Path(__file__).parent / "golden" / "estimates.json"


def main():
    data = {}
    for name, run in SCENARIOS.items():
        rep = run()
        data[name] = {"C_emp": rep.constant, "C_emp_refined": rep.refinement[1],
                      "passed": rep.passed}
        print(name, rep.verdict())
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
