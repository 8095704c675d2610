"""Shared store of acceptance verdicts, printed at the end of a pytest run."""

CRITERIA = {}


def record(number, ok, detail):
    CRITERIA[number] = (ok, detail)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    return line
