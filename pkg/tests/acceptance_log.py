"""Collects one line per acceptance criterion for the terminal summary."""

RESULTS: list[str] = []


def report(number, ok: bool, detail: str, seconds: float) -> str:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  ({seconds:.2f}s) {detail}"
    RESULTS.append(line)
    print(line)
    return line


def note(number, detail: str) -> None:
    line = f"criterion {number:>2}: NOTE  {detail}"
    RESULTS.append(line)
    print(line)
