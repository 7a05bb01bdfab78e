"""Collects one verdict line per acceptance criterion."""

RESULTS: dict[int, tuple[bool, str]] = {}


def report(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(line(n))


def line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
