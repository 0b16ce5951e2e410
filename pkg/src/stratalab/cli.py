"""Command line entry point: ``stratalab <suite> [options]``."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .report import emit_report
from .suites import SUITES, EnvelopeError, SuiteConfig, run_suite


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("suite", type=click.Choice(SUITES))
@click.option("--p", "p", type=int, default=3, show_default=True, help="Residue characteristic (3 or 5).")
@click.option("--deg", "d", type=int, default=1, show_default=True, help="Degree of the residue field (1, 2 or 4).")
@click.option("--radius", type=int, default=1, show_default=True, help="Ball radius (0 to 2).")
@click.option("--precision", type=int, default=None, help="p-adic precision m; defaults to 2*radius + 4.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@click.option("--timings/--no-timings", default=False, help="Record elapsed time per check (breaks byte-identity).")
@click.option("--sample", type=int, default=2000, show_default=True, help="Sample size where a check is not exhaustive.")
@click.option("--seed", type=int, default=0, show_default=True)
def main(suite: str, p: int, d: int, radius: int, precision: int | None, out: str | None, fmt: str, timings: bool, sample: int, seed: int) -> None:
    """Run a verification SUITE and emit its report; exit status 1 iff a check fails."""
    cfg = SuiteConfig(suite, p, d, radius, precision, out, fmt, timings, sample, seed)
    try:
        report = run_suite(cfg)
    except EnvelopeError as exc:
        raise click.UsageError(str(exc)) from exc
    data = emit_report(report, fmt)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    sys.exit(0 if report.ok else 1)


if __name__ == "__main__":
    main()
