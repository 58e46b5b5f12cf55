"""Solve reports and their debug formatting."""
from dataclasses import dataclass, replace
from typing import Optional

from .config import REPORT_SEPARATOR_WIDTH
from .core import BudgetValue, Instance, Ordering, budget_of_ordering, is_valid_ordering
from .exceptions import ContractViolation


@dataclass(frozen=True)
class SolveReport:
    """Optimal budget with the ordering that achieves it."""

    budget: BudgetValue
    witness: Ordering
    algorithm: str
    elapsed: float = 0.0
    states: int = 0
    probes: int = 0

    def certify(self, inst: Instance) -> "SolveReport":
        """
        Re-evaluates the witness against the instance.

        Args:
            inst: Instance the report claims to solve

        Returns:
            The report itself, unchanged

        Raises:
            ContractViolation: If the witness is invalid or evaluates to another budget
        """
        if not is_valid_ordering(inst, self.witness):
            raise ContractViolation(f"{self.algorithm}: witness breaks a precedence edge")
        actual = budget_of_ordering(inst, self.witness)
        if actual != self.budget:
            raise ContractViolation(
                f"{self.algorithm}: witness evaluates to {actual}, report claims {self.budget}"
            )
        return self

    def relabel(self, algorithm: str, elapsed: Optional[float] = None, probes: Optional[int] = None) -> "SolveReport":
        return replace(
            self,
            algorithm=algorithm,
            elapsed=self.elapsed if elapsed is None else elapsed,
            probes=self.probes if probes is None else probes,
        )


def format_report(report: SolveReport) -> str:
    """Stable key: value rendering used by the CLI."""
    lines = [
        f"budget: {report.budget}",
        f"algorithm: {report.algorithm}",
        f"milliseconds: {report.elapsed * 1000:.3f}",
        f"states: {report.states}",
        f"probes: {report.probes}",
    ]
    return "\n".join(lines)


def format_witness(witness: Ordering, inst: Instance, indent: int = 2) -> str:
    """
    Formats a witness as one vertex per line with the running level.

    Args:
        witness: Ordering to render
        inst: Instance supplying the weights
        indent: Leading spaces per line

    Returns:
        Multi-line string
    """
    pad = " " * indent
    level = 0
    rows = []
    for vid in witness:
        level += inst.weight(vid)
        side = "b" if inst.is_bought(vid) else "s"
        rows.append(f"{pad}{side} {vid:<12} {inst.weight(vid):>+6}  level {level}")
    return "\n".join(rows)


def print_report_debug(report: SolveReport, inst: Instance) -> None:
    """
    Pretty prints a report and its witness for debugging purposes.

    Args:
        report: Report to print
        inst: Instance the report refers to
    """
    separator = "=" * REPORT_SEPARATOR_WIDTH
    print(f"\n{separator}")
    print(f"📋 Solve report ({report.algorithm})")
    print(separator)
    print(format_report(report))
    print(f"\n🧾 Witness ({len(report.witness)} vertices):")
    print("-" * REPORT_SEPARATOR_WIDTH)
    print(format_witness(report.witness, inst))
    print(f"\n{separator}\n")
