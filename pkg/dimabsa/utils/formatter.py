"""Output formatting utilities."""

from typing import Optional, Sequence

from rich.table import Table

from dimabsa.core.eda import NullReport, PsiReport, SplitSummary
from dimabsa.core.generation import ParseSummary
from dimabsa.models.dataset import ValidationReport
from dimabsa.models.scores import ScoreReport
from dimabsa.regressor.trainer import EpochRecord


def _metric(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def format_score_report(report: ScoreReport) -> str:
    """
    Format scores as a results-table row.

    Args:
        report: ScoreReport from evaluation

    Returns:
        Header line and value line, plus prediction/gold counts
    """
    if report.is_regression:
        columns = [
            ("RMSE_VA", report.rmse_va),
            ("PCC_V", report.pcc_v),
            ("PCC_A", report.pcc_a),
            ("RMSE_V", report.rmse_v),
            ("RMSE_A", report.rmse_a),
        ]
        counts = f"{report.n_gold} aspects"
    else:
        columns = [("cP", report.c_precision), ("cR", report.c_recall), ("cF1", report.c_f1)]
        counts = f"{report.n_pred} predicted / {report.n_gold} gold tuples"
    header = "  ".join(f"{name:>8}" for name, _ in columns)
    values = "  ".join(f"{_metric(value):>8}" for _, value in columns)
    return f"{header}\n{values}\n({counts})"


def format_validation_report(report: ValidationReport, valid_records: int) -> str:
    """
    Format load findings, errors first.

    Args:
        report: Findings of a load
        valid_records: Number of records that passed

    Returns:
        Summary line followed by one line per finding
    """
    lines = [
        f"{report.records_seen} records read, {valid_records} valid, "
        f"{len(report.errors)} errors, {len(report.warnings)} warnings"
    ]
    for issue in report.errors + report.warnings:
        lines.append(f"  {issue}")
    return "\n".join(lines)


def format_history(history: Sequence[EpochRecord], best_epoch: int) -> str:
    """Format training history with the best epoch marked."""
    if not history:
        return "No epochs run"
    lines = [f"{'epoch':>5}  {'train_loss':>10}  {'val_RMSE_VA':>11}  {'lr_mult':>8}"]
    for record in history:
        mark = " *" if record.epoch == best_epoch else ""
        lines.append(
            f"{record.epoch:>5}  {record.train_loss:>10.4f}  {record.val_rmse_va:>11.4f}  "
            f"{record.lr_multiplier:>8.4g}{mark}"
        )
    return "\n".join(lines)


def format_parse_summary(summary: ParseSummary) -> str:
    """Format counts of a generation-parsing batch."""
    lines = [
        f"{summary.records} outputs, {summary.tuples} tuples kept, "
        f"{summary.rejected_items} items rejected, {summary.failed_outputs} outputs without JSON"
    ]
    for kind, count in sorted(summary.repairs.items()):
        lines.append(f"  {kind:16} {count}")
    return "\n".join(lines)


def format_split_summary(summary: SplitSummary, nulls: Optional[NullReport] = None) -> str:
    """Format split statistics and, when given, the NULL analysis."""
    density_label = summary.density_key.replace("_", " ")
    lines = [
        f"{summary.split.value} ({summary.subtask.value}): {summary.reviews} reviews, "
        f"{summary.labels} labels",
        f"  review length   mean {summary.length_mean:.1f}, "
        f"range {summary.length_min}-{summary.length_max} codepoints",
        f"  {density_label:15} mean {summary.density_mean:.2f}",
    ]
    if summary.category_counts:
        top = sorted(summary.category_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        lines.append("  top categories  " + ", ".join(f"{c} ({n})" for c, n in top))
    if nulls is not None:
        lines.append(f"  NULL rate       {nulls.rate:.3f} ({nulls.null_tuples}/{nulls.tuples})")
        if nulls.composition:
            parts = ", ".join(f"{k} {v:.2f}" for k, v in nulls.composition.items())
            lines.append(f"  NULL makeup     {parts}")
    return "\n".join(lines)


def psi_table(reports: Sequence[PsiReport]) -> Table:
    """Build a rich table of PSI values with their shift levels."""
    table = Table(title="Population Stability Index")
    table.add_column("feature")
    table.add_column("splits")
    table.add_column("PSI", justify="right")
    table.add_column("level")
    styles = {"none": "green", "moderate": "yellow", "significant": "red"}
    for r in reports:
        table.add_row(
            r.feature.value,
            f"{r.reference.value} -> {r.comparison.value}",
            f"{r.value:.4f}",
            f"[{styles[r.level.value]}]{r.level.value}[/]",
        )
    return table
