"""
PDF run report
Renders a run manifest, its parameters and per-series summaries as tables with ReportLab
"""
from io import BytesIO
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER, TA_LEFT
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from ..dto.params import RunConfig
from ..dto.sweep import RunManifest


ACCENT = colors.HexColor('#2e5c8a')
MUTED = colors.HexColor('#555555')

# name, parent, size, colour, alignment, space after
REPORT_STYLES = (
    ('RunTitle', 'Heading1', 15, ACCENT, TA_CENTER, 10),
    ('RunSection', 'Heading2', 11, colors.black, TA_LEFT, 6),
    ('RunMeta', 'Normal', 8, MUTED, TA_LEFT, 3),
)


class PDFReportService:
    """Service for generating tabular run reports"""

    def _get_styles(self):
        styles = getSampleStyleSheet()
        for name, parent, size, colour, alignment, after in REPORT_STYLES:
            styles.add(ParagraphStyle(
                name=name,
                parent=styles[parent],
                fontSize=size,
                leading=size + 3,
                textColor=colour,
                spaceAfter=after,
                alignment=alignment,
                fontName='Helvetica' if parent == 'Normal' else 'Helvetica-Bold',
            ))
        return styles

    def _table(self, rows: List[List[str]], col_widths: Optional[Sequence[float]] = None) -> Table:
        table = Table(rows, colWidths=col_widths, repeatRows=1)
        table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), ACCENT),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.white),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTNAME', (0, 1), (-1, -1), 'Courier'),
            ('FONTSIZE', (0, 0), (-1, -1), 7.5),
            ('VALIGN', (0, 0), (-1, -1), 'TOP'),
            ('LINEBELOW', (0, 0), (-1, 0), 0.8, colors.black),
            ('LINEBELOW', (0, -1), (-1, -1), 0.4, MUTED),
            ('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.white, colors.HexColor('#eef2f6')]),
        ]))
        return table

    def generate_run_report(self, manifest: RunManifest, config: RunConfig,
                            series: Sequence[Mapping[str, Any]] = ()) -> BytesIO:
        """
        Run report: manifest header, resolved parameters, one row per series
        and the summary entries of the manifest (zero crossings, failures)
        """
        buffer = BytesIO()
        doc = SimpleDocTemplate(buffer, pagesize=A4, topMargin=0.5*inch, bottomMargin=0.5*inch,
                                leftMargin=0.6*inch, rightMargin=0.6*inch)
        styles = self._get_styles()
        story = [Paragraph(f"Run report: {manifest.command}", styles['RunTitle'])]

        for info in (
            f"<b>Config hash:</b> {manifest.config_hash}",
            f"<b>Tool version:</b> {manifest.tool_version}",
            f"<b>Timestamp (UTC):</b> {manifest.timestamp}",
        ):
            story.append(Paragraph(info, styles['RunMeta']))
        story.append(Spacer(1, 0.2*inch))

        story.append(Paragraph("Parameters", styles['RunSection']))
        params: Dict[str, Any] = dict(config.system.model_dump())
        params.update(P_L=config.P_L, P_in=config.probe_power(), Delta_L=config.Delta_L)
        rows = [["Parameter", "Value"]] + [[k, "" if v is None else f"{v:.6g}"] for k, v in params.items()]
        story.append(self._table(rows, [2.0*inch, 2.5*inch]))
        story.append(Spacer(1, 0.2*inch))

        if series:
            story.append(Paragraph("Series", styles['RunSection']))
            columns = list(series[0].keys())
            rows = [columns] + [[_cell(s.get(c)) for c in columns] for s in series]
            story.append(self._table(rows))
            story.append(Spacer(1, 0.2*inch))

        if manifest.summary:
            story.append(Paragraph("Summary", styles['RunSection']))
            rows = [["Key", "Value"]] + [[k, _cell(v)] for k, v in sorted(manifest.summary.items())]
            story.append(self._table(rows, [2.0*inch, 4.8*inch]))

        doc.build(story)
        buffer.seek(0)
        return buffer

    def write_run_report(self, path: Path, manifest: RunManifest, config: RunConfig,
                         series: Sequence[Mapping[str, Any]] = ()) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.generate_run_report(manifest, config, series).getvalue())
        return path


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    text = str(value)
    return text if len(text) <= 120 else text[:117] + "..."
