import csv
import json
import math
from io import BytesIO

import numpy as np


def _jsonable(value):
    """Plain-Python copy of value; NaN becomes None so the output stays strict JSON."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def write_json(obj, stream):
    json.dump(_jsonable(obj), stream, indent=2, allow_nan=False)
    stream.write('\n')


def write_csv(rows, header, stream):
    """One line per row dict; floats keep their full repr, None is an empty cell."""
    writer = csv.DictWriter(stream, fieldnames=header, lineterminator='\n', extrasaction='ignore')
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ('' if v is None else _jsonable(v)) for k, v in row.items()})


def format_number(value, digits=4):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return '-'
    if isinstance(value, (int, np.integer)):
        return str(value)
    return f"{value:.{digits}f}"


def generate_summary_pdf(title, tables, footer=''):
    """Build a PDF of headed tables.

    Args:
        title: Document heading
        tables: List of dicts with 'heading', 'header' (column names), 'rows'
            (lists of cells) and an optional 'note' paragraph
        footer: Small grey line at the end

    Returns:
        BytesIO object containing the PDF
    """
    from reportlab.lib import colors
    from reportlab.lib.pagesizes import A4
    from reportlab.lib.styles import getSampleStyleSheet, ParagraphStyle
    from reportlab.lib.units import cm
    from reportlab.platypus import SimpleDocTemplate, Table, TableStyle, Paragraph, Spacer

    buffer = BytesIO()
    # invariant: no timestamps or random ids, so the same tables give the same bytes
    doc = SimpleDocTemplate(buffer, pagesize=A4, topMargin=2*cm, bottomMargin=2*cm,
                            title=title, invariant=1)
    elements = []
    styles = getSampleStyleSheet()

    title_style = ParagraphStyle(
        'CustomTitle',
        parent=styles['Heading1'],
        fontSize=18,
        spaceAfter=12
    )
    elements.append(Paragraph(title, title_style))

    note_style = ParagraphStyle(
        'Note',
        parent=styles['Normal'],
        fontSize=10,
        spaceAfter=6
    )

    for table_spec in tables:
        elements.append(Paragraph(table_spec['heading'], styles['Heading2']))
        if table_spec.get('note'):
            elements.append(Paragraph(table_spec['note'], note_style))

        data = [list(table_spec['header'])]
        data.extend([[format_number(cell) if not isinstance(cell, str) else cell for cell in row]
                     for row in table_spec['rows']])

        table = Table(data, hAlign='LEFT')
        table.setStyle(TableStyle([
            # Header
            ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor('#2563eb')),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('ALIGN', (0, 0), (-1, 0), 'CENTER'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, 0), 10),
            ('BOTTOMPADDING', (0, 0), (-1, 0), 8),
            ('TOPPADDING', (0, 0), (-1, 0), 8),
            # Body
            ('FONTNAME', (0, 1), (-1, -1), 'Helvetica'),
            ('FONTSIZE', (0, 1), (-1, -1), 9),
            ('ALIGN', (1, 1), (-1, -1), 'RIGHT'),
            ('BOTTOMPADDING', (0, 1), (-1, -1), 6),
            ('TOPPADDING', (0, 1), (-1, -1), 6),
            # Grid
            ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
            # Alternating row colors
            *[('BACKGROUND', (0, i), (-1, i), colors.Color(0.95, 0.95, 0.95))
              for i in range(2, len(data), 2)]
        ]))
        elements.append(table)
        elements.append(Spacer(1, 0.6*cm))

    if footer:
        footer_style = ParagraphStyle(
            'Footer',
            parent=styles['Normal'],
            fontSize=9,
            textColor=colors.grey
        )
        elements.append(Paragraph(footer, footer_style))

    doc.build(elements)
    buffer.seek(0)
    return buffer
