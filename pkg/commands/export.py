import csv
import io
import json

import click
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

import hyperrep
from hyperrep.errors import DomainError
from utils import exact_form, format_number


def _header(name, config):
    echo = config.echo()
    parts = ['%s=%s' % (k, echo[k]) for k in sorted(echo)]
    return 'hyperrep %s %s | %s' % (hyperrep.__version__, name, ' '.join(parts))


def generate_csv(name, columns, rows, config, extra=None):
    output = io.StringIO()
    output.write('# %s\n' % _header(name, config))
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row[c]) if not isinstance(row[c], str)
                         else row[c] for c in columns])
    for key, value in sorted((extra or {}).items()):
        output.write('# %s=%s\n' % (key, value if isinstance(value, str)
                                      else format_number(value)))
    return output.getvalue().encode()


def generate_json(name, columns, rows, config, extra=None):
    out_rows = []
    for row in rows:
        item = {}
        for c in columns:
            value = row[c]
            if isinstance(value, str):
                item[c] = value
                continue
            item[c] = format_number(value)
            exact = exact_form(value)
            if exact is not None:
                item[c + '_exact'] = exact
        out_rows.append(item)
    doc = {'experiment': name, 'version': hyperrep.__version__,
           'config': config.echo(), 'columns': list(columns), 'rows': out_rows}
    if extra:
        doc['summary'] = {k: format_number(v) if not isinstance(v, str) else v
                          for k, v in sorted(extra.items())}
    return (json.dumps(doc, indent=2, sort_keys=True) + '\n').encode()


def generate_excel(name, columns, rows, config):
    wb = Workbook()
    ws = wb.active
    ws.title = name[:31]

    header_fill = PatternFill(start_color='042351', end_color='042351', fill_type='solid')
    header_font = Font(color='FFFFFF', bold=True)
    align_center = Alignment(horizontal='center', vertical='center')

    ws.cell(row=1, column=1, value=_header(name, config))
    for col_num, header in enumerate(columns, 1):
        cell = ws.cell(row=2, column=col_num, value=header)
        cell.fill = header_fill
        cell.font = header_font
        cell.alignment = align_center
        ws.column_dimensions[get_column_letter(col_num)].width = 22

    for row in rows:
        ws.append([row[c] if isinstance(row[c], str) else format_number(row[c])
                   for c in columns])

    stream = io.BytesIO()
    wb.save(stream)
    return stream.getvalue()


def write_result(name, columns, rows, config, extra=None):
    """Serialize rows in the configured format to --out or stdout."""
    if config.format == 'json':
        payload = generate_json(name, columns, rows, config, extra)
    elif config.format == 'xlsx':
        if not config.out:
            raise DomainError('xlsx output needs --out')
        payload = generate_excel(name, columns, rows, config)
    else:
        payload = generate_csv(name, columns, rows, config, extra)
    if config.out:
        with open(config.out, 'wb') as fh:
            fh.write(payload)
    else:
        click.echo(payload, nl=False)
