from fractions import Fraction

import click

from hyperrep.errors import DomainError
from hyperrep.plane import ArcSet
from hyperrep.scalar import ExactScalar
from hyperrep.tree import CylinderSet, TreeModel

NOTIFY_COLOURS = {
    'success': 'green',
    'info': 'cyan',
    'warning': 'yellow',
    'danger': 'red',
}


def notify(message, category='info'):
    click.secho(message, fg=NOTIFY_COLOURS.get(category), err=True)


def format_number(value):
    """17 significant digits; exact rationals keep their p/q form elsewhere."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return '%.17g' % float(value)


def exact_form(value):
    """p/q text for exact rationals, a+b*sqrt(m) for quadratic values."""
    if isinstance(value, ExactScalar):
        return str(value)
    if isinstance(value, Fraction):
        return '%d/%d' % (value.numerator, value.denominator)
    return None


def parse_number(text):
    text = text.strip()
    if '/' in text:
        return Fraction(text)
    value = Fraction(text)
    return int(value) if value.denominator == 1 else value


def parse_t_values(text):
    """``a..b`` (integer steps), ``x,y,z`` or a single value."""
    text = (text or '').strip()
    if not text:
        raise DomainError('no t values given')
    if '..' in text:
        lo, _, hi = text.partition('..')
        lo, hi = parse_number(lo), parse_number(hi)
        if hi < lo:
            raise DomainError('empty t range %s' % text)
        out = []
        t = lo
        while t <= hi:
            out.append(t)
            t += 1
        return out
    return [parse_number(part) for part in text.split(',') if part.strip()]


def parse_boundary_set(model, text):
    """Comma-separated cylinder prefixes (tree) or turn intervals ``x:y`` (plane).

    A leading ``!`` takes the complement; ``B`` is the whole boundary.
    """
    text = (text or '').strip()
    if not text:
        raise DomainError('empty set specification')
    negate = text.startswith('!')
    if negate:
        text = text[1:].strip()
    if isinstance(model, TreeModel):
        if text == 'B':
            S = CylinderSet.whole(model)
        else:
            prefixes = [model.word(p).letters for p in text.split(',') if p.strip()]
            S = CylinderSet.from_prefixes(model, prefixes)
    else:
        if text == 'B':
            S = ArcSet.whole()
        else:
            intervals = []
            for part in text.split(','):
                lo, sep, hi = part.partition(':')
                if not sep:
                    raise DomainError('arc %r must be start:end in turns' % part)
                intervals.append((float(Fraction(lo)), float(Fraction(hi))))
            S = ArcSet.from_turns(intervals)
    return S.complement() if negate else S
