from dataclasses import dataclass

from werkzeug.datastructures import MultiDict
from wtforms import Form, IntegerField, StringField
from wtforms.validators import AnyOf, InputRequired, NumberRange, Optional, Regexp


class RunConfigForm(Form):
    """Validates the flags shared by every experiment."""
    model = StringField('model', [InputRequired(),
                                  Regexp(r'^(free|plane)(:.*)?$',
                                         message='model must start with free or plane')])
    t = StringField('t', [Optional(),
                          Regexp(r'^[0-9./]+(\.\.[0-9./]+)?(,[0-9./]+)*$',
                                 message='t must be a value, a list or a..b')])
    t_max = StringField('t_max', [Optional(), Regexp(r'^[0-9]+(\.[0-9]+)?$')])
    depth = IntegerField('depth', [InputRequired(), NumberRange(min=1, max=40)])
    seed = IntegerField('seed', [InputRequired(), NumberRange(min=0)])
    threads = IntegerField('threads', [InputRequired(), NumberRange(min=1, max=256)])
    out = StringField('out', [Optional()])
    format = StringField('format', [InputRequired(), AnyOf(['csv', 'json', 'xlsx'])])


@dataclass(frozen=True)
class RunConfig:
    model: str
    t: str
    t_max: float
    depth: int
    seed: int
    threads: int
    out: str
    format: str

    def echo(self):
        return {'model': self.model, 't': self.t, 't_max': self.t_max,
                'depth': self.depth, 'seed': self.seed, 'format': self.format}


def validate_run_config(values):
    """Return (RunConfig, None) or (None, error messages)."""
    form = RunConfigForm(MultiDict({k: '' if v is None else str(v)
                                    for k, v in values.items()}))
    if not form.validate():
        errors = ['%s: %s' % (name, '; '.join(msgs))
                  for name, msgs in sorted(form.errors.items())]
        return None, errors
    data = form.data
    config = RunConfig(model=data['model'], t=data['t'] or '',
                       t_max=float(data['t_max'] or 0), depth=data['depth'],
                       seed=data['seed'], threads=data['threads'],
                       out=data['out'] or '', format=data['format'])
    return config, None
