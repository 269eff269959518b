import logging
import os

import click

from forms.analysis import build_config
from routes import analysis_options, input_options, output_options
from utils.analysis import analyze_function, describe_point
from utils.export import ensure_dir, write_json
from utils.sampling import set_seed

logger = logging.getLogger(__name__)


@click.command('analyze')
@input_options
@analysis_options
@output_options
def analyze(builtin, input_path, order, m_max, exponent, seed, out):
    """Locate Omega(phi) and classify every maximizer; writes analysis.json."""
    cfg = build_config(builtin=builtin, input_path=input_path, order=order, m_max=m_max,
                       exponent=exponent, seed=seed, out=out)
    set_seed(cfg.seed)

    result = analyze_function(cfg.function, order=cfg.order, m_max=cfg.m_max, exponent=cfg.exponent,
                              source=cfg.source, seed=cfg.seed)
    path = write_json(os.path.join(ensure_dir(cfg.output_dir), 'analysis.json'), result.to_dict())

    print(f"Omega(phi) for {cfg.source}: {len(result.reports)} point(s)")
    for report in result.reports:
        marker = '✅' if report.is_classified else '⚠️ '
        print(f"  {marker} {describe_point(report)}")
    print(f"📄 {path}")

    if not result.classified:
        click.echo(f"⚠️  {result.verdict}", err=True)
        return 2
    return 0
