import logging
import os

import click
import numpy as np

from config import Config
from forms.analysis import build_config
from models.lattice import BoxDomain, grid_frame
from routes import (analysis_options, eps_option, input_options, method_option, n_option, output_options,
                    window_option)
from utils.analysis import analyze_function, attractor_terms
from utils.attractor import attractor_grid
from utils.export import ensure_dir, svg_heatmap, write_frame
from utils.lattice import power_on_window
from utils.sampling import set_seed

logger = logging.getLogger(__name__)

DEFAULT_N = (100,)


@click.command('power')
@input_options
@n_option()
@window_option()
@method_option()
@click.option('--raw', is_flag=True, help='Skip the spectral analysis and power phi as given.')
@click.option('--attractor', is_flag=True, help='Add Re/Im of the attractor A^n as extra columns.')
@click.option('--svg', is_flag=True, help='Also write a heatmap of |phi^(n)| (d = 2 only).')
@eps_option()
@analysis_options
@output_options
def power(builtin, input_path, n_list, window, method, raw, attractor, svg, target_eps, order, m_max, exponent,
          seed, out):
    """Write phi^(n) over a window as power_n<N>.csv for every requested n."""
    if raw and attractor:
        raise click.UsageError("--attractor needs the analysis; drop --raw.")
    cfg = build_config(builtin=builtin, input_path=input_path, order=order, m_max=m_max, n_list=n_list,
                       window=window, target_eps=target_eps, exponent=exponent, seed=seed, out=out)
    set_seed(cfg.seed)

    f = cfg.function
    box = cfg.window or BoxDomain.cube(Config.WINDOW[0], Config.WINDOW[1], f.dim)
    terms = []
    if not raw:
        result = analyze_function(f, order=cfg.order, m_max=cfg.m_max, exponent=cfg.exponent,
                                  source=cfg.source, seed=cfg.seed)
        if not result.classified:
            click.echo(f"⚠️  {result.verdict}", err=True)
            return 2
        f = result.function
        terms = attractor_terms(result) if attractor else []

    out_dir = ensure_dir(cfg.output_dir)
    for n in cfg.n_list or DEFAULT_N:
        values = power_on_window(f, n, box, method=method)
        extra = {}
        if terms:
            A = attractor_grid(terms, n, box, target_eps=cfg.target_eps)
            extra = {'attractor_re': A.real, 'attractor_im': A.imag}
        path = write_frame(grid_frame(box, values, extra), os.path.join(out_dir, f"power_n{n}.csv"))
        print(f"✅ n={n}: max |phi^(n)| = {np.abs(values).max():.6g} on window -> {path}")
        if svg:
            svg_path = svg_heatmap(np.abs(values), box, os.path.join(out_dir, f"power_n{n}.svg"),
                                   title=f"|phi^({n})|  {cfg.source}")
            if svg_path:
                print(f"   🖼  {svg_path}")
    return 0
