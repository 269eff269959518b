# Command package: options shared by analyze, power and verify

import functools

import click

from forms.analysis import EXPONENT, N_LIST, SEED, WINDOW, builtin_names


def _stack(*decorators):
    def apply(func):
        for decorator in reversed(decorators):
            func = decorator(func)
        return func
    return apply


input_options = _stack(
    click.option('--builtin', type=click.Choice(builtin_names()), default=None,
                 help='Use a built-in example function.'),
    click.option('--input', 'input_path', type=click.Path(dir_okay=False), default=None,
                 help='LatticeFunction JSON file.'),
)

analysis_options = _stack(
    click.option('--order', type=int, default=None, help='Truncation order of the expansion of Gamma.'),
    click.option('--m-max', 'm_max', type=int, default=None, help='Largest weight tried by the classifier.'),
    click.option('--exponent', type=EXPONENT, default=None,
                 help='Exponent matrix "a,b;c,d" for non semi-elliptic principal parts.'),
)

output_options = _stack(
    click.option('--seed', type=SEED, default=None, help='64-bit sampling seed (decimal or 0x hex).'),
    click.option('--out', type=click.Path(file_okay=False), default=None, help='Output directory.'),
)

n_option = functools.partial(click.option, '--n', 'n_list', type=N_LIST, default=None,
                             help='Powers to compute: "a,b,c" or "start:stop:step".')
window_option = functools.partial(click.option, '--window', type=WINDOW, default=None,
                                  help='Lattice window "a:b" (every axis) or "a:b,c:d".')
method_option = functools.partial(click.option, '--method', type=click.Choice(['auto', 'direct', 'fft']),
                                  default='auto', show_default=True, help='Convolution engine.')
eps_option = functools.partial(click.option, '--eps', 'target_eps', type=float, default=None,
                               help='Relative accuracy of the heat-kernel quadrature.')
