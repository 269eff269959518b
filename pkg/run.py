#!/usr/bin/env python3
"""
Startup script for convpow.

    python run.py analyze --builtin intro
    python run.py power --builtin twopackets --n 60 --attractor --svg
    python run.py verify --builtin intro --mode llt

Exit codes: 0 success, 1 invalid input, 2 unclassified maximizer or failed
analysis, 3 verification contract violated.
"""

import logging
import os
import sys

import click

from app import create_app
from utils.errors import ConvpowError, LatticeInputError

logger = logging.getLogger(__name__)


def main(argv=None, config_name=None):
    """Run one command and return its exit code."""
    cli = create_app(config_name or os.environ.get('CONVPOW_CONFIG', 'default'))
    try:
        code = cli.main(args=argv, prog_name='convpow', standalone_mode=False)
    except click.exceptions.Abort:
        print("⚠️  Aborted")
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except LatticeInputError as e:
        print(f"⚠️  Invalid input: {e}", file=sys.stderr)
        return 1
    except ConvpowError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"⚠️  {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    # --help and friends return None
    return code if isinstance(code, int) else 0


if __name__ == '__main__':
    sys.exit(main())
