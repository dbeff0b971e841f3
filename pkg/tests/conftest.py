import os
import sys

import pytest

# the CLI subprocess tests need the package importable without relying on cwd
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def run_cli():
    import subprocess

    def run(*args, env=None, cwd=None):
        full_env = dict(os.environ)
        if env:
            full_env.update(env)
        return subprocess.run([sys.executable, "-m", "infoconc.cli", *map(str, args)],
                              capture_output=True, env=full_env, cwd=cwd)

    return run
