import os
import sys
import json
import logging
import click

# Add parent directory to path to import app modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import create_app
from app.models.report import ReportOptions, full_report
from app.utils.serialize import InputSpec, dumps
from config import config

os.makedirs('logs', exist_ok=True)
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s %(levelname)s: %(message)s',
    handlers=[
        logging.FileHandler('logs/golden.log'),
        logging.StreamHandler()
    ]
)


def golden_documents(inputs, limits):
    """Yield (name, JSON text) for every canonical input."""
    for name, data in sorted(inputs.items()):
        spec = InputSpec.from_mapping(data)
        options = ReportOptions(curve=spec.curve, max_k=spec.max_k, oracle=spec.oracle)
        doc = full_report(spec.p, spec.f, list(spec.R), spec.m, e=spec.e, options=options, limits=limits)
        yield name, dumps(doc) + '\n'


@click.command()
@click.option('--env', default='testing',
              type=click.Choice(['development', 'production', 'testing']),
              help='Configuration to compute the reports with')
@click.option('--only', '-o', multiple=True, help='Regenerate only these inputs')
def make_golden(env, only):
    """Regenerate the pinned golden reports in tests/golden/."""
    logger = logging.getLogger(__name__)
    app = create_app(config[env])
    golden_dir = app.config['GOLDEN_DIR']
    with open(os.path.join(golden_dir, 'inputs.json'), encoding='utf-8') as fh:
        inputs = json.load(fh)
    if only:
        inputs = {k: v for k, v in inputs.items() if k in only}
    written = 0
    for name, text in golden_documents(inputs, app.limits):
        path = os.path.join(golden_dir, f'{name}.json')
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(text)
        logger.info(f"Wrote {path}")
        written += 1
    click.echo(f"Regenerated {written} golden reports")


if __name__ == '__main__':
    make_golden()
