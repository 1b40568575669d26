"""Command-line surface: one JSON document on stdout per invocation."""
import functools
import logging

import click

from app import create_app, setup_logging
from app.exceptions import TheoremViolation, ValidationError
from app.models.additive import (AdditivePoly, find_right_factor, phi_iso,
                                 phi_irreducible, right_divmod)
from app.models.curve import curve_summary, count_series
from app.models.field import FieldElement
from app.models.quotient import iterated_quotient, verify_morphism
from app.models.report import (ReportOptions, full_report, primitivity,
                               root_system_section, scan, swan, validate)
from app.models.root_system import (matches_VR, monomial_root_system,
                                    nu_label, same_system)
from app.models.symplectic import (build, build_common, completely_anisotropic,
                                   direct_sum, oracle_anisotropic)
from app.utils.counters import BACKENDS, count_pairs, select_counter
from app.utils.serialize import (base_field, dumps, load_input,
                                 parse_coefficient, parse_r, poly_text)
from config import config

logger = logging.getLogger(__name__)


class UnknownCommand(click.UsageError):
    exit_code = 1


class AddRepGroup(click.Group):
    def resolve_command(self, ctx, args):
        name = args[0] if args else None
        if name is not None and self.get_command(ctx, name) is None and not name.startswith('-'):
            raise UnknownCommand(f"No such command '{name}'.", ctx=ctx)
        return super().resolve_command(ctx, args)


def emits_json(f):
    """Print the returned document; map library errors to exit codes 2 and 3."""
    @functools.wraps(f)
    @click.pass_context
    def wrapper(ctx, *args, **kwargs):
        try:
            doc = f(ctx.obj, *args, **kwargs)
        except ValidationError as e:
            logger.warning(f"{ctx.command.name}: {e}")
            click.echo(dumps({'error': str(e), 'kind': 'validation'}))
            ctx.exit(2)
        except TheoremViolation as e:
            logger.error(f"{ctx.command.name}: theorem violation: {e}")
            click.echo(dumps({'error': str(e), 'kind': 'theorem_violation'}))
            ctx.exit(3)
        click.echo(dumps(doc))
    return wrapper


def input_options(f):
    f = click.option('-m', 'm', type=int, default=1, show_default=True, help='Integer m prime to p')(f)
    f = click.option('-e', 'e', type=int, default=None,
                     help='Top index e of R (a short coefficient list fills a_e downward)')(f)
    f = click.option('-R', 'r_text', default=None,
                     help="Coefficients a_0;…;a_e: integers, coordinate vectors 'c0,c1' or element text forms")(f)
    f = click.option('-f', 'f', type=int, default=1, show_default=True, help='q = p^f')(f)
    f = click.option('-p', 'p', type=int, default=None, help='Characteristic')(f)
    return f


def _poly(app, p, f, r_text, e) -> AdditivePoly:
    if p is None or r_text is None:
        raise ValidationError("both -p and -R are required")
    return parse_r(r_text, base_field(p, f, app.limits), e)


@click.group(cls=AddRepGroup)
@click.option('--env', default='development',
              type=click.Choice(['development', 'production', 'testing']),
              help='Configuration to run with')
@click.option('--workers', type=int, default=None, help='Worker threads for the parallel scans')
@click.pass_context
def cli(ctx, env, workers):
    """Invariants of the Weil-group representations τ_{ψ,R,m}."""
    app = create_app(config[env])
    if workers is not None:
        app.config['WORKERS'] = workers
    setup_logging(app)
    ctx.obj = app


@cli.command()
@input_options
@click.option('--curve', is_flag=True, help='Add point counts, zeta numerator and ψ-parts')
@click.option('--max-k', type=int, default=None, help='Count up to F_(q^k) and check against P(T)')
@click.option('--oracle', is_flag=True, help='Enable the exhaustive cross-checks')
@click.option('--backend', type=click.Choice(BACKENDS), default='auto', show_default=True)
@click.option('--input', 'input_path', type=click.Path(), default=None, help='InputSpec JSON file')
@emits_json
def report(app, p, f, r_text, e, m, curve, max_k, oracle, backend, input_path):
    """Full invariant report."""
    if input_path:
        spec = load_input(input_path)
        p, f, r_text, e, m = spec.p, spec.f, list(spec.R), spec.e, spec.m
        curve, max_k, oracle = spec.curve or curve, spec.max_k or max_k, spec.oracle or oracle
    R = _poly(app, p, f, r_text, e)
    options = ReportOptions(curve=curve, max_k=max_k, oracle=oracle, backend=backend)
    return full_report(p, f, R, m, options=options, limits=app.limits)


@cli.command('primitivity')
@input_options
@click.option('--oracle', is_flag=True, help='Also run the exhaustive subspace oracle')
@emits_json
def primitivity_command(app, p, f, r_text, e, m, oracle):
    """Primitivity verdict with every route and the induction data."""
    R = _poly(app, p, f, r_text, e)
    validate(R, m)
    verdict = primitivity(R, m, app.limits, oracle=oracle)
    return {'input': {'R': poly_text(R), 'm': m}, **verdict.to_json()}


@cli.command('swan')
@click.option('-p', 'p', type=int, required=True)
@click.option('-e', 'e', type=int, required=True)
@click.option('-dR', '--d-r', 'd_r', type=int, required=True, help='d_R, a divisor of p^e + 1')
@click.option('-m', 'm', type=int, default=1, show_default=True)
@emits_json
def swan_command(app, p, e, d_r, m):
    """Swan conductor m(p^e + 1)/d_R."""
    return {'swan': swan(p, e, d_r, m)}


@cli.command()
@input_options
@click.option('--basis', default=None,
              help="';'-separated elements spanning U (element text forms in the ambient field)")
@emits_json
def quotient(app, p, f, r_text, e, m, basis):
    """Quotient by an isotropic submodule U (default: the anisotropy witness)."""
    R = _poly(app, p, f, r_text, e)
    validate(R, m)
    if R.p == 2:
        raise ValidationError("curve quotients are only built for p ≠ 2")
    M = build(R, m, app.limits)
    if basis:
        U = [parse_coefficient(t, M.ambient) for t in basis.split(';') if t.strip()]
    else:
        found = completely_anisotropic(M, app.limits)
        if found.anisotropic:
            raise ValidationError("V_R is completely anisotropic: there is no isotropic submodule")
        U = found.witness
    data = iterated_quotient(R, m, U, M, app.limits)
    ok, reasons = verify_morphism(R, data.R1, data.r, data.delta, m)
    return {'input': {'R': poly_text(R), 'm': m}, 'induction_data': data.to_json(),
            'verified': ok, 'problems': reasons}


@cli.command()
@click.option('-p', 'p', type=int, required=True)
@click.option('-f', 'f', type=int, default=1, show_default=True)
@click.option('-e', 'e', type=int, required=True)
@click.option('-a', 'a_text', default='1', show_default=True, help='Coefficient a_e of R = a_e x^(p^e)')
@click.option('-m', 'm', type=int, default=1, show_default=True)
@emits_json
def rootsystem(app, p, f, e, a_text, m):
    """Root system of a monomial R with its invariants and symplectic type."""
    F = base_field(p, f, app.limits)
    R = AdditivePoly.monomial(F, e, parse_coefficient(a_text, F))
    validate(R, m)
    M = build(R, m, app.limits)
    W = monomial_root_system(p, f, e, R.coefficient(e), m, app.limits, ambient=M.ambient)
    section = W.to_json(nu_label(W.classification.type))
    section['matches_VR'] = matches_VR(M, W.system, W.invariants)
    return {'input': {'R': poly_text(R), 'm': m}, 'root_system': section}


@cli.command()
@input_options
@click.option('--max-k', type=int, default=None, help='Largest k (default: the genus)')
@click.option('--zeta', is_flag=True, help='Also rebuild P(T) and the ψ-parts')
@click.option('--oracle', is_flag=True, help='Cross-check the counting backends')
@click.option('--backend', type=click.Choice(BACKENDS), default='auto', show_default=True)
@emits_json
def count(app, p, f, r_text, e, m, max_k, zeta, oracle, backend):
    """Affine point counts of a^p − a = xR(x)."""
    R = _poly(app, p, f, r_text, e)
    validate(R, m)
    if zeta:
        return {'input': {'R': poly_text(R)},
                **curve_summary(R, app.limits, max_k, oracle, backend).to_json()}
    counter = select_counter(R, app.limits, backend)
    K = max_k or 1
    doc = {'input': {'R': poly_text(R)}, 'counts': list(count_series(R, K, app.limits, counter).counts),
           'count_backend': counter.name}
    if oracle:
        doc['pairs'] = [count_pairs(R, k, app.limits) for k in range(1, K + 1)]
        if doc['pairs'] != doc['counts']:
            raise TheoremViolation(f"pair counts {doc['pairs']} disagree with {doc['counts']}")
    return doc


@cli.command()
@input_options
@click.option('--R2', 'r2_text', default=None, help='Second R for a direct sum')
@click.option('--e2', 'e2', type=int, default=None)
@click.option('--m2', 'm2', type=int, default=None)
@click.option('--oracle', is_flag=True, help='Also run the exhaustive subspace oracle')
@emits_json
def anisotropy(app, p, f, r_text, e, m, r2_text, e2, m2, oracle):
    """Complete anisotropy of V_R, or of V_R1 ⊕ V_R2."""
    R = _poly(app, p, f, r_text, e)
    validate(R, m)
    doc = {'input': {'R': poly_text(R), 'm': m}}
    if r2_text is None:
        M = build(R, m, app.limits)
    else:
        R2 = _poly(app, p, f, r2_text, e2)
        m2 = m if m2 is None else m2
        validate(R2, m2)
        M1, M2 = build_common([(R, m), (R2, m2)], app.limits)
        M = direct_sum(M1, M2)
        doc['input'].update({'R2': poly_text(R2), 'm2': m2})
        systems = [root_system_section(S, k, N, app.limits) for S, k, N in ((R, m, M1), (R2, m2, M2))]
        doc['nu_label'] = _direct_sum_label(R, m, R2, m2, M1, systems, app.limits)
    result = completely_anisotropic(M, app.limits)
    doc.update(result.to_json(M))
    doc['dim'] = M.dim
    if oracle:
        doc['subspace_oracle'] = oracle_anisotropic(M, app.limits).anisotropic
        if doc['subspace_oracle'] != result.anisotropic:
            raise TheoremViolation("the exhaustive subspace oracle disagrees with the cyclic scan")
    return doc


def _direct_sum_label(R, m, R2, m2, M, systems, limits) -> str:
    if any(s is None for s in systems):
        return 'n/a'
    kinds = {s['type'] for s in systems}
    if kinds != {'A'}:
        return 'n/a'
    W1, W2 = (monomial_root_system(S.p, S.base.n, S.e, S.coefficient(S.e), k, limits, ambient=M.ambient).system
              for S, k in ((R, m), (R2, m2)))
    return nu_label('A', doubled_pair=same_system(W1, W2))


@cli.command()
@input_options
@click.option('-t', 't', type=int, default=None, help='Also transport to F_q[y] along x^(p^t) ↦ y')
@emits_json
def prime(app, p, f, r_text, e, m, t):
    """Primality of an additive polynomial under composition over F_q."""
    g = _poly(app, p, f, r_text, e)
    if g.e < 1:
        raise ValidationError("primality needs deg f > 1")
    factor = find_right_factor(g, app.limits)
    doc = {'input': {'f': poly_text(g)}, 'prime': factor is None,
           'right_factor': None if factor is None else [str(c) for c in factor.coeffs]}
    if factor is not None:
        left, _ = right_divmod(g, factor)
        doc['left_factor'] = [str(c) for c in left.coeffs]
    if t is not None:
        poly = phi_iso(g, t)
        doc['phi'] = {'t': t, 'coeffs': [str(FieldElement(g.base, int(c))) for c in reversed(poly.coeffs.tolist())],
                      'irreducible': phi_irreducible(g, t)}
    return doc


@cli.command('scan')
@click.option('-p', 'p', type=int, required=True)
@click.option('-f', 'f', type=int, default=1, show_default=True)
@click.option('-e', 'e', type=int, required=True)
@click.option('-m', 'ms', type=int, multiple=True, default=(1,), show_default=True)
@emits_json
def scan_command(app, p, f, e, ms):
    """Cross-check the primitivity routes on every R with top index e."""
    return scan(p, f, e, list(ms), app.limits)
