import pytest

from app.exceptions import ValidationError
from app.models import group
from app.models.additive import AdditivePoly
from app.models.field import canonical_root, field_create


def monomial(p, f, e):
    return AdditivePoly.monomial(field_create(p, f), e)


@pytest.mark.parametrize('p, f, e', [(3, 1, 1), (5, 1, 1), (3, 2, 1), (3, 1, 2), (2, 1, 1)])
def test_h_r_is_extra_special(p, f, e, limits):
    ctx = group.build_context(monomial(p, f, e), 1, 'H', limits)
    analysis = group.analyze(ctx, limits)
    assert analysis.order == p ** (2 * e + 1)
    assert analysis.center_order == p
    assert analysis.commutator_order == p
    assert analysis.center_is_prime_field
    assert analysis.is_extra_special
    assert analysis.beta_image_dim == 2 * e


def test_e0_is_degenerate(f3, limits):
    ctx = group.GroupContext.lightweight(AdditivePoly.identity(f3))
    analysis = group.analyze(ctx, limits)
    assert analysis.degenerate
    assert not analysis.is_extra_special


def test_group_orders(x3):
    assert group.group_orders(x3, 1) == {'H_R': 27, 'Q_R': 108, 'Q_Rm': 108, 'index_Q_Rm_in_Q_R': 1}
    assert group.group_orders(x3, 2) == {'H_R': 27, 'Q_R': 108, 'Q_Rm': 54, 'index_Q_Rm_in_Q_R': 2}


def _sample(ctx):
    F = ctx.ambient
    alpha = canonical_root(F, ctx.d)
    betas = list(ctx.basis) + [ctx.basis[0] + ctx.basis[-1]]
    return [group.element(ctx, alpha ** k, beta) for k, beta in enumerate(betas)]


def test_group_axioms(x3, limits):
    ctx = group.build_context(x3, 1, 'Q_R', limits)
    elements = _sample(ctx) + [group.identity(ctx)]
    one = group.identity(ctx)
    for g in elements:
        assert group.multiply(g, group.inverse(g)).is_identity()
        assert group.multiply(one, g) == g
        for h in elements:
            for k in elements:
                assert (g * h) * k == g * (h * k)


def test_power_and_commutators(x3, limits):
    ctx = group.build_context(x3, 1, 'H', limits)
    g, h = group.generators(ctx)[:2]
    c = group.commutator(g, h)
    assert c.beta.is_zero() and not c.gamma.is_zero()
    assert group.power(c, 3).is_identity()
    assert group.power(g, -1) == group.inverse(g)


def test_twist_is_a_homomorphism(x3_over_f9, limits):
    ctx = group.build_context(x3_over_f9, 2, 'Q_Rm', limits)
    g, h = _sample(ctx)[:2]
    assert group.twist(g * h) == group.twist(g) * group.twist(h)


def test_action_preserves_the_curve(x3, limits):
    ctx = group.build_context(x3, 1, 'Q_R', limits)
    for beta in ctx.basis:
        point = (group.gamma_zero(ctx, beta), beta)
        for g in _sample(ctx):
            image = group.act_on_curve(g, point)
            assert group.on_curve(ctx, image)


def test_element_validation(x3, limits):
    ctx = group.build_context(x3, 1, 'H', limits)
    F = ctx.ambient
    beta = ctx.basis[0]
    with pytest.raises(ValidationError):
        group.GroupElement(ctx, F.one(), beta, F.zero())
    with pytest.raises(ValidationError):
        group.element(ctx, canonical_root(F, 4), beta)
