import math

import pytest

from busecoarse.errors import DomainError, EvaluationError
from busecoarse.higson import BUILTIN_FUNCTIONS, builtin_function, higson_certify, pullback, uniform_modulus
from busecoarse.spaces import distance, glued_xp, half_line, lp_space

L2 = lp_space(2, 2)
O = L2.point(0, 0)


def test_pullback_examples():
    F = pullback(L2, O, 1.0, lambda a: a.coords[0])
    assert F(L2.point(10, 0)) == 1.0
    assert F(L2.point(0.3, 0.4)) == 0.3
    C = pullback(L2, O, 2.0, lambda a: 7.0)
    assert C(L2.point(100, -3)) == 7.0
    assert pullback(L2, O, 1.0, F) is F


def test_uniform_modulus_examples():
    assert uniform_modulus(L2, lambda a: 1.0, 0.1, 3.0, O) == 6.0
    eps = 0.2
    delta = uniform_modulus(L2, lambda a: a.coords[0], eps, 2.0, O)
    assert eps / 2 - 1e-12 <= delta <= eps
    d2 = lambda a: distance(L2, O, a) ** 2
    delta = uniform_modulus(L2, d2, 0.1, 3.0, O)
    assert (0.1 / 6) / 2 <= delta <= (0.1 / 6) * 2


def test_uniform_modulus_errors():
    with pytest.raises(DomainError):
        uniform_modulus(L2, lambda a: 0.0, 0.0, 1.0, O)
    with pytest.raises(EvaluationError):
        uniform_modulus(L2, lambda a: math.nan, 0.1, 1.0, O)


def test_modulus_monotone_in_epsilon():
    f = lambda a: math.sin(3 * a.coords[0])
    deltas = [uniform_modulus(L2, f, eps, 2.0, O, anchors=120) for eps in (0.05, 0.1, 0.2, 0.4)]
    assert deltas == sorted(deltas)


def test_constant_is_certified():
    f, pull = builtin_function("constant", L2)
    rep = higson_certify(L2, O, 1.0, f, 0.1, 1.0, directions=40)
    assert rep.certified and rep.max_violation == 0 and rep.witness is None
    assert rep.S == max(rep.t, rep.t * rep.R / rep.delta)


def test_angular_is_certified():
    f, _ = builtin_function("angular", L2, O, 1.0)
    rep = higson_certify(L2, O, 1.0, f, 0.1, 1.0)
    assert rep.certified
    assert rep.S == pytest.approx(max(1.0, 1.0 / rep.delta))
    assert [s.radius for s in rep.shells] == pytest.approx([rep.S * 2**j for j in range(1, 6)])
    assert rep.max_violation < 0.1


def test_sin_radial_negative_control():
    H = half_line()
    f, pull = builtin_function("sin-radial", H)
    assert pull is False
    rep = higson_certify(H, H.ray(0), 1.0, f, 0.5, 4.0, pull_back=False)
    assert rep.status == "fail"
    assert all(s.witness is not None for s in rep.shells)
    a, b = rep.witness
    assert abs(f(a) - f(b)) >= 0.5 and distance(H, a, b) < 4.0
    # the explicit pair sequence
    for k in range(1, 50, 7):
        a, b = H.ray(math.pi / 2 + 2 * math.pi * k), H.ray(3 * math.pi / 2 + 2 * math.pi * k)
        assert abs(f(a) - f(b)) == pytest.approx(2.0)


@pytest.mark.parametrize("space, t", [(half_line(), 1.0), (glued_xp(2), 3.0), (lp_space(3, 3), 1.5)])
@pytest.mark.parametrize("name", ["coordinate", "radial", "angular"])
def test_pullbacks_certified(space, t, name):
    f, pull = builtin_function(name, space, None, t)
    rep = higson_certify(space, None, t, f, 0.2, 1.0, pull_back=pull, directions=60, modulus_anchors=150)
    assert rep.status == "pass", rep.to_json()


def test_monotone_in_epsilon():
    f, _ = builtin_function("coordinate", L2, O, 1.0)
    reps = [higson_certify(L2, O, 1.0, f, eps, 1.0, directions=20) for eps in (0.05, 0.1, 0.2)]
    assert [r.delta for r in reps] == sorted(r.delta for r in reps)
    assert [r.S for r in reps] == sorted((r.S for r in reps), reverse=True)


def test_unknown_function():
    with pytest.raises(KeyError):
        builtin_function("wobble", L2)
    assert set(BUILTIN_FUNCTIONS) == {"constant", "coordinate", "radial", "angular", "sin-radial"}


def test_report_serialises():
    f, _ = builtin_function("radial", L2, O, 1.0)
    js = higson_certify(L2, O, 1.0, f, 0.3, 1.0, shells=2, directions=10).to_json()
    assert js["status"] == "pass" and len(js["shells"]) == 2
