from fractions import Fraction

import pytest

from katokech import Param


def make_params():
    return {
        "2/5": Param.rational(2, 5),
        "3/7": Param.rational(3, 7),
        "sqrt2/2": Param.sqrt2_over_2(),
        "1/pi": Param.inv_pi(),
    }


PARAMS = make_params()
IRRATIONAL = ["sqrt2/2", "1/pi"]


@pytest.fixture(params=list(PARAMS))
def param(request):
    return PARAMS[request.param]


@pytest.fixture(params=IRRATIONAL)
def irrational_param(request):
    return PARAMS[request.param]


def near_half_rational():
    return Param.rational(Fraction(1, 2) - Fraction(1, 10**9))
