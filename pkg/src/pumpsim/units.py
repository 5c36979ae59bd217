"""Display-unit conversions. Everything internal is SI; these helpers
exist for the configuration file and CLI boundary only."""

UL_PER_M3 = 1e9
SECONDS_PER_MINUTE = 60.0


def m3s_from_ul_min(value):
    return value / (UL_PER_M3 * SECONDS_PER_MINUTE)


def ul_min_from_m3s(value):
    return value * UL_PER_M3 * SECONDS_PER_MINUTE


def pa_from_kpa(value):
    return value * 1e3


def kpa_from_pa(value):
    return value / 1e3


def m2_from_mm2(value):
    return value * 1e-6


def mm2_from_m2(value):
    return value * 1e6


def m_from_mm(value):
    return value * 1e-3


def mm_from_m(value):
    return value * 1e3


def m_from_um(value):
    return value * 1e-6


def um_from_m(value):
    return value * 1e6


def ul_from_m3(value):
    return value * UL_PER_M3


def f_from_nf(value):
    return value * 1e-9


def nf_from_f(value):
    return value * 1e9


def w_from_mw(value):
    return value * 1e-3


def mw_from_w(value):
    return value * 1e3
