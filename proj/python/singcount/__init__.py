"""Exact point counts of affine schemes over finite local rings."""

from ._singcount import (
    BudgetError,
    DomainError,
    Error,
    ParseError,
    Scheme,
    abscissa_estimate,
    affine_space,
    character_degrees,
    cli,
    count,
    count_composite,
    cross_check,
    def_count,
    def_scheme,
    diagnose,
    euler_product,
    h,
    igusa_z_series,
    jet_scheme,
    lang_weil_c,
    load_scheme,
    load_scheme_file,
    local_p_series,
    make_scheme,
    pade_fit,
    rs_threshold,
    sl_scheme,
    word_prob,
    zeta_table,
)

__all__ = [name for name in dir() if not name.startswith("_")]
