"""Exact Witten genus of complete intersections in smooth toric varieties."""

from .genus import (
    CIModel,
    ObstructionReport,
    ahat_genus,
    c1_Y,
    chern_total_X,
    p1_Y,
    residue_sum_demo,
    string_check,
    witten_bundle_oracle,
    witten_genus,
)
from .ringcore import MPoly, QSeries, UniSeries, compose_series
from .theta import ThetaKind, ahat_char_series, theta_eval_numeric, witten_char_series
from .toric import (
    Fan,
    PicardData,
    hirzebruch,
    integrate,
    intersection_table,
    picard_data,
    product_projective,
    projective_space,
    validate_fan,
)

__version__ = "0.1.0"
