"""Nonparametric Monte Carlo isotropy tests for planar point patterns by
random rotation of Fry points."""
from .estimators import (CurveStatistic, EstimatorContext, estimate_K, radius_grid,
                         sector_contrast_curve, sector_K_curve, wong_chiu_curve)
from .fry import FryPattern, RotationScheme, fry_points, resample
from .geometry import Ball, Cylinder, DoubleConeSector, Sector, Window, rotate, translation_overlap
from .mctest import (SectorContrast, TestConfig, TestResult, WongChiu, erl_order,
                     integral_extremeness, isotropy_test, mc_p_value)
from .models import ModelConfig, PointPattern, simulate
from .sampling import RngStream

__version__ = "0.1.0"
