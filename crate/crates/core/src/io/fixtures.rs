//! Published reference data: the urban covariance matrix `Σ_U` and the
//! per-region ML summaries and entropy intervals of the E-SAR Weßling
//! (A₁–A₃) and EMISAR Foulum (B₁–B₃) studies.

use crate::matrix::HermitianMatrix;
use num_complex::Complex64;

/// Urban-area covariance matrix observed on the E-SAR Weßling scene.
pub fn sigma_u() -> HermitianMatrix {
    HermitianMatrix::from_upper(
        &[962_892.0, 56_707.0, 472_251.0],
        &[
            Complex64::new(19_171.0, -3_579.0),
            Complex64::new(-154_638.0, 191_388.0),
            Complex64::new(-5_798.0, 16_812.0),
        ],
    )
    .expect("Σ_U is positive definite")
}

/// Region summary: sample size, `|Σ̂|` and `L̂` as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionFit {
    pub region: &'static str,
    pub n: usize,
    pub det: f64,
    pub looks: f64,
    /// AIC with `L` fixed at 3.2 and with `L` fitted, when published.
    pub aic: Option<(f64, f64)>,
}

/// E-SAR Weßling regions A₁–A₃ (m = 3).
pub const FITS_A: [RegionFit; 3] = [
    RegionFit {
        region: "A1",
        n: 3708,
        det: 355_494.5,
        looks: 1.361,
        aic: Some((50_769.93, 49_856.90)),
    },
    RegionFit {
        region: "A2",
        n: 2088,
        det: 3_321.241,
        looks: 1.657,
        aic: Some((18_353.35, 17_931.51)),
    },
    RegionFit {
        region: "A3",
        n: 1079,
        det: 274.189,
        looks: 2.557,
        aic: Some((6_749.56, 6_629.15)),
    },
];

/// Foulum regions B₁–B₃ (m = 3).
pub const FITS_B: [RegionFit; 3] = [
    RegionFit {
        region: "B1",
        n: 3192,
        det: 1.609e-5,
        looks: 6.925,
        aic: None,
    },
    RegionFit {
        region: "B2",
        n: 1408,
        det: 1.112e-6,
        looks: 11.937,
        aic: None,
    },
    RegionFit {
        region: "B3",
        n: 1848,
        det: 5.814e-7,
        looks: 10.752,
        aic: None,
    },
];

/// Published 95% intervals for one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalRow {
    pub region: &'static str,
    /// `(lower, upper)` for Shannon, Rényi 0.1 and Rényi 0.8.
    pub intervals: [(f64, f64); 3],
}

/// Intervals for A₁–A₃, computed with the `z_α` quantile (1.6449).
pub const INTERVALS_A: [IntervalRow; 3] = [
    IntervalRow {
        region: "A1",
        intervals: [(37.979, 38.432), (61.083, 61.332), (44.045, 44.364)],
    },
    IntervalRow {
        region: "A2",
        intervals: [(30.079, 30.541), (45.563, 45.867), (36.124, 37.049)],
    },
    IntervalRow {
        region: "A3",
        intervals: [(19.611, 19.949), (35.000, 35.346), (20.901, 21.230)],
    },
];

/// Looks up a published region summary by name (case-insensitive).
pub fn region(name: &str) -> Option<&'static RegionFit> {
    FITS_A.iter().chain(FITS_B.iter()).find(|r| r.region.eq_ignore_ascii_case(name))
}
