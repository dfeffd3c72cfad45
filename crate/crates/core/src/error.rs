use thiserror::Error;

use crate::classify::RegionLabel;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModuliError {
    /// A multiplier equal to 1 merges two fixed points; use the `Per1(1)` form.
    #[error("a multiplier equals 1, so two fixed points coincide")]
    DegenerateFixedPoints,
    #[error("lambda1 * lambda2 = 1 does not define a quadratic map")]
    InvalidForm,
    #[error("sigma3 differs from sigma1 - 2 by {residual:e}")]
    InconsistentTriple { residual: f64 },
    #[error("Möbius map or point correspondence is degenerate")]
    DegenerateMobius,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClassifyError {
    /// The exact comparison gave `tentative`, but `quantity` is within the
    /// requested tolerance of its threshold.
    #[error("{quantity} is within {eps:e} of its threshold (tentative label {tentative:?})")]
    AmbiguousNearBoundary {
        tentative: RegionLabel,
        quantity: &'static str,
        eps: f64,
    },
    #[error(transparent)]
    Moduli(#[from] ModuliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TwistError {
    #[error("multipliers must be nonzero to take logarithms")]
    ZeroMultiplier,
    #[error("multipliers must lie in the open unit disk")]
    OutsideUnitDisk,
    #[error("Re lambda = {re} is not > 1")]
    NotInB2 { re: f64 },
    #[error(transparent)]
    Moduli(#[from] ModuliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RasterError {
    #[error("dynamical rendering supports maps in H and Per1(1) maps only")]
    UnsupportedForm,
    #[error("source or target points of the correspondence are not distinct")]
    DegenerateCorrespondence,
    #[error("window must have positive size and resolution")]
    InvalidWindow,
    #[error("raster mode does not match the requested operation")]
    WrongMode,
}
