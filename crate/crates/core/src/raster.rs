//! Deterministic rendering of the `Per1(1)` parameter plane and of
//! dynamical planes.
//!
//! Pixel `(i, j)` (column `i`, row `j`, row 0 on top) samples the center of
//! its cell:
//!
//! ```text
//! re = cx + (w/2)·(2i + 1 − cols)/cols
//! im = cy + (h/2)·(rows − 1 − 2j)/rows
//! ```
//!
//! Rows `j` and `rows − 1 − j` of a window with `cy = 0` sample exactly
//! conjugate points, so a conjugation-symmetric kernel produces a
//! mirror-symmetric image bit for bit.
//!
//! Work is cut into square tiles that render independently; [`assemble`]
//! copies them into disjoint ranges of one buffer, so the image does not
//! depend on the order in which tiles finish.

use alloc::vec;
use alloc::vec::Vec;

use crate::classify::{self, Connectivity, TierPolicy, Verdict};
use crate::complex::{C64, ONE};
use crate::dynamics::{self, Fate, DEFAULT_TOL};
use crate::error::RasterError;
use crate::mobius::MobiusMap;
use crate::moduli::{self, MapForm};
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    pub center: C64,
    pub width: f64,
    pub height: f64,
    pub cols: u32,
    pub rows: u32,
}

impl Window {
    pub fn new(center: C64, width: f64, height: f64, cols: u32, rows: u32) -> Result<Self, RasterError> {
        let ok = center.re.is_finite()
            && center.im.is_finite()
            && width.is_finite()
            && height.is_finite()
            && width > 0.0
            && height > 0.0
            && cols > 0
            && rows > 0;
        if !ok {
            return Err(RasterError::InvalidWindow);
        }
        Ok(Window { center, width, height, cols, rows })
    }

    /// `[−9, 11] × [−10, 10]`, which contains `|λ − 1| ≤ 9`.
    pub fn default_parameter(cols: u32, rows: u32) -> Self {
        Window {
            center: ONE,
            width: 20.0,
            height: 20.0,
            cols,
            rows,
        }
    }

    pub fn pixel_center(&self, i: u32, j: u32) -> C64 {
        let cols = self.cols as f64;
        let rows = self.rows as f64;
        let re = self.center.re + self.width * 0.5 * ((2 * i as i64 + 1 - self.cols as i64) as f64 / cols);
        let im = self.center.im + self.height * 0.5 * ((self.rows as i64 - 1 - 2 * j as i64) as f64 / rows);
        C64::new(re, im)
    }

    pub fn pixel_count(&self) -> usize {
        self.cols as usize * self.rows as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RasterMode {
    Parameter,
    Dynamical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ColorScheme {
    /// Step counts shade the decided pixels.
    Shaded,
    /// One color per class.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RasterJob {
    pub mode: RasterMode,
    pub window: Window,
    pub policy: TierPolicy,
    pub budget: u64,
    pub tile: u32,
    pub scheme: ColorScheme,
}

impl RasterJob {
    /// The parameter plane at `res × res` over the default window.
    pub fn default_parameter(res: u32, budget: u64) -> Self {
        RasterJob {
            mode: RasterMode::Parameter,
            window: Window::default_parameter(res, res),
            policy: TierPolicy::default(),
            budget,
            tile: 64,
            scheme: ColorScheme::Shaded,
        }
    }
}

/// What a pixel was classified as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PixelClass {
    Connected,
    Cantor,
    Undetermined,
    /// Dynamical plane of an `H` map: attracted to the first fixed point.
    BasinA,
    /// Dynamical plane of an `H` map: attracted to the second fixed point.
    BasinB,
    /// Dynamical plane of a parabolic map: escapes to the parabolic point.
    Escaping,
    /// Dynamical plane of a parabolic map: no escape within the budget.
    NonEscaping,
}

impl PixelClass {
    pub const ALL: [PixelClass; 7] = [
        PixelClass::Connected,
        PixelClass::Cantor,
        PixelClass::Undetermined,
        PixelClass::BasinA,
        PixelClass::BasinB,
        PixelClass::Escaping,
        PixelClass::NonEscaping,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PixelClass::Connected => "connected",
            PixelClass::Cantor => "cantor",
            PixelClass::Undetermined => "undetermined",
            PixelClass::BasinA => "basin_a",
            PixelClass::BasinB => "basin_b",
            PixelClass::Escaping => "escaping",
            PixelClass::NonEscaping => "non_escaping",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Pixel tallies per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counts([u64; 7]);

impl Counts {
    pub fn get(&self, class: PixelClass) -> u64 {
        self.0[class.index()]
    }

    pub fn add(&mut self, class: PixelClass) {
        self.0[class.index()] += 1;
    }

    pub fn merge(&mut self, other: &Counts) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

pub type Rgb = [u8; 3];

pub const BLACK: Rgb = [0, 0, 0];
pub const WHITE: Rgb = [255, 255, 255];
pub const RED: Rgb = [255, 0, 0];

const fn shade_table() -> [u8; 65] {
    let mut t = [0u8; 65];
    let mut k = 0;
    while k < 65 {
        t[k] = if k < 16 { (255 - 12 * k) as u8 } else { 63 };
        k += 1;
    }
    t
}

/// Brightness by bit length of the step count, a fixed `log2` scale.
pub const SHADES: [u8; 65] = shade_table();

fn shade(steps: Option<u64>) -> u8 {
    match steps {
        None => 255,
        Some(s) => SHADES[(64 - (s + 1).leading_zeros()) as usize],
    }
}

fn tint(base: Rgb, steps: Option<u64>, scheme: ColorScheme) -> Rgb {
    let s = match scheme {
        ColorScheme::Shaded => shade(steps) as u16,
        ColorScheme::Flat => 255,
    };
    base.map(|c| ((c as u16 * s) / 255) as u8)
}

/// Classifies one point of the plane.
pub trait PixelKernel {
    fn classify(&self, z: C64) -> (PixelClass, Rgb);
}

/// Parameter plane: `λ ↦` connectivity of the Julia set of the `Per1(1)`
/// class with multiplier `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterKernel {
    pub policy: TierPolicy,
    pub budget: u64,
    pub tol: f64,
    pub scheme: ColorScheme,
}

impl ParameterKernel {
    pub fn verdict(&self, lambda: C64) -> Verdict {
        classify::connectivity_per1(lambda, &self.policy, self.budget, self.tol)
    }
}

impl PixelKernel for ParameterKernel {
    fn classify(&self, lambda: C64) -> (PixelClass, Rgb) {
        let v = self.verdict(lambda);
        match v.connectivity {
            Connectivity::Connected => (PixelClass::Connected, BLACK),
            Connectivity::Cantor => (PixelClass::Cantor, tint(WHITE, v.steps(), self.scheme)),
            Connectivity::Undetermined => (PixelClass::Undetermined, RED),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dynamics {
    /// `f_{λ1,λ2}` in `H`: fixed points `0` and `∞` attract.
    Hyperbolic,
    /// `z + B + 1/z`.
    Parabolic,
}

/// How close a reported limit must be to a fixed point to name its basin.
const BASIN_MATCH: f64 = 1e-6;

fn near(p: SpherePoint, q: SpherePoint) -> bool {
    p.chordal_distance(&q) < BASIN_MATCH
}

const BASIN_A: Rgb = [64, 128, 255];
const BASIN_B: Rgb = [255, 200, 64];

/// Dynamical plane of a supported map. Pixels are pulled back to the base
/// coordinates of a conjugated form before iterating.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalKernel {
    base: MapForm,
    pull_back: MobiusMap,
    kind: Dynamics,
    budget: u64,
    tol: f64,
    scheme: ColorScheme,
}

impl DynamicalKernel {
    pub fn new(form: &MapForm, budget: u64, tol: f64, scheme: ColorScheme) -> Result<Self, RasterError> {
        form.validate().map_err(|_| RasterError::UnsupportedForm)?;
        let (base, mobius) = form.flatten();
        let kind = match base {
            MapForm::PerOneForm { .. } => Dynamics::Parabolic,
            MapForm::LambdaForm { .. } => {
                let t = moduli::eigenvalue_triple(base).map_err(|_| RasterError::UnsupportedForm)?;
                let MapForm::LambdaForm { lambda1, lambda2 } = base else { unreachable!() };
                let attracting = |l: &C64| crate::complex::abs(*l) < 1.0;
                if !(classify::in_h(&t) && attracting(lambda1) && attracting(lambda2)) {
                    return Err(RasterError::UnsupportedForm);
                }
                Dynamics::Hyperbolic
            }
            MapForm::Conjugated { .. } => return Err(RasterError::UnsupportedForm),
        };
        Ok(DynamicalKernel {
            base: base.clone(),
            pull_back: mobius.inverse(),
            kind,
            budget,
            tol,
            scheme,
        })
    }

    pub fn fate(&self, z: C64) -> Fate {
        let start = self.pull_back.apply(SpherePoint::finite(z));
        dynamics::orbit_fate(&self.base, start, self.budget, self.tol)
    }
}

impl PixelKernel for DynamicalKernel {
    fn classify(&self, z: C64) -> (PixelClass, Rgb) {
        let fate = self.fate(z);
        let steps = Some(fate.steps());
        match (self.kind, fate) {
            (Dynamics::Hyperbolic, Fate::AttractedToPoint { point, .. }) if near(point, SpherePoint::ZERO) => {
                (PixelClass::BasinA, tint(BASIN_A, steps, self.scheme))
            }
            (Dynamics::Hyperbolic, Fate::AttractedToPoint { point, .. }) if near(point, SpherePoint::INFINITY) => {
                (PixelClass::BasinB, tint(BASIN_B, steps, self.scheme))
            }
            (Dynamics::Hyperbolic, _) => (PixelClass::Undetermined, RED),
            (Dynamics::Parabolic, Fate::EscapesParabolic { .. }) => {
                (PixelClass::Escaping, tint(WHITE, steps, self.scheme))
            }
            (Dynamics::Parabolic, Fate::AttractedToPoint { point, .. }) if near(point, SpherePoint::INFINITY) => {
                (PixelClass::Escaping, tint(WHITE, steps, self.scheme))
            }
            (Dynamics::Parabolic, _) => (PixelClass::NonEscaping, BLACK),
        }
    }
}

/// Either kernel, chosen from a job.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Parameter(ParameterKernel),
    Dynamical(DynamicalKernel),
}

impl Kernel {
    pub fn for_job(job: &RasterJob, form: Option<&MapForm>) -> Result<Self, RasterError> {
        match (job.mode, form) {
            (RasterMode::Parameter, None) => Ok(Kernel::Parameter(ParameterKernel {
                policy: job.policy,
                budget: job.budget,
                tol: DEFAULT_TOL,
                scheme: job.scheme,
            })),
            (RasterMode::Dynamical, Some(f)) => Ok(Kernel::Dynamical(DynamicalKernel::new(
                f,
                job.budget,
                DEFAULT_TOL,
                job.scheme,
            )?)),
            _ => Err(RasterError::WrongMode),
        }
    }
}

impl PixelKernel for Kernel {
    fn classify(&self, z: C64) -> (PixelClass, Rgb) {
        match self {
            Kernel::Parameter(k) => k.classify(z),
            Kernel::Dynamical(k) => k.classify(z),
        }
    }
}

/// A rectangle of pixels `[x0, x0 + w) × [y0, y0 + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub x0: u32,
    pub y0: u32,
    pub w: u32,
    pub h: u32,
}

/// Square tiles of side `size` covering the window, row-major.
pub fn tiles(window: &Window, size: u32) -> Vec<Tile> {
    let size = size.max(1);
    let mut out = Vec::new();
    for y0 in (0..window.rows).step_by(size as usize) {
        for x0 in (0..window.cols).step_by(size as usize) {
            out.push(Tile {
                x0,
                y0,
                w: size.min(window.cols - x0),
                h: size.min(window.rows - y0),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileImage {
    pub tile: Tile,
    /// Row-major RGB of the tile.
    pub pixels: Vec<u8>,
    pub counts: Counts,
}

pub fn render_tile<K: PixelKernel + ?Sized>(kernel: &K, window: &Window, tile: Tile) -> TileImage {
    let mut pixels = Vec::with_capacity(tile.w as usize * tile.h as usize * 3);
    let mut counts = Counts::default();
    for j in tile.y0..tile.y0 + tile.h {
        for i in tile.x0..tile.x0 + tile.w {
            let (class, rgb) = kernel.classify(window.pixel_center(i, j));
            counts.add(class);
            pixels.extend_from_slice(&rgb);
        }
    }
    TileImage { tile, pixels, counts }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB.
    pub pixels: Vec<u8>,
    pub counts: Counts,
}

impl ImageBuffer {
    pub fn pixel(&self, i: u32, j: u32) -> Rgb {
        let k = 3 * (j as usize * self.width as usize + i as usize);
        [self.pixels[k], self.pixels[k + 1], self.pixels[k + 2]]
    }

    /// Whether row `j` equals row `height − 1 − j` for every `j`.
    pub fn is_mirror_symmetric(&self) -> bool {
        let stride = 3 * self.width as usize;
        let rows: Vec<&[u8]> = self.pixels.chunks(stride).collect();
        (0..rows.len()).all(|j| rows[j] == rows[rows.len() - 1 - j])
    }
}

/// Copies tiles into a fresh buffer. Tiles must cover the window without
/// overlap.
pub fn assemble(window: &Window, tiles: &[TileImage]) -> ImageBuffer {
    let stride = 3 * window.cols as usize;
    let mut pixels = vec![0u8; stride * window.rows as usize];
    let mut counts = Counts::default();
    for t in tiles {
        let row_len = 3 * t.tile.w as usize;
        for (r, src) in t.pixels.chunks(row_len).enumerate() {
            let start = (t.tile.y0 as usize + r) * stride + 3 * t.tile.x0 as usize;
            pixels[start..start + row_len].copy_from_slice(src);
        }
        counts.merge(&t.counts);
    }
    ImageBuffer {
        width: window.cols,
        height: window.rows,
        pixels,
        counts,
    }
}

/// Renders every tile in order on the current thread.
pub fn render_sequential<K: PixelKernel + ?Sized>(kernel: &K, window: &Window, tile: u32) -> ImageBuffer {
    let parts: Vec<TileImage> = tiles(window, tile).into_iter().map(|t| render_tile(kernel, window, t)).collect();
    assemble(window, &parts)
}

pub fn raster_parameter_plane(job: &RasterJob) -> Result<ImageBuffer, RasterError> {
    let kernel = Kernel::for_job(job, None)?;
    Ok(render_sequential(&kernel, &job.window, job.tile))
}

pub fn raster_dynamical_plane(job: &RasterJob, form: &MapForm) -> Result<ImageBuffer, RasterError> {
    let kernel = Kernel::for_job(job, Some(form))?;
    Ok(render_sequential(&kernel, &job.window, job.tile))
}

/// `form` conjugated by the Möbius map sending its fixed points
/// `(0, ∞, z3)` to `targets`.
pub fn mobius_conjugate(form: &MapForm, targets: [SpherePoint; 3]) -> Result<MapForm, RasterError> {
    let MapForm::LambdaForm { .. } = form else {
        return Err(RasterError::UnsupportedForm);
    };
    let fixed = moduli::fixed_points_and_multipliers(form).map_err(|_| RasterError::DegenerateCorrespondence)?;
    if fixed.len() != 3 {
        return Err(RasterError::DegenerateCorrespondence);
    }
    let src = [fixed[0].point, fixed[1].point, fixed[2].point];
    let m = MobiusMap::from_three_points(src, targets).map_err(|_| RasterError::DegenerateCorrespondence)?;
    Ok(MapForm::conjugated(form.clone(), m))
}

/// Conjugate with attracting fixed points at `−r`, `−1/r` and the third
/// fixed point at 1. Meant for `λ1 = conj(λ2)` and `r = |λ1|`, where the
/// Julia set becomes symmetric about the unit circle.
pub fn mobius_conjugate_symmetric(form: &MapForm, r: f64) -> Result<MapForm, RasterError> {
    let targets = [
        SpherePoint::finite(C64::new(-r, 0.0)),
        SpherePoint::finite(C64::new(-1.0 / r, 0.0)),
        SpherePoint::finite(ONE),
    ];
    mobius_conjugate(form, targets)
}

/// Binary PPM (P6).
pub fn encode_ppm(image: &ImageBuffer) -> Vec<u8> {
    let header = alloc::format!("P6\n{} {}\n255\n", image.width, image.height);
    let mut out = Vec::with_capacity(header.len() + image.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&image.pixels);
    out
}
