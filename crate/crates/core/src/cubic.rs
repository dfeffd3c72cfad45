//! Roots of complex monic cubics: Cardano's formula, one Newton step per
//! root, lexicographic `(Re, Im)` ordering.

use core::cmp::Ordering;

use crate::complex::{self, C64, ZERO};

/// Roots of `x³ + b x² + c x + d`, sorted by `(Re, Im)`.
pub fn monic_cubic_roots(b: C64, c: C64, d: C64) -> [C64; 3] {
    let shift = b / 3.0;
    // x = t − b/3 gives t³ + p t + q
    let p = c - b * shift;
    let q = shift * shift * shift * 2.0 - shift * c + d;

    let disc = complex::sqrt(q * q * 0.25 + p * p * p / 27.0);
    let half_q = -q * 0.5;
    let w = if complex::abs(half_q + disc) >= complex::abs(half_q - disc) {
        half_q + disc
    } else {
        half_q - disc
    };
    let cr = complex::cbrt(w);
    let rotation = C64::new(-0.5, libm::sqrt(0.75));
    let mut roots = [ZERO; 3];
    let mut k = cr;
    for root in roots.iter_mut() {
        let t = if k == ZERO { ZERO } else { k - p / (k * 3.0) };
        *root = t - shift;
        k *= rotation;
    }
    for root in roots.iter_mut() {
        *root = newton_polish(b, c, d, *root);
    }
    roots.sort_by(lexicographic);
    roots
}

pub(crate) fn lexicographic(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn newton_polish(b: C64, c: C64, d: C64, x: C64) -> C64 {
    let value = ((x + b) * x + c) * x + d;
    let slope = (x * 3.0 + b * 2.0) * x + c;
    if slope == ZERO || !complex::is_finite(slope) {
        return x;
    }
    let next = x - value / slope;
    let next_value = ((next + b) * next + c) * next + d;
    if complex::is_finite(next) && complex::abs(next_value) <= complex::abs(value) {
        next
    } else {
        x
    }
}
