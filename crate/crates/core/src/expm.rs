//! Dense matrix exponential via scaling-and-squaring with a Padé(13)
//! approximant (Higham 2005). Matrices here are at most a few thousand
//! rows, so the dense algorithm is the right choice.

use ndarray::Array2;
use num_complex::Complex64;

use crate::linalg::{self, CMat};

/// Padé(13) numerator coefficients b_0..b_13 (Higham 2005, Table 10.4).
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// theta_13 from Higham (2005), Table 10.2.
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm(a: &CMat) -> f64 {
    let mut max = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        if s > max {
            max = s;
        }
    }
    max
}

/// Compute exp(A) for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    if n == 1 {
        let mut out = Array2::zeros((1, 1));
        out[[0, 0]] = a[[0, 0]].exp();
        return out;
    }

    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(0.5f64.powi(s as i32), 0.0);
    let a1 = a * scale;

    let mut e = pade13(&a1);
    for _ in 0..s {
        e = e.dot(&e);
    }
    e
}

fn pade13(a: &CMat) -> CMat {
    let n = a.nrows();
    let id = linalg::eye(n);
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);

    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    // u = A [ A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I ]
    let w = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let inner = a6.dot(&w) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1);
    let u = a.dot(&inner);

    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let w2 = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = a6.dot(&w2) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);

    // exp(A) ~ (v - u)^{-1} (v + u)
    let num = &v + &u;
    let den = &v - &u;
    linalg::solve_mat(&den, &num)
}
