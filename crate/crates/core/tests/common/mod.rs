//! 256-bit reference evaluations of the qubit and single-mode entropy
//! functions, and central differences taken in that precision.

#![allow(dead_code)]

use dashu_float::FBig;
use entropic_polygon::entropy::{EntropyFamily, EntropySpec};

pub const PREC: usize = 256;
pub const STEP: f64 = 1e-5;
pub const REL: f64 = 1e-6;

pub type Big = FBig;

pub fn big(x: f64) -> Big {
    Big::try_from(x).unwrap().with_precision(PREC).value()
}

pub fn pow(x: &Big, e: f64) -> Big {
    (x.ln() * big(e)).exp()
}

/// Qubit entropy function `f_E(λ)` of the spectrum `{λ, 1−λ}`.
pub fn qubit_f(e: &EntropySpec, l: &Big) -> Big {
    let m = big(1.0) - l;
    let lb = big(e.log_base()).ln();
    match e.family() {
        EntropyFamily::VonNeumann => -(l * l.ln() + &m * m.ln()) / lb,
        EntropyFamily::Renyi(p) => (pow(l, p) + pow(&m, p)).ln() / (big(1.0 - p) * lb),
        EntropyFamily::Tsallis(q) => (big(1.0) - pow(l, q) - pow(&m, q)) / big(q - 1.0),
    }
}

/// Single-mode entropy function at `s = t + 1`.
pub fn mode_g(e: &EntropySpec, t: &Big) -> Big {
    let a = t + big(2.0);
    let lb = big(e.log_base()).ln();
    let two = big(2.0);
    match e.family() {
        EntropyFamily::VonNeumann => {
            let ha = &a / &two;
            let ht = t / &two;
            (&ha * ha.ln() - &ht * ht.ln()) / lb
        }
        EntropyFamily::Renyi(p) => {
            ((pow(&a, p) - pow(t, p)).ln() - big(p) * two.ln()) / (big(p - 1.0) * lb)
        }
        EntropyFamily::Tsallis(q) => (big(1.0) - pow(&two, q) / (pow(&a, q) - pow(t, q))) / big(q - 1.0),
    }
}

pub fn central(f: impl Fn(&Big) -> Big, x: f64, order: u8) -> f64 {
    let (x, h) = (big(x), big(STEP));
    let plus = f(&(&x + &h));
    let minus = f(&(&x - &h));
    let d = match order {
        1 => (plus - minus) / (big(2.0) * &h),
        _ => (plus - big(2.0) * f(&x) + minus) / (&h * &h),
    };
    d.to_f64().value()
}

pub fn specs() -> Vec<EntropySpec> {
    ["S", "S:b=e", "R:p=1.5", "R:p=2", "R:p=3:b=e", "R:p=5", "T:q=1.5", "T:q=2", "T:q=3"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

pub const QUBIT_GRID: [f64; 8] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49];
pub const MODE_GRID: [f64; 8] = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0];

pub fn relative_error(closed: f64, reference: f64) -> f64 {
    (closed - reference).abs() / reference.abs().max(1e-6)
}
