//! Transform-free reference computations used by the check suites.
//!
//! Fields are held as sparse maps from integer frequency to coefficient, and
//! products are direct sums over mode pairs.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use gevrey_core::equations::{EquationSpec, Nonlinearity};
use gevrey_core::spectral::SpectralField;
use num_complex::Complex64;

pub type Modes = BTreeMap<[i64; 2], Complex64>;

/// Nonzero coefficients of `field`.
pub fn modes_of(field: &SpectralField) -> Modes {
    let grid = field.grid();
    field
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (grid.frequencies(i), *c))
        .collect()
}

/// Direct convolution, keeping only frequencies with every `|m_axis| <= cutoff`.
pub fn convolve(a: &Modes, b: &Modes, cutoff: i64) -> Modes {
    let mut out = Modes::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = [ma[0] + mb[0], ma[1] + mb[1]];
            if m[0].abs() <= cutoff && m[1].abs() <= cutoff {
                *out.entry(m).or_default() += ca * cb;
            }
        }
    }
    out
}

/// Multiplies each coefficient by `symbol(k)` with `k = 2π m / L`.
pub fn multiply(a: &Modes, length: f64, symbol: impl Fn([f64; 2]) -> Complex64) -> Modes {
    let scale = TAU / length;
    a.iter()
        .map(|(m, c)| (*m, c * symbol([scale * m[0] as f64, scale * m[1] as f64])))
        .collect()
}

fn add_scaled(acc: &mut Modes, a: f64, b: &Modes) {
    for (m, c) in b {
        *acc.entry(*m).or_default() += a * c;
    }
}

fn power(u: &Modes, n: usize, cutoff: i64) -> Modes {
    let mut out = u.clone();
    for _ in 1..n {
        out = convolve(&out, u, cutoff);
    }
    out
}

fn i_times(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// `G(u)` for every built-in nonlinearity, by direct convolution.
///
/// Truncation to the retained band after each binary product mirrors the
/// pseudo-spectral evaluation. The even-degree heat nonlinearity `|u|^{n-1}u`
/// is not a polynomial and has no convolution form, so it yields `None`.
pub fn brute_force_nonlinearity(spec: &EquationSpec, field: &SpectralField) -> Option<Modes> {
    let grid = field.grid();
    let length = grid.length();
    let cutoff = (spec.dealias_rule() * (grid.points() / 2) as f64).floor() as i64;
    let u = modes_of(field);
    let laplacian = |k: [f64; 2]| Complex64::new(-(k[0] * k[0] + k[1] * k[1]), 0.0);
    let out = match spec.nonlinearity() {
        Nonlinearity::FractionalHeat { coefficient } => {
            if spec.degree().is_multiple_of(2) {
                return None;
            }
            let mut p = power(&u, spec.degree(), cutoff);
            p.values_mut().for_each(|c| *c *= coefficient);
            p
        }
        Nonlinearity::Burgers => {
            multiply(&power(&u, spec.degree(), cutoff), length, |k| i_times(k[0]))
        }
        Nonlinearity::CahnHilliardCubic { beta } => {
            multiply(&power(&u, 3, cutoff), length, |k| beta * laplacian(k))
        }
        Nonlinearity::CahnHilliardGeneral { coefficients } => {
            let mut f = Modes::new();
            for (j, a) in coefficients.iter().enumerate() {
                add_scaled(&mut f, *a, &power(&u, j + 1, cutoff));
            }
            multiply(&f, length, laplacian)
        }
        Nonlinearity::Sqg | Nonlinearity::NavierStokes => {
            // Velocity symbols: SQG u = (-R₂η, R₁η) with R_j = i k_j/|k|;
            // vorticity u = ∇^⊥ψ with ψ̂ = -ω̂/|k|².
            let sqg = matches!(spec.nonlinearity(), Nonlinearity::Sqg);
            let velocity = |axis: usize| {
                multiply(&u, length, move |k| {
                    let r2 = k[0] * k[0] + k[1] * k[1];
                    if r2 == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let other = k[1 - axis];
                    let sign = if axis == 0 { -1.0 } else { 1.0 };
                    if sqg {
                        i_times(sign * other / r2.sqrt())
                    } else {
                        i_times(-sign * other / r2)
                    }
                })
            };
            let mut acc = Modes::new();
            for axis in 0..2 {
                let flux = convolve(&velocity(axis), &u, cutoff);
                add_scaled(
                    &mut acc,
                    1.0,
                    &multiply(&flux, length, |k| i_times(-k[axis])),
                );
            }
            acc
        }
    };
    Some(out)
}

/// `max_m |field(m) - oracle(m)| / max_m |oracle(m)|` over the union of supports.
pub fn relative_discrepancy(field: &SpectralField, oracle: &Modes) -> f64 {
    let got = modes_of(field);
    let scale = oracle.values().map(|c| c.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (m, c) in &got {
        worst = worst.max((c - oracle.get(m).copied().unwrap_or_default()).norm());
    }
    for (m, c) in oracle {
        if !got.contains_key(m) {
            worst = worst.max(c.norm());
        }
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// Closed-form `‖Λ^ζ u(t)‖_{L²(ℝ)}` for the heat flow `u_t = u_xx` from
/// `A exp(-x²/(2w²))`: `A² w² Γ(ζ+½) (w²+2t)^{-(ζ+½)}` under the root.
/// Only `ζ = 1` is needed here, where `Γ(3/2) = √π/2`.
pub fn gaussian_heat_h1(amplitude: f64, width: f64, t: f64) -> f64 {
    let gamma = std::f64::consts::PI.sqrt() / 2.0;
    let w2 = width * width;
    (amplitude * amplitude * w2 * gamma * (w2 + 2.0 * t).powf(-1.5)).sqrt()
}

/// Maximum of `x^β e^{-t x^κ}` over `x > 0` by golden-section search on `ln x`.
pub fn scalar_maximum(beta: f64, t: f64, kappa: f64) -> f64 {
    let f = |y: f64| beta * y - t * (kappa * y).exp();
    let (mut a, mut b) = (-60.0f64, 60.0f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(0.5 * (a + b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_of_cosines() {
        // cos x · cos x = ½ + ½ cos 2x
        let mut a = Modes::new();
        a.insert([1, 0], Complex64::new(0.5, 0.0));
        a.insert([-1, 0], Complex64::new(0.5, 0.0));
        let p = convolve(&a, &a, 10);
        assert_eq!(p[&[0, 0]], Complex64::new(0.5, 0.0));
        assert_eq!(p[&[2, 0]], Complex64::new(0.25, 0.0));
        assert!(!convolve(&a, &a, 1).contains_key(&[2, 0]));
    }

    #[test]
    fn golden_section_finds_the_peak() {
        // x e^{-x}: maximum 1/e at x = 1
        assert!((scalar_maximum(1.0, 1.0, 1.0) - (-1f64).exp()).abs() < 1e-14);
    }
}
