use std::f64::consts::TAU;

use gevrey_core::spectral::{forward_transform, retained_frequency, Grid, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Section;
use crate::error::LabResult;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `A exp(-|x - c|²/(2w²))`.
    GaussianBump {
        center: [f64; 2],
        width: f64,
        amplitude: f64,
    },
    /// `A cos(k·x)`.
    SingleMode { k: [i64; 2], amplitude: f64 },
    /// Coefficients `A e^{-σ|k|} e^{iθ_k}` with independent uniform phases on
    /// every mode with `0 < max|m_axis| <= band`, optionally rescaled to a
    /// prescribed L² norm.
    RandomBand {
        seed: u64,
        band: i64,
        amplitude: f64,
        spectral_decay: f64,
        l2_norm: Option<f64>,
    },
}

impl InitialCondition {
    pub(crate) fn parse(s: &Section, grid: &Grid, dealias_rule: f64) -> LabResult<Self> {
        let kind: String = s.require("kind")?;
        let dim = grid.dim();
        let ic = match kind.as_str() {
            "gaussian_bump" => {
                let half = grid.length() / 2.0;
                let center = match s.list::<f64>("center")? {
                    None => [half, if dim == 2 { half } else { 0.0 }],
                    Some(c) if c.len() == dim => [c[0], if dim == 2 { c[1] } else { 0.0 }],
                    Some(_) => {
                        let raw = s.raw("center").unwrap_or_default();
                        return Err(s.invalid(
                            "center",
                            raw,
                            format!("expected {dim} coordinates"),
                        ));
                    }
                };
                let width: f64 = s.require("width")?;
                if !(width > 0.0) {
                    return Err(s.invalid("width", &width.to_string(), "must be positive"));
                }
                InitialCondition::GaussianBump {
                    center,
                    width,
                    amplitude: s.or("amplitude", 1.0)?,
                }
            }
            "single_mode" => {
                let k: Vec<i64> =
                    s.list("k")?
                        .ok_or_else(|| crate::error::LabError::MissingKey {
                            key: "k".into(),
                            section: "initial".into(),
                        })?;
                let raw = s.raw("k").unwrap_or_default();
                let nyq = (grid.points() / 2) as i64;
                if k.len() != dim || k.iter().any(|m| m.abs() >= nyq) {
                    return Err(s.invalid(
                        "k",
                        raw,
                        format!("expected {dim} integers below {nyq} in magnitude"),
                    ));
                }
                InitialCondition::SingleMode {
                    k: [k[0], if dim == 2 { k[1] } else { 0 }],
                    amplitude: s.or("amplitude", 1.0)?,
                }
            }
            "random_band" => {
                let seed: u64 = s.require("seed")?;
                let band: i64 = s.or("band", retained_frequency(grid, dealias_rule))?;
                let nyq = (grid.points() / 2) as i64;
                if band < 1 || band >= nyq {
                    return Err(s.invalid(
                        "band",
                        &band.to_string(),
                        format!("expected 1..{}", nyq - 1),
                    ));
                }
                let l2_norm: Option<f64> = s.optional("l2_norm")?;
                if l2_norm.is_some_and(|v| !(v > 0.0)) {
                    return Err(s.invalid(
                        "l2_norm",
                        s.raw("l2_norm").unwrap_or_default(),
                        "must be positive",
                    ));
                }
                InitialCondition::RandomBand {
                    seed,
                    band,
                    amplitude: s.or("amplitude", 1.0)?,
                    spectral_decay: s.or("spectral_decay", 0.0)?,
                    l2_norm,
                }
            }
            other => {
                return Err(s.invalid(
                    "kind",
                    other,
                    "expected gaussian_bump, single_mode or random_band",
                ));
            }
        };
        Ok(ic)
    }

    pub fn build(&self, grid: &Grid) -> gevrey_core::Result<SpectralField> {
        match *self {
            InitialCondition::GaussianBump {
                center,
                width,
                amplitude,
            } => {
                let dim = grid.dim();
                let samples = grid.sample(|x| {
                    let r2: f64 = (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum();
                    amplitude * (-r2 / (2.0 * width * width)).exp()
                });
                forward_transform(&samples, grid)
            }
            InitialCondition::SingleMode { k, amplitude } => {
                let mut f = SpectralField::zeros(*grid);
                let half = Complex64::new(0.5 * amplitude, 0.0);
                if k == [0, 0] {
                    f.set_mode(k, Complex64::new(amplitude, 0.0));
                } else {
                    f.set_mode(k, half);
                    f.set_mode([-k[0], -k[1]], half);
                }
                Ok(f)
            }
            InitialCondition::RandomBand {
                seed,
                band,
                amplitude,
                spectral_decay,
                l2_norm,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
                for i in 0..grid.len() {
                    let j = grid.mirror(i);
                    let m = grid.frequencies(i);
                    if j <= i || m[0].abs() > band || m[1].abs() > band {
                        continue;
                    }
                    let theta = rng.random_range(0.0..TAU);
                    let c = Complex64::from_polar(
                        amplitude * (-spectral_decay * grid.wavenumber(i)).exp(),
                        theta,
                    );
                    coeffs[i] = c;
                    coeffs[j] = c.conj();
                }
                let mut f = SpectralField::from_coeffs(*grid, coeffs)?;
                if let Some(target) = l2_norm {
                    let norm = f.l2_norm();
                    f.scale(target / norm);
                }
                Ok(f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_band_is_real_mean_zero_and_seeded() {
        let g = Grid::periodic_2pi(2, 32).unwrap();
        let ic = InitialCondition::RandomBand {
            seed: 3,
            band: 10,
            amplitude: 1.0,
            spectral_decay: 0.2,
            l2_norm: Some(0.5),
        };
        let a = ic.build(&g).unwrap();
        assert_eq!(a, ic.build(&g).unwrap());
        assert_eq!(a.hermitian_defect(), 0.0);
        assert_eq!(a.mean(), Complex64::new(0.0, 0.0));
        assert!((a.l2_norm() - 0.5).abs() < 1e-14);
        assert_eq!(a.mode([11, 0]), Complex64::new(0.0, 0.0));
        // Equal-|k| modes share one amplitude before rescaling.
        let r = a.mode([3, 4]).norm() / a.mode([5, 0]).norm();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_mode_is_a_cosine() {
        let g = Grid::periodic_2pi(1, 16).unwrap();
        let f = InitialCondition::SingleMode {
            k: [2, 0],
            amplitude: 3.0,
        }
        .build(&g)
        .unwrap();
        let x = f.to_physical().unwrap();
        for (i, v) in x.iter().enumerate() {
            let expected = 3.0 * (2.0 * g.coordinates(i)[0]).cos();
            assert!((v - expected).abs() < 1e-14);
        }
    }
}
