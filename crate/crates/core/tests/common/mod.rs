use gevrey_core::spectral::{Grid, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Real, mean-zero field with random coefficients on modes with every
/// `|m_axis| <= band`, scaled to the requested L² norm.
pub fn band_limited(grid: Grid, band: i64, l2: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::from_fn(grid, |m| {
        if m[0].abs() <= band && m[1].abs() <= band && m != [0, 0] {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    f.symmetrize();
    let norm = f.l2_norm();
    f.scaled(l2 / norm)
}
