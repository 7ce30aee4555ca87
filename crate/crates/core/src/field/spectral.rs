use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repr {
    Physical,
    Fourier,
}

/// Complex samples on a [`Grid`], tagged with the representation they hold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<Complex64>,
    repr: Repr,
}

impl SpectralField {
    pub fn new(grid: Grid, values: Vec<Complex64>, repr: Repr) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::config(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.n
            )));
        }
        Ok(SpectralField { grid, values, repr })
    }

    pub fn zeros(grid: Grid, repr: Repr) -> Self {
        SpectralField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n],
            repr,
        }
    }

    pub fn from_fn_physical(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n).map(|j| f(grid.x(j))).collect();
        SpectralField {
            grid,
            values,
            repr: Repr::Physical,
        }
    }

    pub fn from_fn_fourier(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n).map(|j| f(grid.xi(j))).collect();
        SpectralField {
            grid,
            values,
            repr: Repr::Fourier,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn repr(&self) -> Repr {
        self.repr
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn to_fourier(&self) -> Result<SpectralField> {
        if self.repr != Repr::Physical {
            return Err(Error::config("to_fourier called on a Fourier-tagged field"));
        }
        let mut values = self.values.clone();
        fft::forward(&self.grid, &mut values);
        Ok(SpectralField {
            grid: self.grid,
            values,
            repr: Repr::Fourier,
        })
    }

    pub fn from_fourier(&self) -> Result<SpectralField> {
        if self.repr != Repr::Fourier {
            return Err(Error::config("from_fourier called on a physical field"));
        }
        let mut values = self.values.clone();
        fft::inverse(&self.grid, &mut values);
        Ok(SpectralField {
            grid: self.grid,
            values,
            repr: Repr::Physical,
        })
    }

    /// Copy in the requested representation, transforming only if needed.
    pub fn in_repr(&self, repr: Repr) -> SpectralField {
        match (self.repr, repr) {
            (Repr::Physical, Repr::Fourier) => self.to_fourier().expect("tag checked"),
            (Repr::Fourier, Repr::Physical) => self.from_fourier().expect("tag checked"),
            _ => self.clone(),
        }
    }

    pub fn fourier(&self) -> SpectralField {
        self.in_repr(Repr::Fourier)
    }

    pub fn physical(&self) -> SpectralField {
        self.in_repr(Repr::Physical)
    }

    /// L² norm, by Parseval in either representation.
    pub fn l2_norm(&self) -> f64 {
        let w = match self.repr {
            Repr::Physical => self.grid.dx(),
            Repr::Fourier => self.grid.dxi(),
        };
        (w * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.repr != other.repr {
            return Err(Error::config(
                "fields live on different grids or representations",
            ));
        }
        Ok(())
    }

    /// α·self + β·other.
    pub fn lincomb(
        &self,
        alpha: Complex64,
        other: &SpectralField,
        beta: Complex64,
    ) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Ok(SpectralField {
            grid: self.grid,
            values,
            repr: self.repr,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.lincomb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            values: self.values.iter().map(|z| z * c).collect(),
            repr: self.repr,
        }
    }

    pub fn map_indexed(&self, f: impl Fn(usize, Complex64) -> Complex64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(j, &z)| f(j, z))
                .collect(),
            repr: self.repr,
        }
    }

    /// Fraction of the spectral mass with |ξ| > 0.9·ξ_Nyquist.
    pub fn high_mass_fraction(&self) -> f64 {
        let f = self.fourier();
        let cut = 0.9 * self.grid.xi_max();
        let (mut hi, mut tot) = (0.0, 0.0);
        for (j, z) in f.values.iter().enumerate() {
            let m = z.norm_sqr();
            tot += m;
            if self.grid.xi(j).abs() > cut {
                hi += m;
            }
        }
        if tot == 0.0 {
            0.0
        } else {
            hi / tot
        }
    }

    /// Spectral x-derivative.
    pub fn derivative(&self) -> SpectralField {
        let f = self.fourier();
        let g = self.grid;
        let d = f.map_indexed(|j, z| {
            if j == g.nyquist() {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, g.xi(j)) * z
            }
        });
        d.in_repr(self.repr)
    }

    /// Trigonometric interpolation onto `target` (same box or not); modes
    /// beyond the source band are simply absent on the target.
    pub fn interpolate_at(&self, xs: &[f64]) -> Vec<Complex64> {
        let f = self.fourier();
        let g = self.grid;
        let norm = 1.0 / (2.0 * g.half_length) * (2.0 * std::f64::consts::PI).sqrt();
        xs.iter()
            .map(|&x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, z) in f.values.iter().enumerate() {
                    let xi = g.xi(j);
                    let c = if j == g.nyquist() {
                        // split the self-paired Nyquist mode symmetrically
                        z * (xi * x).cos()
                    } else {
                        z * Complex64::from_polar(1.0, xi * x)
                    };
                    acc += c;
                }
                acc * norm
            })
            .collect()
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.values.len());
        for z in &self.values {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(grid: Grid, repr: Repr, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 16 * grid.n {
            return Err(Error::config("binary field length mismatch"));
        }
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[0..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..16].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        SpectralField::new(grid, values, repr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_values(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let g = Grid::new(8.0, 64).unwrap();
        let mut f = SpectralField::zeros(g, Repr::Physical);
        f.values_mut()[g.origin()] = Complex64::new(1.0, 0.0);
        let h = f.to_fourier().unwrap();
        let m0 = h.values()[0].norm();
        assert!(m0 > 0.0);
        for z in h.values() {
            assert!((z.norm() - m0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_concentrates_at_zero() {
        let g = Grid::new(8.0, 64).unwrap();
        let f = SpectralField::from_fn_physical(g, |_| Complex64::new(2.5, -1.0));
        let h = f.to_fourier().unwrap();
        assert!(h.values()[0].norm() > 1.0);
        for z in &h.values()[1..] {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_matches_continuous_transform() {
        // Oracle: ∫ e^{−x²/2} e^{−ixξ} dx / √(2π) = e^{−ξ²/2}.
        let g = Grid::new(20.0, 256).unwrap();
        let f = SpectralField::from_fn_physical(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0));
        let h = f.to_fourier().unwrap();
        for j in 0..g.n {
            let xi = g.xi(j);
            assert!((h.values()[j] - Complex64::new((-xi * xi / 2.0).exp(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid::new(13.0, 512).unwrap();
        let f = SpectralField::new(g, random_values(g.n, 7), Repr::Physical).unwrap();
        let h = f.to_fourier().unwrap();
        let back = h.from_fourier().unwrap();
        let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
        assert!(err < 1e-12, "round trip {err}");
        assert!((h.l2_norm() - f.l2_norm()).abs() / f.l2_norm() < 1e-12);
    }

    #[test]
    fn wrong_direction_is_error() {
        let g = Grid::new(1.0, 8).unwrap();
        let f = SpectralField::zeros(g, Repr::Fourier);
        assert!(f.to_fourier().is_err());
        assert!(f.from_fourier().is_ok());
    }

    #[test]
    fn derivative_of_plane_wave() {
        let g = Grid::new(std::f64::consts::PI, 32).unwrap();
        let f = SpectralField::from_fn_physical(g, |x| Complex64::from_polar(1.0, 3.0 * x));
        let d = f.derivative();
        for (j, z) in d.values().iter().enumerate() {
            let want = Complex64::new(0.0, 3.0) * f.values()[j];
            assert!((z - want).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_reproduces_band_limited() {
        let g = Grid::new(10.0, 64).unwrap();
        let f = SpectralField::from_fn_physical(g, |x| {
            Complex64::new(
                (0.3 * std::f64::consts::PI * x).cos(),
                (0.6 * std::f64::consts::PI * x).sin(),
            )
        });
        let xs = [0.123, -7.7, 3.3333];
        let got = f.interpolate_at(&xs);
        for (x, z) in xs.iter().zip(got) {
            let want = Complex64::new(
                (0.3 * std::f64::consts::PI * x).cos(),
                (0.6 * std::f64::consts::PI * x).sin(),
            );
            assert!((z - want).norm() < 1e-12);
        }
    }

    #[test]
    fn binary_round_trip() {
        let g = Grid::new(3.0, 16).unwrap();
        let f = SpectralField::new(g, random_values(16, 1), Repr::Fourier).unwrap();
        let back = SpectralField::from_le_bytes(g, Repr::Fourier, &f.to_le_bytes()).unwrap();
        assert_eq!(back, f);
    }
}
