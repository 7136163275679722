//! Sampled spectra over strictly increasing wavenumber grids.

use crate::error::{Error, Result};

/// A curve sampled on a strictly increasing wavenumber grid (cm⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    wavenumbers: Vec<f64>,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(wavenumbers: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if wavenumbers.len() != values.len() {
            return Err(Error::invariant(
                "spectrum",
                format!(
                    "{} wavenumbers but {} values",
                    wavenumbers.len(),
                    values.len()
                ),
            ));
        }
        check_grid(&wavenumbers)?;
        Ok(Self {
            wavenumbers,
            values,
        })
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.wavenumbers
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Samples with `lo <= k <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Spectrum {
        let (ks, vs): (Vec<f64>, Vec<f64>) = self.iter().filter(|(k, _)| *k >= lo && *k <= hi).unzip();
        Spectrum {
            wavenumbers: ks,
            values: vs,
        }
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Spectrum {
        Spectrum {
            wavenumbers: self.wavenumbers.clone(),
            values: self.iter().map(|(k, v)| f(k, v)).collect(),
        }
    }

    /// Linear interpolation; errors outside the sampled range.
    pub fn interpolate(&self, k: f64) -> Result<f64> {
        interpolate(&self.wavenumbers, &self.values, k)
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        self.values.iter().fold(None, |acc, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Index of the smallest value.
    pub fn argmin(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

/// Uniform grid `start, start + step, ...` up to and including `stop`
/// (within a small rounding allowance). Samples are computed as
/// `start + i * step` so the grid does not depend on accumulated sums.
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::invariant(
            "grid",
            format!("need finite bounds and step > 0 (start={start}, stop={stop}, step={step})"),
        ));
    }
    if stop < start {
        return Err(Error::invariant(
            "grid",
            format!("stop {stop} is below start {start}"),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Errors unless the grid is non-empty, finite and strictly increasing.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invariant("grid", "empty"));
    }
    if let Some(i) = grid.iter().position(|v| !v.is_finite()) {
        return Err(Error::invariant(format!("grid[{i}]"), "not finite"));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::invariant(
            format!("grid[{}]", i + 1),
            format!(
                "not strictly increasing ({} after {})",
                grid[i + 1],
                grid[i]
            ),
        ));
    }
    Ok(())
}

pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let (first, last) = match (xs.first(), xs.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::Domain("interpolation on empty table".into())),
    };
    if !(x >= first && x <= last) {
        return Err(Error::Domain(format!(
            "wavenumber {x} outside table range [{first}, {last}]"
        )));
    }
    let hi = xs.partition_point(|&v| v < x);
    if hi == 0 {
        return Ok(ys[0]);
    }
    let lo = hi - 1;
    if xs[hi] == x {
        return Ok(ys[hi]);
    }
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Ok(ys[lo] + t * (ys[hi] - ys[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_stop() {
        let g = uniform_grid(1500.0, 2500.0, 0.5).unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(*g.last().unwrap(), 2500.0);
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(Spectrum::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![0.0]).is_err());
    }

    #[test]
    fn interpolation_is_linear() {
        let s = Spectrum::new(vec![1.0, 3.0], vec![0.0, 4.0]).unwrap();
        assert_eq!(s.interpolate(2.0).unwrap(), 2.0);
        assert!(s.interpolate(3.5).is_err());
    }
}
