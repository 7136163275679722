//! Peak picking by topographic prominence.

use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// cm⁻¹, refined by a parabola through the three top samples.
    pub center: f64,
    pub height: f64,
    /// Width at half prominence, cm⁻¹.
    pub fwhm: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSearch {
    pub peaks: Vec<Peak>,
    /// Centers of maxima dropped because they sat within one grid step of a
    /// higher one.
    pub merged: Vec<f64>,
}

/// 5% of the spectrum's dynamic range.
pub fn default_prominence(spectrum: &Spectrum) -> f64 {
    spectrum.min_max().map(|(lo, hi)| 0.05 * (hi - lo)).unwrap_or(0.0)
}

pub fn detect_peaks(spectrum: &Spectrum, prominence: f64) -> Vec<Peak> {
    find_peaks(spectrum, prominence).peaks
}

/// Local maxima whose prominence reaches `prominence`, sorted by center.
///
/// The width is measured where the curve crosses the midpoint between the
/// peak and the higher of its two bases, which equals the half height for
/// an isolated line on a zero baseline. Fewer than 5 samples give no peaks.
pub fn find_peaks(spectrum: &Spectrum, prominence: f64) -> PeakSearch {
    let k = spectrum.wavenumbers();
    let y = spectrum.values();
    let n = y.len();
    let mut out = PeakSearch::default();
    if n < 5 {
        return out;
    }
    let mut i = 1;
    let mut candidates = Vec::new();
    while i + 1 < n {
        if y[i] > y[i - 1] {
            // Extend across a flat top.
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                candidates.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    for &p in &candidates {
        let h = y[p];
        let mut left_min = h;
        let mut l = p;
        while l > 0 && y[l - 1] <= h {
            l -= 1;
            left_min = left_min.min(y[l]);
        }
        let mut right_min = h;
        let mut r = p;
        while r + 1 < n && y[r + 1] <= h {
            r += 1;
            right_min = right_min.min(y[r]);
        }
        let prom = h - left_min.max(right_min);
        if !(prom >= prominence) || prom <= 0.0 {
            continue;
        }
        let level = h - 0.5 * prom;
        let mut a = p;
        while a > l && y[a] > level {
            a -= 1;
        }
        let left = if y[a] <= level && a < p {
            k[a] + (level - y[a]) * (k[a + 1] - k[a]) / (y[a + 1] - y[a])
        } else {
            k[a]
        };
        let mut b = p;
        while b < r && y[b] > level {
            b += 1;
        }
        let right = if y[b] <= level && b > p {
            k[b - 1] + (y[b - 1] - level) * (k[b] - k[b - 1]) / (y[b - 1] - y[b])
        } else {
            k[b]
        };
        let (center, height) = vertex(k[p - 1], k[p], k[p + 1], y[p - 1], y[p], y[p + 1]);
        let fwhm = right - left;
        if fwhm > 0.0 {
            out.peaks.push(Peak {
                center,
                height,
                fwhm,
                prominence: prom,
            });
        }
    }
    out.peaks.sort_by(|a, b| a.center.total_cmp(&b.center));
    let step = k.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let mut kept: Vec<Peak> = Vec::with_capacity(out.peaks.len());
    for p in out.peaks.drain(..) {
        match kept.last_mut() {
            Some(last) if p.center - last.center <= step => {
                if p.height > last.height {
                    out.merged.push(last.center);
                    *last = p;
                } else {
                    out.merged.push(p.center);
                }
            }
            _ => kept.push(p),
        }
    }
    out.peaks = kept;
    out
}

/// Vertex of the parabola through three points, clamped to the outer pair.
fn vertex(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < 0.0) {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv.max(y1))
}
