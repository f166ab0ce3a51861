//! Histogramming and moment/shape estimators with standard errors for
//! Monte Carlo sample batches.

use crate::error::{Error, Result};

/// Uniform-bin histogram over [lo, hi). Out-of-range samples land in the
/// explicit underflow/overflow tallies; the density column is normalized over
/// the in-range count, so it integrates to one.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn density(&self, bin: usize) -> f64 {
        let total = self.in_range();
        if total == 0 {
            return 0.0;
        }
        self.counts[bin] as f64 / (total as f64 * self.bin_width())
    }

    /// CSV rows `bin_left,bin_right,count,density`.
    pub fn to_csv(&self) -> String {
        let w = self.bin_width();
        let mut out = String::from("bin_left,bin_right,count,density\n");
        for (i, &c) in self.counts.iter().enumerate() {
            let left = self.lo + i as f64 * w;
            let right = self.lo + (i + 1) as f64 * w;
            out.push_str(&format!("{left},{right},{c},{}\n", self.density(i)));
        }
        out
    }
}

/// Bin `samples` uniformly over `range`.
pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "empty sample set"));
    }
    if bins == 0 {
        return Err(Error::invalid("bins", "need at least 1 bin"));
    }
    let (lo, hi) = range;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(
            "range",
            format!("degenerate range [{lo}, {hi})"),
        ));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut underflow = 0;
    let mut overflow = 0;
    for &x in samples {
        if x.is_nan() || x >= hi {
            overflow += 1;
        } else if x < lo {
            underflow += 1;
        } else {
            let idx = (((x - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
    }
    Ok(Histogram {
        lo,
        hi,
        counts,
        underflow,
        overflow,
    })
}

/// Location, dispersion and shape of a sample with Gaussian-asymptotic
/// standard errors (documented approximations).
#[derive(Debug, Clone, Copy)]
pub struct ShapeEstimate {
    pub count: usize,
    pub mean: f64,
    pub mean_se: f64,
    /// Unbiased (n - 1 denominator) variance.
    pub variance: f64,
    pub variance_se: f64,
    /// g1 = m3 / m2^{3/2} from the biased central moments; NaN if degenerate.
    pub skewness: f64,
    pub skewness_se: f64,
    pub excess_kurtosis: f64,
    pub excess_kurtosis_se: f64,
    pub min: f64,
    pub frac_below_zero: f64,
    /// Zero sample variance: skewness and kurtosis are undefined.
    pub degenerate: bool,
}

impl ShapeEstimate {
    pub const CSV_HEADER: &'static str = "count,mean,mean_se,variance,variance_se,skewness,skewness_se,excess_kurtosis,excess_kurtosis_se,min,frac_below_zero,degenerate";

    /// Single-row CSV including the header line.
    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            self.count,
            self.mean,
            self.mean_se,
            self.variance,
            self.variance_se,
            self.skewness,
            self.skewness_se,
            self.excess_kurtosis,
            self.excess_kurtosis_se,
            self.min,
            self.frac_below_zero,
            self.degenerate
        )
    }
}

/// Two-pass moment estimation. Requires at least 10 samples.
pub fn shape(samples: &[f64]) -> Result<ShapeEstimate> {
    let n = samples.len();
    if n < 10 {
        return Err(Error::invalid(
            "samples",
            format!("need at least 10 samples, got {n}"),
        ));
    }
    let nf = n as f64;

    // Neumaier-compensated mean
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for &x in samples {
        let t = acc + x;
        comp += if acc.abs() >= x.abs() {
            (acc - t) + x
        } else {
            (x - t) + acc
        };
        acc = t;
    }
    let mean = (acc + comp) / nf;

    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    let mut min = f64::INFINITY;
    let mut below = 0usize;
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        if x < min {
            min = x;
        }
        if x < 0.0 {
            below += 1;
        }
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let variance = m2 * nf / (nf - 1.0);
    let degenerate = m2 == 0.0;
    let (skewness, excess_kurtosis) = if degenerate {
        (f64::NAN, f64::NAN)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };

    Ok(ShapeEstimate {
        count: n,
        mean,
        mean_se: (variance / nf).sqrt(),
        variance,
        variance_se: variance * (2.0 / (nf - 1.0)).sqrt(),
        skewness,
        skewness_se: (6.0 / nf).sqrt(),
        excess_kurtosis,
        excess_kurtosis_se: (24.0 / nf).sqrt(),
        min,
        frac_below_zero: below as f64 / nf,
        degenerate,
    })
}

/// Default histogram range: [support lower bound, mean + 8 sd] when a finite
/// lower bound exists (quadratic batches), symmetric mean +- 6 sd otherwise.
pub fn default_histogram_range(est: &ShapeEstimate, lower_bound: f64) -> (f64, f64) {
    let sd = est.variance.sqrt();
    if lower_bound.is_finite() {
        (lower_bound, est.mean + 8.0 * sd)
    } else {
        (est.mean - 6.0 * sd, est.mean + 6.0 * sd)
    }
}
