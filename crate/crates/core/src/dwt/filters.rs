use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{parameter, Error};

/// Supported orthonormal filter banks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    Db2,
    Db3,
    /// Coiflet of order 1 (6 taps).
    Coif,
}

impl Wavelet {
    pub const ALL: [Wavelet; 4] = [Wavelet::Haar, Wavelet::Db2, Wavelet::Db3, Wavelet::Coif];

    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Db3 => "db3",
            Wavelet::Coif => "coif",
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Wavelet::Haar),
            "db2" => Ok(Wavelet::Db2),
            "db3" => Ok(Wavelet::Db3),
            "coif" | "coif1" => Ok(Wavelet::Coif),
            other => Err(parameter(format!("unknown wavelet family `{other}`"))),
        }
    }
}

/// Lowpass/highpass reconstruction filters of an orthonormal wavelet.
///
/// The lowpass taps are the closed-form Daubechies and coiflet values; the
/// highpass filter follows from the quadrature-mirror rule
/// `g[n] = (-1)^n h[L-1-n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFamily {
    kind: Wavelet,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletFamily {
    pub fn new(kind: Wavelet) -> Self {
        let lowpass = lowpass_taps(kind);
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - n]
            })
            .collect();
        Self {
            kind,
            lowpass,
            highpass,
        }
    }

    pub fn kind(&self) -> Wavelet {
        self.kind
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn filter_len(&self) -> usize {
        self.lowpass.len()
    }
}

impl From<Wavelet> for WaveletFamily {
    fn from(kind: Wavelet) -> Self {
        Self::new(kind)
    }
}

fn lowpass_taps(kind: Wavelet) -> Vec<f64> {
    let sqrt2 = std::f64::consts::SQRT_2;
    match kind {
        Wavelet::Haar => vec![1.0 / sqrt2, 1.0 / sqrt2],
        Wavelet::Db2 => {
            let s3 = 3f64.sqrt();
            let d = 4.0 * sqrt2;
            vec![
                (1.0 + s3) / d,
                (3.0 + s3) / d,
                (3.0 - s3) / d,
                (1.0 - s3) / d,
            ]
        }
        Wavelet::Db3 => {
            let s10 = 10f64.sqrt();
            let r = (5.0 + 2.0 * s10).sqrt();
            let d = 16.0 * sqrt2;
            vec![
                (1.0 + s10 + r) / d,
                (5.0 + s10 + 3.0 * r) / d,
                (10.0 - 2.0 * s10 + 2.0 * r) / d,
                (10.0 - 2.0 * s10 - 2.0 * r) / d,
                (5.0 + s10 - 3.0 * r) / d,
                (1.0 + s10 - r) / d,
            ]
        }
        Wavelet::Coif => {
            let s7 = 7f64.sqrt();
            let c = sqrt2 / 32.0;
            vec![
                c * (1.0 - s7),
                c * (5.0 + s7),
                c * (14.0 + 2.0 * s7),
                c * (14.0 - 2.0 * s7),
                c * (1.0 - s7),
                c * (-3.0 + s7),
            ]
        }
    }
}
