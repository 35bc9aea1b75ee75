use crate::error::{dimension, parameter, Result};

use super::{log2_exact, CoeffLayout, CoefficientVector, WaveletFamily};

/// One periodic analysis step: `x` (length `n`) becomes
/// `[approximation | detail]` in `out`.
fn analysis_step(family: &WaveletFamily, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    let h = family.lowpass();
    let g = family.highpass();
    let taps = h.len();
    for k in 0..half {
        let start = 2 * k;
        let (mut a, mut d) = (0.0, 0.0);
        if start + taps <= n {
            let win = &x[start..start + taps];
            for i in 0..taps {
                a += h[i] * win[i];
                d += g[i] * win[i];
            }
        } else {
            for i in 0..taps {
                let v = x[(start + i) % n];
                a += h[i] * v;
                d += g[i] * v;
            }
        }
        out[k] = a;
        out[half + k] = d;
    }
}

/// Exact transpose of [`analysis_step`].
fn synthesis_step(family: &WaveletFamily, coeffs: &[f64], out: &mut [f64]) {
    let n = coeffs.len();
    let half = n / 2;
    let h = family.lowpass();
    let g = family.highpass();
    let taps = h.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..half {
        let (a, d) = (coeffs[k], coeffs[half + k]);
        let start = 2 * k;
        if start + taps <= n {
            let win = &mut out[start..start + taps];
            for i in 0..taps {
                win[i] += h[i] * a + g[i] * d;
            }
        } else {
            for i in 0..taps {
                out[(start + i) % n] += h[i] * a + g[i] * d;
            }
        }
    }
}

fn forward_1d_in_place(family: &WaveletFamily, buf: &mut [f64], depth: u32, scratch: &mut [f64]) {
    let mut n = buf.len();
    for _ in 0..depth {
        analysis_step(family, &buf[..n], &mut scratch[..n]);
        buf[..n].copy_from_slice(&scratch[..n]);
        n /= 2;
    }
}

fn inverse_1d_in_place(family: &WaveletFamily, buf: &mut [f64], depth: u32, scratch: &mut [f64]) {
    let total = buf.len();
    for level in (0..depth).rev() {
        let n = total >> level;
        synthesis_step(family, &buf[..n], &mut scratch[..n]);
        buf[..n].copy_from_slice(&scratch[..n]);
    }
}

fn forward_2d_in_place(family: &WaveletFamily, buf: &mut [f64], side: usize, depth: u32) {
    let mut line = vec![0.0; side];
    let mut out = vec![0.0; side];
    for level in 0..depth {
        let n = side >> level;
        for r in 0..n {
            let row = &mut buf[r * side..r * side + n];
            analysis_step(family, row, &mut out[..n]);
            row.copy_from_slice(&out[..n]);
        }
        for c in 0..n {
            for r in 0..n {
                line[r] = buf[r * side + c];
            }
            analysis_step(family, &line[..n], &mut out[..n]);
            for r in 0..n {
                buf[r * side + c] = out[r];
            }
        }
    }
}

fn inverse_2d_in_place(family: &WaveletFamily, buf: &mut [f64], side: usize, depth: u32) {
    let mut line = vec![0.0; side];
    let mut out = vec![0.0; side];
    for level in (0..depth).rev() {
        let n = side >> level;
        for c in 0..n {
            for r in 0..n {
                line[r] = buf[r * side + c];
            }
            synthesis_step(family, &line[..n], &mut out[..n]);
            for r in 0..n {
                buf[r * side + c] = out[r];
            }
        }
        for r in 0..n {
            let row = &mut buf[r * side..r * side + n];
            synthesis_step(family, row, &mut out[..n]);
            row.copy_from_slice(&out[..n]);
        }
    }
}

/// Analysis transform of grid values stored in `buf`, in place, for an
/// arbitrary layout. `buf.len()` must equal `layout.len()`.
pub fn analyze_in_place(family: &WaveletFamily, layout: CoeffLayout, buf: &mut [f64]) {
    debug_assert_eq!(buf.len(), layout.len());
    match layout.dim() {
        1 => {
            let mut scratch = vec![0.0; buf.len()];
            forward_1d_in_place(family, buf, layout.depth(), &mut scratch);
        }
        _ => forward_2d_in_place(family, buf, layout.side(), layout.depth()),
    }
}

/// Synthesis transform (inverse of [`analyze_in_place`]), in place.
pub fn synthesize_in_place(family: &WaveletFamily, layout: CoeffLayout, buf: &mut [f64]) {
    debug_assert_eq!(buf.len(), layout.len());
    match layout.dim() {
        1 => {
            let mut scratch = vec![0.0; buf.len()];
            inverse_1d_in_place(family, buf, layout.depth(), &mut scratch);
        }
        _ => inverse_2d_in_place(family, buf, layout.side(), layout.depth()),
    }
}

fn check_depth(levels: u32, depth: u32) -> Result<()> {
    if depth > levels {
        return Err(parameter(format!(
            "depth {depth} exceeds log2 of the length ({levels})"
        )));
    }
    Ok(())
}

/// Periodic orthonormal DWT of a length-`2^J` signal.
pub fn forward_dwt(
    signal: &[f64],
    family: &WaveletFamily,
    depth: u32,
) -> Result<CoefficientVector> {
    let levels = log2_exact(signal.len())?;
    check_depth(levels, depth)?;
    let layout = CoeffLayout::new(1, levels, depth)?;
    let mut buf = signal.to_vec();
    analyze_in_place(family, layout, &mut buf);
    CoefficientVector::new(buf, layout, family.kind())
}

/// Periodic orthonormal 2D DWT of a `side × side` image stored row-major.
pub fn forward_dwt_2d(
    image: &[f64],
    side: usize,
    family: &WaveletFamily,
    depth: u32,
) -> Result<CoefficientVector> {
    let levels = log2_exact(side)?;
    if image.len() != side * side {
        return Err(dimension(format!(
            "image has {} pixels, expected {side}x{side}",
            image.len()
        )));
    }
    check_depth(levels, depth)?;
    let layout = CoeffLayout::new(2, levels, depth)?;
    let mut buf = image.to_vec();
    analyze_in_place(family, layout, &mut buf);
    CoefficientVector::new(buf, layout, family.kind())
}

/// Inverse DWT. Multi-column vectors are inverted column by column and
/// concatenated.
pub fn inverse_dwt(coeffs: &CoefficientVector, family: &WaveletFamily) -> Result<Vec<f64>> {
    if coeffs.wavelet() != family.kind() {
        return Err(parameter(format!(
            "coefficients were produced with {} but {} was requested",
            coeffs.wavelet(),
            family.kind()
        )));
    }
    let mut out = coeffs.values().to_vec();
    let layout = coeffs.layout();
    for col in out.chunks_mut(layout.len()) {
        synthesize_in_place(family, layout, col);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwt::Wavelet;
    use crate::linalg::{max_abs_diff, norm2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn constant_signal_has_only_a_scaling_coefficient() {
        let fam = WaveletFamily::new(Wavelet::Haar);
        let c = forward_dwt(&[1.0; 4], &fam, 2).unwrap();
        assert!((c.values()[0] - 2.0).abs() < 1e-15);
        assert!(c.values()[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn alternating_signal_is_pure_detail() {
        let fam = WaveletFamily::new(Wavelet::Haar);
        let c = forward_dwt(&[1.0, -1.0, 1.0, -1.0], &fam, 1).unwrap();
        let s2 = 2f64.sqrt();
        assert!(max_abs_diff(c.values(), &[0.0, 0.0, s2, s2]) < 1e-15);
    }

    #[test]
    fn unit_root_coefficient_is_normalized_constant() {
        let fam = WaveletFamily::new(Wavelet::Haar);
        let layout = CoeffLayout::full(1, 2).unwrap();
        let c = CoefficientVector::new(vec![1.0, 0.0, 0.0, 0.0], layout, Wavelet::Haar).unwrap();
        let x = inverse_dwt(&c, &fam).unwrap();
        assert!(max_abs_diff(&x, &[0.5; 4]) < 1e-15);
        let z = inverse_dwt(&CoefficientVector::zeros(layout, Wavelet::Haar), &fam).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn db3_preserves_norm_at_256_against_explicit_matrix() {
        // Build the analysis matrix column by column from unit impulses and
        // check W^T W = I directly, then norm preservation on a random signal.
        let fam = WaveletFamily::new(Wavelet::Db3);
        let n = 256;
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                forward_dwt(&e, &fam, 5).unwrap().into_values()
            })
            .collect();
        let w = crate::linalg::DenseMatrix::from_columns(n, &cols);
        let gram = w.transpose().matmul(&w);
        assert!(gram.max_abs_diff(&crate::linalg::DenseMatrix::identity(n)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_vec(&mut rng, n);
        let c = forward_dwt(&x, &fam, 5).unwrap();
        assert!((norm2(c.values()) - norm2(&x)).abs() < 1e-10);
        assert!(max_abs_diff(c.values(), &w.matvec(&x)) < 1e-12);
    }

    #[test]
    fn db2_round_trip_at_512() {
        let fam = WaveletFamily::new(Wavelet::Db2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_vec(&mut rng, 512);
        let c = forward_dwt(&x, &fam, 9).unwrap();
        let y = inverse_dwt(&c, &fam).unwrap();
        assert!(max_abs_diff(&x, &y) < 1e-10);
        let c2 = forward_dwt(&y, &fam, 9).unwrap();
        assert!(max_abs_diff(c.values(), c2.values()) < 1e-10);
    }

    #[test]
    fn two_d_is_row_then_column_transforms() {
        let fam = WaveletFamily::new(Wavelet::Db2);
        let side = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let img = random_vec(&mut rng, side * side);
        let c = forward_dwt_2d(&img, side, &fam, 1).unwrap();
        // oracle: 1D transform of each row, then of each column
        let mut rows = img.clone();
        for r in 0..side {
            let t = forward_dwt(&img[r * side..(r + 1) * side], &fam, 1).unwrap();
            rows[r * side..(r + 1) * side].copy_from_slice(t.values());
        }
        let mut expect = rows.clone();
        for col in 0..side {
            let line: Vec<f64> = (0..side).map(|r| rows[r * side + col]).collect();
            let t = forward_dwt(&line, &fam, 1).unwrap();
            for r in 0..side {
                expect[r * side + col] = t.values()[r];
            }
        }
        assert!(max_abs_diff(c.values(), &expect) < 1e-12);
        let back = inverse_dwt(&c, &fam).unwrap();
        assert!(max_abs_diff(&back, &img) < 1e-12);
    }

    #[test]
    fn size_and_depth_errors() {
        let fam = WaveletFamily::new(Wavelet::Haar);
        assert!(matches!(
            forward_dwt(&[0.0; 6], &fam, 1),
            Err(crate::Error::Dimension(_))
        ));
        assert!(matches!(
            forward_dwt(&[0.0; 8], &fam, 4),
            Err(crate::Error::Parameter(_))
        ));
        let c = forward_dwt(&[0.0; 8], &fam, 3).unwrap();
        assert!(matches!(
            inverse_dwt(&c, &WaveletFamily::new(Wavelet::Db2)),
            Err(crate::Error::Parameter(_))
        ));
    }
}
