#![allow(dead_code)]

use csvc::lifting::{ALPHA, BETA, DELTA, GAMMA, ZETA};

/// Impulse responses of the classic (non-flipped) lifting factorization,
/// extracted on a long signal far from any boundary.
/// Returns (low taps for offsets -4..=4 around 2n, high taps for offsets
/// -3..=3 around 2n+1).
pub fn standard_lifting_taps() -> ([f64; 9], [f64; 7]) {
    fn classic(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = x.len() / 2;
        let at = |v: &[f64], i: isize| if i < 0 || i as usize >= v.len() { 0.0 } else { v[i as usize] };
        let d1: Vec<f64> = (0..h as isize)
            .map(|n| at(x, 2 * n + 1) + ALPHA * (at(x, 2 * n) + at(x, 2 * n + 2)))
            .collect();
        let s1: Vec<f64> = (0..h as isize)
            .map(|n| at(x, 2 * n) + BETA * (at(&d1, n - 1) + at(&d1, n)))
            .collect();
        let d2: Vec<f64> = (0..h as isize)
            .map(|n| d1[n as usize] + GAMMA * (at(&s1, n) + at(&s1, n + 1)))
            .collect();
        let s2: Vec<f64> = (0..h as isize)
            .map(|n| s1[n as usize] + DELTA * (at(&d2, n - 1) + at(&d2, n)))
            .collect();
        (
            s2.iter().map(|v| v * ZETA).collect(),
            d2.iter().map(|v| v / ZETA).collect(),
        )
    }
    let mut low = [0.0; 9];
    let mut high = [0.0; 7];
    for k in -4isize..=4 {
        let mut x = vec![0.0; 64];
        x[(32 + k) as usize] = 1.0;
        low[(k + 4) as usize] = classic(&x).0[16];
    }
    for k in -3isize..=3 {
        let mut x = vec![0.0; 64];
        x[(33 + k) as usize] = 1.0;
        high[(k + 3) as usize] = classic(&x).1[16];
    }
    (low, high)
}

/// High-pass response to a unit constant, from the classic factorization.
/// The ten-digit constants leave a residue of about -2.3e-9 here.
pub fn dc_leak() -> f64 {
    let d1 = 1.0 + 2.0 * ALPHA;
    let s1 = 1.0 + 2.0 * BETA * d1;
    (d1 + 2.0 * GAMMA * s1) / ZETA
}

pub fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

pub fn convolve_oracle(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (lt, ht) = standard_lifting_taps();
    let n = x.len();
    let low = (0..n / 2)
        .map(|i| {
            (-4isize..=4)
                .map(|k| lt[(k + 4) as usize] * x[reflect(2 * i as isize + k, n)])
                .sum()
        })
        .collect();
    let high = (0..n / 2)
        .map(|i| {
            (-3isize..=3)
                .map(|k| ht[(k + 3) as usize] * x[reflect(2 * i as isize + 1 + k, n)])
                .sum()
        })
        .collect();
    (low, high)
}

/// Analysis matrix of one level on a length-`n` signal, rows ordered
/// (low outputs, high outputs), built from the convolution oracle.
pub fn analysis_matrix(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let (lo, hi) = convolve_oracle(&e);
        for (i, v) in lo.into_iter().chain(hi).enumerate() {
            m[i][j] = v;
        }
    }
    m
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
