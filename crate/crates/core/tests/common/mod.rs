#![allow(dead_code)]

use bridgex_core::{standardize, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian design with a few strong signals and unit noise, raw scale.
pub fn raw_dataset(seed: u64, n: usize, p: usize) -> Dataset<f64> {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| r.sample::<f64, _>(StandardNormal) * 2.0 + 1.0).collect())
        .collect();
    let beta: Vec<f64> = (0..p)
        .map(|j| if j % 3 == 0 { 1.5 } else { 0.0 })
        .collect();
    let y = rows
        .iter()
        .map(|row| {
            row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()
                + r.sample::<f64, _>(StandardNormal)
                + 3.0
        })
        .collect();
    Dataset::from_rows(&rows, y).unwrap()
}

pub fn dataset(seed: u64, n: usize, p: usize) -> Dataset<f64> {
    standardize(&raw_dataset(seed, n, p)).unwrap()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Dense `X'X` for the given columns.
pub fn gram(data: &Dataset<f64>, cols: &[usize]) -> Vec<Vec<f64>> {
    let x = data.x();
    cols.iter()
        .map(|&j| {
            cols.iter()
                .map(|&k| x.column(j).iter().zip(x.column(k)).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}

pub fn xty(data: &Dataset<f64>, cols: &[usize]) -> Vec<f64> {
    cols.iter()
        .map(|&j| data.x().column(j).iter().zip(data.y()).map(|(a, b)| a * b).sum())
        .collect()
}

/// Cyclic Jacobi eigenvalues of a small symmetric matrix, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
