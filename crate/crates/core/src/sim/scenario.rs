use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::data::{standardize, Dataset, Standardization};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};

/// Size of the leading block in the two-block and latent-group designs.
pub const LEAD_BLOCK: usize = 15;
const GROUP_SIZE: usize = 5;
/// Standard deviation of the idiosyncratic term in latent-group covariates.
const LATENT_NOISE_SD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    /// Correlation `r^|i-j|` across all covariates.
    Ar1,
    /// Independent AR(1) blocks over the first 15 and the remaining covariates.
    BlockAr1,
    /// Three groups of five near-copies of a latent factor, then iid noise.
    LatentGroups,
    /// Latent groups padded with many more iid covariates.
    LatentGroupsWide,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub id: u32,
    pub p: usize,
    pub sigma: f64,
    pub r: f64,
    pub beta0: Vec<f64>,
    pub structure: Structure,
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
}

fn graded_beta(p: usize) -> Vec<f64> {
    let mut b = vec![0.0; p];
    for (j, v) in b.iter_mut().enumerate().take(LEAD_BLOCK) {
        *v = [2.5, 1.5, 0.5][j / GROUP_SIZE];
    }
    b
}

fn flat_beta(p: usize) -> Vec<f64> {
    let mut b = vec![0.0; p];
    b[..LEAD_BLOCK].iter_mut().for_each(|v| *v = 1.5);
    b
}

impl ScenarioSpec {
    /// The six standard simulation settings, each with 100 training,
    /// validation and test rows and noise SD 1.5.
    pub fn example(id: u32) -> Result<Self> {
        let (p, r, structure, beta0) = match id {
            1 => (30, 0.5, Structure::Ar1, graded_beta(30)),
            2 => (30, 0.95, Structure::Ar1, graded_beta(30)),
            3 => (30, 0.0, Structure::LatentGroups, flat_beta(30)),
            4 => (200, 0.5, Structure::BlockAr1, graded_beta(200)),
            5 => (200, 0.95, Structure::BlockAr1, graded_beta(200)),
            6 => (500, 0.0, Structure::LatentGroupsWide, flat_beta(500)),
            _ => return Err(Error::InvalidSpec(format!("unknown scenario id {id}"))),
        };
        Ok(Self {
            id,
            p,
            sigma: 1.5,
            r,
            beta0,
            structure,
            n_train: 100,
            n_valid: 100,
            n_test: 100,
        })
    }

    pub fn with_sizes(mut self, n_train: usize, n_valid: usize, n_test: usize) -> Self {
        self.n_train = n_train;
        self.n_valid = n_valid;
        self.n_test = n_test;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.p == 0 || self.beta0.len() != self.p {
            return bad(format!(
                "beta0 has length {} for p = {}",
                self.beta0.len(),
                self.p
            ));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return bad(format!("sigma = {}", self.sigma));
        }
        if self.n_train < 2 || self.n_valid == 0 || self.n_test == 0 {
            return bad("need n_train >= 2 and nonempty validation and test sets".into());
        }
        match self.structure {
            Structure::Ar1 | Structure::BlockAr1 if !(self.r.abs() < 1.0) => {
                return bad(format!(
                    "AR(1) correlation r = {} must lie in (-1, 1)",
                    self.r
                ));
            }
            Structure::BlockAr1 if self.p <= LEAD_BLOCK => {
                return bad(format!("block design needs p > {LEAD_BLOCK}"));
            }
            Structure::LatentGroups | Structure::LatentGroupsWide if self.p < LEAD_BLOCK => {
                return bad(format!("latent-group design needs p >= {LEAD_BLOCK}"));
            }
            _ => {}
        }
        Ok(())
    }

    /// Indices with nonzero true coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.p).filter(|&j| self.beta0[j] != 0.0).collect()
    }
}

/// `Sigma_ij = r^|i-j|`.
pub fn ar1_covariance(p: usize, r: f64) -> Matrix<f64> {
    let mut s = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            s[(i, j)] = r.powi((i as i32 - j as i32).abs());
        }
    }
    s
}

fn normals(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Multiplies each row of iid normals by the AR(1) Cholesky factor.
fn fill_ar1(
    x: &mut Matrix<f64>,
    cols: std::ops::Range<usize>,
    l: &Matrix<f64>,
    rng: &mut ChaCha8Rng,
) {
    let k = cols.len();
    for i in 0..x.nrows() {
        let z = normals(rng, k);
        for a in 0..k {
            let v: f64 = (0..=a).map(|b| l[(a, b)] * z[b]).sum();
            x[(i, cols.start + a)] = v;
        }
    }
}

fn fill_latent(x: &mut Matrix<f64>, rng: &mut ChaCha8Rng) {
    for i in 0..x.nrows() {
        for g in 0..LEAD_BLOCK / GROUP_SIZE {
            let z: f64 = StandardNormal.sample(rng);
            for k in 0..GROUP_SIZE {
                let e: f64 = StandardNormal.sample(rng);
                x[(i, g * GROUP_SIZE + k)] = z + LATENT_NOISE_SD * e;
            }
        }
    }
}

fn fill_iid(x: &mut Matrix<f64>, cols: std::ops::Range<usize>, rng: &mut ChaCha8Rng) {
    for i in 0..x.nrows() {
        for j in cols.clone() {
            x[(i, j)] = StandardNormal.sample(rng);
        }
    }
}

fn draw_covariates(
    spec: &ScenarioSpec,
    rows: usize,
    factors: &[Matrix<f64>],
    rng: &mut ChaCha8Rng,
) -> Matrix<f64> {
    let p = spec.p;
    let mut x = Matrix::zeros(rows, p);
    match spec.structure {
        Structure::Ar1 => fill_ar1(&mut x, 0..p, &factors[0], rng),
        Structure::BlockAr1 => {
            fill_ar1(&mut x, 0..LEAD_BLOCK, &factors[0], rng);
            fill_ar1(&mut x, LEAD_BLOCK..p, &factors[1], rng);
        }
        Structure::LatentGroups | Structure::LatentGroupsWide => {
            fill_latent(&mut x, rng);
            fill_iid(&mut x, LEAD_BLOCK..p, rng);
        }
    }
    x
}

/// Generator stream for the fixed design; replicate `r` uses stream `r + 1`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Covariates drawn once per `(spec, seed)` and kept fixed across replicates.
#[derive(Debug, Clone)]
pub struct ScenarioDesign {
    pub spec: ScenarioSpec,
    pub seed: u64,
    pub x_train: Matrix<f64>,
    pub x_valid: Matrix<f64>,
    pub x_test: Matrix<f64>,
    /// Training-set transform; `beta0` acts on covariates mapped through it.
    pub transform: Standardization<f64>,
    signal_train: Vec<f64>,
    signal_valid: Vec<f64>,
    signal_test: Vec<f64>,
}

/// One replicate: standardised training data, raw validation and test data.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub index: usize,
    pub train: Dataset<f64>,
    pub valid: Dataset<f64>,
    pub test: Dataset<f64>,
}

impl ScenarioDesign {
    pub fn new(spec: &ScenarioSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let factors: Vec<Matrix<f64>> = match spec.structure {
            Structure::Ar1 => vec![Cholesky::new(&ar1_covariance(spec.p, spec.r))?
                .factor()
                .clone()],
            Structure::BlockAr1 => vec![
                Cholesky::new(&ar1_covariance(LEAD_BLOCK, spec.r))?
                    .factor()
                    .clone(),
                Cholesky::new(&ar1_covariance(spec.p - LEAD_BLOCK, spec.r))?
                    .factor()
                    .clone(),
            ],
            _ => Vec::new(),
        };
        let mut rng = stream_rng(seed, 0);
        let x_train = draw_covariates(spec, spec.n_train, &factors, &mut rng);
        let x_valid = draw_covariates(spec, spec.n_valid, &factors, &mut rng);
        let x_test = draw_covariates(spec, spec.n_test, &factors, &mut rng);
        let transform = standardize(&Dataset::new(x_train.clone(), vec![0.0; spec.n_train])?)?
            .standardization()
            .cloned()
            .expect("standardize records its transform");
        let signal = |x: &Matrix<f64>| -> Result<Vec<f64>> {
            Ok(transform.transform_matrix(x)?.mul_vec(&spec.beta0))
        };
        Ok(Self {
            signal_train: signal(&x_train)?,
            signal_valid: signal(&x_valid)?,
            signal_test: signal(&x_test)?,
            spec: spec.clone(),
            seed,
            x_train,
            x_valid,
            x_test,
            transform,
        })
    }

    /// Fresh noise on the fixed design. Deterministic in `(spec, seed, index)`.
    pub fn replicate(&self, index: usize) -> Result<Replicate> {
        let mut rng = stream_rng(self.seed, index as u64 + 1);
        let sigma = self.spec.sigma;
        let mut respond = |signal: &[f64]| -> Vec<f64> {
            signal
                .iter()
                .map(|&s| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    s + sigma * e
                })
                .collect()
        };
        let y_train = respond(&self.signal_train);
        let y_valid = respond(&self.signal_valid);
        let y_test = respond(&self.signal_test);
        Ok(Replicate {
            index,
            train: standardize(&Dataset::new(self.x_train.clone(), y_train)?)?,
            valid: Dataset::new(self.x_valid.clone(), y_valid)?,
            test: Dataset::new(self.x_test.clone(), y_test)?,
        })
    }
}

/// Training (standardised), validation and test sets of replicate 0, plus `beta0`.
pub fn generate_scenario(
    spec: &ScenarioSpec,
    seed: u64,
) -> Result<(Dataset<f64>, Dataset<f64>, Dataset<f64>, Vec<f64>)> {
    let design = ScenarioDesign::new(spec, seed)?;
    let rep = design.replicate(0)?;
    Ok((rep.train, rep.valid, rep.test, spec.beta0.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn correlation(x: &Matrix<f64>, a: usize, b: usize) -> f64 {
        let n = x.nrows() as f64;
        let (ca, cb) = (x.column(a), x.column(b));
        let ma = ca.iter().sum::<f64>() / n;
        let mb = cb.iter().sum::<f64>() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (u, v) in ca.iter().zip(cb) {
            sab += (u - ma) * (v - mb);
            saa += (u - ma) * (u - ma);
            sbb += (v - mb) * (v - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn example_specs() {
        let s1 = ScenarioSpec::example(1).unwrap();
        assert_eq!(s1.beta0.iter().filter(|&&b| b == 2.5).count(), 5);
        assert_eq!(s1.beta0.iter().filter(|&&b| b == 0.0).count(), 15);
        assert_eq!(ScenarioSpec::example(6).unwrap().p, 500);
        assert!(ScenarioSpec::example(7).is_err());
        for id in 1..=6 {
            ScenarioSpec::example(id).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn ar1_correlation_is_near_r() {
        let spec = ScenarioSpec::example(1).unwrap();
        let d = ScenarioDesign::new(&spec, 42).unwrap();
        let c = correlation(&d.x_train, 0, 1);
        assert!((c - 0.5).abs() < 0.2, "{c}");
    }

    #[test]
    fn latent_groups_are_nearly_collinear() {
        let spec = ScenarioSpec::example(3).unwrap();
        let d = ScenarioDesign::new(&spec, 42).unwrap();
        let c = correlation(&d.x_train, 0, 4);
        assert!((c - 1.0 / 1.01).abs() < 0.01, "{c}");
        assert!(correlation(&d.x_train, 0, 5).abs() < 0.4);
    }

    #[test]
    fn design_is_deterministic_and_fixed() {
        let spec = ScenarioSpec::example(4).unwrap();
        let a = ScenarioDesign::new(&spec, 9).unwrap();
        let b = ScenarioDesign::new(&spec, 9).unwrap();
        assert_eq!(a.x_train, b.x_train);
        assert_eq!(a.x_test, b.x_test);
        let r0 = a.replicate(0).unwrap();
        let r1 = a.replicate(1).unwrap();
        assert_eq!(r0.valid.x(), r1.valid.x());
        assert_ne!(r0.valid.y(), r1.valid.y());
        assert_eq!(a.replicate(1).unwrap().test.y(), r1.test.y());
    }

    #[test]
    fn ar1_cholesky_reproduces_covariance() {
        for &(p, r) in &[(30, 0.5), (200, 0.95), (500, 0.5)] {
            let s = ar1_covariance(p, r);
            let l = Cholesky::new(&s).unwrap().factor().clone();
            let llt = l.matmul(&l.transpose());
            assert!(llt.max_abs_diff(&s) <= 1e-10);
        }
    }
}
