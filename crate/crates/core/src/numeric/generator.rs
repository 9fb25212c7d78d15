use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::linalg::{op_norm, pauli_x, pauli_y, pauli_z, CMatrix, I};
use super::NumericError;
use crate::bounds::DELTA_XI;

/// Scalar time profile `g(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Envelope {
    /// `Σ_k c_k t^k`.
    Polynomial { coefficients: Vec<f64> },
    /// `amplitude · cos(frequency·t + phase)`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
}

impl Envelope {
    pub fn constant(c: f64) -> Self {
        Envelope::Polynomial {
            coefficients: vec![c],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Envelope::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            Envelope::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).cos(),
        }
    }

    /// Upper bound on `sup_{[0, t]} |g|`: `Σ |c_k| t^k` for polynomials;
    /// exact for sinusoids.
    pub fn sup_bound(&self, t: f64) -> f64 {
        match self {
            Envelope::Polynomial { coefficients } => coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * t + c.abs()),
            Envelope::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => {
                let (a, b) = (*phase, frequency * t + phase);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                // a multiple of π in [lo, hi] is a peak of |cos|
                let k = (lo / std::f64::consts::PI).ceil();
                if k * std::f64::consts::PI <= hi {
                    amplitude.abs()
                } else {
                    amplitude.abs() * lo.cos().abs().max(hi.cos().abs())
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Envelope::Polynomial { coefficients } => coefficients.iter().skip(1).all(|c| *c == 0.0),
            Envelope::Sinusoid {
                amplitude,
                frequency,
                ..
            } => *amplitude == 0.0 || *frequency == 0.0,
        }
    }
}

/// `H(t) = Σ_j g_j(t) P_j` with Hermitian `P_j`; the generator is
/// `A(t) = −i H(t)`.
#[derive(Debug, Clone)]
pub struct GeneratorFunction {
    dimension: usize,
    terms: Vec<(Envelope, CMatrix)>,
}

fn hermitian_defect(p: &CMatrix) -> f64 {
    op_norm(&(p - p.adjoint()))
}

impl GeneratorFunction {
    pub fn new(dimension: usize, terms: Vec<(Envelope, CMatrix)>) -> Result<Self, NumericError> {
        if dimension == 0 {
            return Err(NumericError::Dimension(
                "dimension must be at least 1".into(),
            ));
        }
        for (_, p) in &terms {
            if p.nrows() != dimension || p.ncols() != dimension {
                return Err(NumericError::Dimension(format!(
                    "term matrix is {}x{}, expected {dimension}x{dimension}",
                    p.nrows(),
                    p.ncols()
                )));
            }
            if hermitian_defect(p) > 1e-12 * op_norm(p).max(1.0) {
                return Err(NumericError::NotHermitian);
            }
        }
        Ok(Self { dimension, terms })
    }

    /// `H(t) = g_x σ_x + g_y σ_y + g_z σ_z`; `None` drops a component.
    pub fn pauli(gx: Option<Envelope>, gy: Option<Envelope>, gz: Option<Envelope>) -> Self {
        let terms = [(gx, pauli_x()), (gy, pauli_y()), (gz, pauli_z())]
            .into_iter()
            .filter_map(|(g, p)| g.map(|g| (g, p)))
            .collect();
        Self {
            dimension: 2,
            terms,
        }
    }

    /// Constant `H`.
    pub fn constant(h: CMatrix) -> Result<Self, NumericError> {
        let d = h.nrows();
        Self::new(d, vec![(Envelope::constant(1.0), h)])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[(Envelope, CMatrix)] {
        &self.terms
    }

    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        let mut h = CMatrix::zeros(self.dimension, self.dimension);
        for (g, p) in &self.terms {
            h += p.scale(g.eval(t));
        }
        h
    }

    /// `A(t) = −i H(t)`.
    pub fn evaluate(&self, t: f64) -> CMatrix {
        self.hamiltonian(t).map(|v| -I * v)
    }

    /// `Σ_j sup|g_j| · ‖P_j‖`, an upper bound on `sup_{[0,t]} ‖H‖`.
    pub fn h_max(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(g, p)| g.sup_bound(t) * op_norm(p))
            .sum()
    }

    /// `H` commutes with itself at all times when every envelope is constant.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(g, _)| g.is_constant())
    }

    /// Multiplies every envelope by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(g, p)| {
                let g = match g {
                    Envelope::Polynomial { coefficients } => Envelope::Polynomial {
                        coefficients: coefficients.iter().map(|c| c * s).collect(),
                    },
                    Envelope::Sinusoid {
                        amplitude,
                        frequency,
                        phase,
                    } => Envelope::Sinusoid {
                        amplitude: amplitude * s,
                        frequency: *frequency,
                        phase: *phase,
                    },
                };
                (g, p.clone())
            })
            .collect();
        Self {
            dimension: self.dimension,
            terms,
        }
    }

    /// Rescaled so that `δ_ξ · h_max · t = x`.
    pub fn normalized_to(&self, x: f64, t: f64) -> Result<Self, NumericError> {
        let h = self.h_max(t);
        if (h.is_nan() || h <= 0.0) || (t.is_nan() || t <= 0.0) {
            return Err(NumericError::Config {
                line: None,
                message: "cannot rescale a zero generator".into(),
            });
        }
        Ok(self.scaled(x / (DELTA_XI * h * t)))
    }
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let h = (&m + m.adjoint()).scale(0.5);
    let n = op_norm(&h);
    h.unscale(n)
}

/// Seeded random `H(t) = Σ_j g_j(t) P_j` on `[0, 1]` normalized to
/// `δ_ξ h_max = x`: Pauli matrices with quadratic envelopes in dimension 2,
/// three random unit-norm Hermitian matrices otherwise.
pub fn random_generator(
    dimension: usize,
    x: f64,
    seed: u64,
) -> Result<GeneratorFunction, NumericError> {
    if !(1..=8).contains(&dimension) {
        return Err(NumericError::Dimension(format!(
            "random generators support dimensions 1 to 8, got {dimension}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let envelope = |rng: &mut ChaCha8Rng| Envelope::Polynomial {
        coefficients: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
    };
    let g = if dimension == 2 {
        GeneratorFunction::pauli(
            Some(envelope(&mut rng)),
            Some(envelope(&mut rng)),
            Some(envelope(&mut rng)),
        )
    } else {
        let terms = (0..3)
            .map(|_| {
                let g = envelope(&mut rng);
                (g, random_hermitian(dimension, &mut rng))
            })
            .collect();
        GeneratorFunction::new(dimension, terms)?
    };
    g.normalized_to(x, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linalg::anti_hermitian_defect;

    #[test]
    fn envelope_eval() {
        let p = Envelope::Polynomial {
            coefficients: vec![1.0, -2.0, 0.5],
        };
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 2.0);
        assert_eq!(p.sup_bound(2.0), 1.0 + 4.0 + 2.0);
        let s = Envelope::Sinusoid {
            amplitude: -2.0,
            frequency: 1.0,
            phase: 0.3,
        };
        assert!((s.eval(0.5) + 2.0 * 0.8f64.cos()).abs() < 1e-15);
        assert!((s.sup_bound(1.0) - 2.0 * 0.3f64.cos()).abs() < 1e-15);
        assert_eq!(s.sup_bound(4.0), 2.0);
    }

    #[test]
    fn sinusoid_sup_matches_sampling() {
        for (freq, phase, t) in [(3.0, 0.1, 0.4), (-2.0, 1.0, 0.7), (0.5, 2.0, 3.0)] {
            let s = Envelope::Sinusoid {
                amplitude: 1.5,
                frequency: freq,
                phase,
            };
            let sampled = (0..=10000)
                .map(|i| s.eval(t * i as f64 / 10000.0).abs())
                .fold(0.0, f64::max);
            let bound = s.sup_bound(t);
            assert!(bound >= sampled - 1e-12 && bound - sampled < 1e-6);
        }
    }

    #[test]
    fn generator_is_anti_hermitian() {
        let g = random_generator(4, 0.3, 7).unwrap();
        for i in 0..10 {
            let a = g.evaluate(i as f64 / 10.0);
            assert!(anti_hermitian_defect(&a) < 1e-14);
        }
    }

    #[test]
    fn h_max_dominates_samples_and_normalizes() {
        for seed in 0..5 {
            let g = random_generator(2, 0.3, seed).unwrap();
            assert!((DELTA_XI * g.h_max(1.0) - 0.3).abs() < 1e-14);
            let sampled = (0..=200)
                .map(|i| op_norm(&g.hamiltonian(i as f64 / 200.0)))
                .fold(0.0, f64::max);
            assert!(sampled <= g.h_max(1.0) + 1e-12);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_generator(3, 0.5, 11).unwrap().evaluate(0.3);
        let b = random_generator(3, 0.5, 11).unwrap().evaluate(0.3);
        let c = random_generator(3, 0.5, 12).unwrap().evaluate(0.3);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_terms() {
        let bad = CMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
        assert!(matches!(
            GeneratorFunction::new(2, vec![(Envelope::constant(1.0), bad)]),
            Err(NumericError::NotHermitian)
        ));
        assert!(GeneratorFunction::new(3, vec![(Envelope::constant(1.0), pauli_x())]).is_err());
        assert!(random_generator(9, 0.3, 0).is_err());
    }
}
