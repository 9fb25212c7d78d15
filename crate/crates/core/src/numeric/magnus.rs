use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use super::generator::GeneratorFunction;
use super::linalg::{commutator, expm, op_norm, CMatrix};
use super::quadrature::{cumulative, gauss_legendre_on, QuadratureConfig};
use super::NumericError;
use crate::coefficients::alpha;
use crate::trees::{enumerate, Tree};

/// Highest order evaluated from trees.
pub const MAX_TREE_ORDER: usize = 6;

/// A Magnus term with its estimated quadrature error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermEstimate {
    pub n: usize,
    #[serde(skip)]
    pub matrix: CMatrix,
    pub norm: f64,
    pub error_estimate: f64,
    /// Grid intervals (tree route) or Gauss points per level (direct route).
    pub resolution: usize,
}

fn accept(err: f64, norm: f64, scale: f64, tol: f64) -> bool {
    err <= tol * norm.max(1e-4 * scale) + 1e-14 * scale
}

/// Tabulates `∫_0^{t_i} H_τ` for every subtree on one grid.
struct TreeEvaluator {
    samples: Vec<CMatrix>,
    step: f64,
    quad: QuadratureConfig,
    memo: HashMap<String, Rc<Vec<CMatrix>>>,
}

impl TreeEvaluator {
    fn new(gen: &GeneratorFunction, t: f64, intervals: usize, quad: &QuadratureConfig) -> Self {
        let step = t / intervals as f64;
        let samples = (0..=intervals)
            .map(|i| gen.evaluate(i as f64 * step))
            .collect();
        Self {
            samples,
            step,
            quad: quad.clone(),
            memo: HashMap::new(),
        }
    }

    /// `H_τ(t_i)`: the left-nested commutator of `A(t_i)` with the running
    /// integrals of the grafted subtrees.
    fn integrand(&mut self, tree: &Tree) -> Vec<CMatrix> {
        let mut values = self.samples.clone();
        for graft in tree.grafts() {
            let running = self.integral(graft);
            for (v, r) in values.iter_mut().zip(running.iter()) {
                *v = commutator(v, r);
            }
        }
        values
    }

    fn integral(&mut self, tree: &Tree) -> Rc<Vec<CMatrix>> {
        let key = tree.serialize();
        if let Some(table) = self.memo.get(&key) {
            return Rc::clone(table);
        }
        let integrand = self.integrand(tree);
        let table = Rc::new(cumulative(&integrand, self.step, self.quad.scheme));
        self.memo.insert(key, Rc::clone(&table));
        table
    }

    fn term(&mut self, n: usize) -> Result<CMatrix, NumericError> {
        let dim = self.samples[0].nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        let trees = enumerate(n).map_err(|e| NumericError::Quadrature(e.to_string()))?;
        for tree in trees.iter() {
            let a = alpha(tree);
            if a.is_zero() {
                continue;
            }
            let table = self.integral(tree);
            sum += table.last().expect("non-empty grid").scale(a.to_f64());
        }
        Ok(sum)
    }
}

fn check_order(n: usize, max: usize) -> Result<(), NumericError> {
    if n == 0 || n > max {
        return Err(NumericError::InvalidOrder { n, max });
    }
    Ok(())
}

/// `M_1 … M_{n_max}` from the tree expansion on a shared grid, refined by
/// doubling until every order meets the tolerance; the returned matrices are
/// Richardson-extrapolated.
pub fn magnus_terms_tree(
    n_max: usize,
    gen: &GeneratorFunction,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<Vec<TermEstimate>, NumericError> {
    check_order(n_max, MAX_TREE_ORDER)?;
    quad.validate()?;
    let ht = gen.h_max(t) * t;
    let factor = 2f64.powi(quad.scheme.order()) - 1.0;
    let evaluate = |intervals: usize| -> Result<Vec<CMatrix>, NumericError> {
        let mut ev = TreeEvaluator::new(gen, t, intervals, quad);
        (1..=n_max).map(|n| ev.term(n)).collect()
    };
    let mut intervals = quad.grid_points;
    let mut coarse = evaluate(intervals)?;
    let mut worst = f64::INFINITY;
    for _ in 0..quad.max_refinements {
        intervals *= 2;
        let fine = evaluate(intervals)?;
        let estimates: Vec<TermEstimate> = fine
            .iter()
            .zip(&coarse)
            .enumerate()
            .map(|(i, (f, c))| {
                let correction = (f - c).unscale(factor);
                let matrix = f + &correction;
                TermEstimate {
                    n: i + 1,
                    norm: op_norm(&matrix),
                    error_estimate: op_norm(&correction),
                    matrix,
                    resolution: intervals,
                }
            })
            .collect();
        let ok = estimates.iter().all(|e| {
            accept(
                e.error_estimate,
                e.norm,
                ht.powi(e.n as i32),
                quad.tolerance,
            )
        });
        if ok {
            return Ok(estimates);
        }
        worst = estimates
            .iter()
            .map(|e| e.error_estimate / e.norm.max(1e-300))
            .fold(0.0, f64::max);
        coarse = fine;
    }
    Err(NumericError::NonConvergence {
        what: format!("tree-based Magnus terms through order {n_max}"),
        achieved: worst,
        tolerance: quad.tolerance,
    })
}

/// `M_n` from the tree expansion.
pub fn magnus_term_tree(
    n: usize,
    gen: &GeneratorFunction,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<TermEstimate, NumericError> {
    check_order(n, MAX_TREE_ORDER)?;
    let mut all = magnus_terms_tree(n, gen, t, quad)?;
    Ok(all.pop().expect("n >= 1"))
}

/// `∫_0^{b} f` by `q`-point Gauss–Legendre.
fn gl_integral<F: FnMut(f64) -> CMatrix>(q: usize, b: f64, dim: usize, mut f: F) -> CMatrix {
    let (nodes, weights) = gauss_legendre_on(q, b);
    let mut sum = CMatrix::zeros(dim, dim);
    for (x, w) in nodes.iter().zip(&weights) {
        sum += f(*x).scale(*w);
    }
    sum
}

fn direct_at(n: usize, gen: &GeneratorFunction, t: f64, q: usize) -> CMatrix {
    let d = gen.dimension();
    let a = |s: f64| gen.evaluate(s);
    let c = commutator;
    match n {
        1 => gl_integral(q, t, d, a),
        2 => gl_integral(q, t, d, |t1| {
            let a1 = a(t1);
            let i2 = gl_integral(q, t1, d, a);
            c(&a1, &i2)
        })
        .scale(0.5),
        3 => gl_integral(q, t, d, |t1| {
            let a1 = a(t1);
            gl_integral(q, t1, d, |t2| {
                let a2 = a(t2);
                let i3 = gl_integral(q, t2, d, a);
                c(&a1, &c(&a2, &i3)) + c(&i3, &c(&a2, &a1))
            })
        })
        .unscale(6.0),
        4 => gl_integral(q, t, d, |t1| {
            let a1 = a(t1);
            gl_integral(q, t1, d, |t2| {
                let a2 = a(t2);
                gl_integral(q, t2, d, |t3| {
                    let a3 = a(t3);
                    let i4 = gl_integral(q, t3, d, a);
                    c(&c(&c(&a1, &a2), &a3), &i4)
                        + c(&a1, &c(&c(&a2, &a3), &i4))
                        + c(&a1, &c(&a2, &c(&a3, &i4)))
                        + c(&a2, &c(&a3, &c(&i4, &a1)))
                })
            })
        })
        .unscale(12.0),
        _ => unreachable!("order checked by caller"),
    }
}

const GAUSS_LEVELS: [usize; 7] = [8, 12, 16, 24, 32, 48, 64];

/// `M_1 … M_4` from the textbook nested time-ordered integrals, each simplex
/// integral by nested Gauss–Legendre quadrature; the point count is raised
/// until successive levels agree.
pub fn magnus_term_direct(
    n: usize,
    gen: &GeneratorFunction,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<TermEstimate, NumericError> {
    check_order(n, 4)?;
    quad.validate()?;
    let scale = (gen.h_max(t) * t).powi(n as i32);
    let levels: Vec<usize> = GAUSS_LEVELS
        .iter()
        .copied()
        .filter(|&q| n < 4 || q <= 32)
        .collect();
    let mut prev = direct_at(n, gen, t, levels[0]);
    let mut diff = f64::INFINITY;
    for &q in &levels[1..] {
        let next = direct_at(n, gen, t, q);
        diff = op_norm(&(&next - &prev));
        let norm = op_norm(&next);
        if accept(diff, norm, scale, quad.tolerance) {
            return Ok(TermEstimate {
                n,
                norm,
                error_estimate: diff,
                matrix: next,
                resolution: q,
            });
        }
        prev = next;
    }
    Err(NumericError::NonConvergence {
        what: format!("direct M_{n}"),
        achieved: diff,
        tolerance: quad.tolerance,
    })
}

fn midpoint_product(gen: &GeneratorFunction, t: f64, steps: usize) -> CMatrix {
    let h = t / steps as f64;
    let mut u = CMatrix::identity(gen.dimension(), gen.dimension());
    for k in 0..steps {
        let mid = (k as f64 + 0.5) * h;
        u = expm(&gen.evaluate(mid).scale(h)) * u;
    }
    u
}

/// Maximum number of step doublings of the reference propagator.
pub const MAX_PROPAGATOR_LEVELS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub matrix: CMatrix,
    pub error_estimate: f64,
    pub steps: usize,
}

/// Time-ordered exponential `T exp ∫_0^t A` as a product of midpoint
/// exponentials, Romberg-extrapolated in `h²` until successive diagonal
/// entries differ by less than `tol` in operator norm.
pub fn reference_propagator(
    gen: &GeneratorFunction,
    t: f64,
    tol: f64,
) -> Result<Propagator, NumericError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(NumericError::Quadrature(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut steps = 8;
    let mut table: Vec<CMatrix> = vec![midpoint_product(gen, t, steps)];
    let mut diff = f64::INFINITY;
    for _ in 0..MAX_PROPAGATOR_LEVELS {
        steps *= 2;
        let mut row = vec![midpoint_product(gen, t, steps)];
        for j in 1..=table.len() {
            let factor = 4f64.powi(j as i32) - 1.0;
            let improved = &row[j - 1] + (&row[j - 1] - &table[j - 1]).unscale(factor);
            row.push(improved);
        }
        let best = row.last().expect("non-empty");
        diff = op_norm(&(best - table.last().expect("non-empty")));
        if diff < tol {
            return Ok(Propagator {
                matrix: best.clone(),
                error_estimate: diff,
                steps,
            });
        }
        table = row;
    }
    Err(NumericError::NonConvergence {
        what: "reference propagator".into(),
        achieved: diff,
        tolerance: tol,
    })
}

/// `exp(Σ_{n ≤ N} M_n)` with tree-based terms.
pub fn truncated_propagator(
    order: usize,
    gen: &GeneratorFunction,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<CMatrix, NumericError> {
    let terms = magnus_terms_tree(order, gen, t, quad)?;
    Ok(expm(&exponent_sum(&terms, order)))
}

/// `𝓜^(N) = Σ_{n ≤ N} M_n` from precomputed terms.
pub fn exponent_sum(terms: &[TermEstimate], order: usize) -> CMatrix {
    let d = terms[0].matrix.nrows();
    terms
        .iter()
        .filter(|e| e.n <= order)
        .fold(CMatrix::zeros(d, d), |acc, e| acc + &e.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::generator::{random_generator, Envelope};
    use crate::numeric::linalg::{anti_hermitian_defect, pauli_x, pauli_z, unitarity_defect, I};
    use crate::numeric::quadrature::Scheme;

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        op_norm(&(a - b)) / op_norm(b).max(1e-300)
    }

    fn x_plus_tz() -> GeneratorFunction {
        GeneratorFunction::pauli(
            Some(Envelope::constant(1.0)),
            None,
            Some(Envelope::Polynomial {
                coefficients: vec![0.0, 1.0],
            }),
        )
    }

    #[test]
    fn first_term_is_integral() {
        let h = pauli_x().scale(0.7) + pauli_z().scale(-0.2);
        let g = GeneratorFunction::constant(h.clone()).unwrap();
        let m1 = magnus_term_tree(1, &g, 1.5, &quad()).unwrap();
        let expected = h.map(|v| -I * v * 1.5);
        assert!(op_norm(&(&m1.matrix - &expected)) < 1e-14);
        let d1 = magnus_term_direct(1, &g, 1.5, &quad()).unwrap();
        assert!(op_norm(&(&d1.matrix - &expected)) < 1e-14);
    }

    #[test]
    fn constant_hamiltonian_has_no_higher_terms() {
        let g = GeneratorFunction::constant(pauli_x() + pauli_z().scale(0.5)).unwrap();
        for e in magnus_terms_tree(5, &g, 1.0, &quad())
            .unwrap()
            .iter()
            .skip(1)
        {
            assert!(e.norm < 1e-12, "n={}", e.n);
        }
        for n in 2..=4 {
            assert!(magnus_term_direct(n, &g, 1.0, &quad()).unwrap().norm < 1e-12);
        }
    }

    #[test]
    fn commuting_family_second_term_vanishes() {
        let g = GeneratorFunction::pauli(
            Some(Envelope::Sinusoid {
                amplitude: 1.0,
                frequency: 3.0,
                phase: 0.2,
            }),
            None,
            None,
        );
        assert!(magnus_term_tree(2, &g, 1.0, &quad()).unwrap().norm < 1e-12);
    }

    #[test]
    fn second_term_matches_closed_form() {
        let g = x_plus_tz();
        let t = 0.8;
        let m2 = magnus_term_tree(2, &g, t, &quad()).unwrap();
        // [A(t1), A(t2)] = −(t2 − t1)[σx, σz] and ∫_0^t∫_0^{t1} (t2 − t1) = −t³/6
        let expected = commutator(&pauli_x(), &pauli_z()).scale(t.powi(3) / 12.0);
        assert!(rel_diff(&m2.matrix, &expected) < 1e-10);
        let d2 = magnus_term_direct(2, &g, t, &quad()).unwrap();
        assert!(rel_diff(&d2.matrix, &expected) < 1e-10);
    }

    #[test]
    fn tree_and_direct_agree_through_order_four() {
        for seed in 0..3 {
            let g = random_generator(2, 0.6, seed).unwrap();
            let trees = magnus_terms_tree(4, &g, 1.0, &quad()).unwrap();
            for n in 1..=4 {
                let d = magnus_term_direct(n, &g, 1.0, &quad()).unwrap();
                let r = rel_diff(&trees[n - 1].matrix, &d.matrix);
                assert!(r < 1e-6, "seed={seed} n={n}: {r}");
            }
        }
    }

    #[test]
    fn terms_are_anti_hermitian() {
        let g = random_generator(3, 0.5, 4).unwrap();
        for e in magnus_terms_tree(5, &g, 1.0, &quad()).unwrap() {
            assert!(
                anti_hermitian_defect(&e.matrix) < 1e-10 * e.norm.max(1e-6),
                "n={}",
                e.n
            );
        }
    }

    #[test]
    fn halving_matches_scheme_order() {
        let g = random_generator(2, 0.8, 9).unwrap();
        let reference = magnus_term_tree(3, &g, 1.0, &QuadratureConfig::new(64, 1e-13).unwrap())
            .unwrap()
            .matrix;
        for scheme in [Scheme::Trapezoid, Scheme::Cubic] {
            let q = QuadratureConfig {
                scheme,
                ..QuadratureConfig::default()
            };
            let defect = |m: usize| {
                let mut ev = TreeEvaluator::new(&g, 1.0, m, &q);
                op_norm(&(ev.term(3).unwrap() - &reference))
            };
            let ratio = defect(32) / defect(64);
            let expected = 2f64.powi(scheme.order());
            assert!((ratio / expected - 1.0).abs() < 0.2, "{scheme:?}: {ratio}");
        }
    }

    #[test]
    fn reference_propagator_constant_and_commuting() {
        let h = pauli_x().scale(0.4) + pauli_z().scale(0.9);
        let g = GeneratorFunction::constant(h.clone()).unwrap();
        let u = reference_propagator(&g, 1.3, 1e-12).unwrap();
        let exact = expm(&h.map(|v| -I * v * 1.3));
        assert!(op_norm(&(&u.matrix - &exact)) < 1e-12);

        let env = Envelope::Polynomial {
            coefficients: vec![0.5, -1.0, 2.0],
        };
        let g = GeneratorFunction::pauli(None, None, Some(env));
        let u = reference_propagator(&g, 1.0, 1e-12).unwrap();
        let integral = 0.5 - 0.5 + 2.0 / 3.0;
        let exact = expm(&pauli_z().map(|v| -I * v * integral));
        assert!(op_norm(&(&u.matrix - &exact)) < 1e-11);
    }

    #[test]
    fn reference_propagator_is_unitary() {
        let g = random_generator(4, 0.9, 3).unwrap();
        let tol = 1e-11;
        let u = reference_propagator(&g, 1.0, tol).unwrap();
        assert!(unitarity_defect(&u.matrix) < 10.0 * tol);
        assert!(reference_propagator(&g, 1.0, 0.0).is_err());
    }

    #[test]
    fn truncation_converges_with_order() {
        let g = random_generator(2, 0.5, 21).unwrap();
        let u = reference_propagator(&g, 1.0, 1e-13).unwrap().matrix;
        let terms = magnus_terms_tree(5, &g, 1.0, &quad()).unwrap();
        let errors: Vec<f64> = (1..=5)
            .map(|n| op_norm(&(expm(&exponent_sum(&terms, n)) - &u)))
            .collect();
        for w in errors.windows(2) {
            assert!(w[1] < w[0], "{errors:?}");
        }
        for n in 1..=4 {
            let un = truncated_propagator(n, &g, 1.0, &quad()).unwrap();
            assert!(unitarity_defect(&un) < 1e-10);
        }
    }

    #[test]
    fn order_limits() {
        let g = x_plus_tz();
        assert!(matches!(
            magnus_term_direct(5, &g, 1.0, &quad()),
            Err(NumericError::InvalidOrder { n: 5, max: 4 })
        ));
        assert!(magnus_term_tree(0, &g, 1.0, &quad()).is_err());
        assert!(magnus_term_tree(7, &g, 1.0, &quad()).is_err());
    }

    #[test]
    fn refinement_failure_is_reported() {
        let g = random_generator(2, 0.9, 1).unwrap();
        let q = QuadratureConfig {
            tolerance: 1e-30,
            max_refinements: 2,
            ..QuadratureConfig::default()
        };
        assert!(matches!(
            magnus_term_tree(3, &g, 1.0, &q),
            Err(NumericError::NonConvergence { .. })
        ));
    }
}
