//! Constructors for cyclic, hypercyclic, parity-family, product, and seeded
//! random systems.
//!
//! Generated systems use the fixed naming convention `q1..qn` for contents
//! and `c1..cn` for contexts, so identical parameters always produce
//! identical, diffable systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::system::{ContextSpec, System};

/// Order (bunch size) and rank (number of contents = number of contexts) of
/// a hypercyclic incidence pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemShape {
    pub order: usize,
    pub rank: usize,
}

impl SystemShape {
    pub fn new(order: usize, rank: usize) -> Result<Self> {
        let shape = SystemShape { order, rank };
        shape.check()?;
        Ok(shape)
    }

    fn check(&self) -> Result<()> {
        if self.order < 1 || self.rank < self.order {
            return Err(Error::Shape(format!(
                "need rank >= order >= 1, got order {} rank {}",
                self.order, self.rank
            )));
        }
        Ok(())
    }
}

fn check_pmf(pmf: &[f64], k: usize, what: &str) -> Result<()> {
    if pmf.len() != 1 << k {
        return Err(Error::Shape(format!(
            "{what}: pmf has {} entries, expected {}",
            pmf.len(),
            1 << k
        )));
    }
    Ok(())
}

/// Build the hypercyclic system of the given shape: context `ci` measures
/// the `order` cyclically consecutive contents starting at `qi`.
pub fn make_hypercyclic(shape: SystemShape, bunch_pmfs: &[Vec<f64>]) -> Result<System> {
    shape.check()?;
    let (k, n) = (shape.order, shape.rank);
    if bunch_pmfs.len() != n {
        return Err(Error::Shape(format!(
            "expected {n} bunch pmfs, got {}",
            bunch_pmfs.len()
        )));
    }
    for (i, pmf) in bunch_pmfs.iter().enumerate() {
        check_pmf(pmf, k, &format!("bunch {}", i + 1))?;
    }
    let contents: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let contexts = (0..n)
        .map(|i| {
            let bunch: Vec<String> = (0..k).map(|j| format!("q{}", (i + j) % n + 1)).collect();
            ContextSpec::new(format!("c{}", i + 1), bunch, bunch_pmfs[i].clone())
        })
        .collect();
    Ok(System::new(format!("hypercyclic-{k}-{n}"), contents, contexts))
}

/// Build the cyclic system of rank `n`: context `ci` measures `(qi, qi⊕1)`.
///
/// `n = 1` degenerates to a single context measuring only `q1` (the cyclic
/// shift is the identity), with a length-2 pmf.
pub fn make_cyclic(n: usize, bunch_pmfs: &[Vec<f64>]) -> Result<System> {
    if n == 0 {
        return Err(Error::Shape("cyclic rank must be at least 1".into()));
    }
    if n == 1 {
        if bunch_pmfs.len() != 1 {
            return Err(Error::Shape(format!(
                "expected 1 bunch pmf, got {}",
                bunch_pmfs.len()
            )));
        }
        check_pmf(&bunch_pmfs[0], 1, "bunch 1")?;
        let mut sys = make_hypercyclic(SystemShape { order: 1, rank: 1 }, bunch_pmfs)?;
        sys.name = "cyclic-1".into();
        return Ok(sys);
    }
    let mut sys = make_hypercyclic(SystemShape { order: 2, rank: n }, bunch_pmfs)?;
    sys.name = format!("cyclic-{n}");
    Ok(sys)
}

/// The bunch pmf `2^-k + eps * (-1)^popcount(atom)`: the unique family of
/// order-`k` pmfs whose proper-subset marginals are all uniform.
pub fn parity_bunch(k: usize, eps: f64) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::Domain("parity bunch needs order >= 1".into()));
    }
    let base = 1.0 / (1 << k) as f64;
    if !eps.is_finite() || eps.abs() > base {
        return Err(Error::Domain(format!(
            "|eps| = {} exceeds 2^-{k} = {base}",
            eps.abs()
        )));
    }
    Ok((0..1usize << k)
        .map(|atom| {
            if atom.count_ones() % 2 == 0 {
                base + eps
            } else {
                base - eps
            }
        })
        .collect())
}

/// Hypercyclic system whose bunch `i` is `parity_bunch(order, eps[i])`.
/// Every such system is consistently connected with all 1-marginals 0.5.
pub fn parity_system(shape: SystemShape, eps: &[f64]) -> Result<System> {
    shape.check()?;
    if eps.len() != shape.rank {
        return Err(Error::Shape(format!(
            "expected {} eps values, got {}",
            shape.rank,
            eps.len()
        )));
    }
    let pmfs = eps
        .iter()
        .map(|&e| parity_bunch(shape.order, e))
        .collect::<Result<Vec<_>>>()?;
    let mut sys = make_hypercyclic(shape, &pmfs)?;
    sys.name = format!("parity-{}-{}", shape.order, shape.rank);
    Ok(sys)
}

/// Hypercyclic system where every bunch is the product of its contents'
/// Bernoulli marginals `probs[j] = Pr(qj = 1)`. Always noncontextual.
pub fn product_system(shape: SystemShape, probs: &[f64]) -> Result<System> {
    shape.check()?;
    if probs.len() != shape.rank {
        return Err(Error::Shape(format!(
            "expected {} probabilities, got {}",
            shape.rank,
            probs.len()
        )));
    }
    for &p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
    }
    let (k, n) = (shape.order, shape.rank);
    let pmfs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let member_probs: Vec<f64> = (0..k).map(|j| probs[(i + j) % n]).collect();
            (0..1usize << k)
                .map(|atom| {
                    member_probs
                        .iter()
                        .enumerate()
                        .map(|(j, &p)| {
                            if (atom >> (k - 1 - j)) & 1 == 1 {
                                p
                            } else {
                                1.0 - p
                            }
                        })
                        .product()
                })
                .collect()
        })
        .collect();
    let mut sys = make_hypercyclic(shape, &pmfs)?;
    sys.name = format!("product-{k}-{n}");
    Ok(sys)
}

/// Hypercyclic system with each bunch pmf drawn uniformly on the simplex.
///
/// Sampling is fully documented and platform independent: a ChaCha12 stream
/// seeded with `seed` yields `u ∈ [0, 1)` doubles in atom order per bunch;
/// each atom weight is the exponential variate `-ln(1 - u)` and the bunch is
/// normalized to sum 1. The same `(shape, seed)` always yields the same
/// system bit for bit.
pub fn random_system(shape: SystemShape, seed: u64) -> Result<System> {
    shape.check()?;
    let (k, n) = (shape.order, shape.rank);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let pmfs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut w: Vec<f64> = (0..1usize << k)
                .map(|_| {
                    let u: f64 = rng.random();
                    -(1.0 - u).ln()
                })
                .collect();
            let sum: f64 = w.iter().sum();
            if sum <= 0.0 {
                // all variates zero; cannot happen in practice
                w.iter_mut().for_each(|x| *x = 1.0);
                return w.iter().map(|_| 1.0 / (1 << k) as f64).collect();
            }
            w.iter_mut().for_each(|x| *x /= sum);
            w
        })
        .collect();
    let mut sys = make_hypercyclic(shape, &pmfs)?;
    sys.name = format!("random-{k}-{n}-s{seed}");
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{validate_system, is_consistently_connected,
                        is_strongly_consistently_connected, bunch_marginal};

    fn uniform(k: usize) -> Vec<f64> {
        vec![1.0 / (1 << k) as f64; 1 << k]
    }

    fn incidence(sys: &crate::system::System) -> Vec<Vec<&str>> {
        sys.contexts
            .iter()
            .map(|c| c.contents.iter().map(|s| s.as_str()).collect())
            .collect()
    }

    #[test]
    fn hypercyclic_3_4_incidence() {
        let sys = make_hypercyclic(
            SystemShape { order: 3, rank: 4 },
            &[uniform(3), uniform(3), uniform(3), uniform(3)],
        )
        .unwrap();
        assert_eq!(
            incidence(&sys),
            vec![
                vec!["q1", "q2", "q3"],
                vec!["q2", "q3", "q4"],
                vec!["q3", "q4", "q1"],
                vec!["q4", "q1", "q2"],
            ]
        );
        assert!(validate_system(&sys).is_valid());
    }

    #[test]
    fn hypercyclic_3_3_measures_everything() {
        let sys = make_hypercyclic(
            SystemShape { order: 3, rank: 3 },
            &[uniform(3), uniform(3), uniform(3)],
        )
        .unwrap();
        assert_eq!(
            incidence(&sys),
            vec![
                vec!["q1", "q2", "q3"],
                vec!["q2", "q3", "q1"],
                vec!["q3", "q1", "q2"],
            ]
        );
    }

    #[test]
    fn hypercyclic_3_5_incidence() {
        let sys = make_hypercyclic(
            SystemShape { order: 3, rank: 5 },
            &vec![uniform(3); 5],
        )
        .unwrap();
        assert_eq!(
            incidence(&sys),
            vec![
                vec!["q1", "q2", "q3"],
                vec!["q2", "q3", "q4"],
                vec!["q3", "q4", "q5"],
                vec!["q4", "q5", "q1"],
                vec!["q5", "q1", "q2"],
            ]
        );
    }

    #[test]
    fn order_two_reduces_to_cyclic() {
        let pmfs = vec![uniform(2); 5];
        let hyper = make_hypercyclic(SystemShape { order: 2, rank: 5 }, &pmfs).unwrap();
        let cyc = make_cyclic(5, &pmfs).unwrap();
        assert_eq!(hyper.contents, cyc.contents);
        assert_eq!(hyper.contexts, cyc.contexts);
    }

    #[test]
    fn cyclic_rank_2_and_4_incidence() {
        let c2 = make_cyclic(2, &[uniform(2), uniform(2)]).unwrap();
        assert_eq!(incidence(&c2), vec![vec!["q1", "q2"], vec!["q2", "q1"]]);

        let c4 = make_cyclic(4, &vec![uniform(2); 4]).unwrap();
        assert_eq!(
            incidence(&c4),
            vec![
                vec!["q1", "q2"],
                vec!["q2", "q3"],
                vec!["q3", "q4"],
                vec!["q4", "q1"],
            ]
        );
    }

    #[test]
    fn cyclic_rank_1_degenerates() {
        let sys = make_cyclic(1, &[vec![0.3, 0.7]]).unwrap();
        assert_eq!(incidence(&sys), vec![vec!["q1"]]);
        assert!(validate_system(&sys).is_valid());
    }

    #[test]
    fn hypercyclic_incidence_counts() {
        for (k, n) in [(2usize, 4usize), (3, 4), (3, 5), (2, 2)] {
            let sys =
                make_hypercyclic(SystemShape { order: k, rank: n }, &vec![uniform(k); n]).unwrap();
            for c in &sys.contexts {
                assert_eq!(c.contents.len(), k);
            }
            for q in &sys.contents {
                let count = sys
                    .contexts
                    .iter()
                    .filter(|c| c.contents.iter().any(|x| x == q))
                    .count();
                assert_eq!(count, k, "content {q} of ({k},{n})");
            }
        }
    }

    #[test]
    fn parity_bunch_values() {
        assert_eq!(parity_bunch(3, 0.0).unwrap(), vec![0.125; 8]);

        let extreme = parity_bunch(3, 0.125).unwrap();
        for (atom, &p) in extreme.iter().enumerate() {
            let expect = if atom.count_ones() % 2 == 0 { 0.25 } else { 0.0 };
            assert_eq!(p, expect);
        }

        let half = parity_bunch(3, 1.0 / 16.0).unwrap();
        for (atom, &p) in half.iter().enumerate() {
            let expect = if atom.count_ones() % 2 == 0 {
                3.0 / 16.0
            } else {
                1.0 / 16.0
            };
            assert_eq!(p, expect);
        }

        assert!(matches!(parity_bunch(3, 0.2), Err(Error::Domain(_))));
    }

    #[test]
    fn parity_bunch_proper_marginals_are_uniform() {
        // brute-force marginalization over every proper subset, k = 3
        let k = 3;
        for eps in [-0.125, -0.03, 0.0, 0.07, 0.125] {
            let sys = crate::system::System::new(
                "p",
                ["q1", "q2", "q3"],
                vec![crate::system::ContextSpec::new(
                    "c1",
                    ["q1", "q2", "q3"],
                    parity_bunch(k, eps).unwrap(),
                )],
            );
            let names = ["q1", "q2", "q3"];
            for mask in 1usize..(1 << k) - 1 {
                let subset: Vec<&str> = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| names[j]).collect();
                let m = bunch_marginal(&sys, "c1", &subset).unwrap();
                let want = 1.0 / m.len() as f64;
                for x in m {
                    assert!((x - want).abs() < 1e-15, "eps {eps} mask {mask}");
                }
            }
        }
    }

    #[test]
    fn parity_system_is_consistently_connected() {
        let sys = parity_system(
            SystemShape { order: 3, rank: 4 },
            &[0.125, 0.125, 0.125, -0.125],
        )
        .unwrap();
        assert!(validate_system(&sys).is_valid());
        assert!(is_consistently_connected(&sys));

        // at (k, k) with equal eps all contexts share the same content set and pmf
        let kk = parity_system(SystemShape { order: 3, rank: 3 }, &[0.125; 3]).unwrap();
        assert!(is_strongly_consistently_connected(&kk));
    }

    #[test]
    fn product_system_pmfs() {
        let sys = product_system(SystemShape { order: 2, rank: 3 }, &[0.0, 1.0, 0.5]).unwrap();
        assert!(validate_system(&sys).is_valid());
        // c1 measures (q1, q2) with p = (0, 1): atom 01 is certain
        assert_eq!(sys.contexts[0].pmf, vec![0.0, 1.0, 0.0, 0.0]);
        // c3 measures (q3, q1) with p = (.5, 0)
        assert_eq!(sys.contexts[2].pmf, vec![0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn random_system_is_deterministic() {
        let shape = SystemShape { order: 3, rank: 4 };
        let a = random_system(shape, 1).unwrap();
        let b = random_system(shape, 1).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(validate_system(&a).is_valid());

        let c = random_system(shape, 2).unwrap();
        assert_ne!(a.contexts[0].pmf, c.contexts[0].pmf);
    }

    #[test]
    fn random_system_pmf_entries_have_simplex_mean() {
        // Monte Carlo check of the simplex-uniform sampler: each of the 4
        // atom coordinates of a (2, 3) bunch has mean 1/4
        let shape = SystemShape { order: 2, rank: 3 };
        let mut sums = [0.0f64; 4];
        let trials = 1000;
        for seed in 0..trials {
            let sys = random_system(shape, seed).unwrap();
            for c in &sys.contexts {
                for (i, &p) in c.pmf.iter().enumerate() {
                    sums[i] += p;
                }
            }
        }
        for s in sums {
            let mean = s / (trials as f64 * 3.0);
            assert!((mean - 0.25).abs() < 0.02, "mean {mean}");
        }
    }
}
