use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{admissible_entries, ClassifyError};
use crate::digraph::Digraph;
use crate::exactnum::primes::factorize;
use crate::exactnum::{Monomial, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub samples: usize,
    pub admissible: usize,
    /// 1 when no samples were drawn
    pub fraction: f64,
}

/// Draws `n` random rational parameter points on `g` and reports how many are
/// admissible. Ratio magnitudes are reduced fractions below 1 whose numerator
/// and denominator are at most `denom_bound` and factor over `prime_pool`;
/// each vertex row is redrawn until its magnitudes sum below 1. Gaps are
/// positive fractions from the same integers.
pub fn sample_admissibility(
    g: &Digraph,
    n: usize,
    seed: u64,
    prime_pool: &[u64],
    denom_bound: u64,
) -> Result<SampleReport, ClassifyError> {
    if n == 0 {
        return Ok(SampleReport { samples: 0, admissible: 0, fraction: 1.0 });
    }
    let smooth: Vec<u64> = (1..=denom_bound)
        .filter(|&k| factorize(k).keys().all(|p| prime_pool.contains(p)))
        .collect();
    if smooth.len() < 2 {
        return Err(ClassifyError::EmptyPool(denom_bound));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Rational::from_integer(1.into());
    let mut admissible = 0;
    for _ in 0..n {
        let mut ratios = vec![Monomial::one(); g.edge_count()];
        let mut gaps = Vec::new();
        for v in 0..g.vertex_count() {
            let out = g.out_edges(v);
            loop {
                let row: Vec<Rational> = out.iter().map(|_| below_one(&smooth, &mut rng)).collect();
                if row.iter().sum::<Rational>() < one {
                    for (&e, r) in out.iter().zip(row) {
                        ratios[e] = Monomial::factor_rational(&r)?;
                    }
                    break;
                }
            }
            for _ in 1..out.len() {
                let num = *smooth.choose(&mut rng).unwrap();
                let den = *smooth.choose(&mut rng).unwrap();
                gaps.push(Some(Monomial::ratio(num, den)));
            }
        }
        let entries: Vec<Option<Monomial>> = ratios.into_iter().map(Some).chain(gaps).collect();
        if admissible_entries(&entries).admissible {
            admissible += 1;
        }
    }
    Ok(SampleReport { samples: n, admissible, fraction: admissible as f64 / n as f64 })
}

/// `smooth` is sorted and starts with 1.
fn below_one(smooth: &[u64], rng: &mut ChaCha8Rng) -> Rational {
    let den_idx = rng.gen_range(1..smooth.len());
    let num_idx = rng.gen_range(0..den_idx);
    Rational::new(smooth[num_idx].into(), smooth[den_idx].into())
}
