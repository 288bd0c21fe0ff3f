use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CrossoverKind, Genome, PoolConfig};
use crate::error::{Error, Result};
use crate::functions::Bounds;

/// Rank of the father for a standard normal draw `g`.
pub fn father_rank(g: f64, shape: f64, pool_len: usize) -> usize {
    let r = (g.abs() * shape * pool_len as f64).floor();
    (r as usize).min(pool_len - 1)
}

/// Mother uniformly at random, father biased toward the fittest ranks.
/// Returns pool indices.
pub fn select_parents<R: Rng + ?Sized>(
    members: &[Genome],
    cfg: &PoolConfig,
    rng: &mut R,
) -> (usize, usize) {
    let mother = rng.random_range(0..members.len());
    let g: f64 = rng.sample(StandardNormal);
    (mother, father_rank(g, cfg.father_rank_shape, members.len()))
}

/// Germany cut index for a standard normal draw `g`. Index 0 makes the
/// first child a full copy of the father.
pub fn germany_cut(g: f64, shape: f64, len: usize) -> usize {
    let l = len as f64;
    let c = (l / 2.0 + g * shape * l).round();
    c.clamp(0.0, (len - 1) as f64) as usize
}

/// `k` distinct sorted cut indices from `1..len`.
pub fn portugal_cuts<R: Rng + ?Sized>(k: usize, len: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k == 0 || k + 1 > len {
        return Err(Error::Operator(format!(
            "cannot place {k} distinct cuts in a genome of length {len}"
        )));
    }
    let mut cuts: Vec<usize> = index::sample(rng, len - 1, k)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    Ok(cuts)
}

/// Exchanges segments at the given sorted cut indices. The first child
/// starts with the mother's genes and switches parent at every cut; the
/// second child is its complement.
pub fn crossover_at(mother: &[f64], father: &[f64], cuts: &[usize]) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(mother.len(), father.len());
    let mut c1 = Vec::with_capacity(mother.len());
    let mut c2 = Vec::with_capacity(mother.len());
    let mut from_mother = true;
    let mut start = 0;
    for &cut in cuts.iter().chain(std::iter::once(&mother.len())) {
        let (a, b) = if from_mother {
            (mother, father)
        } else {
            (father, mother)
        };
        c1.extend_from_slice(&a[start..cut]);
        c2.extend_from_slice(&b[start..cut]);
        start = cut;
        from_mother = !from_mother;
    }
    (c1, c2)
}

pub fn crossover<R: Rng + ?Sized>(
    mother: &[f64],
    father: &[f64],
    kind: CrossoverKind,
    cfg: &PoolConfig,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if mother.len() != father.len() || mother.is_empty() {
        return Err(Error::Operator(format!(
            "parents have lengths {} and {}",
            mother.len(),
            father.len()
        )));
    }
    match kind {
        CrossoverKind::Holland => Ok((mother.to_vec(), father.to_vec())),
        CrossoverKind::Germany => {
            let g: f64 = rng.sample(StandardNormal);
            let cut = germany_cut(g, cfg.germany_cut_shape, mother.len());
            Ok(crossover_at(mother, father, &[cut]))
        }
        CrossoverKind::Portugal(k) => {
            let cuts = portugal_cuts(k, mother.len(), rng)?;
            Ok(crossover_at(mother, father, &cuts))
        }
    }
}

/// One-point mutation: with probability `p` a uniformly chosen gene is
/// redrawn uniformly within `bounds`. Returns whether a gene changed.
pub fn mutate<R: Rng + ?Sized>(genes: &mut [f64], bounds: &Bounds, p: f64, rng: &mut R) -> bool {
    if genes.is_empty() || !rng.random_bool(p) {
        return false;
    }
    let i = rng.random_range(0..genes.len());
    genes[i] = bounds.sample(rng);
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn father_rank_edges() {
        assert_eq!(father_rank(0.0, 0.1, 1000), 0);
        assert_eq!(father_rank(10.0, 0.1, 1000), 999);
        assert_eq!(father_rank(-25.0, 0.1, 1000), 999);
        assert_eq!(father_rank(0.5, 0.1, 1000), 50);
    }

    #[test]
    fn portugal_single_cut_example() {
        let m = [1.0, 2.0, 3.0, 4.0, 5.0];
        let f = [10.0, 20.0, 30.0, 40.0, 50.0];
        let (c1, c2) = crossover_at(&m, &f, &[2]);
        assert_eq!(c1, vec![1.0, 2.0, 30.0, 40.0, 50.0]);
        assert_eq!(c2, vec![10.0, 20.0, 3.0, 4.0, 5.0]);
        let (c1, c2) = crossover_at(&m, &f, &[0]);
        assert_eq!(c1, f.to_vec());
        assert_eq!(c2, m.to_vec());
        let (c1, _) = crossover_at(&m, &f, &[1, 3]);
        assert_eq!(c1, vec![1.0, 20.0, 30.0, 4.0, 5.0]);
    }

    #[test]
    fn holland_copies_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = [1.0, 2.0];
        let f = [3.0, 4.0];
        let (c1, c2) =
            crossover(&m, &f, CrossoverKind::Holland, &PoolConfig::default(), &mut rng).unwrap();
        assert_eq!((c1, c2), (m.to_vec(), f.to_vec()));
    }

    #[test]
    fn portugal_needs_room_for_cuts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = PoolConfig::default();
        let g = [0.0; 4];
        assert!(crossover(&g, &g, CrossoverKind::Portugal(3), &cfg, &mut rng).is_ok());
        assert!(matches!(
            crossover(&g, &g, CrossoverKind::Portugal(4), &cfg, &mut rng),
            Err(Error::Operator(_))
        ));
        for _ in 0..200 {
            let cuts = portugal_cuts(3, 4, &mut rng).unwrap();
            assert_eq!(cuts, vec![1, 2, 3]);
        }
    }

    #[test]
    fn germany_cut_edges() {
        assert_eq!(germany_cut(0.0, 0.3, 10), 5);
        assert_eq!(germany_cut(-5.0, 0.3, 10), 0);
        assert_eq!(germany_cut(5.0, 0.3, 10), 9);
        assert_eq!(germany_cut(0.7, 0.3, 1), 0);
    }

    #[test]
    fn mutation_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = Bounds::symmetric(1.0);
        for _ in 0..100 {
            let mut g = vec![5.0; 8];
            assert!(mutate(&mut g, &b, 1.0, &mut rng));
            assert_eq!(g.iter().filter(|&&v| v != 5.0).count(), 1);
            let mut h = vec![5.0; 8];
            assert!(!mutate(&mut h, &b, 0.0, &mut rng));
            assert_eq!(h, vec![5.0; 8]);
        }
    }

    #[test]
    fn mutation_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let b = Bounds::symmetric(1.0);
        let mut hits = 0;
        for _ in 0..100_000 {
            let mut g = vec![5.0; 3];
            if mutate(&mut g, &b, 0.05, &mut rng) {
                hits += 1;
            }
        }
        let freq = hits as f64 / 1e5;
        assert!((0.045..=0.055).contains(&freq), "{freq}");
    }
}
