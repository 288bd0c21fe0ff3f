use super::niching::{niche_check, NicheDecision, NichingGrid, NichingSettings};
use crate::functions::Bounds;

/// A candidate solution with its cached objective value (lower is better).
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    pub genes: Vec<f64>,
    pub fitness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// Not better than the current worst member.
    Worse,
    /// Within the fitness-diversity threshold of an existing member.
    Diversity,
    /// Its niche is full.
    Niche,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    Inserted { rank: usize },
    Rejected(Rejection),
}

impl Insertion {
    pub fn accepted(&self) -> bool {
        matches!(self, Insertion::Inserted { .. })
    }
}

/// Fitness-sorted population of fixed capacity.
///
/// A pool may start below capacity when the objective cannot supply enough
/// distinct fitness values during initialization; it then grows until full
/// and stays full.
#[derive(Clone, Debug)]
pub struct Pool {
    members: Vec<Genome>,
    capacity: usize,
    diversity: f64,
    niching: Option<NichingGrid>,
}

impl Pool {
    pub fn new(
        capacity: usize,
        diversity: f64,
        niching: Option<NichingSettings>,
        bounds: Bounds,
    ) -> Self {
        Pool {
            members: Vec::with_capacity(capacity),
            capacity,
            diversity,
            niching: niching.map(|s| NichingGrid::new(s, bounds)),
        }
    }

    pub fn members(&self) -> &[Genome] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.members.len() >= self.capacity
    }

    pub fn best(&self) -> Option<&Genome> {
        self.members.first()
    }

    pub fn worst(&self) -> Option<&Genome> {
        self.members.last()
    }

    pub fn niching(&self) -> Option<&NichingGrid> {
        self.niching.as_ref()
    }

    fn violates_diversity(&self, fitness: f64) -> bool {
        let p = self.members.partition_point(|m| m.fitness < fitness);
        let near = |i: usize| {
            self.members
                .get(i)
                .is_some_and(|m| (m.fitness - fitness).abs() < self.diversity)
        };
        (p > 0 && near(p - 1)) || near(p)
    }

    fn remove_at(&mut self, i: usize) {
        let g = self.members.remove(i);
        if let Some(grid) = &mut self.niching {
            grid.remove(&g.genes);
        }
    }

    /// Offers a candidate to the pool. On acceptance the worst member (or
    /// the worst member of the candidate's full niche) is dropped.
    pub fn insert(&mut self, candidate: Genome) -> Insertion {
        debug_assert!(candidate.fitness.is_finite());
        if self.is_full() && self.worst().is_some_and(|w| candidate.fitness >= w.fitness) {
            return Insertion::Rejected(Rejection::Worse);
        }
        if self.violates_diversity(candidate.fitness) {
            return Insertion::Rejected(Rejection::Diversity);
        }
        let decision = match &self.niching {
            Some(grid) => niche_check(grid, &self.members, &candidate),
            None => NicheDecision::Admit,
        };
        match decision {
            NicheDecision::Reject => return Insertion::Rejected(Rejection::Niche),
            NicheDecision::AdmitReplacing(i) => self.remove_at(i),
            NicheDecision::Admit => {
                if self.is_full() {
                    self.remove_at(self.members.len() - 1);
                }
            }
        }
        if let Some(grid) = &mut self.niching {
            grid.add(&candidate.genes);
        }
        let rank = self
            .members
            .partition_point(|m| m.fitness <= candidate.fitness);
        self.members.insert(rank, candidate);
        Insertion::Inserted { rank }
    }

    /// Checks sortedness, capacity, pairwise diversity and niche occupancy.
    pub fn audit(&self) -> Result<(), String> {
        if self.members.len() > self.capacity {
            return Err(format!(
                "{} members exceed capacity {}",
                self.members.len(),
                self.capacity
            ));
        }
        for (i, w) in self.members.windows(2).enumerate() {
            if !(w[0].fitness <= w[1].fitness) {
                return Err(format!("members {i} and {} out of order", i + 1));
            }
            if w[1].fitness - w[0].fitness < self.diversity {
                return Err(format!(
                    "members {i} and {} closer than the diversity threshold",
                    i + 1
                ));
            }
        }
        if let Some(m) = self.members.iter().position(|m| !m.fitness.is_finite()) {
            return Err(format!("member {m} has non-finite fitness"));
        }
        if let Some(grid) = &self.niching {
            if grid.total() != self.members.len() as u64 {
                return Err(format!(
                    "niche occupancy {} does not match {} members",
                    grid.total(),
                    self.members.len()
                ));
            }
            let mut recount = std::collections::HashMap::new();
            for m in &self.members {
                *recount.entry(grid.cell(&m.genes)).or_insert(0u32) += 1;
            }
            if &recount != grid.occupancy_map() {
                return Err("niche occupancy out of sync with members".into());
            }
            if grid.max_occupancy() > grid.settings.mnic {
                return Err(format!(
                    "a niche holds {} members, above the limit {}",
                    grid.max_occupancy(),
                    grid.settings.mnic
                ));
            }
        }
        Ok(())
    }
}
