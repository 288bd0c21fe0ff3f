use std::collections::HashMap;

use super::Genome;
use crate::error::{Error, Result};
use crate::functions::Bounds;

pub type CellKey = Vec<u32>;

/// Static grid niching parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NichingSettings {
    pub cells_per_dim: u32,
    /// Maximum number of individuals per grid cell.
    pub mnic: u32,
    /// When a cell is full, let a fitter candidate replace the cell's worst
    /// member instead of rejecting it outright.
    pub replace: bool,
}

impl NichingSettings {
    pub fn new(cells_per_dim: u32, mnic: u32) -> Self {
        NichingSettings {
            cells_per_dim,
            mnic,
            replace: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells_per_dim == 0 || self.mnic == 0 {
            return Err(Error::Parameter(
                "niching needs cells_per_dim >= 1 and mnic >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Cell of `x`; coordinates outside the box clamp to the edge cells.
pub fn cell_of(x: &[f64], bounds: &Bounds, cells_per_dim: u32) -> CellKey {
    let n = cells_per_dim as f64;
    x.iter()
        .map(|&v| {
            let c = ((v - bounds.lower) / bounds.width() * n).floor();
            c.clamp(0.0, n - 1.0) as u32
        })
        .collect()
}

/// Sparse occupancy of a static grid over the search box.
#[derive(Clone, Debug)]
pub struct NichingGrid {
    pub settings: NichingSettings,
    pub bounds: Bounds,
    occupancy: HashMap<CellKey, u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NicheDecision {
    Admit,
    /// Admit after removing the pool member at this index.
    AdmitReplacing(usize),
    Reject,
}

impl NichingGrid {
    pub fn new(settings: NichingSettings, bounds: Bounds) -> Self {
        NichingGrid {
            settings,
            bounds,
            occupancy: HashMap::new(),
        }
    }

    pub fn cell(&self, x: &[f64]) -> CellKey {
        cell_of(x, &self.bounds, self.settings.cells_per_dim)
    }

    pub fn occupancy(&self, key: &CellKey) -> u32 {
        self.occupancy.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.occupancy.values().map(|&c| c as u64).sum()
    }

    pub fn max_occupancy(&self) -> u32 {
        self.occupancy.values().copied().max().unwrap_or(0)
    }

    pub(crate) fn add(&mut self, x: &[f64]) {
        *self.occupancy.entry(self.cell(x)).or_insert(0) += 1;
    }

    pub(crate) fn remove(&mut self, x: &[f64]) {
        let key = self.cell(x);
        if let Some(c) = self.occupancy.get_mut(&key) {
            *c -= 1;
            if *c == 0 {
                self.occupancy.remove(&key);
            }
        }
    }

    pub fn occupancy_map(&self) -> &HashMap<CellKey, u32> {
        &self.occupancy
    }
}

/// Decides whether `candidate` may enter its grid cell.
pub fn niche_check(grid: &NichingGrid, members: &[Genome], candidate: &Genome) -> NicheDecision {
    let key = grid.cell(&candidate.genes);
    if grid.occupancy(&key) < grid.settings.mnic {
        return NicheDecision::Admit;
    }
    if !grid.settings.replace {
        return NicheDecision::Reject;
    }
    // Members are sorted, so the last one found in the cell is its worst.
    let worst = members
        .iter()
        .enumerate()
        .rev()
        .find(|(_, m)| grid.cell(&m.genes) == key);
    match worst {
        Some((i, m)) if candidate.fitness < m.fitness => NicheDecision::AdmitReplacing(i),
        _ => NicheDecision::Reject,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(genes: Vec<f64>, fitness: f64) -> Genome {
        Genome { genes, fitness }
    }

    #[test]
    fn edge_coordinates_clamp_into_grid() {
        let b = Bounds::symmetric(5.0);
        assert_eq!(cell_of(&[-5.0, 5.0], &b, 10), vec![0, 9]);
        assert_eq!(cell_of(&[-7.0, 12.0], &b, 10), vec![0, 9]);
        assert_eq!(cell_of(&[0.0, -0.01], &b, 10), vec![5, 4]);
    }

    #[test]
    fn empty_grid_admits() {
        let grid = NichingGrid::new(NichingSettings::new(10, 1), Bounds::symmetric(5.0));
        assert_eq!(
            niche_check(&grid, &[], &g(vec![0.1, 0.1], 1.0)),
            NicheDecision::Admit
        );
    }

    #[test]
    fn full_cell_rejects_worse_and_replaces_better() {
        let b = Bounds::symmetric(5.0);
        let mut grid = NichingGrid::new(NichingSettings::new(10, 2), b);
        let members = vec![
            g(vec![0.1, 0.1], 1.0),
            g(vec![-4.0, -4.0], 1.5),
            g(vec![0.2, 0.3], 2.0),
        ];
        for m in &members {
            grid.add(&m.genes);
        }
        assert_eq!(grid.occupancy(&vec![5, 5]), 2);
        assert_eq!(
            niche_check(&grid, &members, &g(vec![0.4, 0.4], 3.0)),
            NicheDecision::Reject
        );
        assert_eq!(
            niche_check(&grid, &members, &g(vec![0.4, 0.4], 1.2)),
            NicheDecision::AdmitReplacing(2)
        );
        grid.settings.replace = false;
        assert_eq!(
            niche_check(&grid, &members, &g(vec![0.4, 0.4], 0.1)),
            NicheDecision::Reject
        );
        assert_eq!(
            niche_check(&grid, &members, &g(vec![-4.5, -4.5], 0.1)),
            NicheDecision::Admit
        );
    }
}
