//! Periodic square lattice with von Neumann neighbourhoods.

use crate::error::{Error, Result};

/// Smallest accepted agent count. Below a 4x4 torus the wrap-around makes
/// some neighbours coincide.
pub const MIN_AGENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeTopology {
    side: usize,
    neighbours: Vec<[usize; 4]>,
}

impl LatticeTopology {
    /// Builds a `side x side` torus for `n = side^2` agents.
    ///
    /// Neighbour order is (up, down, left, right); agent ids are row-major.
    pub fn new(n: usize) -> Result<Self> {
        let side = integer_sqrt(n);
        if side * side != n {
            return Err(Error::config("n", format!("{n} is not a perfect square")));
        }
        if n < MIN_AGENTS {
            return Err(Error::config(
                "n",
                format!("{n} agents is below the minimum of {MIN_AGENTS}"),
            ));
        }
        let neighbours = (0..n)
            .map(|id| {
                let (row, col) = (id / side, id % side);
                let up = ((row + side - 1) % side) * side + col;
                let down = ((row + 1) % side) * side + col;
                let left = row * side + (col + side - 1) % side;
                let right = row * side + (col + 1) % side;
                [up, down, left, right]
            })
            .collect();
        Ok(Self { side, neighbours })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.neighbours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbours.is_empty()
    }

    #[inline]
    pub fn neighbours(&self, id: usize) -> &[usize; 4] {
        &self.neighbours[id]
    }

    pub fn neighbour_table(&self) -> &[[usize; 4]] {
        &self.neighbours
    }
}

fn integer_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_size_is_32_by_32() {
        let lattice = LatticeTopology::new(1024).unwrap();
        assert_eq!(lattice.side(), 32);
        assert_eq!(lattice.len(), 1024);
    }

    #[test]
    fn rejects_bad_sizes() {
        for n in [0, 4, 9, 15, 17, 1000] {
            assert!(
                matches!(LatticeTopology::new(n), Err(Error::Config { .. })),
                "n={n}"
            );
        }
    }

    #[test]
    fn neighbours_distinct_symmetric_irreflexive() {
        for n in [16, 25, 64, 1024] {
            let lattice = LatticeTopology::new(n).unwrap();
            for i in 0..n {
                let nb = lattice.neighbours(i);
                assert!(!nb.contains(&i));
                let mut sorted = *nb;
                sorted.sort_unstable();
                sorted.windows(2).for_each(|w| assert_ne!(w[0], w[1]));
                for &j in nb {
                    assert!(lattice.neighbours(j).contains(&i));
                }
            }
        }
    }

    #[test]
    fn rebuild_is_identical() {
        assert_eq!(
            LatticeTopology::new(256).unwrap(),
            LatticeTopology::new(256).unwrap()
        );
    }

    #[test]
    fn wraps_around() {
        let lattice = LatticeTopology::new(16).unwrap();
        assert_eq!(lattice.neighbours(0), &[12, 4, 3, 1]);
    }
}
