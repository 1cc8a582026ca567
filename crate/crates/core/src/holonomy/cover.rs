use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::scalar::Real;

/// Cover of the torus by the stars of a coarse vertex sublattice.
///
/// Vertices sit every `s_i` sites; the star of a vertex is the cube of side
/// `2 s_i` centred on it, so neighbouring stars overlap in a slab `s_i + 1`
/// sites thick. The maximal tree is a comb rooted at vertex 0: the first
/// axis from the root, the second axis from each of those, the third axis
/// from each of those, never crossing the periodic seam. The generator
/// circuit of axis `ℓ` runs from the root along that axis and closes through
/// the single seam edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalCover {
    dims: [usize; 3],
    spacing: [usize; 3],
    counts: [usize; 3],
}

impl CubicalCover {
    pub fn new(dims: [usize; 3], spacing: [usize; 3]) -> Result<Self> {
        let mut counts = [0; 3];
        for k in 0..3 {
            if spacing[k] == 0 || dims[k] % spacing[k] != 0 {
                return Err(Error::InvalidArgument(format!(
                    "cover spacing {} does not divide {} sites",
                    spacing[k], dims[k]
                )));
            }
            counts[k] = dims[k] / spacing[k];
            if counts[k] < 3 {
                return Err(Error::InvalidArgument(format!(
                    "cover needs at least 3 vertices per axis, spacing {} gives {}",
                    spacing[k], counts[k]
                )));
            }
        }
        Ok(Self { dims, spacing, counts })
    }

    /// Four vertices per axis.
    pub fn default_for<S: Real>(lattice: &TorusLattice<S>) -> Result<Self> {
        let d = lattice.dims();
        Self::new(d, d.map(|n| (n / 4).max(1)))
    }

    /// The same cover with half the spacing.
    pub fn refine(&self) -> Result<Self> {
        Self::new(self.dims, self.spacing.map(|s| s / 2))
    }

    pub fn check_lattice<S: Real>(&self, lattice: &TorusLattice<S>) -> Result<()> {
        if lattice.dims() != self.dims {
            return Err(Error::InvalidArgument("cover was built for another lattice".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> [usize; 3] {
        self.spacing
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn vertices(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn base_vertex(&self) -> usize {
        0
    }

    pub fn vertex_index(&self, v: [isize; 3]) -> usize {
        let w = |k: usize| v[k].rem_euclid(self.counts[k] as isize) as usize;
        (w(0) * self.counts[1] + w(1)) * self.counts[2] + w(2)
    }

    pub fn vertex_coords(&self, p: usize) -> [usize; 3] {
        let c = self.counts;
        [p / (c[1] * c[2]), (p / c[2]) % c[1], p % c[2]]
    }

    pub fn offset_vertex(&self, p: usize, delta: [isize; 3]) -> usize {
        let v = self.vertex_coords(p);
        self.vertex_index([0, 1, 2].map(|k| v[k] as isize + delta[k]))
    }

    pub fn neighbor(&self, p: usize, axis: usize, dir: isize) -> usize {
        let mut d = [0; 3];
        d[axis] = dir;
        self.offset_vertex(p, d)
    }

    /// Fine-lattice coordinates of a vertex.
    pub fn vertex_site(&self, p: usize) -> [usize; 3] {
        let v = self.vertex_coords(p);
        [0, 1, 2].map(|k| v[k] * self.spacing[k])
    }

    /// Lowest corner of the star of `p`, unwrapped.
    pub fn star_origin(&self, p: usize) -> [isize; 3] {
        let x = self.vertex_site(p);
        [0, 1, 2].map(|k| x[k] as isize - self.spacing[k] as isize)
    }

    pub fn star_extents(&self) -> [usize; 3] {
        self.spacing.map(|s| 2 * s + 1)
    }

    /// Parent of `p` in the maximal tree and the axis of the connecting edge.
    pub fn parent(&self, p: usize) -> Option<(usize, usize)> {
        let [i, j, k] = self.vertex_coords(p);
        let up = |v: [usize; 3]| self.vertex_index(v.map(|x| x as isize));
        if k > 0 {
            Some((up([i, j, k - 1]), 2))
        } else if j > 0 {
            Some((up([i, j - 1, 0]), 1))
        } else if i > 0 {
            Some((up([i - 1, 0, 0]), 0))
        } else {
            None
        }
    }

    /// Tree edges `(parent, child, axis)` with `child = parent + e_axis`,
    /// ordered so every parent precedes its children.
    pub fn tree_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut order: Vec<usize> = (0..self.vertices()).collect();
        let depth = |p: usize| {
            let v = self.vertex_coords(p);
            v[0] + v[1] + v[2]
        };
        order.sort_by_key(|&p| depth(p));
        order
            .into_iter()
            .filter_map(|q| self.parent(q).map(|(p, axis)| (p, q, axis)))
            .collect()
    }

    /// Whether the forward edge `p → p + e_axis` is in the tree.
    pub fn is_tree_edge(&self, p: usize, axis: usize) -> bool {
        let q = self.neighbor(p, axis, 1);
        self.parent(q) == Some((p, axis))
    }

    /// Vertices of generator circuit `axis`, each followed by its forward
    /// edge along `axis`; the last edge crosses the seam back to the root.
    pub fn circuit(&self, axis: usize) -> Vec<usize> {
        (0..self.counts[axis])
            .map(|t| {
                let mut v = [0isize; 3];
                v[axis] = t as isize;
                self.vertex_index(v)
            })
            .collect()
    }

    /// Nearest vertex to a fine site and the site's offset inside that
    /// vertex's star.
    pub fn nearest_vertex(&self, c: [usize; 3]) -> (usize, [usize; 3]) {
        let mut v = [0isize; 3];
        let mut o = [0usize; 3];
        for k in 0..3 {
            let s = self.spacing[k] as isize;
            let vk = (c[k] as isize + s / 2) / s;
            let off = c[k] as isize - vk * s;
            v[k] = vk;
            o[k] = (off + s) as usize;
        }
        (self.vertex_index(v), o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_spans_and_circuits_use_one_seam_edge() {
        let c = CubicalCover::new([12, 12, 16], [3, 3, 4]).unwrap();
        let edges = c.tree_edges();
        assert_eq!(edges.len(), c.vertices() - 1);
        let mut seen = vec![false; c.vertices()];
        seen[0] = true;
        for (p, q, _) in &edges {
            assert!(seen[*p]);
            assert!(!seen[*q]);
            seen[*q] = true;
        }
        assert!(seen.iter().all(|s| *s));
        for axis in 0..3 {
            let circ = c.circuit(axis);
            let non_tree = circ.iter().filter(|&&p| !c.is_tree_edge(p, axis)).count();
            assert_eq!(non_tree, 1);
        }
    }

    #[test]
    fn stars_cover_every_site() {
        let c = CubicalCover::new([8, 8, 8], [2, 2, 2]).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                for z in 0..8 {
                    let (p, o) = c.nearest_vertex([x, y, z]);
                    let v = c.vertex_site(p);
                    for k in 0..3 {
                        assert!(o[k] <= 4);
                        let back = (v[k] as isize + o[k] as isize - 2).rem_euclid(8) as usize;
                        assert_eq!(back, [x, y, z][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_coarse_covers() {
        assert!(CubicalCover::new([8, 8, 8], [4, 4, 4]).is_err());
        assert!(CubicalCover::new([8, 8, 8], [3, 2, 2]).is_err());
    }
}
