//! Coarse/fine rectilinear grids on the unit square and coarse-node neighborhoods.
//!
//! Fine nodes are numbered row-major from the bottom-left corner. Free degrees
//! of freedom are the fine nodes strictly inside the domain, also numbered
//! row-major. Coarse nodes use the same convention on the coarse lattice; the
//! interior coarse nodes (the ones that own multiscale basis functions) get
//! their own compact row-major numbering `0..N_c`.

use crate::error::{Error, Result};

/// Nested coarse and fine rectilinear partitions of the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPair {
    coarse_nx: usize,
    coarse_ny: usize,
    refine: usize,
}

/// Inclusive rectangle of fine-node lattice coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeWindow {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl NodeWindow {
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, ix: usize, iy: usize) -> bool {
        ix >= self.x0 && ix <= self.x1 && iy >= self.y0 && iy <= self.y1
    }

    /// Window-local row-major position of a lattice node inside the window.
    #[inline]
    pub fn local(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(self.contains(ix, iy));
        (iy - self.y0) * self.width() + (ix - self.x0)
    }

    #[inline]
    pub fn coords(&self, local: usize) -> (usize, usize) {
        let w = self.width();
        (self.x0 + local % w, self.y0 + local / w)
    }

    pub fn intersect(&self, other: &NodeWindow) -> Option<NodeWindow> {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        (x0 <= x1 && y0 <= y1).then_some(NodeWindow { x0, y0, x1, y1 })
    }

    /// Fine cells covered by the window, as lattice coordinates of their
    /// lower-left node.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y0..self.y1).flat_map(move |cy| (self.x0..self.x1).map(move |cx| (cx, cy)))
    }
}

/// Coarse-node neighborhood `ω_i`: the union of the coarse cells sharing node `x_i`.
#[derive(Clone, Debug)]
pub struct Neighborhood {
    /// Interior coarse-node index `i` in `0..N_c`.
    pub index: usize,
    /// Lattice coordinates of `x_i` on the coarse grid.
    pub coarse_node: (usize, usize),
    /// Member coarse cells, by coarse-cell lattice coordinates.
    pub cells: Vec<(usize, usize)>,
    /// Fine nodes of the closure of `ω_i`.
    pub window: NodeWindow,
    /// Window-local positions of the fine nodes strictly inside `ω_i`.
    pub interior: Vec<usize>,
    /// Global free-DOF indices of the interior nodes (local -> global map).
    pub interior_dofs: Vec<usize>,
    /// Window-local positions of the fine nodes on `∂ω_i`, counter-clockwise
    /// from the lower-left corner.
    pub boundary: Vec<usize>,
    /// Global node indices of the boundary nodes, in the same order.
    pub boundary_nodes: Vec<usize>,
}

impl Neighborhood {
    /// Number of fine boundary nodes `L_i`.
    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }
}

impl GridPair {
    /// Builds the grid pair; every count must be at least 2 for the coarse
    /// grid (so at least one interior coarse node exists) and at least 1 for
    /// the refinement factor.
    pub fn new(coarse_nx: usize, coarse_ny: usize, refine: usize) -> Result<Self> {
        if coarse_nx < 2 || coarse_ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "coarse grid needs at least 2 cells per axis, got {coarse_nx}x{coarse_ny}"
            )));
        }
        if refine == 0 {
            return Err(Error::InvalidGrid("refinement factor must be positive".into()));
        }
        Ok(Self {
            coarse_nx,
            coarse_ny,
            refine,
        })
    }

    pub fn coarse_nx(&self) -> usize {
        self.coarse_nx
    }

    pub fn coarse_ny(&self) -> usize {
        self.coarse_ny
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    pub fn fine_nx(&self) -> usize {
        self.coarse_nx * self.refine
    }

    pub fn fine_ny(&self) -> usize {
        self.coarse_ny * self.refine
    }

    /// Coarse mesh size `H` along x.
    pub fn coarse_h(&self) -> f64 {
        1.0 / self.coarse_nx as f64
    }

    /// Fine mesh size `h` along x.
    pub fn h(&self) -> f64 {
        1.0 / self.fine_nx() as f64
    }

    pub fn hx(&self) -> f64 {
        self.h()
    }

    pub fn hy(&self) -> f64 {
        1.0 / self.fine_ny() as f64
    }

    pub fn num_cells(&self) -> usize {
        self.fine_nx() * self.fine_ny()
    }

    #[inline]
    pub fn cell_index(&self, cx: usize, cy: usize) -> usize {
        cy * self.fine_nx() + cx
    }

    pub fn num_nodes(&self) -> usize {
        (self.fine_nx() + 1) * (self.fine_ny() + 1)
    }

    #[inline]
    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        iy * (self.fine_nx() + 1) + ix
    }

    #[inline]
    pub fn node_coords(&self, node: usize) -> (usize, usize) {
        let w = self.fine_nx() + 1;
        (node % w, node / w)
    }

    pub fn node_position(&self, ix: usize, iy: usize) -> (f64, f64) {
        (ix as f64 * self.hx(), iy as f64 * self.hy())
    }

    pub fn num_free(&self) -> usize {
        (self.fine_nx() - 1) * (self.fine_ny() - 1)
    }

    /// Free-DOF index of a lattice node, `None` on the domain boundary.
    #[inline]
    pub fn free_index(&self, ix: usize, iy: usize) -> Option<usize> {
        let (nx, ny) = (self.fine_nx(), self.fine_ny());
        (ix > 0 && iy > 0 && ix < nx && iy < ny).then(|| (iy - 1) * (nx - 1) + (ix - 1))
    }

    #[inline]
    pub fn free_coords(&self, dof: usize) -> (usize, usize) {
        let w = self.fine_nx() - 1;
        (dof % w + 1, dof / w + 1)
    }

    /// Window covering the whole fine lattice.
    pub fn full_window(&self) -> NodeWindow {
        NodeWindow {
            x0: 0,
            y0: 0,
            x1: self.fine_nx(),
            y1: self.fine_ny(),
        }
    }

    /// Fine-node window of a coarse cell.
    pub fn coarse_cell_window(&self, kx: usize, ky: usize) -> NodeWindow {
        let r = self.refine;
        NodeWindow {
            x0: kx * r,
            y0: ky * r,
            x1: (kx + 1) * r,
            y1: (ky + 1) * r,
        }
    }

    /// Number of coarse nodes (interior and boundary).
    pub fn num_coarse_nodes(&self) -> usize {
        (self.coarse_nx + 1) * (self.coarse_ny + 1)
    }

    #[inline]
    pub fn coarse_node_index(&self, cx: usize, cy: usize) -> usize {
        cy * (self.coarse_nx + 1) + cx
    }

    pub fn coarse_node_coords(&self, node: usize) -> (usize, usize) {
        let w = self.coarse_nx + 1;
        (node % w, node / w)
    }

    /// Fine-node window of the closure of the neighborhood of any coarse node,
    /// clipped to the domain.
    pub fn coarse_node_window(&self, cx: usize, cy: usize) -> NodeWindow {
        let r = self.refine;
        NodeWindow {
            x0: cx.saturating_sub(1) * r,
            y0: cy.saturating_sub(1) * r,
            x1: (cx + 1).min(self.coarse_nx) * r,
            y1: (cy + 1).min(self.coarse_ny) * r,
        }
    }

    /// Number of interior coarse nodes `N_c`.
    pub fn num_interior_coarse(&self) -> usize {
        (self.coarse_nx - 1) * (self.coarse_ny - 1)
    }

    pub fn interior_coarse_coords(&self, i: usize) -> (usize, usize) {
        let w = self.coarse_nx - 1;
        (i % w + 1, i / w + 1)
    }

    pub fn interior_coarse_index(&self, cx: usize, cy: usize) -> Option<usize> {
        (cx > 0 && cy > 0 && cx < self.coarse_nx && cy < self.coarse_ny)
            .then(|| (cy - 1) * (self.coarse_nx - 1) + (cx - 1))
    }

    /// Neighborhood of the interior coarse node with compact index `i`.
    pub fn neighborhood(&self, i: usize) -> Result<Neighborhood> {
        let n_c = self.num_interior_coarse();
        if i >= n_c {
            return Err(Error::NotInteriorNode {
                index: i,
                interior: n_c,
            });
        }
        let (cx, cy) = self.interior_coarse_coords(i);
        let window = self.coarse_node_window(cx, cy);
        let cells = vec![(cx - 1, cy - 1), (cx, cy - 1), (cx - 1, cy), (cx, cy)];

        let mut interior = Vec::new();
        let mut interior_dofs = Vec::new();
        for iy in window.y0 + 1..window.y1 {
            for ix in window.x0 + 1..window.x1 {
                interior.push(window.local(ix, iy));
                // interior of ω_i never touches ∂Ω for an interior coarse node
                interior_dofs.push(self.free_index(ix, iy).expect("interior node is free"));
            }
        }
        if interior.is_empty() {
            return Err(Error::DegenerateNeighborhood(i));
        }

        let mut perimeter = Vec::new();
        let NodeWindow { x0, y0, x1, y1 } = window;
        perimeter.extend((x0..=x1).map(|ix| (ix, y0)));
        perimeter.extend((y0 + 1..=y1).map(|iy| (x1, iy)));
        perimeter.extend((x0..x1).rev().map(|ix| (ix, y1)));
        perimeter.extend((y0 + 1..y1).rev().map(|iy| (x0, iy)));
        let boundary = perimeter.iter().map(|&(ix, iy)| window.local(ix, iy)).collect();
        let boundary_nodes = perimeter.iter().map(|&(ix, iy)| self.node_index(ix, iy)).collect();

        Ok(Neighborhood {
            index: i,
            coarse_node: (cx, cy),
            cells,
            window,
            interior,
            interior_dofs,
            boundary,
            boundary_nodes,
        })
    }

    /// All interior-node neighborhoods in index order.
    pub fn neighborhoods(&self) -> Result<Vec<Neighborhood>> {
        (0..self.num_interior_coarse()).map(|i| self.neighborhood(i)).collect()
    }
}
