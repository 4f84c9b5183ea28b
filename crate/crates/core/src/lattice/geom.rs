use crate::error::{Error, Result};

/// Lattice direction. `X` is the space direction (μ = 1), `T` the time direction (μ = 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    X = 0,
    T = 1,
}

impl Dir {
    pub const ALL: [Dir; 2] = [Dir::X, Dir::T];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// The direction orthogonal to `self`. In two dimensions there is exactly one.
    #[inline]
    pub fn other(self) -> Dir {
        match self {
            Dir::X => Dir::T,
            Dir::T => Dir::X,
        }
    }
}

/// Periodic `L × T` lattice.
///
/// Sites are ordered lexicographically with time as the slow index:
/// `site = t * L + x`. Links are stored site-major, `link = 2 * site + μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeGeom {
    l: usize,
    t: usize,
}

impl LatticeGeom {
    pub fn new(l: usize, t: usize) -> Result<Self> {
        if l < 2 || t < 2 {
            return Err(Error::InvalidGeometry { l, t });
        }
        Ok(Self { l, t })
    }

    /// Spatial extent.
    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    /// Temporal extent.
    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of sites, `V = L·T`.
    #[inline]
    pub fn volume(&self) -> usize {
        self.l * self.t
    }

    #[inline]
    pub fn n_links(&self) -> usize {
        2 * self.volume()
    }

    #[inline]
    pub fn site(&self, x: usize, t: usize) -> usize {
        debug_assert!(x < self.l && t < self.t);
        t * self.l + x
    }

    #[inline]
    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.l, site / self.l)
    }

    #[inline]
    pub fn link(&self, site: usize, mu: Dir) -> usize {
        2 * site + mu.index()
    }

    #[inline]
    pub fn link_site_dir(&self, link: usize) -> (usize, Dir) {
        let dir = if link % 2 == 0 { Dir::X } else { Dir::T };
        (link / 2, dir)
    }

    /// Neighbour of `site` one step forward (`forward = true`) or backward along `mu`,
    /// with periodic wraparound.
    #[inline]
    pub fn shift(&self, site: usize, mu: Dir, forward: bool) -> usize {
        let (x, t) = self.coords(site);
        match (mu, forward) {
            (Dir::X, true) => self.site(if x + 1 == self.l { 0 } else { x + 1 }, t),
            (Dir::X, false) => self.site(if x == 0 { self.l - 1 } else { x - 1 }, t),
            (Dir::T, true) => self.site(x, if t + 1 == self.t { 0 } else { t + 1 }),
            (Dir::T, false) => self.site(x, if t == 0 { self.t - 1 } else { t - 1 }),
        }
    }

    #[inline]
    pub fn fwd(&self, site: usize, mu: Dir) -> usize {
        self.shift(site, mu, true)
    }

    #[inline]
    pub fn bwd(&self, site: usize, mu: Dir) -> usize {
        self.shift(site, mu, false)
    }

    /// Shift by an arbitrary signed number of steps along `mu`.
    pub fn shift_by(&self, site: usize, mu: Dir, steps: isize) -> usize {
        let (x, t) = self.coords(site);
        match mu {
            Dir::X => self.site((x as isize + steps).rem_euclid(self.l as isize) as usize, t),
            Dir::T => self.site(x, (t as isize + steps).rem_euclid(self.t as isize) as usize),
        }
    }

    pub fn sites(&self) -> std::ops::Range<usize> {
        0..self.volume()
    }
}
