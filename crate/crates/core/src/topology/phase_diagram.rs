//! Filled-band Chern numbers over a rectangle of stage durations.

use super::lattice::chern_refined_from_states;
use super::spectrum::map_grid;
use crate::error::{Error, Result};
use crate::floquet::{floquet_operator, quasienergy_with_tol, Band, DEFAULT_DEGENERACY_TOL};
use crate::model::{ModelPreset, QuenchProtocol};
use crate::su2::Spinor;
use rayon::prelude::*;
use std::f64::consts::PI;

/// `n` values spread over the left-open interval `(lo, hi]`:
/// `lo + (hi − lo)(i + 1)/n`. A single point `x` is `lo = hi = x, n = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl TRange {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x, n: 1 }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid(field, "range has no points"));
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid(field, "range bounds must be finite"));
        }
        if self.lo < 0.0 || self.hi <= 0.0 {
            return Err(Error::invalid(field, "durations must be positive"));
        }
        if self.hi < self.lo || (self.hi == self.lo && self.n != 1) {
            return Err(Error::invalid(field, format!("empty range ({}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.lo == self.hi {
            return vec![self.lo; self.n.min(1)];
        }
        (0..self.n)
            .map(|i| self.lo + (self.hi - self.lo) * (i + 1) as f64 / self.n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellChern {
    Chern(i64),
    /// The quasienergy gap closes on the k-grid even at the largest grid.
    DegenerateOnGrid,
    /// The plaquette sum stayed under-resolved up to the largest grid.
    Unresolved,
}

impl CellChern {
    pub fn value(self) -> Option<i64> {
        match self {
            CellChern::Chern(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDiagramCell {
    pub t1: f64,
    pub t2: f64,
    pub chern: CellChern,
    pub min_gap_0: f64,
    pub min_gap_pi: f64,
    /// k-grid size of the final attempt.
    pub grid_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDiagramOptions {
    pub grid_n: usize,
    /// Largest k-grid tried when refining.
    pub grid_cap: usize,
    pub band: Band,
    pub degeneracy_tol: f64,
}

impl Default for PhaseDiagramOptions {
    fn default() -> Self {
        Self {
            grid_n: 120,
            grid_cap: 960,
            band: Band::FILLED,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }
}

/// Chern number and gap summary of a single protocol, refining the k-grid on
/// degeneracy or under-resolution.
pub fn classify_protocol(qp: &QuenchProtocol, opts: &PhaseDiagramOptions) -> PhaseDiagramCell {
    let mut n = opts.grid_n.max(2);
    loop {
        let q = map_grid(n, n, |_, _, k| {
            quasienergy_with_tol(&floquet_operator(qp, k), opts.degeneracy_tol)
        });
        let min_gap_0 = q.iter().fold(f64::INFINITY, |m, q| m.min(q.e_plus));
        let min_gap_pi = q.iter().fold(f64::INFINITY, |m, q| m.min(PI - q.e_plus));
        let cell = |chern| PhaseDiagramCell {
            t1: qp.duration1,
            t2: qp.duration2,
            chern,
            min_gap_0,
            min_gap_pi,
            grid_n: n,
        };
        let can_refine = 2 * n <= opts.grid_cap;
        if q.iter().any(|q| q.degenerate) {
            if can_refine {
                n *= 2;
                continue;
            }
            return cell(CellChern::DegenerateOnGrid);
        }
        let states: Vec<Spinor> = q
            .iter()
            .map(|q| Spinor::from_bloch(q.r_hat * opts.band.sign()).expect("non-degenerate axis"))
            .collect();
        match chern_refined_from_states(qp, opts.band, n, opts.degeneracy_tol, &states) {
            Ok(r) => return cell(CellChern::Chern(r.chern)),
            Err(_) if can_refine => n *= 2,
            Err(_) => return cell(CellChern::Unresolved),
        }
    }
}

/// Row-major in `T1`: entry `i * t2.n + j` is `(T1_i, T2_j)`.
pub fn phase_diagram(
    t1: TRange,
    t2: TRange,
    preset: &ModelPreset,
    opts: &PhaseDiagramOptions,
) -> Result<Vec<PhaseDiagramCell>> {
    t1.validate("T1")?;
    t2.validate("T2")?;
    if opts.grid_n < 2 {
        return Err(Error::invalid("grid", "k-grid must be at least 2"));
    }
    let (a, b) = (t1.values(), t2.values());
    let protocols = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .map(|(x, y)| preset.protocol(x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(protocols.par_iter().map(|qp| classify_protocol(qp, opts)).collect())
}
