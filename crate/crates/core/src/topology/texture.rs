//! Spin textures on the Brillouin zone and static winding angles.

use super::spectrum::map_grid;
use crate::error::{Error, Result};
use crate::floquet::{effective_bloch_at, Band, DEFAULT_DEGENERACY_TOL};
use crate::model::{KPoint, QuenchProtocol};
use crate::vec3::Vec3;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// Both planar components below this magnitude count as a singular point.
pub const SINGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    fn parse(c: char) -> Result<Axis> {
        match c {
            'x' | 'X' => Ok(Axis::X),
            'y' | 'Y' => Ok(Axis::Y),
            'z' | 'Z' => Ok(Axis::Z),
            other => Err(Error::invalid("axes", format!("unknown axis {other:?}"))),
        }
    }

    pub fn of(self, v: Vec3) -> f64 {
        v[self.index()]
    }
}

/// An ordered triple `(i; j, l)`: the winding angle is built from components
/// `j` and `l`, and `i` supplies the weight sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxisChoice {
    pub i: Axis,
    pub j: Axis,
    pub l: Axis,
}

impl AxisChoice {
    pub const XYZ: AxisChoice = AxisChoice {
        i: Axis::X,
        j: Axis::Y,
        l: Axis::Z,
    };
    pub const YZX: AxisChoice = AxisChoice {
        i: Axis::Y,
        j: Axis::Z,
        l: Axis::X,
    };
    pub const ZXY: AxisChoice = AxisChoice {
        i: Axis::Z,
        j: Axis::X,
        l: Axis::Y,
    };
    pub const CYCLIC: [AxisChoice; 3] = [Self::XYZ, Self::YZX, Self::ZXY];

    pub fn new(i: Axis, j: Axis, l: Axis) -> Result<Self> {
        if i == j || j == l || i == l {
            return Err(Error::invalid("axes", "i, j, l must be distinct"));
        }
        Ok(Self { i, j, l })
    }

    /// Completes `(j, l)` with the remaining axis as `i`.
    pub fn from_pair(j: Axis, l: Axis) -> Result<Self> {
        let i = Axis::ALL
            .into_iter()
            .find(|a| *a != j && *a != l)
            .ok_or_else(|| Error::invalid("axes", "j and l must differ"))?;
        Self::new(i, j, l)
    }

    /// `+1` for cyclic `(i, j, l)`, `−1` otherwise. The raw weighted winding
    /// sum changes sign with the orientation of `(i, j, l)`.
    pub fn parity(&self) -> i64 {
        let (i, j) = (self.i.index(), self.j.index());
        if (i + 1) % 3 == j {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for AxisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{},{}", self.i.name(), self.j.name(), self.l.name())
    }
}

impl std::str::FromStr for AxisChoice {
    type Err = Error;

    /// Accepts `"z;x,y"` or `"zxy"`.
    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().filter(|c| c.is_ascii_alphabetic()).collect();
        if letters.len() != 3 {
            return Err(Error::invalid(
                "axes",
                format!("expected three axes like z;x,y, got {s:?}"),
            ));
        }
        Self::new(
            Axis::parse(letters[0])?,
            Axis::parse(letters[1])?,
            Axis::parse(letters[2])?,
        )
    }
}

/// Winding angle of the planar pair `(s_l, s_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingAngle {
    /// `arctan(s_j / s_l)` in `(−π/2, π/2]`.
    pub theta: f64,
    /// Full angle of `(s_l, s_j)` in `(−π, π]`.
    pub full: f64,
}

pub fn full_angle(s: Vec3, j: Axis, l: Axis) -> f64 {
    let a = j.of(s).atan2(l.of(s));
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Folds a full angle onto the principal arctangent branch `(−π/2, π/2]`.
pub fn fold_to_arctan(full: f64) -> f64 {
    if full > FRAC_PI_2 {
        full - PI
    } else if full <= -FRAC_PI_2 {
        full + PI
    } else {
        full
    }
}

/// Static winding angle `θ_jl` of one texture triple, with its full-angle
/// companion.
pub fn swa(s: Vec3, j: Axis, l: Axis) -> Result<WindingAngle> {
    if j.of(s).abs() < SINGULAR_TOL && l.of(s).abs() < SINGULAR_TOL {
        return Err(Error::SingularPoint { k: None });
    }
    let full = full_angle(s, j, l);
    Ok(WindingAngle {
        theta: fold_to_arctan(full),
        full,
    })
}

/// Anything that yields a spin triple at an arbitrary `k`.
pub trait Texture {
    fn spin(&self, k: KPoint) -> Vec3;
}

impl<F: Fn(KPoint) -> Vec3> Texture for F {
    fn spin(&self, k: KPoint) -> Vec3 {
        self(k)
    }
}

/// Pure eigenstate texture of one band, evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct BandTexture {
    pub qp: QuenchProtocol,
    pub band: Band,
}

impl Texture for BandTexture {
    fn spin(&self, k: KPoint) -> Vec3 {
        effective_bloch_at(&self.qp, k, DEFAULT_DEGENERACY_TOL)
            .ok()
            .and_then(|d| d.band_vector(self.band))
            .unwrap_or(Vec3::ZERO)
    }
}

/// Spin triples on the uniform grid `k = (−π + 2π i1/n1, −π + 2π i2/n2)`.
#[derive(Debug, Clone)]
pub struct SpinTextureGrid {
    pub n1: usize,
    pub n2: usize,
    /// Row-major in `i1`.
    pub values: Vec<Vec3>,
    pub band: Option<Band>,
    /// Nodes where the quasienergy gap closed; their value is zero.
    pub degenerate_points: Vec<(usize, usize)>,
}

impl SpinTextureGrid {
    pub fn from_values(n1: usize, n2: usize, values: Vec<Vec3>) -> Self {
        assert_eq!(values.len(), n1 * n2);
        Self {
            n1,
            n2,
            values,
            band: None,
            degenerate_points: Vec::new(),
        }
    }

    /// Samples an arbitrary texture on the grid.
    pub fn sample<T: Texture + Sync>(texture: &T, n1: usize, n2: usize) -> Self {
        Self::from_values(n1, n2, map_grid(n1, n2, |_, _, k| texture.spin(k)))
    }

    /// Eigenstate texture `±d̂` of `band` for the quench `qp`.
    pub fn for_band(qp: &QuenchProtocol, band: Band, n: usize, tol: f64) -> Self {
        let raw = map_grid(n, n, |_, _, k| {
            effective_bloch_at(qp, k, tol).ok().and_then(|d| d.band_vector(band))
        });
        let mut degenerate_points = Vec::new();
        let values = raw
            .into_iter()
            .enumerate()
            .map(|(idx, v)| {
                v.unwrap_or_else(|| {
                    degenerate_points.push((idx / n, idx % n));
                    Vec3::ZERO
                })
            })
            .collect();
        Self {
            n1: n,
            n2: n,
            values,
            band: Some(band),
            degenerate_points,
        }
    }

    pub fn at(&self, i1: usize, i2: usize) -> Vec3 {
        self.values[(i1 % self.n1) * self.n2 + (i2 % self.n2)]
    }

    pub fn k(&self, i1: usize, i2: usize) -> KPoint {
        KPoint::on_grid(i1, i2, self.n1, self.n2)
    }

    /// Fractional grid coordinates of `k`, in `[0, n)`.
    pub fn grid_coords(&self, k: KPoint) -> (f64, f64) {
        let k = KPoint::new(k.k1, k.k2);
        let x = (k.k1 + PI) / (2.0 * PI) * self.n1 as f64;
        let y = (k.k2 + PI) / (2.0 * PI) * self.n2 as f64;
        (x.rem_euclid(self.n1 as f64), y.rem_euclid(self.n2 as f64))
    }

    pub fn degenerate_kpoints(&self) -> Vec<KPoint> {
        self.degenerate_points.iter().map(|&(a, b)| self.k(a, b)).collect()
    }
}

impl Texture for SpinTextureGrid {
    /// Periodic bilinear interpolation.
    fn spin(&self, k: KPoint) -> Vec3 {
        let (x, y) = self.grid_coords(k);
        let (i1, i2) = (x.floor() as usize % self.n1, y.floor() as usize % self.n2);
        let (u, v) = (x - x.floor(), y - y.floor());
        self.at(i1, i2) * ((1.0 - u) * (1.0 - v))
            + self.at(i1 + 1, i2) * (u * (1.0 - v))
            + self.at(i1 + 1, i2 + 1) * (u * v)
            + self.at(i1, i2 + 1) * ((1.0 - u) * v)
    }
}
