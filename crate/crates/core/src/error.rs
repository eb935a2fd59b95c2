use crate::model::KPoint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

fn list_points(points: &[KPoint]) -> String {
    const SHOWN: usize = 8;
    let mut s = points
        .iter()
        .take(SHOWN)
        .map(|k| format!("({:.6}, {:.6})", k.k1, k.k2))
        .collect::<Vec<_>>()
        .join(", ");
    if points.len() > SHOWN {
        s.push_str(&format!(" ... ({} total)", points.len()));
    }
    s
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("quasienergy gap closed{}", .k.map(|k| format!(" at k = ({:.6}, {:.6})", k.k1, k.k2)).unwrap_or_default())]
    DegeneratePoint { k: Option<KPoint> },

    #[error("quasienergy gap closed on the grid at {}", list_points(.points))]
    DegenerateGrid { points: Vec<KPoint> },

    #[error("plaquette sum {value} is not quantized (max plaquette phase {max_plaquette:.3} rad); refine the grid")]
    NonQuantized { value: f64, max_plaquette: f64 },

    #[error("both winding-angle components vanish{}", .k.map(|k| format!(" at k = ({:.6}, {:.6})", k.k1, k.k2)).unwrap_or_default())]
    SingularPoint { k: Option<KPoint> },

    #[error("opposite-winding singularities near ({:.6}, {:.6}) and ({:.6}, {:.6}) are unresolved; refine the grid", .a.k1, .a.k2, .b.k1, .b.k2)]
    UnresolvedSingularity { a: KPoint, b: KPoint },

    #[error("loop sample {index} jumps by {jump:.4} rad after unwrapping; increase samples")]
    AmbiguousUnwrap { index: usize, jump: f64 },

    #[error("weighted winding sum {sum} is odd; singularities missed or weights wrong")]
    OddSum { sum: i64 },

    #[error("weight gap |c+|^2 - |c-|^2 below {threshold} or of mixed sign at {}", list_points(.points))]
    WeightGapViolation { threshold: f64, points: Vec<KPoint> },

    #[error("field vanishes; no pulse axis defined")]
    ZeroField,

    #[error("fit diverged after {iterations} iterations (residual norm {residual})")]
    FitDiverged { iterations: usize, residual: f64 },

    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Invalid { .. } | Error::Io(_))
    }
}
