//! 1-bounded zones: convex subsets of `[0,1]^n` cut out by difference
//! constraints with constants in `{-1, 0, 1}`, stored as canonical
//! difference-bound matrices.
//!
//! Row/column 0 is the reference coordinate fixed at zero; entry `(i, j)`
//! bounds `x_i - x_j`.

mod exact;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::model::{ClockId, ClockSet, Guard, GuardRel};
use crate::scalar::Scalar;

pub use exact::ExactDbm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZoneError {
    #[error("integer part {value} of clock {clock} exceeds cap {cap}")]
    IntPartAboveCap { clock: usize, value: u32, cap: u32 },
    #[error("guard constant {constant} is not below cap {cap}")]
    ConstantAboveCap { constant: u32, cap: u32 },
    #[error("expected {expected} integer parts, got {found}")]
    Dimension { expected: usize, found: usize },
}

/// Upper bound `≤ value` or `< value` on a difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bound {
    pub value: i8,
    pub strict: bool,
}

impl Bound {
    pub const fn weak(value: i8) -> Bound {
        Bound {
            value,
            strict: false,
        }
    }

    pub const fn strict(value: i8) -> Bound {
        Bound {
            value,
            strict: true,
        }
    }

    fn key(self) -> (i8, u8) {
        (self.value, if self.strict { 0 } else { 1 })
    }

    fn add(self, other: Bound) -> Bound {
        Bound {
            value: self.value + other.value,
            strict: self.strict || other.strict,
        }
    }

    /// Whether `d ≺ self` holds for the exact difference `d`.
    pub fn admits<T: Scalar>(self, d: &T) -> bool {
        let c = T::from_int(self.value as i64);
        if self.strict {
            *d < c
        } else {
            *d <= c
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.strict { "<" } else { "<=" }, self.value)
    }
}

const LE0: Bound = Bound::weak(0);
const LE1: Bound = Bound::weak(1);

/// Unclosed matrix of optional bounds, `None` meaning unconstrained.
#[derive(Debug, Clone)]
pub struct RawDbm {
    n: usize,
    entries: Vec<Option<Bound>>,
}

impl RawDbm {
    pub fn unconstrained(n: usize) -> Self {
        RawDbm {
            n,
            entries: vec![None; (n + 1) * (n + 1)],
        }
    }

    /// Adds `x_i - x_j ≺ bound`, where index 0 is the zero coordinate and
    /// clock `c` has index `c + 1`.
    pub fn constrain(&mut self, i: usize, j: usize, bound: Bound) -> &mut Self {
        let k = i * (self.n + 1) + j;
        self.entries[k] = Some(match self.entries[k] {
            Some(b) => b.min(bound),
            None => bound,
        });
        self
    }

    pub fn upper(&mut self, c: ClockId, bound: Bound) -> &mut Self {
        self.constrain(c.0 + 1, 0, bound)
    }

    /// `-x ≺ bound`.
    pub fn neg_lower(&mut self, c: ClockId, bound: Bound) -> &mut Self {
        self.constrain(0, c.0 + 1, bound)
    }

    pub fn diff(&mut self, a: ClockId, b: ClockId, bound: Bound) -> &mut Self {
        self.constrain(a.0 + 1, b.0 + 1, bound)
    }

    pub fn eq_const(&mut self, c: ClockId, value: i8) -> &mut Self {
        self.upper(c, Bound::weak(value));
        self.neg_lower(c, Bound::weak(-value))
    }
}

/// A non-empty 1-bounded zone in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundedZone {
    n: u8,
    m: Box<[Bound]>,
}

/// Tightest closed form of `raw` intersected with `[0,1]^n`, or `None` if
/// the constraints are unsatisfiable.
pub fn canonicalize(raw: &RawDbm) -> Option<BoundedZone> {
    let n = raw.n;
    let d = n + 1;
    let mut m = vec![LE1; d * d];
    for i in 0..d {
        for j in 0..d {
            let unit = if i == j || i == 0 { LE0 } else { LE1 };
            m[i * d + j] = match raw.entries[i * d + j] {
                Some(b) => b.min(unit),
                None => unit,
            };
        }
    }
    close(n, m)
}

fn close(n: usize, mut m: Vec<Bound>) -> Option<BoundedZone> {
    let d = n + 1;
    for k in 0..d {
        for i in 0..d {
            let ik = m[i * d + k];
            for j in 0..d {
                let via = ik.add(m[k * d + j]);
                if via < m[i * d + j] {
                    m[i * d + j] = via;
                }
            }
        }
    }
    if (0..d).any(|i| m[i * d + i] < LE0) {
        return None;
    }
    Some(BoundedZone {
        n: n as u8,
        m: m.into_boxed_slice(),
    })
}

impl BoundedZone {
    /// `{0}`.
    pub fn origin(n: usize) -> Self {
        let mut raw = RawDbm::unconstrained(n);
        for c in 0..n {
            raw.upper(ClockId(c), LE0);
        }
        canonicalize(&raw).expect("origin is non-empty")
    }

    /// `[0,1]^n`.
    pub fn unit_box(n: usize) -> Self {
        canonicalize(&RawDbm::unconstrained(n)).expect("unit box is non-empty")
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Bound on `x_i - x_j` with 0 as the zero coordinate.
    pub fn entry(&self, i: usize, j: usize) -> Bound {
        self.m[i * (self.dim() + 1) + j]
    }

    pub fn upper(&self, c: ClockId) -> Bound {
        self.entry(c.0 + 1, 0)
    }

    pub fn neg_lower(&self, c: ClockId) -> Bound {
        self.entry(0, c.0 + 1)
    }

    fn to_raw(&self) -> RawDbm {
        RawDbm {
            n: self.dim(),
            entries: self.m.iter().map(|&b| Some(b)).collect(),
        }
    }

    /// Intersection with the extra constraints in `extra`.
    pub fn intersect(&self, extra: &RawDbm) -> Option<BoundedZone> {
        assert_eq!(extra.n, self.dim());
        let mut raw = self.to_raw();
        for (k, e) in extra.entries.iter().enumerate() {
            if let Some(b) = e {
                raw.entries[k] = Some(raw.entries[k].map_or(*b, |a| a.min(*b)));
            }
        }
        canonicalize(&raw)
    }

    pub fn contains_zone(&self, other: &BoundedZone) -> bool {
        self.m.iter().zip(other.m.iter()).all(|(a, b)| b <= a)
    }

    /// Renders the tightest constraints, clock differences first, then upper
    /// and negated lower bounds, e.g. `x-y<=0 & y-x<=0 & x<=1 & -x<=0`.
    pub fn display_with(&self, names: &[String]) -> String {
        let n = self.dim();
        let name = |i: usize| names.get(i - 1).cloned().unwrap_or_else(|| format!("c{i}"));
        let mut parts = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    parts.push(format!("{}-{}{}", name(i), name(j), self.entry(i, j)));
                }
            }
        }
        for i in 1..=n {
            parts.push(format!("{}{}", name(i), self.entry(i, 0)));
        }
        for i in 1..=n {
            parts.push(format!("-{}{}", name(i), self.entry(0, i)));
        }
        if parts.is_empty() {
            "true".into()
        } else {
            parts.join(" & ")
        }
    }
}

impl fmt::Display for BoundedZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim()).map(|i| format!("x{}", i + 1)).collect();
        f.write_str(&self.display_with(&names))
    }
}

/// `{ν + t : ν ∈ Z, t ≥ 0} ∩ [0,1]^n`.
pub fn time_successor(zone: &BoundedZone) -> BoundedZone {
    let n = zone.dim();
    let d = n + 1;
    let mut m = zone.m.to_vec();
    for i in 1..d {
        m[i * d] = LE1;
    }
    close(n, m).expect("future of a non-empty zone is non-empty")
}

/// `Z[λ ← 0]`.
pub fn zone_reset(zone: &BoundedZone, resets: ClockSet) -> BoundedZone {
    let n = zone.dim();
    let d = n + 1;
    let mut m = zone.m.to_vec();
    for c in resets.iter() {
        let x = c.0 + 1;
        for k in 0..d {
            m[x * d + k] = m[k];
            m[k * d + x] = m[k * d];
        }
        m[x * d + x] = LE0;
    }
    close(n, m).expect("reset of a non-empty zone is non-empty")
}

/// `(Z ∩ [x = 1])[x ← 0]`, or `None` when `Z` never reaches `x = 1`.
pub fn wrap_face(zone: &BoundedZone, clock: ClockId) -> Option<BoundedZone> {
    let mut raw = RawDbm::unconstrained(zone.dim());
    raw.eq_const(clock, 1);
    let face = zone.intersect(&raw)?;
    Some(zone_reset(&face, ClockSet::singleton(clock)))
}

/// `{ν ∈ Z : υ + ν ⊨ φ}` where `υ = int_parts`.
///
/// `caps[x]` bounds the integer part of `x`; the value `caps[x]` stands for
/// "strictly more than `caps[x] - 1`". Since every constant compared with `x`
/// is below its cap, such a clock satisfies every `x > k` atom and no `x < k`
/// or `x = k` atom.
pub fn guard_restrict(
    zone: &BoundedZone,
    int_parts: &[u32],
    caps: &[u32],
    guard: &Guard,
) -> Result<Option<BoundedZone>, ZoneError> {
    for len in [int_parts.len(), caps.len()] {
        if len != zone.dim() {
            return Err(ZoneError::Dimension {
                expected: zone.dim(),
                found: len,
            });
        }
    }
    if let Some((c, &v)) = int_parts.iter().enumerate().find(|&(c, &v)| v > caps[c]) {
        return Err(ZoneError::IntPartAboveCap {
            clock: c,
            value: v,
            cap: caps[c],
        });
    }
    let mut raw = RawDbm::unconstrained(zone.dim());
    for a in &guard.atoms {
        let cap = caps[a.clock.0];
        if a.constant >= cap {
            return Err(ZoneError::ConstantAboveCap {
                constant: a.constant,
                cap,
            });
        }
        let u = int_parts[a.clock.0];
        if u == cap {
            if a.rel == GuardRel::Gt {
                continue;
            }
            return Ok(None);
        }
        // Fractional threshold k - υ(x); the fraction lives in [0, 1].
        let t = a.constant as i64 - u as i64;
        match a.rel {
            GuardRel::Lt => match t {
                t if t <= 0 => return Ok(None),
                1 => {
                    raw.upper(a.clock, Bound::strict(1));
                }
                _ => {}
            },
            GuardRel::Eq => match t {
                0 | 1 => {
                    raw.eq_const(a.clock, t as i8);
                }
                _ => return Ok(None),
            },
            GuardRel::Gt => match t {
                t if t < 0 => {}
                0 => {
                    raw.neg_lower(a.clock, Bound::strict(0));
                }
                _ => return Ok(None),
            },
        }
    }
    Ok(zone.intersect(&raw))
}

/// Exact membership of a point of `[0,1]^n`.
pub fn zone_member<T: Scalar>(zone: &BoundedZone, point: &[T]) -> bool {
    let n = zone.dim();
    if point.len() != n {
        return false;
    }
    let zero = T::zero();
    let coord = |i: usize| if i == 0 { &zero } else { &point[i - 1] };
    (0..=n).all(|i| {
        (0..=n).all(|j| i == j || zone.entry(i, j).admits(&(coord(i).clone() - coord(j).clone())))
    })
}

/// Smallest 1-bounded zone containing `point ∈ [0,1]^n`: it fixes which
/// coordinates are 0 or 1 and the order of all coordinates.
pub fn point_region<T: Scalar>(point: &[T]) -> Option<BoundedZone> {
    let n = point.len();
    let zero = T::zero();
    let coord = |i: usize| if i == 0 { &zero } else { &point[i - 1] };
    let mut raw = RawDbm::unconstrained(n);
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let d = coord(i).clone() - coord(j).clone();
            let bound = if d.is_integral() {
                let v = d.floor_int();
                if !(-1..=1).contains(&v) {
                    return None;
                }
                Bound::weak(v as i8)
            } else {
                let v = d.floor_int();
                if !(-1..=0).contains(&v) {
                    return None;
                }
                Bound::strict(v as i8 + 1)
            };
            raw.constrain(i, j, bound);
        }
    }
    canonicalize(&raw)
}

/// Upper bound `(2n+1)!` on the number of distinct 1-bounded zones over `n`
/// clocks, saturating.
pub fn zone_count_bound(n: usize) -> u128 {
    (1..=(2 * n as u128 + 1)).fold(1u128, |acc, k| acc.saturating_mul(k))
}
