use super::BoundedZone;
use crate::scalar::Scalar;

/// Difference-bound matrix with exact scalar constants, used to intersect a
/// 1-bounded zone with point constraints such as `x = 3/7` and to extract
/// concrete points.
#[derive(Debug, Clone)]
pub struct ExactDbm<T> {
    n: usize,
    m: Vec<Option<(T, bool)>>,
}

fn tighter<T: Scalar>(a: &(T, bool), b: &(T, bool)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 && !b.1)
}

impl<T: Scalar> ExactDbm<T> {
    pub fn from_zone(zone: &BoundedZone) -> Self {
        let n = zone.dim();
        let d = n + 1;
        let mut m = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let b = zone.entry(i, j);
                m.push(Some((T::from_int(b.value as i64), b.strict)));
            }
        }
        ExactDbm { n, m }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `x_i - x_j ≺ value` (index 0 is the zero coordinate).
    pub fn constrain(&mut self, i: usize, j: usize, value: T, strict: bool) {
        let k = i * (self.n + 1) + j;
        let new = (value, strict);
        match &self.m[k] {
            Some(old) if !tighter(&new, old) => {}
            _ => self.m[k] = Some(new),
        }
    }

    /// Adds `x_i - x_j = value`.
    pub fn constrain_eq(&mut self, i: usize, j: usize, value: T) {
        self.constrain(i, j, value.clone(), false);
        self.constrain(j, i, -value, false);
    }

    /// Shortest-path closure; returns `false` iff the constraints are
    /// unsatisfiable.
    pub fn close(&mut self) -> bool {
        let d = self.n + 1;
        for k in 0..d {
            for i in 0..d {
                let Some(ik) = self.m[i * d + k].clone() else {
                    continue;
                };
                for j in 0..d {
                    let Some(kj) = &self.m[k * d + j] else {
                        continue;
                    };
                    let via = (ik.0.clone() + kj.0.clone(), ik.1 || kj.1);
                    let cur = &self.m[i * d + j];
                    if cur.as_ref().is_none_or(|c| tighter(&via, c)) {
                        self.m[i * d + j] = Some(via);
                    }
                }
            }
        }
        (0..d).all(|i| match &self.m[i * d + i] {
            Some((v, s)) => !(v.is_negative() || (v.is_zero() && *s)),
            None => true,
        })
    }

    pub fn is_satisfiable(&self) -> bool {
        self.clone().close()
    }

    /// Some point satisfying all constraints, preferring closed endpoints to
    /// keep denominators small.
    pub fn pick_point(&self) -> Option<Vec<T>> {
        let mut dbm = self.clone();
        if !dbm.close() {
            return None;
        }
        let d = self.n + 1;
        let mut point = Vec::with_capacity(self.n);
        for k in 1..d {
            let hi = dbm.m[k * d].clone();
            let lo = dbm.m[k].clone().map(|(v, s)| (-v, s));
            let v = match (lo, hi) {
                (Some((l, false)), _) => l,
                (_, Some((h, false))) => h,
                (Some((l, _)), Some((h, _))) => (l + h).half(),
                (Some((l, _)), None) => l + T::one(),
                (None, Some((h, _))) => h - T::one(),
                (None, None) => T::zero(),
            };
            dbm.constrain_eq(k, 0, v.clone());
            if !dbm.close() {
                return None;
            }
            point.push(v);
        }
        Some(point)
    }
}
