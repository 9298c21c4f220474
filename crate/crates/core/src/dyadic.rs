//! The dyadic group at finite resolution.
//!
//! A point of the group is a sequence of coordinates `x_0, x_1, ...` in
//! `{0, 1}`. At resolution `M` only the first `M` coordinates are kept and a
//! point is stored as a slot index in `0..2^M`: coordinate `x_j` is bit `j` of
//! the index, with `x_0` the least-significant bit. Group addition is bitwise
//! XOR. Every other module relies on this convention; in particular the dyadic
//! interval `I_n(x)` is the set of slots whose low `n` bits agree with `x`,
//! which is a stride-`2^n` pattern.

use crate::error::{Error, Result};

/// Largest supported resolution (2^24 slots).
pub const MAX_RESOLUTION: u32 = 24;

pub(crate) fn check_resolution(resolution: u32) -> Result<()> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::InvalidResolution(resolution));
    }
    Ok(())
}

/// Number of slots at the given resolution.
#[inline]
pub fn slot_count(resolution: u32) -> usize {
    1usize << resolution
}

/// An element of the group truncated to `resolution` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupPoint {
    index: usize,
    resolution: u32,
}

impl GroupPoint {
    pub fn new(index: usize, resolution: u32) -> Result<Self> {
        check_resolution(resolution)?;
        if index >= slot_count(resolution) {
            return Err(Error::OutOfRange { index, resolution });
        }
        Ok(Self { index, resolution })
    }

    /// The identity element.
    pub fn zero(resolution: u32) -> Result<Self> {
        Self::new(0, resolution)
    }

    /// The point `e_n` whose only nonzero coordinate is `x_n`.
    pub fn unit(n: u32, resolution: u32) -> Result<Self> {
        check_resolution(resolution)?;
        if n >= resolution {
            return Err(Error::OutOfRange {
                index: n as usize,
                resolution,
            });
        }
        Self::new(1 << n, resolution)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Coordinate `x_j`; coordinates beyond the resolution are zero.
    pub fn coordinate(&self, j: u32) -> u8 {
        if j >= usize::BITS {
            return 0;
        }
        ((self.index >> j) & 1) as u8
    }
}

/// Builds the point with `x_j = bits[j]` and all remaining coordinates zero.
pub fn make_point(bits: &[u8], resolution: u32) -> Result<GroupPoint> {
    check_resolution(resolution)?;
    if bits.len() > resolution as usize {
        return Err(Error::ResolutionTooCoarse {
            rank: bits.len() as u32,
            resolution,
        });
    }
    let mut index = 0usize;
    for (j, &bit) in bits.iter().enumerate() {
        match bit {
            0 => {}
            1 => index |= 1 << j,
            other => return Err(Error::InvalidBit(other)),
        }
    }
    GroupPoint::new(index, resolution)
}

/// Group addition (coordinatewise modulo 2).
pub fn add(a: GroupPoint, b: GroupPoint) -> Result<GroupPoint> {
    if a.resolution != b.resolution {
        return Err(Error::ResolutionMismatch {
            left: a.resolution,
            right: b.resolution,
        });
    }
    Ok(GroupPoint {
        index: a.index ^ b.index,
        resolution: a.resolution,
    })
}

/// The dyadic interval `I_n(x)`: points agreeing with `x` in the first `n`
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    rank: u32,
    base: usize,
}

impl DyadicInterval {
    /// `I_rank(base)`. Only the low `rank` bits of `base` are retained.
    pub fn new(rank: u32, base: usize) -> Self {
        Self {
            rank,
            base: base & low_mask(rank),
        }
    }

    /// `I_rank(x)`.
    pub fn around(x: GroupPoint, rank: u32) -> Self {
        Self::new(rank, x.index())
    }

    /// `I_rank = I_rank(0)`.
    pub fn centered(rank: u32) -> Self {
        Self::new(rank, 0)
    }

    /// The whole group, `I_0`.
    pub fn whole() -> Self {
        Self::new(0, 0)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Base point index, reduced to the first `rank` coordinates.
    pub fn base(&self) -> usize {
        self.base
    }

    /// Haar measure `2^-rank`.
    pub fn measure(&self) -> f64 {
        (-(self.rank as f64)).exp2()
    }

    pub fn contains(&self, index: usize) -> bool {
        index & low_mask(self.rank) == self.base
    }

    /// Slots at `resolution` whose rank-`resolution` cosets make up the interval.
    pub fn indices(&self, resolution: u32) -> Result<Vec<usize>> {
        interval_indices(self, resolution)
    }
}

#[inline]
pub(crate) fn low_mask(bits: u32) -> usize {
    if bits >= usize::BITS {
        usize::MAX
    } else {
        (1usize << bits) - 1
    }
}

/// The `2^(M - n)` slot indices covering `I_n(x)` at resolution `M`, ascending.
pub fn interval_indices(interval: &DyadicInterval, resolution: u32) -> Result<Vec<usize>> {
    check_resolution(resolution)?;
    if interval.rank > resolution {
        return Err(Error::ResolutionTooCoarse {
            rank: interval.rank,
            resolution,
        });
    }
    let stride = 1usize << interval.rank;
    Ok((interval.base..slot_count(resolution))
        .step_by(stride)
        .collect())
}

/// One coset of the decomposition of `G \ I_M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosetClass {
    /// `I_{l+1}(e_k + e_l)` with `k < l < M`.
    Pair { k: u32, l: u32 },
    /// `I_M(e_k)` with `k < M`.
    Single { k: u32, resolution: u32 },
}

impl CosetClass {
    pub fn interval(&self) -> DyadicInterval {
        match *self {
            CosetClass::Pair { k, l } => DyadicInterval::new(l + 1, (1 << k) | (1 << l)),
            CosetClass::Single { k, resolution } => DyadicInterval::new(resolution, 1 << k),
        }
    }

    pub fn k(&self) -> u32 {
        match *self {
            CosetClass::Pair { k, .. } | CosetClass::Single { k, .. } => k,
        }
    }

    /// Short stable label used in reports, e.g. `pair(0,2)` or `single(1)`.
    pub fn label(&self) -> String {
        match *self {
            CosetClass::Pair { k, l } => format!("pair({k},{l})"),
            CosetClass::Single { k, .. } => format!("single({k})"),
        }
    }
}

/// Coset classes of `G \ I_M`: all pairs `k < l` first (ordered by `k`, then
/// `l`), followed by the singles `I_M(e_k)`.
pub fn complement_classes(resolution: u32) -> Result<Vec<CosetClass>> {
    check_resolution(resolution)?;
    let mut out = Vec::with_capacity((resolution * (resolution + 1) / 2) as usize);
    for k in 0..resolution {
        for l in (k + 1)..resolution {
            out.push(CosetClass::Pair { k, l });
        }
    }
    for k in 0..resolution {
        out.push(CosetClass::Single { k, resolution });
    }
    Ok(out)
}

/// Disjoint intervals whose union is `G \ I_M`.
pub fn complement_partition(resolution: u32) -> Result<Vec<DyadicInterval>> {
    Ok(complement_classes(resolution)?
        .iter()
        .map(CosetClass::interval)
        .collect())
}

/// A real function constant on the rank-`M` cosets, stored as `2^M` values.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicFunction {
    resolution: u32,
    values: Vec<f64>,
}

impl DyadicFunction {
    pub fn new(resolution: u32, values: Vec<f64>) -> Result<Self> {
        check_resolution(resolution)?;
        if values.len() != slot_count(resolution) {
            return Err(Error::LengthMismatch {
                len: values.len(),
                resolution,
            });
        }
        Ok(Self { resolution, values })
    }

    pub fn zeros(resolution: u32) -> Result<Self> {
        Self::constant(resolution, 0.0)
    }

    pub fn constant(resolution: u32, value: f64) -> Result<Self> {
        check_resolution(resolution)?;
        Ok(Self {
            resolution,
            values: vec![value; slot_count(resolution)],
        })
    }

    pub fn from_fn(resolution: u32, f: impl FnMut(usize) -> f64) -> Result<Self> {
        check_resolution(resolution)?;
        Ok(Self {
            resolution,
            values: (0..slot_count(resolution)).map(f).collect(),
        })
    }

    /// Indicator of a dyadic interval.
    pub fn indicator(interval: &DyadicInterval, resolution: u32) -> Result<Self> {
        if interval.rank() > resolution {
            return Err(Error::ResolutionTooCoarse {
                rank: interval.rank(),
                resolution,
            });
        }
        Self::from_fn(resolution, |i| if interval.contains(i) { 1.0 } else { 0.0 })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, x: GroupPoint) -> Result<f64> {
        if x.resolution() != self.resolution {
            return Err(Error::ResolutionMismatch {
                left: x.resolution(),
                right: self.resolution,
            });
        }
        Ok(self.values[x.index()])
    }

    /// Haar measure of one slot, `2^-M`.
    pub fn cell_measure(&self) -> f64 {
        (-(self.resolution as f64)).exp2()
    }

    /// Integral over the whole group.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_measure()
    }

    /// Integral over a dyadic interval.
    pub fn integrate(&self, over: &DyadicInterval) -> Result<f64> {
        let idx = interval_indices(over, self.resolution)?;
        Ok(idx.iter().map(|&i| self.values[i]).sum::<f64>() * self.cell_measure())
    }

    /// `x -> f(x + t)`.
    pub fn translate(&self, t: GroupPoint) -> Result<Self> {
        if t.resolution() != self.resolution {
            return Err(Error::ResolutionMismatch {
                left: t.resolution(),
                right: self.resolution,
            });
        }
        let shift = t.index();
        Ok(Self {
            resolution: self.resolution,
            values: (0..self.values.len())
                .map(|i| self.values[i ^ shift])
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            resolution: self.resolution,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if other.resolution != self.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: other.resolution,
            });
        }
        Ok(Self {
            resolution: self.resolution,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }

    /// `max |f|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The same function represented at a finer resolution.
    pub fn refine(&self, resolution: u32) -> Result<Self> {
        check_resolution(resolution)?;
        if resolution < self.resolution {
            return Err(Error::ResolutionTooCoarse {
                rank: self.resolution,
                resolution,
            });
        }
        let mask = low_mask(self.resolution);
        Self::from_fn(resolution, |i| self.values[i & mask])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_point_examples() {
        assert_eq!(make_point(&[], 4).unwrap().index(), 0);
        assert_eq!(make_point(&[0, 1], 4).unwrap().index(), 2);
        assert_eq!(make_point(&[0, 1], 4).unwrap(), GroupPoint::unit(1, 4).unwrap());
        assert_eq!(make_point(&[1, 0, 1], 4).unwrap().index(), 5);
    }

    #[test]
    fn make_point_errors() {
        assert_eq!(make_point(&[], 0), Err(Error::InvalidResolution(0)));
        assert_eq!(make_point(&[], 25), Err(Error::InvalidResolution(25)));
        assert!(matches!(
            make_point(&[1, 0, 1], 2),
            Err(Error::ResolutionTooCoarse { .. })
        ));
        assert_eq!(make_point(&[2], 3), Err(Error::InvalidBit(2)));
    }

    #[test]
    fn add_examples() {
        let e0 = GroupPoint::unit(0, 4).unwrap();
        let e1 = GroupPoint::unit(1, 4).unwrap();
        assert_eq!(add(e0, e0).unwrap().index(), 0);
        assert_eq!(add(e0, e1).unwrap().index(), 3);
        let a = GroupPoint::new(5, 4).unwrap();
        let b = GroupPoint::new(3, 4).unwrap();
        assert_eq!(add(a, b).unwrap().index(), 6);
        let c = GroupPoint::new(3, 5).unwrap();
        assert_eq!(
            add(a, c),
            Err(Error::ResolutionMismatch { left: 4, right: 5 })
        );
    }

    #[test]
    fn group_laws_exhaustive() {
        for m in 1..=6 {
            let n = slot_count(m);
            let zero = GroupPoint::zero(m).unwrap();
            for i in 0..n {
                let a = GroupPoint::new(i, m).unwrap();
                assert_eq!(add(a, zero).unwrap(), a);
                assert_eq!(add(a, a).unwrap(), zero);
                for j in 0..n {
                    let b = GroupPoint::new(j, m).unwrap();
                    assert_eq!(add(add(a, b).unwrap(), b).unwrap(), a);
                    assert_eq!(add(a, b).unwrap(), add(b, a).unwrap());
                    if m <= 4 {
                        for k in 0..n {
                            let c = GroupPoint::new(k, m).unwrap();
                            assert_eq!(
                                add(add(a, b).unwrap(), c).unwrap(),
                                add(a, add(b, c).unwrap()).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn group_laws_random(m in 7u32..=24, a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
            let mask = slot_count(m) - 1;
            let (a, b, c) = (
                GroupPoint::new(a & mask, m).unwrap(),
                GroupPoint::new(b & mask, m).unwrap(),
                GroupPoint::new(c & mask, m).unwrap(),
            );
            prop_assert_eq!(add(add(a, b).unwrap(), c).unwrap(), add(a, add(b, c).unwrap()).unwrap());
            prop_assert_eq!(add(add(a, b).unwrap(), b).unwrap(), a);
            prop_assert_eq!(add(a, GroupPoint::zero(m).unwrap()).unwrap(), a);
        }

        #[test]
        fn translation_preserves_integral(m in 1u32..=10, seed in any::<u64>(), t in any::<usize>()) {
            let mut state = seed;
            let f = DyadicFunction::from_fn(m, |_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 40) as f64) / 1024.0 - 8192.0
            }).unwrap();
            let t = GroupPoint::new(t & (slot_count(m) - 1), m).unwrap();
            let g = f.translate(t).unwrap();
            let mut a = f.values().to_vec();
            let mut b = g.values().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
            // dyadic-rational values: sums are exact in any order
            prop_assert_eq!(f.integral(), g.integral());
        }
    }

    #[test]
    fn interval_indices_examples() {
        let i1 = DyadicInterval::centered(1);
        assert_eq!(interval_indices(&i1, 3).unwrap(), vec![0, 2, 4, 6]);
        let im = DyadicInterval::centered(3);
        assert_eq!(interval_indices(&im, 3).unwrap(), vec![0]);
        let e0 = GroupPoint::unit(0, 3).unwrap();
        let i2e0 = DyadicInterval::around(e0, 2);
        assert_eq!(interval_indices(&i2e0, 3).unwrap(), vec![1, 5]);
        assert!(matches!(
            interval_indices(&DyadicInterval::centered(4), 3),
            Err(Error::ResolutionTooCoarse { rank: 4, resolution: 3 })
        ));
    }

    #[test]
    fn interval_indices_count_and_membership() {
        for m in 1..=8 {
            for n in 0..=m {
                for base in 0..slot_count(n) {
                    let iv = DyadicInterval::new(n, base);
                    let idx = iv.indices(m).unwrap();
                    assert_eq!(idx.len(), slot_count(m - n));
                    let brute: Vec<usize> = (0..slot_count(m))
                        .filter(|&y| (0..n).all(|j| (y >> j) & 1 == (base >> j) & 1))
                        .collect();
                    assert_eq!(idx, brute);
                }
            }
        }
    }

    #[test]
    fn complement_partition_examples() {
        let p1 = complement_partition(1).unwrap();
        assert_eq!(p1, vec![DyadicInterval::new(1, 1)]);
        assert_eq!(p1.iter().map(DyadicInterval::measure).sum::<f64>(), 0.5);

        let p2 = complement_partition(2).unwrap();
        assert_eq!(
            p2,
            vec![
                DyadicInterval::new(2, 3),
                DyadicInterval::new(2, 1),
                DyadicInterval::new(2, 2)
            ]
        );
        assert_eq!(p2.iter().map(DyadicInterval::measure).sum::<f64>(), 0.75);

        let p4 = complement_partition(4).unwrap();
        assert_eq!(p4.len(), 10);
        assert_eq!(p4.iter().map(DyadicInterval::measure).sum::<f64>(), 15.0 / 16.0);
    }

    #[test]
    fn complement_partition_is_disjoint_cover() {
        for m in 1..=12 {
            let parts = complement_partition(m).unwrap();
            let mut hits = vec![0u32; slot_count(m)];
            for iv in &parts {
                for i in iv.indices(m).unwrap() {
                    hits[i] += 1;
                }
            }
            assert_eq!(hits[0], 0, "I_M must be excluded at M={m}");
            assert!(hits[1..].iter().all(|&h| h == 1), "not a disjoint cover at M={m}");
            let total: f64 = parts.iter().map(DyadicInterval::measure).sum();
            assert_eq!(total, 1.0 - (-(m as f64)).exp2());
        }
    }

    #[test]
    fn integrate_examples() {
        let one = DyadicFunction::constant(5, 1.0).unwrap();
        assert_eq!(one.integrate(&DyadicInterval::whole()).unwrap(), 1.0);
        for n in 0..=5 {
            assert_eq!(
                one.integrate(&DyadicInterval::centered(n)).unwrap(),
                (-(n as f64)).exp2()
            );
        }
        // D_8 at M = 4: 8 on I_3, zero elsewhere
        let d8 = DyadicFunction::from_fn(4, |i| if i & 7 == 0 { 8.0 } else { 0.0 }).unwrap();
        assert_eq!(d8.integral(), 1.0);
        assert!(matches!(
            one.integrate(&DyadicInterval::centered(6)),
            Err(Error::ResolutionTooCoarse { .. })
        ));
    }

    #[test]
    fn function_shape_errors() {
        assert!(matches!(
            DyadicFunction::new(3, vec![0.0; 7]),
            Err(Error::LengthMismatch { len: 7, resolution: 3 })
        ));
        let f = DyadicFunction::zeros(3).unwrap();
        let g = DyadicFunction::zeros(4).unwrap();
        assert!(f.linear_combination(1.0, &g, 1.0).is_err());
    }

    #[test]
    fn refine_keeps_values_on_cosets() {
        let f = DyadicFunction::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let g = f.refine(4).unwrap();
        assert_eq!(g.integral(), f.integral());
        for i in 0..16 {
            assert_eq!(g.values()[i], f.values()[i & 3]);
        }
    }
}
