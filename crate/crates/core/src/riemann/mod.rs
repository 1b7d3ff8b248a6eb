//! Sheet labels of the three-body energy surface and the root-locus
//! geometry bounding the domains where continued kernels stay holomorphic.

mod hol;
mod loci;

pub use hol::{pihol_membership, HolGeometry};
pub use loci::{
    locus_eq23, locus_quadr, locus_quadrprime, parabola_contains, quadr0_residual, quadr_residual,
    quadr_roots, quadrprime_residual, eq23_residual, RootLocus,
};

use crate::{Error, Result, C64};
use std::collections::BTreeMap;
use std::fmt;

/// Two thresholds closer than this (relative) are treated as one level.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A pair threshold: bound-state energy `lambda` of level `j` in subsystem `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub alpha: u8,
    pub j: u32,
    pub lambda: f64,
}

/// Pair thresholds (all negative) sorted ascending; the breakup threshold sits at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    entries: Vec<Threshold>,
    // group id per entry, equal-energy entries share an id; ids ordered by energy
    group: Vec<usize>,
    levels: Vec<f64>,
}

impl ThresholdSet {
    pub fn new(mut entries: Vec<Threshold>) -> Result<Self> {
        for t in &entries {
            if !(t.lambda < 0.0) || !t.lambda.is_finite() {
                return Err(Error::Domain(format!("threshold {} not strictly negative", t.lambda)));
            }
            if !(1..=3).contains(&t.alpha) {
                return Err(Error::Domain(format!("subsystem index {} not in 1..=3", t.alpha)));
            }
        }
        entries.sort_by(|a, b| {
            a.lambda.partial_cmp(&b.lambda).unwrap().then(a.alpha.cmp(&b.alpha)).then(a.j.cmp(&b.j))
        });
        for w in entries.windows(2) {
            if w[0].alpha == w[1].alpha && w[0].j == w[1].j {
                return Err(Error::Domain(format!("duplicate label ({}, {})", w[0].alpha, w[0].j)));
            }
        }
        let mut group = Vec::with_capacity(entries.len());
        let mut levels: Vec<f64> = Vec::new();
        for t in &entries {
            match levels.last() {
                Some(&l) if (t.lambda - l).abs() <= DEGENERACY_TOL * l.abs() => {}
                _ => levels.push(t.lambda),
            }
            group.push(levels.len() - 1);
        }
        Ok(Self { entries, group, levels })
    }

    pub fn entries(&self) -> &[Threshold] {
        &self.entries
    }

    /// Distinct pair-threshold energies, ascending.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lambda_min(&self) -> Option<f64> {
        self.levels.first().copied()
    }

    pub fn lambda_max(&self) -> Option<f64> {
        self.levels.last().copied()
    }

    pub fn group_of(&self, alpha: u8, j: u32) -> Option<usize> {
        self.entries.iter().position(|t| t.alpha == alpha && t.j == j).map(|i| self.group[i])
    }

    /// Number of cut segments: between adjacent distinct levels, the last
    /// one ending at the breakup threshold, plus the ray E > 0.
    pub fn segments(&self) -> Vec<Segment> {
        let mut v: Vec<Segment> = (0..self.levels.len()).map(Segment::Below).collect();
        v.push(Segment::AboveBreakup);
        v
    }

    /// Which segment contains the real energy `e` (None on a threshold or below λ_min).
    pub fn segment_of(&self, e: f64) -> Option<Segment> {
        if e > 0.0 {
            return Some(Segment::AboveBreakup);
        }
        for k in 0..self.levels.len() {
            let hi = self.levels.get(k + 1).copied().unwrap_or(0.0);
            if e > self.levels[k] && e < hi {
                return Some(Segment::Below(k));
            }
        }
        None
    }
}

/// A piece of the cut [λ_min, ∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    /// Interval from distinct level `k` to the next level (or to 0 for the last one).
    Below(usize),
    /// The ray E > 0.
    AboveBreakup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    FromBelow,
    FromAbove,
}

/// Sheet label l = (l0, {l_{α,j}}).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub l0: i32,
    pub flags: BTreeMap<(u8, u32), u8>,
}

impl MultiIndex {
    pub fn physical(ts: &ThresholdSet) -> Self {
        Self { l0: 0, flags: ts.entries.iter().map(|t| ((t.alpha, t.j), 0)).collect() }
    }

    /// All pair flags set to 1 and the given l0 (the sheets l^± and l^(1)).
    pub fn all_flags(ts: &ThresholdSet, l0: i32) -> Self {
        Self { l0, flags: ts.entries.iter().map(|t| ((t.alpha, t.j), 1)).collect() }
    }

    /// Build from one flag per distinct level (ties enforced by construction).
    pub fn from_level_bits(ts: &ThresholdSet, l0: i32, bits: &[u8]) -> Result<Self> {
        if bits.len() != ts.levels.len() || bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain("level bits must be 0/1, one per distinct threshold".into()));
        }
        let flags = ts.entries.iter().zip(&ts.group).map(|(t, &g)| ((t.alpha, t.j), bits[g])).collect();
        Ok(Self { l0, flags })
    }

    pub fn flag(&self, alpha: u8, j: u32) -> u8 {
        self.flags.get(&(alpha, j)).copied().unwrap_or(0)
    }

    pub fn is_physical(&self) -> bool {
        self.l0 == 0 && self.flags.values().all(|&f| f == 0)
    }

    /// Structural validity against a threshold set: same labels, bits, tied degenerate flags,
    /// |l0| ≤ 1.
    pub fn validate(&self, ts: &ThresholdSet) -> Result<()> {
        if self.l0.abs() > 1 {
            return Err(Error::Sheet(format!("l0 = {} outside the surface", self.l0)));
        }
        if self.flags.len() != ts.len() {
            return Err(Error::Sheet("flag labels do not match thresholds".into()));
        }
        let mut by_group: BTreeMap<usize, u8> = BTreeMap::new();
        for (t, &g) in ts.entries.iter().zip(&ts.group) {
            let f = *self
                .flags
                .get(&(t.alpha, t.j))
                .ok_or_else(|| Error::Sheet(format!("missing flag ({}, {})", t.alpha, t.j)))?;
            if f > 1 {
                return Err(Error::Sheet("flag not a bit".into()));
            }
            if let Some(&prev) = by_group.get(&g) {
                if prev != f {
                    return Err(Error::Sheet(format!("degenerate threshold {} has untied flags", t.lambda)));
                }
            }
            by_group.insert(g, f);
        }
        Ok(())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.l0)?;
        for ((a, j), v) in &self.flags {
            write!(f, ";{a}.{j}={v}")?;
        }
        write!(f, ")")
    }
}

/// Pasting rule: the sheet reached when z crosses `segment` of the cut.
pub fn cross_cut(sheet: &MultiIndex, segment: Segment, dir: Direction, ts: &ThresholdSet) -> Result<MultiIndex> {
    sheet.validate(ts)?;
    let left = match segment {
        Segment::Below(k) => {
            *ts.levels.get(k).ok_or_else(|| Error::Domain(format!("no segment {k}")))?
        }
        Segment::AboveBreakup => 0.0,
    };
    let mut out = sheet.clone();
    for (t, &g) in ts.entries.iter().zip(&ts.group) {
        // compare by group so ties never split
        if ts.levels[g] <= left {
            let f = out.flags.get_mut(&(t.alpha, t.j)).expect("validated");
            *f ^= 1;
        }
    }
    if segment == Segment::AboveBreakup {
        out.l0 += match dir {
            Direction::FromBelow => 1,
            Direction::FromAbove => -1,
        };
        if out.l0.abs() > 1 {
            return Err(Error::Sheet(format!("crossing leaves the surface: l0 would be {}", out.l0)));
        }
    }
    Ok(out)
}

/// A complex energy located on a sheet.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetPoint {
    pub z: C64,
    pub sheet: MultiIndex,
    pub in_resonance_cut: bool,
    pub in_hol_domain: bool,
}

impl SheetPoint {
    /// Checks the half-plane rules for three-body sheets; `res_tube` is the distance
    /// from a ray of Z_res below which the point is flagged as on the cut.
    pub fn new(
        z: C64,
        sheet: MultiIndex,
        geom: &HolGeometry,
        pair_resonances: &[C64],
        res_tube: f64,
    ) -> Result<Self> {
        sheet.validate(&geom.thresholds)?;
        if sheet.l0 == 1 && !(z.im > 0.0) {
            return Err(Error::Sheet("l0 = +1 requires Im z > 0".into()));
        }
        if sheet.l0 == -1 && !(z.im < 0.0) {
            return Err(Error::Sheet("l0 = -1 requires Im z < 0".into()));
        }
        let in_resonance_cut = sheet.l0 != 0 && pair_resonances.iter().any(|&zr| ray_distance(z, zr) < res_tube);
        let in_hol_domain = pihol_membership(z, &sheet, geom);
        Ok(Self { z, sheet, in_resonance_cut, in_hol_domain })
    }
}

/// Distance from z to the ray {zr·ρ : ρ ≥ 1}.
pub fn ray_distance(z: C64, zr: C64) -> f64 {
    let d = zr / zr.norm();
    let t = (z.re * d.re + z.im * d.im).max(zr.norm());
    (z - d * t).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(l: f64) -> ThresholdSet {
        ThresholdSet::new(vec![Threshold { alpha: 1, j: 1, lambda: l }]).unwrap()
    }

    #[test]
    fn cross_above_breakup_from_below() {
        let ts = one(-1.0);
        let p = MultiIndex::physical(&ts);
        let l = cross_cut(&p, Segment::AboveBreakup, Direction::FromBelow, &ts).unwrap();
        assert_eq!(l.l0, 1);
        assert_eq!(l.flag(1, 1), 1);
        let back = cross_cut(&l, Segment::AboveBreakup, Direction::FromAbove, &ts).unwrap();
        assert!(back.is_physical());
    }

    #[test]
    fn leaving_surface_rejected() {
        let ts = one(-1.0);
        let l = MultiIndex::all_flags(&ts, 1);
        assert!(matches!(
            cross_cut(&l, Segment::AboveBreakup, Direction::FromBelow, &ts),
            Err(Error::Sheet(_))
        ));
    }

    #[test]
    fn lowest_segment_flips_only_lowest() {
        let ts = ThresholdSet::new(vec![
            Threshold { alpha: 1, j: 1, lambda: -2.0 },
            Threshold { alpha: 2, j: 1, lambda: -1.0 },
            Threshold { alpha: 3, j: 1, lambda: -2.0 },
        ])
        .unwrap();
        assert_eq!(ts.levels(), &[-2.0, -1.0]);
        let l = cross_cut(&MultiIndex::physical(&ts), Segment::Below(0), Direction::FromBelow, &ts).unwrap();
        assert_eq!((l.flag(1, 1), l.flag(3, 1), l.flag(2, 1), l.l0), (1, 1, 0, 0));
    }

    #[test]
    fn untied_flags_rejected() {
        let ts = ThresholdSet::new(vec![
            Threshold { alpha: 1, j: 1, lambda: -2.0 },
            Threshold { alpha: 2, j: 1, lambda: -2.0 },
        ])
        .unwrap();
        let mut l = MultiIndex::physical(&ts);
        l.flags.insert((1, 1), 1);
        assert!(l.validate(&ts).is_err());
    }

    #[test]
    fn positive_threshold_rejected() {
        assert!(ThresholdSet::new(vec![Threshold { alpha: 1, j: 1, lambda: 0.0 }]).is_err());
    }

    #[test]
    fn ray_distance_basic() {
        let zr = C64::new(1.0, -1.0);
        assert!(ray_distance(zr * 3.0, zr) < 1e-15);
        assert!((ray_distance(C64::new(0.0, 0.0), zr) - 2f64.sqrt()).abs() < 1e-15);
    }
}
