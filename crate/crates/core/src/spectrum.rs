//! Operator spectra with algebraic multiplicities.
//!
//! A [`Spectrum`] stands in for an injective operator `D` whose eigenvalues
//! are known explicitly: a finite list, an integer lattice `{a + n : n ∈ ℤ}`
//! (the even odd-signature operator of a flat line bundle over the circle),
//! squares of a lattice, direct sums, and restrictions to invariant
//! subspaces given by reduced multiplicities.
//!
//! Internally every spectrum is flattened into [`Block`]s: isolated points
//! and lattice [`Family`]s. A family is split into a finite window of
//! explicitly summed eigenvalues and two tails whose contributions are
//! Hurwitz zeta functions.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexcut::{angular_distance, branch_turns_for, CutAngle, Sector};
use crate::error::{Error, Result};
use crate::tolerances;

/// An eigenvalue `λ_k ≠ 0` with algebraic multiplicity `m_k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eigenvalue {
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
    pub multiplicity: u32,
}

impl Eigenvalue {
    pub fn new(value: Complex64, multiplicity: u32) -> Self {
        Eigenvalue {
            value,
            multiplicity,
        }
    }
}

/// Eigenvalues `±(a + n)²`, `n ∈ ℤ`, each with multiplicity `mu`: the square
/// of a lattice spectrum (negated when `negated` is set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct QuadLattice {
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    pub mu: u32,
    #[serde(default)]
    pub negated: bool,
}

/// Eigenvalues `±(a + n)(ā + n) = ±|a + n|²`: the spectrum of `∇*∇` for the
/// connection `d + ia dx` on the trivial line bundle over the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HermQuadLattice {
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    pub mu: u32,
    #[serde(default)]
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum Spectrum {
    Finite {
        eigenvalues: Vec<Eigenvalue>,
    },
    /// `{a + n : n ∈ ℤ}`, each with multiplicity `mu`.
    Lattice {
        #[serde(with = "crate::serde_complex")]
        a: Complex64,
        mu: u32,
    },
    QuadLattice(QuadLattice),
    HermQuadLattice(HermQuadLattice),
    DirectSum {
        components: Vec<Spectrum>,
    },
    /// Restriction to an invariant subspace. `sub_mult` maps an eigenvalue
    /// index (list position for finite bases, `n` in `a + n` for lattice
    /// bases) to its reduced multiplicity; absent indices keep the base
    /// multiplicity.
    #[serde(rename_all = "camelCase")]
    Restricted {
        base: Box<Spectrum>,
        #[serde(with = "index_map")]
        sub_mult: BTreeMap<i64, u32>,
    },
}

impl Spectrum {
    pub fn finite(eigenvalues: Vec<Eigenvalue>) -> Result<Self> {
        let s = Spectrum::Finite { eigenvalues };
        s.validate()?;
        Ok(s)
    }

    /// Finite spectrum from `(value, multiplicity)` pairs.
    pub fn from_pairs(pairs: &[(Complex64, u32)]) -> Result<Self> {
        Spectrum::finite(pairs.iter().map(|&(v, m)| Eigenvalue::new(v, m)).collect())
    }

    pub fn lattice(a: Complex64, mu: u32) -> Result<Self> {
        let s = Spectrum::Lattice { a, mu };
        s.validate()?;
        Ok(s)
    }

    pub fn quad_lattice(a: Complex64, mu: u32) -> Result<Self> {
        let s = Spectrum::QuadLattice(QuadLattice {
            a,
            mu,
            negated: false,
        });
        s.validate()?;
        Ok(s)
    }

    pub fn herm_quad_lattice(a: Complex64, mu: u32) -> Result<Self> {
        let s = Spectrum::HermQuadLattice(HermQuadLattice {
            a,
            mu,
            negated: false,
        });
        s.validate()?;
        Ok(s)
    }

    pub fn direct_sum(components: Vec<Spectrum>) -> Result<Self> {
        let s = Spectrum::DirectSum { components };
        s.validate()?;
        Ok(s)
    }

    pub fn restricted(base: Spectrum, sub_mult: BTreeMap<i64, u32>) -> Result<Self> {
        let s = Spectrum::Restricted {
            base: Box::new(base),
            sub_mult,
        };
        s.validate()?;
        Ok(s)
    }

    /// Check the structural invariants; constructors call this, and so does
    /// every deserialization path in the CLI.
    pub fn validate(&self) -> Result<()> {
        match self {
            Spectrum::Finite { eigenvalues } => {
                for (i, e) in eigenvalues.iter().enumerate() {
                    if !(e.value.re.is_finite() && e.value.im.is_finite()) {
                        return Err(Error::InvalidSpectrum(format!("eigenvalue {i} is not finite")));
                    }
                    if e.value == Complex64::new(0.0, 0.0) {
                        return Err(Error::InvalidSpectrum(
                            "zero eigenvalue: operator must be injective".into(),
                        ));
                    }
                    if e.multiplicity == 0 {
                        return Err(Error::InvalidSpectrum(format!(
                            "eigenvalue {} has multiplicity 0",
                            e.value
                        )));
                    }
                    if eigenvalues[..i].iter().any(|f| f.value == e.value) {
                        return Err(Error::InvalidSpectrum(format!(
                            "eigenvalue {} listed twice",
                            e.value
                        )));
                    }
                }
                Ok(())
            }
            Spectrum::Lattice { a, mu } => check_lattice(*a, *mu),
            Spectrum::QuadLattice(q) => check_lattice(q.a, q.mu),
            Spectrum::HermQuadLattice(h) => check_lattice(h.a, h.mu),
            Spectrum::DirectSum { components } => components.iter().try_for_each(Spectrum::validate),
            Spectrum::Restricted { base, sub_mult } => {
                base.validate()?;
                match base.as_ref() {
                    Spectrum::Finite { eigenvalues } => {
                        for (&k, &m) in sub_mult {
                            let e = usize::try_from(k)
                                .ok()
                                .and_then(|k| eigenvalues.get(k))
                                .ok_or_else(|| {
                                    Error::InvalidSpectrum(format!("restriction index {k} out of range"))
                                })?;
                            if m > e.multiplicity {
                                return Err(Error::InvalidSpectrum(format!(
                                    "restricted multiplicity {m} exceeds {} at index {k}",
                                    e.multiplicity
                                )));
                            }
                        }
                        Ok(())
                    }
                    Spectrum::Lattice { mu, .. }
                    | Spectrum::QuadLattice(QuadLattice { mu, .. })
                    | Spectrum::HermQuadLattice(HermQuadLattice { mu, .. }) => {
                        match sub_mult.iter().find(|(_, &m)| m > *mu) {
                            Some((k, m)) => Err(Error::InvalidSpectrum(format!(
                                "restricted multiplicity {m} exceeds {mu} at index {k}"
                            ))),
                            None => Ok(()),
                        }
                    }
                    _ => Err(Error::InvalidSpectrum(
                        "restrictions are supported over finite and lattice spectra".into(),
                    )),
                }
            }
        }
    }

    /// True when the spectrum has no eigenvalues at all.
    pub fn is_empty(&self) -> bool {
        match self {
            Spectrum::Finite { eigenvalues } => eigenvalues.is_empty(),
            Spectrum::DirectSum { components } => components.iter().all(Spectrum::is_empty),
            Spectrum::Restricted { base, sub_mult } => match base.as_ref() {
                Spectrum::Finite { eigenvalues } => (0..eigenvalues.len())
                    .all(|k| sub_mult.get(&(k as i64)) == Some(&0)),
                other => other.is_empty(),
            },
            _ => false,
        }
    }

    /// True when only finitely many eigenvalues are present.
    pub fn is_finite(&self) -> bool {
        match self {
            Spectrum::Finite { .. } => true,
            Spectrum::DirectSum { components } => components.iter().all(Spectrum::is_finite),
            Spectrum::Restricted { base, .. } => base.is_finite(),
            _ => false,
        }
    }

    /// Flatten into points and lattice families.
    pub(crate) fn blocks(&self) -> Result<Vec<Block>> {
        let mut out = Vec::new();
        self.push_blocks(&mut out)?;
        Ok(out)
    }

    fn push_blocks(&self, out: &mut Vec<Block>) -> Result<()> {
        match self {
            Spectrum::Finite { eigenvalues } => {
                out.extend(eigenvalues.iter().map(|e| Block::Point(e.value, e.multiplicity)));
            }
            Spectrum::Lattice { a, mu } => out.push(Block::Family(Family::new(*a, FamilyKind::Linear, false, *mu))),
            Spectrum::QuadLattice(q) => {
                out.push(Block::Family(Family::new(q.a, FamilyKind::Square, q.negated, q.mu)))
            }
            Spectrum::HermQuadLattice(h) => {
                out.push(Block::Family(Family::new(h.a, FamilyKind::HermSquare, h.negated, h.mu)))
            }
            Spectrum::DirectSum { components } => {
                for c in components {
                    c.push_blocks(out)?;
                }
            }
            Spectrum::Restricted { base, sub_mult } => match base.as_ref() {
                Spectrum::Finite { eigenvalues } => {
                    for (k, e) in eigenvalues.iter().enumerate() {
                        let m = sub_mult.get(&(k as i64)).copied().unwrap_or(e.multiplicity);
                        if m > 0 {
                            out.push(Block::Point(e.value, m));
                        }
                    }
                }
                other => {
                    let mut blocks = other.blocks()?;
                    match blocks.pop() {
                        Some(Block::Family(mut fam)) if blocks.is_empty() => {
                            for (&n, &m) in sub_mult {
                                fam.overrides.insert(n + fam.index_shift, m);
                            }
                            out.push(Block::Family(fam));
                        }
                        _ => {
                            return Err(Error::Unsupported(
                                "restriction of a composite spectrum".into(),
                            ))
                        }
                    }
                }
            },
        }
        Ok(())
    }

    /// All eigenvalues with `|λ| ≤ radius` together with every isolated point
    /// and every eigenvalue whose multiplicity was changed by a restriction.
    pub fn eigenvalues_within(&self, radius: f64) -> Result<Vec<(Complex64, u32)>> {
        let mut out = Vec::new();
        for block in self.blocks()? {
            match block {
                Block::Point(v, m) => out.push((v, m)),
                Block::Family(f) => {
                    let half = f.half_width_for_radius(radius);
                    out.extend(f.window(half).into_iter().filter(|(v, _)| v.norm() <= radius));
                    for (&n, &m) in &f.overrides {
                        let v = f.eigenvalue(n);
                        if v.norm() > radius && m > 0 {
                            out.push((v, m));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Directions (0 or π) approached by infinite tails.
    pub fn tail_directions(&self) -> Result<Vec<f64>> {
        let mut dirs = Vec::new();
        for block in self.blocks()? {
            if let Block::Family(f) = block {
                for d in f.directions() {
                    if !dirs.contains(&d) {
                        dirs.push(d);
                    }
                }
            }
        }
        Ok(dirs)
    }

    /// Default scan radius for Agmon certification: `10 (2 + |a|)` over the
    /// lattice parameters present (10 for finite spectra).
    pub fn default_scan_radius(&self) -> f64 {
        let mut r: f64 = 10.0;
        if let Ok(blocks) = self.blocks() {
            for b in blocks {
                if let Block::Family(f) = b {
                    r = r.max(10.0 * (2.0 + f.given.norm()));
                }
            }
        }
        r
    }
}

/// JSON object keys are strings; indices are parsed from them explicitly so
/// that the map also survives buffering inside tagged enums.
mod index_map {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, u32>, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BTreeMap<i64, u32>, D::Error> {
        BTreeMap::<String, u32>::deserialize(de)?
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("index {k:?} is not an integer")))
            })
            .collect()
    }
}

fn check_lattice(a: Complex64, mu: u32) -> Result<()> {
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::InvalidSpectrum("lattice parameter is not finite".into()));
    }
    if mu == 0 {
        return Err(Error::InvalidSpectrum("lattice multiplicity must be positive".into()));
    }
    if dist_to_integers(a) == 0.0 {
        return Err(Error::InvalidSpectrum(format!("lattice parameter {a} is an integer")));
    }
    Ok(())
}

/// Distance from `a` to the nearest integer.
pub fn dist_to_integers(a: Complex64) -> f64 {
    let re = a.re - a.re.round();
    re.hypot(a.im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FamilyKind {
    /// `b + n`
    Linear,
    /// `±(b + n)²`
    Square,
    /// `±(b + n)(b̄ + n)`
    HermSquare,
}

/// Which sums a split is prepared for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SplitMode {
    /// Tails of `Σ λ^{-s}`.
    Zeta,
    /// Tails of `Σ_{Re λ>0} λ^{-s} - Σ_{Re λ<0} (-λ)^{-s}`.
    Eta,
}

/// A lattice family with normalized base `b`, `Re b ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Family {
    pub base: Complex64,
    pub given: Complex64,
    /// `n_given + index_shift` is the normalized index.
    pub index_shift: i64,
    pub kind: FamilyKind,
    pub negated: bool,
    pub mu: u32,
    pub overrides: BTreeMap<i64, u32>,
}

/// One tail `Σ_{j≥0}` of a family, in the form
/// `weight · mu · e^{-i s phase} · G(s)` with `G(s) = Σ_j w_j^{-s}` for
/// `w_j = (q + j)^p`, or `w_j = |q + j|²` for Hermitian squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tail {
    pub q: Complex64,
    pub kind: FamilyKind,
    pub weight: f64,
    pub phase: f64,
    pub mu: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Split {
    pub explicit: Vec<(Complex64, u32)>,
    pub tails: Vec<Tail>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Block {
    Point(Complex64, u32),
    Family(Family),
}

const MAX_HALF_WIDTH: i64 = 1 << 22;

impl Family {
    fn new(a: Complex64, kind: FamilyKind, negated: bool, mu: u32) -> Self {
        let shift = a.re.floor();
        Family {
            base: a - shift,
            given: a,
            index_shift: shift as i64,
            kind,
            negated: negated && kind != FamilyKind::Linear,
            mu,
            overrides: BTreeMap::new(),
        }
    }

    pub fn eigenvalue(&self, n: i64) -> Complex64 {
        let w = self.base + n as f64;
        let v = match self.kind {
            FamilyKind::Linear => w,
            FamilyKind::Square => w * w,
            FamilyKind::HermSquare => Complex64::new(w.norm_sqr(), 0.0),
        };
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn multiplicity(&self, n: i64) -> u32 {
        self.overrides.get(&n).copied().unwrap_or(self.mu)
    }

    fn power(&self) -> f64 {
        match self.kind {
            FamilyKind::Linear => 1.0,
            _ => 2.0,
        }
    }

    /// Asymptotic directions of the right and left tails.
    fn tail_dirs(&self) -> [f64; 2] {
        match self.kind {
            FamilyKind::Linear => [0.0, PI],
            _ if self.negated => [PI, PI],
            _ => [0.0, 0.0],
        }
    }

    fn directions(&self) -> Vec<f64> {
        let [r, l] = self.tail_dirs();
        if r == l {
            vec![r]
        } else {
            vec![r, l]
        }
    }

    /// Smallest window half-width keeping the tails well inside the right half plane.
    fn min_half_width(&self) -> i64 {
        let beta = self.base.im.abs();
        let geometric = match self.kind {
            FamilyKind::HermSquare => (2.0 * beta).ceil() as i64 + 1,
            _ => beta.ceil() as i64 + 1,
        };
        let overrides = self
            .overrides
            .keys()
            .map(|&n| if n >= 0 { n + 1 } else { -n })
            .max()
            .unwrap_or(0);
        geometric.max(overrides).max(1)
    }

    fn half_width_for_radius(&self, radius: f64) -> i64 {
        let r = match self.kind {
            FamilyKind::Linear => radius,
            _ => radius.max(0.0).sqrt(),
        };
        (r.ceil() as i64 + 2).max(self.min_half_width()).min(MAX_HALF_WIDTH)
    }

    /// Eigenvalues with index in `[-half, half - 1]`.
    pub fn window(&self, half: i64) -> Vec<(Complex64, u32)> {
        (-half..half)
            .filter_map(|n| {
                let m = self.multiplicity(n);
                (m > 0).then(|| (self.eigenvalue(n), m))
            })
            .collect()
    }

    /// Tail start parameters `(q_right, q_left)` for window half-width `half`.
    fn tail_starts(&self, half: i64) -> (Complex64, Complex64) {
        let h = half as f64;
        (self.base + h, Complex64::new(h + 1.0, 0.0) - self.base)
    }

    /// Split into explicit window and Hurwitz tails. With a cut angle, each
    /// tail gets the branch phase selected by `log_θ` and the window grows
    /// until every tail element lies strictly inside that branch.
    pub fn split(&self, theta: Option<CutAngle>, mode: SplitMode, min_half: i64) -> Result<Split> {
        let mut half = self.min_half_width().max(min_half);
        let p = self.power();
        let [dir_r, dir_l] = self.tail_dirs();
        loop {
            let (q_r, q_l) = self.tail_starts(half);
            let mut tails = Vec::with_capacity(2);
            let mut widen = false;
            for (q, dir) in [(q_r, dir_r), (q_l, dir_l)] {
                let (weight, dir) = match mode {
                    SplitMode::Zeta => (1.0, dir),
                    SplitMode::Eta if dir == 0.0 => (1.0, 0.0),
                    SplitMode::Eta => (-1.0, 0.0),
                };
                let phase = match theta {
                    None => dir,
                    Some(theta) => {
                        let phase = branch_turns_for(dir, theta).ok_or_else(|| Error::NotAgmon {
                            witness: Complex64::from_polar(1.0 + half as f64, dir),
                            theta: theta.given(),
                        })?;
                        let extreme = match self.kind {
                            FamilyKind::HermSquare => 0.0,
                            _ => p * q.arg(),
                        };
                        let lo = theta.radians();
                        let arg = phase + extreme;
                        if !(arg > lo && arg < lo + TAU) {
                            widen = true;
                        }
                        phase
                    }
                };
                tails.push(Tail {
                    q,
                    kind: self.kind,
                    weight,
                    phase,
                    mu: self.mu,
                });
            }
            if !widen {
                return Ok(Split {
                    explicit: self.window(half),
                    tails,
                });
            }
            if half >= MAX_HALF_WIDTH {
                return Err(Error::NotAgmon {
                    witness: self.eigenvalue(half),
                    theta: theta.map(CutAngle::given).unwrap_or(0.0),
                });
            }
            half *= 2;
        }
    }
}

/// Every eigenvalue whose direction may differ from the limiting direction
/// of its lattice tail by `gap` radians or more, plus all isolated points.
pub(crate) fn eigenvalues_off_tail_cone(spec: &Spectrum, gap: f64) -> Result<Vec<(Complex64, u32)>> {
    let mut out = Vec::new();
    for block in spec.blocks()? {
        match block {
            Block::Point(v, m) => out.push((v, m)),
            Block::Family(f) => {
                let factor = match f.kind {
                    FamilyKind::Linear => 1.0,
                    FamilyKind::Square => 2.0,
                    FamilyKind::HermSquare => 0.0,
                };
                let reach = factor * f.base.im.abs() / gap.min(1.0).tan();
                if !(reach < MAX_HALF_WIDTH as f64) {
                    return Err(Error::InvalidInput("angle too close to a lattice tail".into()));
                }
                out.extend(f.split(None, SplitMode::Zeta, reach.ceil() as i64 + 2)?.explicit);
            }
        }
    }
    Ok(out)
}

/// Certificate that `spec(D) ∩ L_[θ-ε, θ+ε] = ∅`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AgmonCertificate {
    pub theta: CutAngle,
    pub epsilon: f64,
    pub scan_radius: f64,
}

pub fn certify_agmon(spec: &Spectrum, theta: CutAngle, epsilon: f64) -> Result<AgmonCertificate> {
    certify_agmon_with_radius(spec, theta, epsilon, spec.default_scan_radius())
}

/// Agmon certification scanning lattice eigenvalues with `|λ| ≤ scan_radius`
/// explicitly and checking lattice tails by their limiting directions.
pub fn certify_agmon_with_radius(
    spec: &Spectrum,
    theta: CutAngle,
    epsilon: f64,
    scan_radius: f64,
) -> Result<AgmonCertificate> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(scan_radius > 0.0) {
        return Err(Error::InvalidInput(format!("scan radius must be positive, got {scan_radius}")));
    }
    for (v, _) in spec.eigenvalues_within(scan_radius)? {
        if angular_distance(v, theta) <= epsilon {
            return Err(Error::NotAgmon {
                witness: v,
                theta: theta.given(),
            });
        }
    }
    for block in spec.blocks()? {
        if let Block::Family(f) = block {
            let far = f.half_width_for_radius(scan_radius);
            for (dir, n) in f.tail_dirs().into_iter().zip([far, -far - 1]) {
                if angular_distance(Complex64::from_polar(1.0, dir), theta) <= epsilon {
                    return Err(Error::NotAgmon {
                        witness: f.eigenvalue(n),
                        theta: theta.given(),
                    });
                }
            }
        }
    }
    Ok(AgmonCertificate {
        theta,
        epsilon,
        scan_radius,
    })
}

/// `(m_+, m_-)`: eigenvalues on the positive and negative imaginary axis,
/// counted with multiplicity. `|Re λ| ≤ 1e-12` counts as imaginary.
pub fn imaginary_axis_counts(spec: &Spectrum) -> Result<(u64, u64)> {
    let mut plus = 0u64;
    let mut minus = 0u64;
    let mut tally = |v: Complex64, m: u32| {
        if is_imaginary(v) {
            if v.im > 0.0 {
                plus += m as u64;
            } else {
                minus += m as u64;
            }
        }
    };
    for block in spec.blocks()? {
        match block {
            Block::Point(v, m) => tally(v, m),
            Block::Family(f) => {
                for (v, m) in f.split(None, SplitMode::Zeta, 0)?.explicit {
                    tally(v, m);
                }
            }
        }
    }
    Ok((plus, minus))
}

pub(crate) fn is_imaginary(v: Complex64) -> bool {
    v.re.abs() <= tolerances::IMAGINARY_AXIS
}

fn approx_eq(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

pub fn is_symmetric_about_real_axis(spec: &Spectrum) -> bool {
    let Ok(blocks) = spec.blocks() else {
        return false;
    };
    let mut points: Vec<(Complex64, u32)> = Vec::new();
    let mut families: Vec<Family> = Vec::new();
    for b in blocks {
        match b {
            Block::Point(v, m) => match points.iter_mut().find(|(w, _)| approx_eq(*w, v)) {
                Some(entry) => entry.1 += m,
                None => points.push((v, m)),
            },
            Block::Family(f) => families.push(canonical_family(f)),
        }
    }
    let points_ok = points.iter().all(|&(v, m)| {
        points
            .iter()
            .any(|&(w, k)| k == m && approx_eq(w, v.conj()))
    });
    if !points_ok {
        return false;
    }
    let mut used = vec![false; families.len()];
    for i in 0..families.len() {
        if used[i] {
            continue;
        }
        let target = canonical_family(conjugate_family(&families[i]));
        let partner = (0..families.len()).find(|&j| {
            !used[j] && (j == i || !used[i]) && same_family(&families[j], &target)
        });
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

fn conjugate_family(f: &Family) -> Family {
    let mut g = f.clone();
    g.base = f.base.conj();
    g.given = f.given.conj();
    g
}

/// Normal form making set-equal families compare equal.
fn canonical_family(mut f: Family) -> Family {
    match f.kind {
        FamilyKind::Linear => {}
        FamilyKind::Square | FamilyKind::HermSquare => {
            // (b + n)² = ((1 - b) + (-n - 1))²; |b + n|² is also invariant under b ↦ b̄
            if f.kind == FamilyKind::HermSquare {
                f.base.im = f.base.im.abs();
            }
            if f.base.re > 0.5 || (f.base.re == 0.5 && f.base.im < 0.0) {
                let flipped = Complex64::new(1.0, 0.0) - f.base;
                if f.kind == FamilyKind::HermSquare {
                    f.base = Complex64::new(flipped.re, flipped.im.abs());
                } else {
                    f.base = flipped;
                }
                f.overrides = f.overrides.iter().map(|(&n, &m)| (-n - 1, m)).collect();
            }
        }
    }
    f.overrides.retain(|_, m| *m != f.mu);
    f
}

fn same_family(a: &Family, b: &Family) -> bool {
    a.kind == b.kind
        && a.negated == b.negated
        && a.mu == b.mu
        && approx_eq(a.base, b.base)
        && a.overrides == b.overrides
}

/// Round to `MERGE_SIGNIFICANT_DIGITS` significant digits of `|z|`.
fn merge_key(z: Complex64) -> (i64, i64, i32) {
    let scale = z.norm().log10().floor() as i32 - (tolerances::MERGE_SIGNIFICANT_DIGITS - 1);
    let quantum = 10f64.powi(scale);
    ((z.re / quantum).round() as i64, (z.im / quantum).round() as i64, scale)
}

fn merged(values: impl IntoIterator<Item = (Complex64, u32)>) -> Vec<Eigenvalue> {
    let mut out: Vec<Eigenvalue> = Vec::new();
    let mut keys = Vec::new();
    for (v, m) in values {
        let key = merge_key(v);
        match keys.iter().position(|k| *k == key) {
            Some(i) => out[i].multiplicity += m,
            None => {
                keys.push(key);
                out.push(Eigenvalue::new(v, m));
            }
        }
    }
    out
}

/// Spectrum of `D²`: eigenvalues squared with multiplicities preserved and
/// coinciding squares merged. Lattices become [`QuadLattice`]s.
pub fn square_spectrum(spec: &Spectrum) -> Result<Spectrum> {
    match spec {
        Spectrum::Finite { eigenvalues } => Ok(Spectrum::Finite {
            eigenvalues: merged(eigenvalues.iter().map(|e| (e.value * e.value, e.multiplicity))),
        }),
        Spectrum::Lattice { a, mu } => Ok(Spectrum::QuadLattice(QuadLattice {
            a: *a,
            mu: *mu,
            negated: false,
        })),
        Spectrum::QuadLattice(_) | Spectrum::HermQuadLattice(_) => Err(Error::Unsupported(
            "squares of squared lattice spectra are not represented".into(),
        )),
        Spectrum::DirectSum { components } => Ok(Spectrum::DirectSum {
            components: components.iter().map(square_spectrum).collect::<Result<_>>()?,
        }),
        Spectrum::Restricted { base, sub_mult } => match base.as_ref() {
            Spectrum::Finite { .. } => {
                let pairs: Vec<_> = spec
                    .blocks()?
                    .into_iter()
                    .filter_map(|b| match b {
                        Block::Point(v, m) => Some((v * v, m)),
                        Block::Family(_) => None,
                    })
                    .collect();
                Ok(Spectrum::Finite {
                    eigenvalues: merged(pairs),
                })
            }
            other => Ok(Spectrum::Restricted {
                base: Box::new(square_spectrum(other)?),
                sub_mult: sub_mult.clone(),
            }),
        },
    }
}

/// Spectrum of `-D`.
pub fn negate_spectrum(spec: &Spectrum) -> Spectrum {
    match spec {
        Spectrum::Finite { eigenvalues } => Spectrum::Finite {
            eigenvalues: eigenvalues
                .iter()
                .map(|e| Eigenvalue::new(-e.value, e.multiplicity))
                .collect(),
        },
        Spectrum::Lattice { a, mu } => Spectrum::Lattice { a: -a, mu: *mu },
        Spectrum::QuadLattice(q) => Spectrum::QuadLattice(QuadLattice {
            negated: !q.negated,
            ..*q
        }),
        Spectrum::HermQuadLattice(h) => Spectrum::HermQuadLattice(HermQuadLattice {
            negated: !h.negated,
            ..*h
        }),
        Spectrum::DirectSum { components } => Spectrum::DirectSum {
            components: components.iter().map(negate_spectrum).collect(),
        },
        Spectrum::Restricted { base, sub_mult } => {
            let sub_mult = match base.as_ref() {
                // a + n ↦ -a - n = (-a) + (-n)
                Spectrum::Lattice { .. } => sub_mult.iter().map(|(&n, &m)| (-n, m)).collect(),
                _ => sub_mult.clone(),
            };
            Spectrum::Restricted {
                base: Box::new(negate_spectrum(base)),
                sub_mult,
            }
        }
    }
}

/// Parity-indexed components `D = ⊕ D_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedComponent {
    pub parity: u32,
    pub spectrum: Spectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedSpectrum {
    pub components: Vec<GradedComponent>,
}

impl GradedSpectrum {
    pub fn new(components: Vec<(u32, Spectrum)>) -> Result<Self> {
        let g = GradedSpectrum {
            components: components
                .into_iter()
                .map(|(parity, spectrum)| GradedComponent { parity, spectrum })
                .collect(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.components.iter().enumerate() {
            c.spectrum.validate()?;
            if c.spectrum.is_empty() {
                return Err(Error::InvalidSpectrum(format!("graded component {i} is empty")));
            }
            if self.components[..i].iter().any(|d| d.parity == c.parity) {
                return Err(Error::InvalidSpectrum(format!("parity {} repeated", c.parity)));
            }
        }
        Ok(())
    }
}

/// Pick a cut angle in the open interval `(lo, hi)` as far as possible from
/// every eigenvalue direction found within the default scan radius and from
/// the limiting directions of lattice tails.
pub fn find_agmon_angle(spec: &Spectrum, lo: f64, hi: f64) -> Result<CutAngle> {
    if !(lo < hi && hi - lo <= TAU) {
        return Err(Error::InvalidInput(format!("bad angle interval ({lo}, {hi})")));
    }
    let radius = spec.default_scan_radius();
    let mut forbidden: Vec<f64> = spec
        .eigenvalues_within(radius)?
        .into_iter()
        .map(|(v, _)| v.arg())
        .collect();
    for block in spec.blocks()? {
        if let Block::Family(f) = block {
            // eigenvalues beyond the radius stay within this wedge of the tail direction
            let spread = (f.base.im.abs() + 1.0) / (radius - 2.0).max(1.0);
            let spread = match f.kind {
                FamilyKind::Linear => spread.atan(),
                _ => 2.0 * spread.atan(),
            };
            for dir in f.directions() {
                forbidden.extend([dir - spread, dir, dir + spread]);
            }
        }
    }
    let mut marks: Vec<f64> = forbidden
        .into_iter()
        .map(|phi| lo + (phi - lo).rem_euclid(TAU))
        .filter(|&phi| phi > lo && phi < hi)
        .collect();
    marks.push(lo);
    marks.push(hi);
    marks.sort_by(f64::total_cmp);
    let (a, b) = marks
        .windows(2)
        .map(|w| (w[0], w[1]))
        .max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
        .expect("at least two marks");
    if b - a <= 0.0 {
        return Err(Error::InvalidInput("no admissible cut angle in interval".into()));
    }
    Ok(CutAngle::new(0.5 * (a + b)))
}

/// Solid angles `L_(-π/2, θ]` and `L_(π/2, θ+π]` that must be free of
/// eigenvalues for the determinant/η identity at angle `θ`.
pub fn det_eta_sectors(theta: CutAngle) -> Result<[Sector; 2]> {
    let t = theta.radians();
    if !(t > -FRAC_PI_2 && t < 0.0) {
        return Err(Error::InvalidInput(format!(
            "cut angle must lie in (-π/2, 0), got {}",
            theta.given()
        )));
    }
    Ok([
        Sector::left_open(-FRAC_PI_2, t)?,
        Sector::left_open(FRAC_PI_2, t + PI)?,
    ])
}

/// Eigenvalues that can lie in the sectors of [`det_eta_sectors`] for `θ`.
fn det_eta_candidates(spec: &Spectrum, theta: CutAngle) -> Result<Vec<(Complex64, u32)>> {
    let mut out = Vec::new();
    let tan = theta.radians().abs().tan().max(1e-300);
    for block in spec.blocks()? {
        match block {
            Block::Point(v, m) => out.push((v, m)),
            Block::Family(f) => {
                if f.kind == FamilyKind::HermSquare {
                    continue;
                }
                let reach = (2.0 * f.base.im.abs() / tan).ceil();
                let half = if reach.is_finite() && reach < MAX_HALF_WIDTH as f64 {
                    reach as i64 + 2
                } else {
                    return Err(Error::InvalidInput("cut angle too close to the real axis".into()));
                };
                out.extend(f.split(None, SplitMode::Zeta, half)?.explicit);
            }
        }
    }
    Ok(out)
}

/// Check that `θ ∈ (-π/2, 0)` leaves `L_(-π/2, θ]` and `L_(π/2, θ+π]` empty.
pub fn check_det_eta_hypothesis(spec: &Spectrum, theta: CutAngle) -> Result<()> {
    let sectors = det_eta_sectors(theta)?;
    for (v, _) in det_eta_candidates(spec, theta)? {
        for sector in &sectors {
            if crate::complexcut::in_sector(v, sector) {
                return Err(Error::HypothesisViolated {
                    sector: sector.to_string(),
                    witness: v,
                });
            }
        }
    }
    Ok(())
}

/// An angle `θ ∈ (-π/2, -π/4]` satisfying [`check_det_eta_hypothesis`].
pub fn det_eta_angle(spec: &Spectrum) -> Result<CutAngle> {
    // eigenvalues of interest lie within π/4 of the imaginary axis, all inside the default window
    let probe = CutAngle::new(-FRAC_PI_4);
    let mut gap = FRAC_PI_2;
    for (v, _) in det_eta_candidates(spec, probe)? {
        let phi = v.arg();
        let delta = if phi > -FRAC_PI_2 && phi < 0.0 {
            phi + FRAC_PI_2
        } else if phi > FRAC_PI_2 && phi < PI {
            phi - FRAC_PI_2
        } else {
            continue;
        };
        gap = gap.min(delta);
    }
    let theta = CutAngle::new(-FRAC_PI_2 + gap.min(FRAC_PI_2) / 2.0);
    check_det_eta_hypothesis(spec, theta)?;
    Ok(theta)
}
