//! Side weights, the affine weight function on doubled boundary curves, the
//! parameter threshold, and the Grötzsch inequality certificate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::decompose::{self, BoundaryClass, PieceDynamics};
use crate::error::{Error, Result};
use crate::model::{CoverModel, PreimageComponent};
use crate::multicurve::{self, Multicurve};
use crate::rational::Q;
use crate::spectral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];

    fn pick(self, sides: &(String, String)) -> &str {
        match self {
            Side::Plus => &sides.0,
            Side::Minus => &sides.1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

/// `slope * t + constant`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Affine {
    pub slope: Q,
    pub constant: Q,
}

impl Affine {
    pub fn constant(c: Q) -> Self {
        Affine { slope: Q::zero(), constant: c }
    }

    pub fn linear(a: Q) -> Self {
        Affine { slope: a, constant: Q::zero() }
    }

    pub fn at(&self, t: &Q) -> Q {
        &self.slope * t + &self.constant
    }

    pub fn scale(&self, k: &Q) -> Self {
        Affine { slope: &self.slope * k, constant: &self.constant * k }
    }

    pub fn add(&self, other: &Affine) -> Self {
        Affine {
            slope: &self.slope + &other.slope,
            constant: &self.constant + &other.constant,
        }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope.is_zero(), self.constant.is_zero()) {
            (true, _) => write!(f, "{}", self.constant),
            (false, true) => write!(f, "{}*t", self.slope),
            (false, false) => write!(f, "{}*t + {}", self.slope, self.constant),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoEntry {
    pub curve: String,
    /// Steps of the forward chain until a core is reached.
    pub level: usize,
    pub plus: Q,
    pub minus: Q,
}

impl RhoEntry {
    pub fn get(&self, side: Side) -> &Q {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoCheck {
    pub curve: String,
    pub side: Side,
    pub lhs: Q,
    pub rhs: Q,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoAssignment {
    pub gamma: Multicurve,
    pub v: BTreeMap<String, Q>,
    pub entries: BTreeMap<String, RhoEntry>,
    pub checks: Vec<RhoCheck>,
}

impl RhoAssignment {
    pub fn rho(&self, curve: &str, side: Side) -> Option<&Q> {
        self.entries.get(curve).map(|e| e.get(side))
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
            && self
                .entries
                .values()
                .all(|e| e.plus.is_positive() && e.minus.is_positive() && &e.plus + &e.minus == Q::one())
    }
}

/// Non-coinciding components of `sources` pullbacks that target `curve`, split
/// by the side piece they lie in.
fn side_components<'a>(
    m: &'a CoverModel,
    sources: &BTreeSet<&str>,
    curve: &str,
    sides: &(String, String),
) -> Result<[Vec<(&'a str, &'a PreimageComponent)>; 2]> {
    let mut out = [Vec::new(), Vec::new()];
    for (src, comps) in &m.pullback {
        if !sources.contains(src.as_str()) {
            continue;
        }
        for c in comps {
            if c.coincides.is_some() || c.target.curve() != Some(curve) {
                continue;
            }
            let slot = if c.piece == sides.0 {
                0
            } else if c.piece == sides.1 {
                1
            } else {
                return Err(Error::Weights(format!(
                    "a preimage of `{src}` homotopic to `{curve}` lies in `{}`, which is not adjacent to it",
                    c.piece
                )));
            };
            out[slot].push((src.as_str(), c));
        }
    }
    Ok(out)
}

fn chain_level(m: &CoverModel, curve: &str) -> Result<usize> {
    let mut cur = curve;
    for level in 0..=m.curves.len() {
        if m.is_core(cur) {
            return Ok(level);
        }
        cur = m
            .forward_image(cur)
            .ok_or_else(|| Error::Weights(format!("`{cur}` has no forward image")))?
            .0;
    }
    Err(Error::Weights(format!("forward chain of `{curve}` never reaches a core")))
}

pub fn solve_rho(m: &CoverModel, gamma: &Multicurve, v: &[Q]) -> Result<RhoAssignment> {
    if v.len() != gamma.len() {
        return Err(Error::Shape(format!("{} weights for {} curves", v.len(), gamma.len())));
    }
    let w = multicurve::transition_matrix(m, gamma)?;
    let wv = w.mul_vec(v);
    if let Some(i) = (0..v.len()).find(|&i| wv[i] >= v[i]) {
        return Err(Error::Weights(format!(
            "Wv < v fails at `{}`: {} >= {}",
            gamma.ids()[i],
            wv[i],
            v[i]
        )));
    }
    let vmap: BTreeMap<String, Q> = gamma.ids().iter().cloned().zip(v.iter().cloned()).collect();
    let members = gamma.id_set();

    let mut order: Vec<(usize, &str)> = gamma
        .ids()
        .iter()
        .map(|id| chain_level(m, id).map(|l| (l, id.as_str())))
        .collect::<Result<_>>()?;
    order.sort();

    let mut entries: BTreeMap<String, RhoEntry> = BTreeMap::new();
    let mut checks = Vec::new();
    for (level, id) in order {
        let sides = m.sides(id)?;
        let comps = side_components(m, &members, id, &sides)?;
        let side_sum: Vec<Q> = comps
            .iter()
            .map(|cs| cs.iter().map(|(src, c)| &vmap[*src] * &Q::recip_int(c.degree)).sum())
            .collect();
        let vg = &vmap[id];
        // per-side term carried over from the forward image
        let carried: [Q; 2] = if level == 1 {
            [Q::zero(), Q::zero()]
        } else {
            let (img, e) = m.forward_image(id).expect("level > 1 has an image");
            let prev = entries
                .get(img)
                .ok_or_else(|| Error::Weights(format!("image `{img}` of `{id}` is not a generated curve")))?;
            let base = &vmap[img] * &Q::recip_int(e);
            [&base * &prev.plus, &base * &prev.minus]
        };
        let (plus, minus) = if level == 1 {
            let total = &side_sum[0] + &side_sum[1];
            let delta = (vg - &total) * Q::frac(1, 4);
            let denom = &total + &(&delta * &Q::int(2));
            (
                (&side_sum[0] + &delta) / denom.clone(),
                (&side_sum[1] + &delta) / denom,
            )
        } else {
            let (img, e) = m.forward_image(id).expect("level > 1 has an image");
            let total = &vmap[img] * &Q::recip_int(e) + &side_sum[0] + &side_sum[1];
            (
                (&carried[0] + &side_sum[0]) / total.clone(),
                (&carried[1] + &side_sum[1]) / total,
            )
        };
        for (k, side) in Side::BOTH.into_iter().enumerate() {
            let rho = if k == 0 { &plus } else { &minus };
            let lhs = &carried[k] + &side_sum[k];
            let rhs = vg * rho;
            checks.push(RhoCheck {
                curve: id.to_string(),
                side,
                holds: lhs < rhs,
                lhs,
                rhs,
            });
        }
        entries.insert(id.to_string(), RhoEntry { curve: id.to_string(), level, plus, minus });
    }
    Ok(RhoAssignment { gamma: gamma.clone(), v: vmap, entries, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaEntry {
    pub curve: String,
    pub side: Side,
    pub piece: String,
    pub class: BoundaryClass,
    pub form: Affine,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaFunction {
    pub entries: Vec<SigmaEntry>,
}

impl SigmaFunction {
    pub fn get(&self, curve: &str, side: Side) -> Option<&Affine> {
        self.entries
            .iter()
            .find(|e| e.curve == curve && e.side == side)
            .map(|e| &e.form)
    }

    /// Sum over both doubled copies of `curve`.
    pub fn pair(&self, curve: &str) -> Result<Affine> {
        let mut total = Affine::default();
        for side in Side::BOTH {
            total = total.add(
                self.get(curve, side)
                    .ok_or_else(|| Error::Weights(format!("no weight on `{curve}` side {side}")))?,
            );
        }
        Ok(total)
    }

    pub fn evaluate(&self, t: &Q) -> Vec<(String, Side, Q)> {
        self.entries
            .iter()
            .map(|e| (e.curve.clone(), e.side, e.form.at(t)))
            .collect()
    }
}

fn sigma_form(
    m: &CoverModel,
    rho: &RhoAssignment,
    dynamics: &PieceDynamics,
    curve: &str,
    side: Side,
    depth: usize,
) -> Result<(String, BoundaryClass, Affine)> {
    if depth > m.pieces.len() {
        return Err(Error::Weights(format!(
            "forward chase from `{curve}` side {side} does not terminate"
        )));
    }
    let sides = m.sides(curve)?;
    let piece = side.pick(&sides).to_string();
    if m.is_core(curve) {
        let annulus = m
            .annulus_of(curve)
            .ok_or_else(|| Error::Weights(format!("core `{curve}` has no annulus")))?;
        let half = &annulus.modulus * &Q::frac(1, 2);
        return Ok((piece, BoundaryClass::D0, Affine::constant(half)));
    }
    let class = dynamics
        .class(&piece, curve)
        .ok_or_else(|| Error::Weights(format!("`{curve}` is not a boundary curve of `{piece}`")))?;
    let entry = rho
        .entries
        .get(curve)
        .ok_or_else(|| Error::Weights(format!("boundary curve `{curve}` is not a generated curve")))?;
    let direct = Affine::linear(entry.get(side) * &rho.v[curve]);
    if class == BoundaryClass::D1 || dynamics.is_representative(&piece) {
        return Ok((piece, class, direct));
    }
    let (img, e) = m
        .forward_image(curve)
        .ok_or_else(|| Error::Weights(format!("`{curve}` has no forward image")))?;
    let (_, _, next) = sigma_form(m, rho, dynamics, img, side, depth + 1)?;
    Ok((piece, class, next.scale(&Q::recip_int(e))))
}

pub fn sigma(m: &CoverModel, rho: &RhoAssignment) -> Result<SigmaFunction> {
    let dynamics = decompose::piece_dynamics(m)?;
    sigma_with(m, rho, &dynamics)
}

fn sigma_with(m: &CoverModel, rho: &RhoAssignment, dynamics: &PieceDynamics) -> Result<SigmaFunction> {
    let mut entries = Vec::new();
    for curve in decompose::sigma_curves(m) {
        for side in Side::BOTH {
            let (piece, class, form) = sigma_form(m, rho, dynamics, curve, side, 0)?;
            entries.push(SigmaEntry { curve: curve.to_string(), side, piece, class, form });
        }
    }
    Ok(SigmaFunction { entries })
}

pub fn constant_for(constants: &BTreeMap<String, Q>, id: &str) -> Result<Q> {
    constants
        .get(id)
        .or_else(|| constants.get("default"))
        .cloned()
        .ok_or_else(|| Error::MissingConstant(id.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnularPiece {
    /// `<piece>/<curve>/<index>`.
    pub id: String,
    pub source: String,
    pub degree: u64,
    /// Weight of both doubled copies of the source over the degree.
    pub form: Affine,
    pub constant: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrotzschInstance {
    pub curve: String,
    pub side: Side,
    pub piece: String,
    pub annular: Vec<AnnularPiece>,
    /// Weight pulled back along the coinciding preimage.
    pub coinciding: Affine,
    pub target: Affine,
    /// Modulus available between the curve and its coinciding preimage.
    pub modulus: Affine,
    /// Total modulus the annular pieces must fit.
    pub embedded: Affine,
}

/// Doubled curves on the `D1` sides of generated curves.
fn d1_sides(sigma: &SigmaFunction, rho: &RhoAssignment) -> Vec<(String, Side, String)> {
    sigma
        .entries
        .iter()
        .filter(|e| e.class == BoundaryClass::D1 && rho.entries.contains_key(&e.curve))
        .map(|e| (e.curve.clone(), e.side, e.piece.clone()))
        .collect()
}

fn coinciding_term(m: &CoverModel, sigma: &SigmaFunction, curve: &str, side: Side) -> Result<(String, Affine)> {
    let (img, e) = m
        .forward_image(curve)
        .ok_or_else(|| Error::Weights(format!("`{curve}` has no forward image")))?;
    let form = sigma
        .get(img, side)
        .ok_or_else(|| Error::Weights(format!("no weight on `{img}` side {side}")))?
        .scale(&Q::recip_int(e));
    Ok((img.to_string(), form))
}

pub fn grotzsch_instances(
    m: &CoverModel,
    rho: &RhoAssignment,
    sigma: &SigmaFunction,
    constants: &BTreeMap<String, Q>,
) -> Result<Vec<GrotzschInstance>> {
    let sigma_set = decompose::sigma_curves(m);
    let mut out = Vec::new();
    for (curve, side, piece) in d1_sides(sigma, rho) {
        let mut annular = Vec::new();
        for (index, (src, c)) in decompose::annular_preimages(m, &sigma_set, &piece, &curve)
            .into_iter()
            .enumerate()
        {
            let id = format!("{piece}/{curve}/{index}");
            annular.push(AnnularPiece {
                constant: constant_for(constants, &id)?,
                id,
                source: src.to_string(),
                degree: c.degree,
                form: sigma.pair(src)?.scale(&Q::recip_int(c.degree)),
            });
        }
        let (_, coinciding) = coinciding_term(m, sigma, &curve, side)?;
        let target = sigma.get(&curve, side).cloned().unwrap_or_default();
        let modulus = target.add(&coinciding.scale(&Q::int(-1)));
        let embedded = annular.iter().fold(Affine::default(), |acc, a| {
            acc.add(&a.form).add(&Affine::constant(a.constant.clone()))
        });
        out.push(GrotzschInstance { curve, side, piece, annular, coinciding, target, modulus, embedded });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Weight on a doubled curve is dominated by its side share.
    Domination,
    /// Both doubled copies fit the curve's budget.
    Budget,
    /// Pulled-back weight on a separated side stays below the side weight.
    Annular,
    /// Annular pieces fit between a curve and its coinciding preimage.
    Grotzsch,
}

#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub family: Family,
    pub location: String,
    pub lhs: Affine,
    pub rhs: Affine,
    pub strict: bool,
}

impl Inequality {
    pub fn holds_at(&self, t: &Q) -> bool {
        let (l, r) = (self.lhs.at(t), self.rhs.at(t));
        if self.strict {
            l < r
        } else {
            l <= r
        }
    }

    /// Smallest `t` from which the inequality holds (exclusive when strict);
    /// `None` when it holds for every `t`.
    pub fn bound(&self) -> Result<Option<Q>> {
        let c = &self.rhs.slope - &self.lhs.slope;
        let d = &self.lhs.constant - &self.rhs.constant;
        if c.is_positive() {
            return Ok(Some(d / c));
        }
        let vacuous = c.is_zero() && (d.is_negative() || (!self.strict && d.is_zero()));
        if vacuous {
            Ok(None)
        } else {
            Err(Error::Weights(format!(
                "{:?} inequality at {} cannot hold for large t: {} vs {}",
                self.family, self.location, self.lhs, self.rhs
            )))
        }
    }
}

pub fn assemble(
    m: &CoverModel,
    rho: &RhoAssignment,
    sigma: &SigmaFunction,
    constants: &BTreeMap<String, Q>,
) -> Result<Vec<Inequality>> {
    let mut out = Vec::new();
    for e in &sigma.entries {
        if let Some(r) = rho.rho(&e.curve, e.side) {
            out.push(Inequality {
                family: Family::Domination,
                location: format!("{} {}", e.curve, e.side),
                lhs: e.form.clone(),
                rhs: Affine::linear(r * &rho.v[&e.curve]),
                strict: false,
            });
        }
    }
    for curve in decompose::sigma_curves(m) {
        let rhs = if let Some(v) = rho.v.get(curve) {
            Affine::linear(v.clone())
        } else {
            let a = m
                .annulus_of(curve)
                .ok_or_else(|| Error::Weights(format!("`{curve}` is neither generated nor a core")))?;
            Affine::constant(a.modulus.clone())
        };
        out.push(Inequality {
            family: Family::Budget,
            location: curve.to_string(),
            lhs: sigma.pair(curve)?,
            rhs,
            strict: false,
        });
    }
    let members = rho.gamma.id_set();
    for (curve, side, piece) in d1_sides(sigma, rho) {
        let sides = m.sides(&curve)?;
        let comps = side_components(m, &members, &curve, &sides)?;
        let slot = if side == Side::Plus { 0 } else { 1 };
        let mut lhs = Affine::default();
        for (src, c) in &comps[slot] {
            lhs = lhs.add(&sigma.pair(src)?.scale(&Q::recip_int(c.degree)));
        }
        let (img, coinciding) = coinciding_term(m, sigma, &curve, side)?;
        if members.contains(img.as_str()) {
            lhs = lhs.add(&coinciding);
        }
        out.push(Inequality {
            family: Family::Annular,
            location: format!("{curve} {side} in {piece}"),
            lhs,
            rhs: sigma.get(&curve, side).cloned().unwrap_or_default(),
            strict: true,
        });
    }
    for g in grotzsch_instances(m, rho, sigma, constants)? {
        out.push(Inequality {
            family: Family::Grotzsch,
            location: format!("{} {} in {}", g.curve, g.side, g.piece),
            lhs: g.embedded.add(&g.coinciding),
            rhs: g.target,
            strict: true,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Threshold {
    pub t_star: Q,
    /// Inequality attaining the maximal bound.
    pub binding: Option<usize>,
    pub inequalities: Vec<Inequality>,
    pub bounds: Vec<Option<Q>>,
    pub certified_at: Q,
    pub certified: bool,
    pub halved: Q,
    pub fails_when_halved: bool,
}

pub fn find_t_threshold(
    m: &CoverModel,
    rho: &RhoAssignment,
    constants: &BTreeMap<String, Q>,
) -> Result<Threshold> {
    let sigma = sigma(m, rho)?;
    threshold_of(assemble(m, rho, &sigma, constants)?)
}

pub fn threshold_of(inequalities: Vec<Inequality>) -> Result<Threshold> {
    let bounds: Vec<Option<Q>> = inequalities.iter().map(Inequality::bound).collect::<Result<_>>()?;
    let mut t_star = Q::zero();
    let mut binding = None;
    for (i, b) in bounds.iter().enumerate() {
        if let Some(b) = b {
            if *b > t_star || (binding.is_none() && *b == t_star) {
                t_star = b.clone();
                binding = Some(i);
            }
        }
    }
    let certified_at = &t_star + &Q::one();
    let certified = inequalities.iter().all(|q| q.holds_at(&certified_at));
    let halved = &t_star * &Q::frac(1, 2);
    let fails_when_halved = inequalities.iter().any(|q| !q.holds_at(&halved));
    Ok(Threshold { t_star, binding, inequalities, bounds, certified_at, certified, halved, fails_when_halved })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrotzschCheck {
    pub curve: String,
    pub side: Side,
    pub piece: String,
    pub modulus: Q,
    pub embedded: Q,
    pub margin: Q,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrotzschReport {
    pub t: Q,
    pub checks: Vec<GrotzschCheck>,
}

impl GrotzschReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn certify_grotzsch(
    m: &CoverModel,
    rho: &RhoAssignment,
    sigma: &SigmaFunction,
    t: &Q,
    constants: &BTreeMap<String, Q>,
) -> Result<GrotzschReport> {
    let checks = grotzsch_instances(m, rho, sigma, constants)?
        .into_iter()
        .map(|g| {
            let modulus = g.modulus.at(t);
            let embedded = g.embedded.at(t);
            let margin = &modulus - &embedded;
            GrotzschCheck {
                passed: margin.is_positive(),
                curve: g.curve,
                side: g.side,
                piece: g.piece,
                modulus,
                embedded,
                margin,
            }
        })
        .collect();
    Ok(GrotzschReport { t: t.clone(), checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct Certification {
    pub rho: RhoAssignment,
    pub sigma: SigmaFunction,
    pub threshold: Threshold,
    pub grotzsch: GrotzschReport,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.rho.passed() && self.threshold.certified && self.grotzsch.passed()
    }
}

/// Full pipeline: contraction vector, side weights, threshold, certificate at
/// `t* + 1`.
pub fn certify(m: &CoverModel, constants: &BTreeMap<String, Q>) -> Result<Certification> {
    let gamma = multicurve::generate_gamma(m)?;
    let w = multicurve::transition_matrix(m, &gamma)?;
    let v = spectral::contraction_vector(&w)?;
    let rho = solve_rho(m, &gamma, &v)?;
    let dynamics = decompose::piece_dynamics(m)?;
    let sigma = sigma_with(m, &rho, &dynamics)?;
    let threshold = threshold_of(assemble(m, &rho, &sigma, constants)?)?;
    let grotzsch = certify_grotzsch(m, &rho, &sigma, &threshold.certified_at, constants)?;
    Ok(Certification { rho, sigma, threshold, grotzsch })
}
