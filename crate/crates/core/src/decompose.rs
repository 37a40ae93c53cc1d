//! Piece dynamics, boundary classes and renormalized maps of piece cycles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Check, CoverModel, PreimageComponent, Target};
use crate::multicurve::{self, CurveSystem};
use crate::rational::Q;
use crate::spectral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum BoundaryClass {
    /// Core curve of a rotation annulus.
    D0,
    /// Separated from its parallel preimage by annular pieces.
    D1,
    /// Literally a boundary curve of the parallel preimage piece.
    D2,
}

/// Boundary curves of pieces together with the cores.
pub fn sigma_curves(m: &CoverModel) -> BTreeSet<&str> {
    let mut s = m.boundary_curves();
    s.extend(m.cores());
    s
}

/// Non-coinciding preimage components of boundary curves that are homotopic
/// to `curve` and lie in `piece`, with the curve they cover.
pub fn annular_preimages<'a>(
    m: &'a CoverModel,
    sigma: &BTreeSet<&str>,
    piece: &str,
    curve: &str,
) -> Vec<(&'a str, &'a PreimageComponent)> {
    m.pullback
        .iter()
        .filter(|(src, _)| sigma.contains(src.as_str()))
        .flat_map(|(src, comps)| comps.iter().map(move |c| (src.as_str(), c)))
        .filter(|(_, c)| {
            c.coincides.is_none() && c.piece == piece && c.target.curve() == Some(curve)
        })
        .collect()
}

/// Class of `curve` seen from the adjacent `piece`.
pub fn classify_side(m: &CoverModel, sigma: &BTreeSet<&str>, piece: &str, curve: &str) -> BoundaryClass {
    if m.is_core(curve) {
        BoundaryClass::D0
    } else if m.forward_image(curve).is_some() && annular_preimages(m, sigma, piece, curve).is_empty() {
        BoundaryClass::D2
    } else {
        BoundaryClass::D1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    /// Smallest piece id on the cycle.
    pub representative: String,
    pub period: usize,
    /// Pieces in map order starting from the representative.
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailPiece {
    pub piece: String,
    /// Steps needed to land on a cycle.
    pub depth: usize,
    pub cycle: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundarySide {
    pub piece: String,
    pub curve: String,
    pub class: BoundaryClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceDynamics {
    pub map: BTreeMap<String, String>,
    pub cycles: Vec<Cycle>,
    pub tails: Vec<TailPiece>,
    pub boundary: Vec<BoundarySide>,
}

impl PieceDynamics {
    /// Cycle index and position (steps after the representative) of a periodic piece.
    pub fn position(&self, piece: &str) -> Option<(usize, usize)> {
        self.cycles.iter().enumerate().find_map(|(i, c)| {
            c.members.iter().position(|p| p == piece).map(|k| (i, k))
        })
    }

    pub fn is_periodic(&self, piece: &str) -> bool {
        self.position(piece).is_some()
    }

    pub fn is_representative(&self, piece: &str) -> bool {
        self.cycles.iter().any(|c| c.representative == piece)
    }

    pub fn class(&self, piece: &str, curve: &str) -> Option<BoundaryClass> {
        self.boundary
            .iter()
            .find(|b| b.piece == piece && b.curve == curve)
            .map(|b| b.class)
    }
}

pub fn piece_dynamics(m: &CoverModel) -> Result<PieceDynamics> {
    let mut map = BTreeMap::new();
    for p in &m.pieces {
        let recs: Vec<_> = m.piece_map.iter().filter(|r| r.source == p.id).collect();
        match recs.as_slice() {
            [r] => {
                map.insert(p.id.clone(), r.image.clone());
            }
            _ => {
                return Err(Error::Dynamics(format!(
                    "piece map is not a function: `{}` has {} records",
                    p.id,
                    recs.len()
                )))
            }
        }
    }
    let n = map.len();
    let mut on_cycle: BTreeSet<String> = BTreeSet::new();
    let mut cycles = Vec::new();
    for start in map.keys() {
        // after n steps every orbit sits on its cycle
        let mut x = start.clone();
        for _ in 0..n {
            x = map[&x].clone();
        }
        if on_cycle.contains(&x) {
            continue;
        }
        let mut members = vec![x.clone()];
        let mut y = map[&x].clone();
        while y != x {
            members.push(y.clone());
            y = map[&y].clone();
        }
        let rep_pos = members
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        members.rotate_left(rep_pos);
        on_cycle.extend(members.iter().cloned());
        cycles.push(Cycle {
            representative: members[0].clone(),
            period: members.len(),
            members,
        });
    }
    cycles.sort_by(|a, b| a.representative.cmp(&b.representative));

    let mut tails = Vec::new();
    for p in map.keys() {
        if on_cycle.contains(p) {
            continue;
        }
        let mut x = p.clone();
        let mut depth = 0;
        while !on_cycle.contains(&x) {
            x = map[&x].clone();
            depth += 1;
        }
        let cycle = cycles.iter().position(|c| c.members.contains(&x)).unwrap();
        tails.push(TailPiece {
            piece: p.clone(),
            depth,
            cycle,
        });
    }

    let sigma = sigma_curves(m);
    let mut boundary = Vec::new();
    for p in &m.pieces {
        for c in &p.boundary {
            boundary.push(BoundarySide {
                piece: p.id.clone(),
                curve: c.clone(),
                class: classify_side(m, &sigma, &p.id, c),
            });
        }
    }

    let d0 = |piece: &str| {
        boundary
            .iter()
            .filter(|b| b.piece == piece && b.class == BoundaryClass::D0)
            .count()
    };
    for p in map.keys() {
        let k = d0(p);
        if k > 0 && !on_cycle.contains(p) {
            return Err(Error::Dynamics(format!(
                "piece `{p}` is bounded by a core curve but is not periodic"
            )));
        }
        if k > 0 && k != d0(&map[p]) {
            return Err(Error::Dynamics(format!(
                "piece `{p}` has {k} core boundaries but its image `{}` has {}",
                map[p],
                d0(&map[p])
            )));
        }
    }
    Ok(PieceDynamics {
        map,
        cycles,
        tails,
        boundary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RenormalizedKind {
    Siegel,
    Thurston,
    Homeomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotationDisk {
    /// Annulus cycle id, or the piece carrying an original rotation disk.
    pub source: String,
    /// Core curve bounding the disk, for disks coming from annuli.
    pub boundary: Option<String>,
    pub period: Option<u64>,
    pub rotation_number: Option<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ComposedComponent {
    pub target: Target,
    pub degree: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DroppedComponent {
    pub curve: String,
    pub step: usize,
    pub from: String,
    pub piece: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RenormalizedModel {
    pub cycle: Cycle,
    pub kind: RenormalizedKind,
    pub degree: u64,
    pub marked_points: u64,
    pub rotation_disks: Vec<RotationDisk>,
    pub curve_universe: Vec<String>,
    pub pullback: BTreeMap<String, Vec<ComposedComponent>>,
    pub dropped: Vec<DroppedComponent>,
    /// Every universe curve's composed pullback has total degree `degree`.
    pub degree_consistent: bool,
}

impl RenormalizedModel {
    pub fn curve_system(&self) -> CurveSystem {
        let ids = self.curve_universe.clone();
        let edges = ids
            .iter()
            .map(|id| {
                self.pullback[id]
                    .iter()
                    .filter_map(|c| {
                        let t = c.target.curve()?;
                        ids.iter().position(|x| x == t).map(|i| (i, c.degree))
                    })
                    .collect()
            })
            .collect();
        CurveSystem { ids, edges }
    }
}

pub fn renormalize(m: &CoverModel, dynamics: &PieceDynamics, cycle: usize) -> Result<RenormalizedModel> {
    let cyc = dynamics
        .cycles
        .get(cycle)
        .ok_or_else(|| Error::Renormalization(format!("no cycle with index {cycle}")))?
        .clone();
    let period = cyc.period;
    let rep = &cyc.representative;
    let pd = |p: &str| m.map_record(p).map_or(1, |r| r.parallel_degree);
    let degree: u64 = cyc.members.iter().map(|p| pd(p)).product();
    let sigma = sigma_curves(m);

    let rep_piece = m.piece(rep).expect("cycle pieces exist");
    let d0_curves: Vec<&String> = rep_piece.boundary.iter().filter(|c| m.is_core(c)).collect();
    let disks_here: u64 = cyc
        .members
        .iter()
        .filter_map(|p| m.piece(p))
        .map(|p| p.rotation_disk_count)
        .sum();
    let kind = if !d0_curves.is_empty() || disks_here > 0 {
        RenormalizedKind::Siegel
    } else if degree == 1 {
        RenormalizedKind::Homeomorphism
    } else {
        RenormalizedKind::Thurston
    };
    let marked_points =
        rep_piece.interior_marked_points + (rep_piece.boundary.len() - d0_curves.len()) as u64;

    let mut rotation_disks = Vec::new();
    for core in &d0_curves {
        let a = m.annulus_of(core).expect("core curves belong to an annulus");
        if !a.period.is_multiple_of(period as u64) {
            return Err(Error::Renormalization(format!(
                "annulus `{}` has period {} not divisible by cycle period {period}",
                a.id, a.period
            )));
        }
        rotation_disks.push(RotationDisk {
            source: a.id.clone(),
            boundary: Some(core.to_string()),
            period: Some(a.period / period as u64),
            rotation_number: Some(a.rotation_number.clone()),
        });
    }
    for _ in 0..rep_piece.rotation_disk_count {
        rotation_disks.push(RotationDisk {
            source: rep.clone(),
            boundary: None,
            period: None,
            rotation_number: None,
        });
    }

    let curve_universe: Vec<String> = m
        .interior_curves()
        .into_iter()
        .filter(|c| !sigma.contains(c) && m.home_piece(c) == Some(rep.as_str()))
        .map(String::from)
        .collect();

    let mut pullback = BTreeMap::new();
    let mut dropped = Vec::new();
    let mut consistent = true;
    for c in &curve_universe {
        let mut live: Vec<(String, u64)> = vec![(c.clone(), 1)];
        let mut out: Vec<ComposedComponent> = Vec::new();
        for step in 1..=period {
            let at = &cyc.members[period - step];
            let rest: u64 = cyc.members[..period - step].iter().map(|p| pd(p)).product();
            let mut next = Vec::new();
            for (x, acc) in &live {
                for comp in m.pullback_of(x) {
                    if &comp.piece != at {
                        dropped.push(DroppedComponent {
                            curve: c.clone(),
                            step,
                            from: x.clone(),
                            piece: comp.piece.clone(),
                        });
                        continue;
                    }
                    let deg = acc * comp.degree;
                    match &comp.target {
                        Target::Curve(y) if !sigma.contains(y.as_str()) => {
                            if m.home_piece(y) != Some(at.as_str()) {
                                return Err(Error::Renormalization(format!(
                                    "preimage `{y}` of `{x}` is recorded in `{at}` but lives elsewhere"
                                )));
                            }
                            next.push((y.clone(), deg));
                        }
                        Target::Null => out.push(ComposedComponent {
                            target: Target::Null,
                            degree: deg * rest,
                        }),
                        _ => out.push(ComposedComponent {
                            target: Target::Peripheral,
                            degree: deg * rest,
                        }),
                    }
                }
            }
            live = next;
        }
        out.extend(live.into_iter().map(|(y, d)| ComposedComponent {
            target: Target::Curve(y),
            degree: d,
        }));
        let total: u64 = out.iter().map(|c| c.degree).sum();
        consistent &= total == degree;
        pullback.insert(c.clone(), out);
    }

    Ok(RenormalizedModel {
        cycle: cyc,
        kind,
        degree,
        marked_points,
        rotation_disks,
        curve_universe,
        pullback,
        dropped,
        degree_consistent: consistent,
    })
}

/// Multiplicity of each marked point from portrait data; `None` is infinite.
pub fn orbifold_weights(portrait: &crate::model::OrbitPortrait) -> BTreeMap<String, Option<u64>> {
    const SATURATED: u128 = 1 << 40;
    let pts = &portrait.points;
    let ones = || -> BTreeMap<&str, u128> { pts.iter().map(|p| (p.id.as_str(), 1)).collect() };
    let mut nu = ones();
    let mut changing: BTreeSet<&str> = BTreeSet::new();
    for _ in 0..4 * pts.len() + 8 {
        let mut next = ones();
        for z in pts {
            if let Some(v) = next.get_mut(z.image.as_str()) {
                *v = v.lcm(&(z.local_degree as u128 * nu[z.id.as_str()])).min(SATURATED);
            }
        }
        changing = nu
            .iter()
            .filter(|(k, v)| next[*k] != **v)
            .map(|(k, _)| *k)
            .collect();
        nu = next;
        if changing.is_empty() {
            break;
        }
    }
    // anything still growing feeds on a periodic critical orbit
    let mut infinite: BTreeSet<&str> = changing;
    infinite.extend(nu.iter().filter(|(_, v)| **v >= SATURATED).map(|(k, _)| *k));
    loop {
        let more: Vec<&str> = pts
            .iter()
            .filter(|z| infinite.contains(z.id.as_str()))
            .map(|z| z.image.as_str())
            .filter(|x| !infinite.contains(x))
            .collect();
        if more.is_empty() {
            break;
        }
        infinite.extend(more);
    }
    nu.into_iter()
        .map(|(k, v)| (k.to_string(), if infinite.contains(k) { None } else { Some(v as u64) }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub representative: String,
    /// Sorted multiplicities greater than one, or `"unknown"`.
    pub signature: String,
    pub is_2222: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub dynamics: PieceDynamics,
    pub renormalizations: Vec<RenormalizedModel>,
    pub siegel_count: usize,
    pub thurston_count: usize,
    pub homeomorphism_count: usize,
    pub gamma: crate::multicurve::Multicurve,
    pub gamma_contracting: bool,
    pub signatures: Vec<Signature>,
    pub checks: Vec<Check>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Cycles whose renormalization is a homeomorphism.
    pub fn lambda_star(&self) -> Vec<&str> {
        self.renormalizations
            .iter()
            .filter(|r| r.kind == RenormalizedKind::Homeomorphism)
            .map(|r| r.cycle.representative.as_str())
            .collect()
    }
}

fn check(name: &str, location: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        location: location.into(),
        passed,
        detail: detail.into(),
    }
}

pub fn classify(m: &CoverModel) -> Result<DecompositionReport> {
    let dynamics = piece_dynamics(m)?;
    let renormalizations = (0..dynamics.cycles.len())
        .map(|i| renormalize(m, &dynamics, i))
        .collect::<Result<Vec<_>>>()?;
    let count = |k: RenormalizedKind| renormalizations.iter().filter(|r| r.kind == k).count();
    let siegel_count = count(RenormalizedKind::Siegel);
    let thurston_count = count(RenormalizedKind::Thurston);
    let homeomorphism_count = count(RenormalizedKind::Homeomorphism);

    let gamma = multicurve::generate_gamma(m)?;
    let gamma_contracting = spectral::is_contracting(&multicurve::transition_matrix(m, &gamma)?)?;

    let mut checks = Vec::new();
    let hi = 2 * m.annuli.len() + m.rotation_disk_cycles as usize;
    checks.push(check(
        "siegel-count",
        "model",
        (2..=hi).contains(&siegel_count),
        format!("{siegel_count} Siegel renormalizations, expected between 2 and {hi}"),
    ));
    for r in &renormalizations {
        checks.push(check(
            "renormalized-degree",
            format!("cycle {}", r.cycle.representative),
            r.degree_consistent,
            format!("composed pullbacks sum to degree {}", r.degree),
        ));
    }

    let mut signatures = Vec::new();
    for r in renormalizations.iter().filter(|r| r.kind == RenormalizedKind::Thurston) {
        let rep = &r.cycle.representative;
        let sig = match m.orbit_portraits.get(rep) {
            None => Signature {
                representative: rep.clone(),
                signature: "unknown".into(),
                is_2222: None,
            },
            Some(portrait) => {
                let mut weights: Vec<Option<u64>> = orbifold_weights(portrait)
                    .into_values()
                    .filter(|v| *v != Some(1))
                    .collect();
                weights.sort_by_key(|v| v.unwrap_or(u64::MAX));
                let text = weights
                    .iter()
                    .map(|v| v.map_or("∞".to_string(), |x| x.to_string()))
                    .collect::<Vec<_>>()
                    .join(",");
                Signature {
                    representative: rep.clone(),
                    signature: format!("({text})"),
                    is_2222: Some(weights == [Some(2); 4]),
                }
            }
        };
        signatures.push(sig);
    }

    if gamma_contracting {
        let homeo: Vec<String> = renormalizations
            .iter()
            .filter(|r| r.kind == RenormalizedKind::Homeomorphism)
            .map(|r| r.cycle.representative.clone())
            .collect();
        checks.push(check(
            "no-homeomorphism-cycles",
            "model",
            homeo.is_empty(),
            if homeo.is_empty() {
                "every cycle renormalizes to a map of degree at least 2".to_string()
            } else {
                format!("degree-1 cycles at {}", homeo.join(","))
            },
        ));
        for s in &signatures {
            if let Some(bad) = s.is_2222 {
                checks.push(check(
                    "orbifold-signature",
                    format!("cycle {}", s.representative),
                    !bad,
                    format!("signature {}", s.signature),
                ));
            }
        }
    }

    Ok(DecompositionReport {
        dynamics,
        renormalizations,
        siegel_count,
        thurston_count,
        homeomorphism_count,
        gamma,
        gamma_contracting,
        signatures,
        checks,
    })
}

/// Graphviz digraph of the piece map; cycle pieces and edges are highlighted.
pub fn to_dot(m: &CoverModel, dynamics: &PieceDynamics) -> String {
    let mut s = String::from("digraph piece_map {\n  rankdir=LR;\n");
    for p in &m.pieces {
        let style = if dynamics.is_periodic(&p.id) {
            ", style=filled, fillcolor=lightblue"
        } else {
            ""
        };
        let _ = writeln!(s, "  \"{}\" [shape=box{style}];", p.id);
    }
    for (src, dst) in &dynamics.map {
        let pd = m.map_record(src).map_or(1, |r| r.parallel_degree);
        let style = if dynamics.is_periodic(src) {
            ", color=red, penwidth=2"
        } else {
            ""
        };
        let _ = writeln!(s, "  \"{src}\" -> \"{dst}\" [label=\"{pd}\"{style}];");
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{OrbitPoint, OrbitPortrait};

    #[test]
    fn shi_dynamics() {
        let m = fixtures::shi();
        let d = piece_dynamics(&m).unwrap();
        assert_eq!(d.cycles.len(), 2);
        assert!(d.cycles.iter().all(|c| c.period == 1));
        assert!(d.tails.is_empty());
        assert!(d.boundary.iter().all(|b| b.class == BoundaryClass::D0));
        let r = renormalize(&m, &d, 0).unwrap();
        assert_eq!(r.cycle.representative, "inner");
        assert_eq!(r.kind, RenormalizedKind::Siegel);
        assert_eq!(r.degree, 2);
        assert_eq!(r.rotation_disks.len(), 1);
        assert_eq!(r.rotation_disks[0].period, Some(1));
    }

    #[test]
    fn shi_classification() {
        let rep = classify(&fixtures::shi()).unwrap();
        assert_eq!((rep.siegel_count, rep.thurston_count), (2, 0));
        assert!(rep.lambda_star().is_empty());
        assert!(rep.passed());
        let dot = to_dot(&fixtures::shi(), &rep.dynamics);
        assert!(dot.contains("\"inner\" -> \"inner\""));
        assert!(dot.contains("\"outer\" -> \"outer\""));
    }

    #[test]
    fn two_ring_classes_and_tails() {
        let m = fixtures::two_ring();
        let d = piece_dynamics(&m).unwrap();
        assert_eq!(d.tails, vec![TailPiece { piece: "M1".into(), depth: 1, cycle: 1 }]);
        assert_eq!(d.class("M0", "g1"), Some(BoundaryClass::D2));
        assert_eq!(d.class("M1", "g1"), Some(BoundaryClass::D1));
        assert_eq!(d.class("M1", "g2"), Some(BoundaryClass::D2));
        assert_eq!(d.class("M2", "g2"), Some(BoundaryClass::D1));
        let rep = classify(&m).unwrap();
        assert!(rep.gamma_contracting);
        assert!(rep.lambda_star().is_empty());
        assert_eq!(rep.siegel_count, 4);
        assert!(rep.passed(), "{:#?}", rep.checks);
    }

    #[test]
    fn single_piece_self_map() {
        let mut m = fixtures::shi();
        m.pieces.truncate(1);
        m.piece_map.truncate(1);
        let d = piece_dynamics(&m).unwrap();
        assert_eq!(d.cycles.len(), 1);
        assert_eq!(d.cycles[0].period, 1);
    }

    #[test]
    fn core_count_violation_is_an_error() {
        let mut m = fixtures::shi();
        m.piece_map[0].image = "outer".into();
        assert!(matches!(piece_dynamics(&m), Err(Error::Dynamics(_))));
        m.piece_map.pop();
        assert!(matches!(piece_dynamics(&m), Err(Error::Dynamics(_))));
    }

    #[test]
    fn degree_one_cycle_is_homeomorphism() {
        let spec = fixtures::TwoRingSpec {
            chain: 2,
            period: 1,
            blocks: fixtures::BlockTemplate::Single,
            siegel_curve: None,
            coincide_degree: 1,
            return_degree: 2,
        };
        let mut m = spec.build();
        m.pullback.remove("c1_0");
        m.curves.retain(|c| c.id != "c1_0");
        m.piece_map.iter_mut().find(|r| r.source == "M1").unwrap().parallel_degree = 1;
        let d = piece_dynamics(&m).unwrap();
        let i = d.cycles.iter().position(|c| c.representative == "M1").unwrap();
        assert_eq!(renormalize(&m, &d, i).unwrap().kind, RenormalizedKind::Homeomorphism);
    }

    #[test]
    fn composed_pullback_of_period_two_cycle() {
        let spec = fixtures::TwoRingSpec {
            chain: 3,
            period: 2,
            blocks: fixtures::BlockTemplate::Single,
            siegel_curve: None,
            coincide_degree: 1,
            return_degree: 2,
        };
        let m = spec.build();
        let d = piece_dynamics(&m).unwrap();
        let i = d.cycles.iter().position(|c| c.representative == "M1").unwrap();
        let r = renormalize(&m, &d, i).unwrap();
        assert_eq!(r.kind, RenormalizedKind::Thurston);
        let w = r.curve_system().matrix(&[0]);
        assert_eq!(w.get(0, 0), &Q::frac(1, 4));
        assert!(r.degree_consistent);
    }

    #[test]
    fn orbifold_weights_detect_periodic_critical_points() {
        let pt = |id: &str, image: &str, d: u64| OrbitPoint {
            id: id.into(),
            image: image.into(),
            local_degree: d,
        };
        // z^2 on {0, inf}: both periodic critical points
        let w = orbifold_weights(&OrbitPortrait {
            points: vec![pt("0", "0", 2), pt("inf", "inf", 2)],
        });
        assert_eq!(w["0"], None);
        // Lattes-type portrait: four points of weight 2
        let w = orbifold_weights(&OrbitPortrait {
            points: vec![
                pt("c1", "v1", 2),
                pt("c2", "v2", 2),
                pt("v1", "p", 1),
                pt("v2", "p", 1),
                pt("p", "p", 1),
            ],
        });
        assert_eq!(w["v1"], Some(2));
        assert_eq!(w["p"], Some(2));
        assert_eq!(w["c1"], Some(1));
    }
}
