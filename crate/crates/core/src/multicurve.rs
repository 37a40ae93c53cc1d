//! Multicurves over a model: transition matrices, stability, the canonical
//! multicurve generated by the core curves, and brute-force enumeration.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoverModel, Target};
use crate::rational::Q;
use crate::spectral::{self, NonnegMatrix};

/// Ordered set of interior curve ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multicurve {
    curves: Vec<String>,
}

impl Multicurve {
    pub fn new<I, S>(m: &CoverModel, ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut curves = Vec::new();
        for id in ids {
            let id = id.into();
            if m.curve(&id).is_none() {
                return Err(Error::UnknownCurve(id));
            }
            if m.is_core(&id) {
                return Err(Error::CoreInMulticurve(id));
            }
            if curves.contains(&id) {
                return Err(Error::Duplicate(format!("curve `{id}` in multicurve")));
            }
            curves.push(id);
        }
        Ok(Self { curves })
    }

    /// Builds a multicurve without model checks. Duplicates are dropped.
    pub fn from_ids<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut curves: Vec<String> = Vec::new();
        for id in ids {
            let id = id.into();
            if !curves.contains(&id) {
                curves.push(id);
            }
        }
        Self { curves }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses a comma-separated id list; an empty string is the empty multicurve.
    pub fn parse(m: &CoverModel, list: &str) -> Result<Self> {
        let list = list.trim();
        if list.is_empty() || list == "∅" {
            return Ok(Self::empty());
        }
        let ids: Vec<&str> = list.split(',').map(str::trim).collect();
        if ids.iter().any(|s| s.is_empty()) {
            return Err(Error::Argument(format!("malformed multicurve `{list}`")));
        }
        Self::new(m, ids)
    }

    pub fn ids(&self) -> &[String] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.curves.iter().any(|c| c == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.curves.iter().position(|c| c == id)
    }

    pub fn id_set(&self) -> BTreeSet<&str> {
        self.curves.iter().map(String::as_str).collect()
    }

    /// Same members, sorted by id.
    pub fn sorted(&self) -> Self {
        let mut curves = self.curves.clone();
        curves.sort();
        Self { curves }
    }
}

impl fmt::Display for Multicurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.curves.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{{{}}}", self.curves.join(","))
        }
    }
}

impl Serialize for Multicurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.curves.serialize(s)
    }
}

fn check_known(m: &CoverModel, c: &Multicurve) -> Result<()> {
    for id in c.ids() {
        if m.curve(id).is_none() {
            return Err(Error::UnknownCurve(id.clone()));
        }
    }
    Ok(())
}

/// Entry `(i, j)` sums `1/deg` over preimage components of curve `j` homotopic to curve `i`.
pub fn transition_matrix(m: &CoverModel, c: &Multicurve) -> Result<NonnegMatrix> {
    check_known(m, c)?;
    let n = c.len();
    let mut w = NonnegMatrix::zeros(n, n);
    for (j, id) in c.ids().iter().enumerate() {
        for comp in m.pullback_of(id) {
            if let Some(i) = comp.target.curve().and_then(|t| c.index_of(t)) {
                w.add_to(i, j, &Q::recip_int(comp.degree));
            }
        }
    }
    Ok(w)
}

/// First `(member, target)` pair breaking stability.
pub fn stability_violation(m: &CoverModel, c: &Multicurve) -> Option<(String, String)> {
    for id in c.ids() {
        for comp in m.pullback_of(id) {
            if let Target::Curve(t) = &comp.target {
                if !m.is_core(t) && !c.contains(t) {
                    return Some((id.clone(), t.clone()));
                }
            }
        }
    }
    None
}

pub fn is_stable(m: &CoverModel, c: &Multicurve) -> bool {
    stability_violation(m, c).is_none()
}

/// Breadth-first layers: curves first reached from the cores, then from
/// those, until nothing new appears.
pub fn gamma_layers(m: &CoverModel) -> Result<Vec<Vec<String>>> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut layers: Vec<Vec<String>> = Vec::new();
    let mut frontier: Vec<String> = m.cores().into_iter().map(String::from).collect();
    loop {
        let mut next = Vec::new();
        for src in &frontier {
            if !m.pullback.contains_key(src) {
                return Err(Error::Dangling {
                    id: src.clone(),
                    context: "pullback table has no entry for a generated curve".into(),
                });
            }
            for comp in m.pullback_of(src) {
                if let Some(t) = comp.target.curve() {
                    if m.is_interior(t) && seen.insert(t.to_string()) {
                        next.push(t.to_string());
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(layers);
        }
        frontier = next.clone();
        layers.push(next);
    }
}

pub fn generate_gamma(m: &CoverModel) -> Result<Multicurve> {
    Ok(Multicurve::from_ids(gamma_layers(m)?.into_iter().flatten()))
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementReport {
    pub iterations: usize,
    pub lambda_before: f64,
    pub lambda_after: f64,
    pub tol: f64,
    pub agree: bool,
}

/// Shrinks a stable multicurve to the part reached again by pullback.
pub fn essential_refinement(
    m: &CoverModel,
    c0: &Multicurve,
    tol: f64,
) -> Result<(Multicurve, RefinementReport)> {
    check_known(m, c0)?;
    if let Some((curve, target)) = stability_violation(m, c0) {
        return Err(Error::Unstable { curve, target });
    }
    let mut current = c0.clone();
    let mut iterations = 0;
    loop {
        let reached: BTreeSet<&str> = current
            .ids()
            .iter()
            .flat_map(|id| m.pullback_of(id))
            .filter_map(|p| p.target.curve())
            .filter(|t| current.contains(t))
            .collect();
        let next = Multicurve::from_ids(
            current
                .ids()
                .iter()
                .filter(|id| reached.contains(id.as_str()))
                .cloned(),
        );
        iterations += 1;
        if next == current {
            break;
        }
        current = next;
    }
    let lambda_before = spectral::power_lambda(&transition_matrix(m, c0)?, tol)?;
    let lambda_after = spectral::power_lambda(&transition_matrix(m, &current)?, tol)?;
    let agree = (lambda_before - lambda_after).abs() <= 2.0 * tol;
    Ok((
        current,
        RefinementReport {
            iterations,
            lambda_before,
            lambda_after,
            tol,
            agree,
        },
    ))
}

/// Default cap on the number of curves for subset enumeration.
pub const DEFAULT_CAP: usize = 16;

/// Estimates at least this far below 1 are accepted as contracting without
/// the exact solve; `power_lambda` is accurate to `tol <= 1e-9`.
const EXACT_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct StableEntry {
    pub multicurve: Multicurve,
    pub lambda: f64,
    /// Exact verdict of `sp(W) < 1`.
    pub contracting: bool,
}

/// Curve universe with pullback edges, shared by models and renormalizations.
#[derive(Clone, Debug)]
pub struct CurveSystem {
    pub ids: Vec<String>,
    /// For each curve `j`, pairs `(i, degree)` of components homotopic to curve `i`.
    pub edges: Vec<Vec<(usize, u64)>>,
}

impl CurveSystem {
    /// Interior curves of a model; core targets are exempt.
    pub fn of_model(m: &CoverModel) -> Self {
        let ids: Vec<String> = m.interior_curves().into_iter().map(String::from).collect();
        let edges = ids
            .iter()
            .map(|id| {
                m.pullback_of(id)
                    .iter()
                    .filter_map(|p| {
                        let t = p.target.curve()?;
                        ids.iter().position(|x| x == t).map(|i| (i, p.degree))
                    })
                    .collect()
            })
            .collect();
        Self { ids, edges }
    }

    pub fn matrix(&self, members: &[usize]) -> NonnegMatrix {
        let n = members.len();
        let mut w = NonnegMatrix::zeros(n, n);
        for (col, &j) in members.iter().enumerate() {
            for &(i, deg) in &self.edges[j] {
                if let Some(row) = members.iter().position(|&x| x == i) {
                    w.add_to(row, col, &Q::recip_int(deg));
                }
            }
        }
        w
    }

    /// Every stable subset with its leading-eigenvalue estimate, in mask order.
    pub fn enumerate_stable(&self, cap: usize, tol: f64) -> Result<Vec<StableEntry>> {
        let n = self.ids.len();
        if n > cap {
            return Err(Error::CapExceeded { count: n, cap });
        }
        let needs: Vec<u64> = self
            .edges
            .iter()
            .map(|e| e.iter().fold(0u64, |acc, &(i, _)| acc | (1 << i)))
            .collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let stable = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .all(|i| needs[i] & !mask == 0);
            if !stable {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let w = self.matrix(&members);
            let lambda = spectral::power_lambda(&w, tol)?;
            let contracting = if lambda < 1.0 - EXACT_MARGIN {
                true
            } else {
                spectral::is_contracting(&w)?
            };
            out.push(StableEntry {
                multicurve: Multicurve::from_ids(members.iter().map(|&i| self.ids[i].clone())),
                lambda,
                contracting,
            });
        }
        Ok(out)
    }

    /// Smallest set containing `seed` and closed under taking pullback targets.
    pub fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut inside: BTreeSet<usize> = seed.iter().copied().collect();
        let mut stack: Vec<usize> = seed.to_vec();
        while let Some(j) = stack.pop() {
            for &(i, _) in &self.edges[j] {
                if inside.insert(i) {
                    stack.push(i);
                }
            }
        }
        inside.into_iter().collect()
    }
}

/// All stable multicurves of the model with their estimates.
pub fn enumerate_stable(m: &CoverModel, cap: usize, tol: f64) -> Result<Vec<StableEntry>> {
    CurveSystem::of_model(m).enumerate_stable(cap, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn g(m: &CoverModel, ids: &[&str]) -> Multicurve {
        Multicurve::new(m, ids.iter().copied()).unwrap()
    }

    #[test]
    fn single_self_preimage() {
        let m = fixtures::two_ring();
        let w = transition_matrix(&m, &g(&m, &["u"])).unwrap();
        assert_eq!(w.get(0, 0), &Q::frac(1, 2));
    }

    #[test]
    fn empty_multicurve() {
        let m = fixtures::shi();
        let w = transition_matrix(&m, &Multicurve::empty()).unwrap();
        assert_eq!((w.rows(), w.cols()), (0, 0));
        assert_eq!(spectral::power_lambda(&w, 1e-9).unwrap(), 0.0);
        assert!(is_stable(&m, &Multicurve::empty()));
    }

    #[test]
    fn two_ring_gamma_matrix() {
        let m = fixtures::two_ring();
        let gamma = generate_gamma(&m).unwrap();
        assert_eq!(gamma.ids(), ["g1", "g2"]);
        let w = transition_matrix(&m, &gamma).unwrap();
        assert_eq!(
            w.to_grid(),
            vec![vec!["0", "1/4"], vec!["1", "0"]]
        );
        assert!((spectral::power_lambda(&w, 1e-9).unwrap() - 0.5).abs() <= 1e-9);
        assert!(is_stable(&m, &gamma));
    }

    #[test]
    fn shi_gamma_empty() {
        let m = fixtures::shi();
        assert!(generate_gamma(&m).unwrap().is_empty());
        let all = enumerate_stable(&m, DEFAULT_CAP, 1e-9).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].multicurve.is_empty() && all[0].lambda == 0.0);
    }

    #[test]
    fn instability_detected() {
        let m = fixtures::two_ring();
        assert!(!is_stable(&m, &g(&m, &["g2"])));
        assert_eq!(
            stability_violation(&m, &g(&m, &["g2"])),
            Some(("g2".into(), "g1".into()))
        );
    }

    #[test]
    fn multicurve_rejects_cores_and_unknowns() {
        let m = fixtures::two_ring();
        assert_eq!(Multicurve::new(&m, ["a"]), Err(Error::CoreInMulticurve("a".into())));
        assert_eq!(Multicurve::new(&m, ["zz"]), Err(Error::UnknownCurve("zz".into())));
        assert!(matches!(Multicurve::parse(&m, "g1,,g2"), Err(Error::Argument(_))));
        assert!(Multicurve::parse(&m, "").unwrap().is_empty());
    }

    #[test]
    fn refinement_drops_unreached_curve() {
        let m = fixtures::two_ring();
        let c0 = g(&m, &["g1", "g2", "h"]);
        assert!(is_stable(&m, &c0));
        let (c, rep) = essential_refinement(&m, &c0, 1e-9).unwrap();
        assert_eq!(c.ids(), ["g1", "g2"]);
        assert!(rep.agree);
        let gamma = generate_gamma(&m).unwrap();
        assert_eq!(essential_refinement(&m, &gamma, 1e-9).unwrap().0, gamma);
        assert!(essential_refinement(&m, &Multicurve::empty(), 1e-9).unwrap().0.is_empty());
        assert!(matches!(
            essential_refinement(&m, &g(&m, &["g2"]), 1e-9),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn enumeration_contains_gamma() {
        let m = fixtures::two_ring();
        let all = enumerate_stable(&m, DEFAULT_CAP, 1e-9).unwrap();
        let gamma = all
            .iter()
            .find(|e| e.multicurve.sorted().ids() == ["g1", "g2"])
            .unwrap();
        assert!((gamma.lambda - 0.5).abs() <= 1e-9);
        assert!(all.iter().all(|e| e.contracting));
        assert!(matches!(
            enumerate_stable(&m, 2, 1e-9),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn degree_one_self_preimage_is_obstruction() {
        let m = fixtures::two_ring_obstructed();
        let all = enumerate_stable(&m, DEFAULT_CAP, 1e-9).unwrap();
        let s = all.iter().find(|e| e.multicurve.ids() == ["u"]).unwrap();
        assert!((s.lambda - 1.0).abs() <= 1e-9);
        assert!(!s.contracting);
    }

    #[test]
    fn layers_are_disjoint() {
        let m = fixtures::two_ring();
        let layers = gamma_layers(&m).unwrap();
        let total: usize = layers.iter().map(Vec::len).sum();
        let union: BTreeSet<&String> = layers.iter().flatten().collect();
        assert_eq!(total, union.len());
        assert!(layers.len() <= m.interior_curves().len());
    }
}
