//! Combinatorial schema of a branched cover with rotation annuli: curve
//! classes, complementary pieces, the pullback table and the piece map.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Piece marker for a preimage component that literally equals a boundary curve.
pub const BOUNDARY_MARKER: &str = "@boundary";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Core { annulus_cycle: String },
    Interior { piece: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveClass {
    pub id: String,
    pub kind: CurveKind,
    #[serde(default)]
    pub label: String,
    /// Explicit `[plus, minus]` adjacent pieces. Defaults to declaration order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    Null,
    Peripheral,
    Curve(String),
}

impl Target {
    pub fn curve(&self) -> Option<&str> {
        match self {
            Target::Curve(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreimageComponent {
    pub target: Target,
    pub degree: u64,
    pub piece: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coincides: Option<String>,
}

impl PreimageComponent {
    pub fn on_boundary(&self) -> bool {
        self.piece == BOUNDARY_MARKER
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub id: String,
    pub boundary: Vec<String>,
    pub interior_marked_points: u64,
    #[serde(default)]
    pub rotation_disk_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceMapRecord {
    pub source: String,
    pub image: String,
    pub parallel_degree: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationAnnulusCycle {
    pub id: String,
    pub period: u64,
    pub rotation_number: Q,
    pub modulus: Q,
    pub core_curves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitPoint {
    pub id: String,
    pub image: String,
    pub local_degree: u64,
}

/// Dynamics of the renormalized map on the marked points of a cycle's
/// representative piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitPortrait {
    pub points: Vec<OrbitPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverModel {
    pub degree: u64,
    pub curves: Vec<CurveClass>,
    pub pieces: Vec<Piece>,
    pub pullback: BTreeMap<String, Vec<PreimageComponent>>,
    pub piece_map: Vec<PieceMapRecord>,
    pub annuli: Vec<RotationAnnulusCycle>,
    pub rotation_disk_cycles: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub orbit_portraits: BTreeMap<String, OrbitPortrait>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims_rational: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub grotzsch_constants: BTreeMap<String, Q>,
}

/// Parses and resolves a model document.
pub fn parse_model(text: &str) -> Result<CoverModel> {
    let model: CoverModel = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof => Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            _ => Error::Schema(e.to_string()),
        }
    })?;
    model.resolve()?;
    Ok(model)
}

/// Canonical pretty-printed form; `parse_model` inverts it.
pub fn serialize_model(m: &CoverModel) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("model serialization cannot fail");
    s.push('\n');
    s
}

fn unique<'a>(what: &str, ids: impl Iterator<Item = &'a String>) -> Result<BTreeSet<&'a str>> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::Duplicate(format!("{what} `{id}`")));
        }
    }
    Ok(seen)
}

fn dangling(id: &str, context: impl Into<String>) -> Error {
    Error::Dangling {
        id: id.to_string(),
        context: context.into(),
    }
}

impl CoverModel {
    /// Cross-reference resolution. Only structural errors live here; semantic
    /// consistency is reported by [`validate_model`].
    fn resolve(&self) -> Result<()> {
        if self.annuli.is_empty() {
            return Err(Error::Schema(
                "Herman model requires ≥1 rotation annulus cycle".into(),
            ));
        }
        if self.degree < 2 {
            return Err(Error::Schema(format!("degree must be at least 2, got {}", self.degree)));
        }
        let curves = unique("curve", self.curves.iter().map(|c| &c.id))?;
        let pieces = unique("piece", self.pieces.iter().map(|p| &p.id))?;
        let annuli = unique("annulus cycle", self.annuli.iter().map(|a| &a.id))?;
        unique("piece_map source", self.piece_map.iter().map(|r| &r.source))?;

        for c in &self.curves {
            match &c.kind {
                CurveKind::Core { annulus_cycle } => {
                    if !annuli.contains(annulus_cycle.as_str()) {
                        return Err(dangling(annulus_cycle, format!("kind of curve `{}`", c.id)));
                    }
                    let listed = self
                        .annulus(annulus_cycle)
                        .is_some_and(|a| a.core_curves.contains(&c.id));
                    if !listed {
                        return Err(Error::Schema(format!(
                            "core curve `{}` is not listed by annulus cycle `{annulus_cycle}`",
                            c.id
                        )));
                    }
                }
                CurveKind::Interior { piece } => {
                    if !pieces.contains(piece.as_str()) {
                        return Err(dangling(piece, format!("kind of curve `{}`", c.id)));
                    }
                }
            }
            if let Some(sides) = &c.sides {
                for p in sides {
                    if !pieces.contains(p.as_str()) {
                        return Err(dangling(p, format!("sides of curve `{}`", c.id)));
                    }
                }
            }
        }
        for p in &self.pieces {
            unique(&format!("boundary curve of piece `{}`:", p.id), p.boundary.iter())?;
            for b in &p.boundary {
                if !curves.contains(b.as_str()) {
                    return Err(dangling(b, format!("boundary of piece `{}`", p.id)));
                }
            }
        }
        for (curve, comps) in &self.pullback {
            if !curves.contains(curve.as_str()) {
                return Err(dangling(curve, "pullback table key"));
            }
            for (k, comp) in comps.iter().enumerate() {
                let at = format!("pullback of `{curve}`, component {k}");
                if comp.degree == 0 {
                    return Err(Error::Schema(format!("{at}: degree must be at least 1")));
                }
                if let Target::Curve(t) = &comp.target {
                    if !curves.contains(t.as_str()) {
                        return Err(dangling(t, at.clone()));
                    }
                }
                if !comp.on_boundary() && !pieces.contains(comp.piece.as_str()) {
                    return Err(dangling(&comp.piece, at.clone()));
                }
                if let Some(c) = &comp.coincides {
                    if !curves.contains(c.as_str()) {
                        return Err(dangling(c, at.clone()));
                    }
                    if comp.target != Target::Curve(c.clone()) || !comp.on_boundary() {
                        return Err(Error::Schema(format!(
                            "{at}: a coinciding component must target Curve(`{c}`) and sit on `{BOUNDARY_MARKER}`"
                        )));
                    }
                } else if comp.on_boundary() {
                    return Err(Error::Schema(format!(
                        "{at}: only coinciding components may sit on `{BOUNDARY_MARKER}`"
                    )));
                }
            }
        }
        for r in &self.piece_map {
            for p in [&r.source, &r.image] {
                if !pieces.contains(p.as_str()) {
                    return Err(dangling(p, "piece_map"));
                }
            }
            if r.parallel_degree == 0 {
                return Err(Error::Schema(format!(
                    "piece_map record for `{}`: parallel_degree must be at least 1",
                    r.source
                )));
            }
        }
        for a in &self.annuli {
            if a.period == 0 || a.core_curves.len() as u64 != a.period {
                return Err(Error::Schema(format!(
                    "annulus cycle `{}`: period {} with {} core curves",
                    a.id,
                    a.period,
                    a.core_curves.len()
                )));
            }
            if !(a.rotation_number.is_positive() && a.rotation_number < Q::one()) {
                return Err(Error::Schema(format!(
                    "annulus cycle `{}`: rotation number must lie in (0,1)",
                    a.id
                )));
            }
            if !a.modulus.is_positive() {
                return Err(Error::Schema(format!("annulus cycle `{}`: modulus must be positive", a.id)));
            }
            for c in &a.core_curves {
                match self.curve(c).map(|cc| &cc.kind) {
                    None => return Err(dangling(c, format!("core curves of `{}`", a.id))),
                    Some(CurveKind::Core { annulus_cycle }) if annulus_cycle == &a.id => {}
                    Some(_) => {
                        return Err(Error::Schema(format!(
                            "annulus cycle `{}` lists `{c}`, which is not one of its core curves",
                            a.id
                        )))
                    }
                }
            }
        }
        for key in self.orbit_portraits.keys() {
            if !pieces.contains(key.as_str()) {
                return Err(dangling(key, "orbit_portraits"));
            }
        }
        Ok(())
    }

    pub fn curve(&self, id: &str) -> Option<&CurveClass> {
        self.curves.iter().find(|c| c.id == id)
    }

    pub fn piece(&self, id: &str) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.id == id)
    }

    pub fn annulus(&self, id: &str) -> Option<&RotationAnnulusCycle> {
        self.annuli.iter().find(|a| a.id == id)
    }

    pub fn is_core(&self, id: &str) -> bool {
        matches!(self.curve(id).map(|c| &c.kind), Some(CurveKind::Core { .. }))
    }

    pub fn is_interior(&self, id: &str) -> bool {
        matches!(self.curve(id).map(|c| &c.kind), Some(CurveKind::Interior { .. }))
    }

    /// Core curves in declaration order.
    pub fn cores(&self) -> Vec<&str> {
        self.curves
            .iter()
            .filter(|c| matches!(c.kind, CurveKind::Core { .. }))
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Interior curves in declaration order.
    pub fn interior_curves(&self) -> Vec<&str> {
        self.curves
            .iter()
            .filter(|c| matches!(c.kind, CurveKind::Interior { .. }))
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Containing piece declared for an interior curve.
    pub fn home_piece(&self, id: &str) -> Option<&str> {
        match self.curve(id).map(|c| &c.kind) {
            Some(CurveKind::Interior { piece }) => Some(piece),
            _ => None,
        }
    }

    pub fn annulus_of(&self, core: &str) -> Option<&RotationAnnulusCycle> {
        match self.curve(core).map(|c| &c.kind) {
            Some(CurveKind::Core { annulus_cycle }) => self.annulus(annulus_cycle),
            _ => None,
        }
    }

    pub fn pullback_of(&self, id: &str) -> &[PreimageComponent] {
        self.pullback.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn map_record(&self, piece: &str) -> Option<&PieceMapRecord> {
        self.piece_map.iter().find(|r| r.source == piece)
    }

    /// `f*` on pieces.
    pub fn piece_image(&self, piece: &str) -> Option<&str> {
        self.map_record(piece).map(|r| r.image.as_str())
    }

    /// Image curve and local degree of a curve that appears as a coinciding
    /// preimage component.
    pub fn forward_image(&self, id: &str) -> Option<(&str, u64)> {
        self.pullback.iter().find_map(|(c, comps)| {
            comps
                .iter()
                .find(|p| p.coincides.as_deref() == Some(id))
                .map(|p| (c.as_str(), p.degree))
        })
    }

    /// Curves that bound at least one piece.
    pub fn boundary_curves(&self) -> BTreeSet<&str> {
        self.pieces
            .iter()
            .flat_map(|p| p.boundary.iter().map(String::as_str))
            .collect()
    }

    /// Pieces adjacent to a curve, in declaration order.
    pub fn adjacent_pieces(&self, curve: &str) -> Vec<&str> {
        self.pieces
            .iter()
            .filter(|p| p.boundary.iter().any(|b| b == curve))
            .map(|p| p.id.as_str())
            .collect()
    }

    /// `(plus, minus)` pieces of a boundary curve.
    pub fn sides(&self, curve: &str) -> Result<(String, String)> {
        if let Some([plus, minus]) = self.curve(curve).and_then(|c| c.sides.clone()) {
            return Ok((plus, minus));
        }
        match self.adjacent_pieces(curve).as_slice() {
            [a, b] => Ok((a.to_string(), b.to_string())),
            other => Err(Error::Weights(format!(
                "curve `{curve}` must separate exactly two pieces, found {}",
                other.len()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub location: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, location: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            location: location.into(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Runs every statically checkable consistency condition. Never fails;
/// problems become report entries.
pub fn validate_model(m: &CoverModel, cap: usize) -> ValidationReport {
    let mut r = ValidationReport::default();
    let cores: BTreeSet<&str> = m.cores().into_iter().collect();

    for c in &m.curves {
        let comps = m.pullback_of(&c.id);
        let sum: u64 = comps.iter().map(|p| p.degree).sum();
        r.push(
            "degree-sum",
            format!("curve {}", c.id),
            sum == m.degree,
            format!("preimage degrees sum to {sum}, map degree {}", m.degree),
        );
    }

    for p in &m.pieces {
        let on_core = p.boundary.iter().filter(|b| cores.contains(b.as_str())).count() as u64;
        let count = p.interior_marked_points + p.boundary.len() as u64 + on_core;
        r.push(
            "piece-count",
            format!("piece {}", p.id),
            count >= 3,
            format!(
                "{} marked + {} boundary + {} core boundary = {count}",
                p.interior_marked_points,
                p.boundary.len(),
                on_core
            ),
        );
    }

    let rot = m.rotation_disk_cycles + 2 * m.annuli.len() as u64;
    r.push(
        "rotation-domain-bound",
        "model",
        rot <= 2 * m.degree - 2,
        format!("{} disk cycles + 2*{} annulus cycles = {rot}, bound {}", m.rotation_disk_cycles, m.annuli.len(), 2 * m.degree - 2),
    );

    // piece map is a function
    let mut function_ok = true;
    for p in &m.pieces {
        let n = m.piece_map.iter().filter(|rec| rec.source == p.id).count();
        if n != 1 {
            function_ok = false;
            r.push("piece-map-function", format!("piece {}", p.id), false, format!("{n} records"));
        }
    }
    if function_ok {
        r.push("piece-map-function", "piece_map", true, "one record per piece");
        for t in &m.pieces {
            let budget: u64 = m
                .piece_map
                .iter()
                .filter(|rec| rec.image == t.id)
                .map(|rec| rec.parallel_degree)
                .sum();
            r.push(
                "parallel-degree-budget",
                format!("piece {}", t.id),
                budget <= m.degree,
                format!("parallel degrees onto it sum to {budget}"),
            );
        }
        check_core_pieces(m, &cores, &mut r);
    }

    for a in &m.annuli {
        for (k, core) in a.core_curves.iter().enumerate() {
            let next = &a.core_curves[(k + 1) % a.core_curves.len()];
            let ok = m
                .pullback_of(next)
                .iter()
                .any(|p| p.coincides.as_deref() == Some(core.as_str()) && p.degree == 1);
            r.push(
                "annulus-coherence",
                format!("annulus {} position {k}", a.id),
                ok,
                format!("`{core}` must be a coinciding degree-1 preimage of `{next}`"),
            );
        }
    }

    // each curve coincides at most once
    let mut coincide_count: BTreeMap<&str, usize> = BTreeMap::new();
    for comps in m.pullback.values() {
        for c in comps.iter().filter_map(|p| p.coincides.as_deref()) {
            *coincide_count.entry(c).or_default() += 1;
        }
    }
    for (c, n) in &coincide_count {
        if *n > 1 {
            r.push("single-valued-image", format!("curve {c}"), false, format!("coincides {n} times"));
        }
    }

    match crate::multicurve::generate_gamma(m) {
        Err(e) => r.push("gamma-generation", "model", false, e.to_string()),
        Ok(gamma) => {
            sigma_checks(m, &cores, gamma.ids(), &coincide_count, &mut r);
        }
    }

    if m.claims_rational == Some(true) {
        match crate::multicurve::enumerate_stable(m, cap, 1e-9) {
            Ok(list) => {
                let bad: Vec<String> = list
                    .iter()
                    .filter(|e| e.lambda > 1.0 + 1e-6)
                    .map(|e| format!("{} (λ≈{:.6})", e.multicurve, e.lambda))
                    .collect();
                r.push(
                    "rational-leading-eigenvalue-hint",
                    "model",
                    bad.is_empty(),
                    if bad.is_empty() {
                        "no stable multicurve exceeds 1".to_string()
                    } else {
                        format!("exceeding: {}", bad.join(", "))
                    },
                );
            }
            Err(e) => r.push("rational-leading-eigenvalue-hint", "model", true, format!("skipped: {e}")),
        }
    }
    r
}

fn check_core_pieces(m: &CoverModel, cores: &BTreeSet<&str>, r: &mut ValidationReport) {
    let n = m.pieces.len();
    let d0 = |p: &str| {
        m.piece(p)
            .map_or(0, |pc| pc.boundary.iter().filter(|b| cores.contains(b.as_str())).count())
    };
    for p in &m.pieces {
        if d0(&p.id) == 0 {
            continue;
        }
        let mut cur = p.id.as_str();
        let mut periodic = false;
        for _ in 0..n {
            cur = m.piece_image(cur).unwrap_or(cur);
            if cur == p.id {
                periodic = true;
                break;
            }
        }
        r.push(
            "core-piece-periodic",
            format!("piece {}", p.id),
            periodic,
            "pieces bounded by core curves are periodic under the piece map",
        );
        let img = m.piece_image(&p.id).unwrap_or(&p.id);
        r.push(
            "core-count-preserved",
            format!("piece {}", p.id),
            d0(&p.id) == d0(img),
            format!("{} core boundaries, image `{img}` has {}", d0(&p.id), d0(img)),
        );
    }
}

fn sigma_checks(
    m: &CoverModel,
    cores: &BTreeSet<&str>,
    gamma: &[String],
    coincide_count: &BTreeMap<&str, usize>,
    r: &mut ValidationReport,
) {
    let sigma: BTreeSet<&str> = cores
        .iter()
        .copied()
        .chain(gamma.iter().map(String::as_str))
        .collect();
    let bounds = m.boundary_curves();
    r.push(
        "boundary-equals-sigma",
        "pieces",
        bounds == sigma,
        format!(
            "piece boundaries {{{}}}, cores and generated curves {{{}}}",
            bounds.iter().copied().collect::<Vec<_>>().join(","),
            sigma.iter().copied().collect::<Vec<_>>().join(",")
        ),
    );
    for s in &sigma {
        let adj = m.adjacent_pieces(s);
        r.push(
            "two-sided",
            format!("curve {s}"),
            adj.len() == 2,
            format!("adjacent to {} pieces", adj.len()),
        );
    }
    for g in gamma {
        let n = coincide_count.get(g.as_str()).copied().unwrap_or(0);
        r.push(
            "forward-image",
            format!("curve {g}"),
            n == 1,
            format!("appears as a coinciding preimage {n} times"),
        );
    }
    // components targeting curves must sit where the piece dynamics allows
    for (src, comps) in &m.pullback {
        for (k, comp) in comps.iter().enumerate() {
            let Some(t) = comp.target.curve() else { continue };
            if comp.on_boundary() {
                continue;
            }
            let at = format!("pullback of {src}, component {k}");
            if sigma.contains(t) {
                let ok = m.adjacent_pieces(t).contains(&comp.piece.as_str());
                r.push("component-placement", at, ok, format!("homotopic to boundary curve `{t}`, lies in `{}`", comp.piece));
            } else if let Some(home) = m.home_piece(t) {
                let ok_home = comp.piece == home;
                let img = m.piece_image(home);
                let ok_img = if sigma.contains(src.as_str()) {
                    img.is_some_and(|i| m.adjacent_pieces(src).contains(&i))
                } else {
                    img == m.home_piece(src)
                };
                r.push(
                    "component-placement",
                    at,
                    ok_home && ok_img,
                    format!("target `{t}` lives in `{home}`, component in `{}`", comp.piece),
                );
            }
        }
    }
    // a side without annular preimages maps to the matching side of the image
    for g in gamma {
        let Some((img, _)) = m.forward_image(g) else { continue };
        let (Ok(s), Ok(t)) = (m.sides(g), m.sides(img)) else { continue };
        for (side, from, to) in [("+", &s.0, &t.0), ("-", &s.1, &t.1)] {
            if crate::decompose::classify_side(m, &sigma, from, g) != crate::decompose::BoundaryClass::D2 {
                continue;
            }
            let mapped = m.piece_image(from);
            r.push(
                "side-dynamics",
                format!("curve {g} side {side}"),
                mapped == Some(to.as_str()),
                format!("piece `{from}` maps to `{}`, expected `{to}`", mapped.unwrap_or("?")),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn shi_parses_with_expected_shape() {
        let m = fixtures::shi();
        assert_eq!(m.curves.len(), 1);
        assert_eq!(m.pieces.len(), 2);
        assert_eq!(m.annuli.len(), 1);
    }

    #[test]
    fn missing_annuli_is_rejected() {
        let text = r#"{"degree":2,"curves":[],"pieces":[],"pullback":{},"piece_map":[],"annuli":[],"rotation_disk_cycles":0}"#;
        let err = parse_model(text).unwrap_err();
        assert_eq!(err, Error::Schema("Herman model requires ≥1 rotation annulus cycle".into()));
    }

    #[test]
    fn dangling_pullback_target() {
        let text = fixtures::SHI_JSON.replace(r#""Curve": "S""#, r#""Curve": "nowhere""#);
        assert!(matches!(parse_model(&text), Err(Error::Dangling { id, .. }) if id == "nowhere"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_model("{\n  \"degree\": 3,\n  oops\n}").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn duplicate_piece() {
        let mut m = fixtures::shi();
        m.pieces[1].id = "inner".into();
        let text = serialize_model(&m);
        assert!(matches!(parse_model(&text), Err(Error::Duplicate(_))));
    }

    #[test]
    fn round_trip() {
        for m in [fixtures::shi(), fixtures::two_ring()] {
            let text = serialize_model(&m);
            assert_eq!(parse_model(&text).unwrap(), m);
        }
    }

    #[test]
    fn shi_validates() {
        let r = validate_model(&fixtures::shi(), 16);
        assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r, validate_model(&fixtures::shi(), 16));
    }

    #[test]
    fn inconsistent_parallel_degree_fails() {
        let mut m = fixtures::shi();
        m.piece_map[0].parallel_degree = 2;
        m.piece_map[1].image = "inner".into();
        m.piece_map[1].parallel_degree = 2;
        let r = validate_model(&m, 16);
        assert!(r.failures().any(|c| c.name == "parallel-degree-budget"));
    }

    #[test]
    fn degree_sum_failure() {
        let mut m = fixtures::shi();
        m.pullback.get_mut("S").unwrap()[1].degree = 2;
        let r = validate_model(&m, 16);
        assert!(r.failures().any(|c| c.name == "degree-sum" && c.location == "curve S"));
    }

    #[test]
    fn preperiodic_core_piece_flagged() {
        let mut m = fixtures::shi();
        m.piece_map[0].image = "outer".into();
        let r = validate_model(&m, 16);
        assert!(r.failures().any(|c| c.name == "core-piece-periodic" && c.location == "piece inner"));
    }

    #[test]
    fn two_ring_validates() {
        let r = validate_model(&fixtures::two_ring(), 16);
        assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
    }
}
