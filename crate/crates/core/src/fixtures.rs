//! Reference models: the single-ring example, the two-ring model and a
//! parameterized two-ring family used by tests and the acceptance suite.

use std::collections::BTreeMap;

use crate::model::{
    parse_model, CoverModel, CurveClass, CurveKind, Piece, PieceMapRecord, PreimageComponent,
    RotationAnnulusCycle, Target, BOUNDARY_MARKER,
};
use crate::rational::Q;

pub const SHI_JSON: &str = include_str!("../models/shi.json");
pub const TWO_RING_JSON: &str = include_str!("../models/two_ring.json");

/// Degree-3 map with one fixed rotation annulus and no other curves.
pub fn shi() -> CoverModel {
    parse_model(SHI_JSON).expect("shipped model parses")
}

/// Degree-4 map with two fixed rotation annuli joined by a chain of two
/// generated curves.
pub fn two_ring() -> CoverModel {
    parse_model(TWO_RING_JSON).expect("shipped model parses")
}

/// Two-ring model where `u` has a degree-1 self-preimage.
pub fn two_ring_obstructed() -> CoverModel {
    let mut m = two_ring();
    m.pullback.insert(
        "u".into(),
        vec![
            comp(Target::Curve("u".into()), 1, "M2"),
            comp(Target::Peripheral, 1, "M2"),
            comp(Target::Peripheral, 2, "L"),
        ],
    );
    m
}

fn comp(target: Target, degree: u64, piece: &str) -> PreimageComponent {
    PreimageComponent {
        target,
        degree,
        piece: piece.into(),
        coincides: None,
    }
}

fn coinciding(curve: &str, degree: u64) -> PreimageComponent {
    PreimageComponent {
        target: Target::Curve(curve.into()),
        degree,
        piece: BOUNDARY_MARKER.into(),
        coincides: Some(curve.into()),
    }
}

fn curve(id: &str, kind: CurveKind, label: &str) -> CurveClass {
    CurveClass {
        id: id.into(),
        kind,
        label: label.into(),
        sides: None,
    }
}

fn interior(piece: &str) -> CurveKind {
    CurveKind::Interior { piece: piece.into() }
}

/// Step blocks of the middle piece cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockTemplate {
    /// One curve per piece; steps alternate `2`, `1/8`, `1/2`.
    Single,
    /// Two curves per piece with a rank-one step `[[1/2,1/3],[1/2,1/3]]`.
    Wide,
    /// One curve per piece, every step a single degree-1 preimage.
    Neutral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoRingSpec {
    /// Number of generated curves `g1..gk` between the rings, `1..=4`.
    pub chain: usize,
    /// Period of the middle piece cycle `M1..Mp`; `0` means no cycle.
    pub period: usize,
    pub blocks: BlockTemplate,
    /// Degree of the self-preimage of `w` in the right Siegel piece.
    pub siegel_curve: Option<u64>,
    /// Degree of each coinciding preimage `g(j+1)` of `gj`.
    pub coincide_degree: u64,
    /// Degree of the preimage of `gk` homotopic to `g1`.
    pub return_degree: u64,
}

impl TwoRingSpec {
    pub fn name(&self) -> String {
        format!(
            "two-ring k={} p={} {:?} w={} e={} D={}",
            self.chain,
            self.period,
            self.blocks,
            self.siegel_curve.map_or("-".to_string(), |d| d.to_string()),
            self.coincide_degree,
            self.return_degree
        )
    }

    fn step(&self, i: usize) -> Vec<Vec<(u64, u64)>> {
        match self.blocks {
            BlockTemplate::Single => {
                let e = match (self.period, i) {
                    (1, _) => (1, 2),
                    (_, 0) => (2, 1),
                    (_, 1) => (1, 8),
                    _ => (1, 2),
                };
                vec![vec![e]]
            }
            BlockTemplate::Wide => vec![vec![(1, 2), (1, 3)], vec![(1, 2), (1, 3)]],
            BlockTemplate::Neutral => vec![vec![(1, 1)]],
        }
    }

    fn width(&self) -> usize {
        match self.blocks {
            BlockTemplate::Wide => 2,
            _ => 1,
        }
    }

    /// Whether the model carries a curve with a degree-1 self-preimage loop.
    pub fn expect_obstructed(&self) -> bool {
        self.siegel_curve == Some(1) || (self.period > 0 && self.blocks == BlockTemplate::Neutral)
    }

    pub fn build(&self) -> CoverModel {
        assert!((1..=4).contains(&self.chain));
        assert!(self.period < self.chain && self.period <= 3);
        let k = self.chain;
        let p = self.period;
        let width = self.width();
        let mid = |j: usize| format!("M{j}");
        let g = |j: usize| format!("g{j}");
        let cyc = |i: usize, r: usize| format!("c{i}_{r}");
        let tail = |j: usize| format!("s{j}");

        let mut pieces: Vec<Piece> = Vec::new();
        let piece = |id: String, boundary: Vec<String>| Piece {
            id,
            boundary,
            interior_marked_points: 1,
            rotation_disk_count: 0,
        };
        pieces.push(piece("L".into(), vec!["a".into()]));
        for j in 0..=k {
            let mut bd = Vec::new();
            bd.push(if j == 0 { "a".to_string() } else { g(j) });
            bd.push(if j == k { "b".to_string() } else { g(j + 1) });
            pieces.push(piece(mid(j), bd));
        }
        pieces.push(piece("R".into(), vec!["b".into()]));

        let mut curves = vec![
            CurveClass {
                sides: Some([mid(0), "L".into()]),
                ..curve("a", CurveKind::Core { annulus_cycle: "A".into() }, "left ring core")
            },
            curve("b", CurveKind::Core { annulus_cycle: "B".into() }, "right ring core"),
        ];
        for j in 1..=k {
            curves.push(curve(&g(j), interior(&mid(j - 1)), "generated curve"));
        }
        for i in 1..=p {
            for r in 0..width {
                curves.push(curve(&cyc(i, r), interior(&mid(i)), "cycle curve"));
            }
        }
        for j in p + 1..k {
            curves.push(curve(&tail(j), interior(&mid(j)), "tail curve"));
        }
        curves.push(curve("r0", interior("M0"), "left Siegel piece curve"));
        if self.siegel_curve.is_some() {
            curves.push(curve("w", interior(&mid(k)), "right Siegel piece curve"));
        }

        // piece map
        let mut image: BTreeMap<String, (String, u64)> = BTreeMap::new();
        image.insert("L".into(), ("L".into(), 2));
        image.insert("R".into(), ("R".into(), 2));
        image.insert(mid(0), (mid(0), 3));
        image.insert(mid(k), (mid(k), 2));
        for j in p + 1..k {
            let to = if j == p + 1 { mid(0) } else { mid(j - 1) };
            image.insert(mid(j), (to, 2));
        }

        let mut pb: BTreeMap<String, Vec<PreimageComponent>> = BTreeMap::new();
        pb.insert("a".into(), vec![coinciding("a", 1), coinciding("g1", 1)]);
        pb.insert(
            "b".into(),
            vec![coinciding("b", 1), comp(Target::Curve(g(k)), 1, &mid(k))],
        );
        for j in 1..k {
            pb.insert(g(j), vec![coinciding(&g(j + 1), self.coincide_degree)]);
        }
        pb.entry(g(k))
            .or_default()
            .push(comp(Target::Curve(g(1)), self.return_degree, &mid(1)));

        // middle cycle: step i pulls curves of M(i+2) back into M(i+1)
        for i in 0..p {
            let at = mid(i + 1);
            let src = (i + 1) % p + 1;
            let block = self.step(i);
            let mut pd = 2;
            for col in 0..width {
                let mut comps = Vec::new();
                let mut sum = 0;
                for (row, entries) in block.iter().enumerate() {
                    let (mult, deg) = entries[col];
                    for _ in 0..mult {
                        comps.push(comp(Target::Curve(cyc(i + 1, row)), deg, &at));
                        sum += deg;
                    }
                }
                pd = pd.max(sum);
                pb.insert(cyc(src, col), comps);
            }
            for col in 0..width {
                let comps = pb.get_mut(&cyc(src, col)).unwrap();
                let sum: u64 = comps.iter().map(|c| c.degree).sum();
                if sum < pd {
                    comps.push(comp(Target::Peripheral, pd - sum, &at));
                }
            }
            image.insert(at, (mid(src), pd));
        }

        // tails hang off the left Siegel piece
        let mut r0 = vec![comp(Target::Curve("r0".into()), 3, "M0")];
        if p + 1 < k {
            r0.push(comp(Target::Curve(tail(p + 1)), 1, &mid(p + 1)));
            r0.push(comp(Target::Peripheral, 1, &mid(p + 1)));
        }
        pb.insert("r0".into(), r0);
        for j in p + 1..k {
            let mut comps = Vec::new();
            if j + 1 < k {
                comps.push(comp(Target::Curve(tail(j + 1)), 1, &mid(j + 1)));
                comps.push(comp(Target::Peripheral, 1, &mid(j + 1)));
            }
            pb.insert(tail(j), comps);
        }
        if let Some(e) = self.siegel_curve {
            let mut comps = vec![comp(Target::Curve("w".into()), e, &mid(k))];
            if e < 2 {
                comps.push(comp(Target::Peripheral, 2 - e, &mid(k)));
            }
            pb.insert("w".into(), comps);
        }

        // sides whose piece does not follow the image curve's side get an
        // extra preimage of b homotopic to the curve
        let side_of = |c: usize, plus: bool| -> String {
            if c == 0 {
                if plus { mid(0) } else { "L".into() }
            } else if plus {
                mid(c - 1)
            } else {
                mid(c)
            }
        };
        for j in 1..=k {
            for plus in [true, false] {
                let here = side_of(j, plus);
                let there = side_of(j - 1, plus);
                let has_annulus = pb
                    .iter()
                    .filter(|(src, _)| {
                        src.as_str() == "a" || src.as_str() == "b" || src.starts_with('g')
                    })
                    .flat_map(|(_, comps)| comps.iter())
                    .any(|c| c.coincides.is_none() && c.target == Target::Curve(g(j)) && c.piece == here);
                if !has_annulus && image[&here].0 != there {
                    pb.get_mut("b")
                        .unwrap()
                        .push(comp(Target::Curve(g(j)), 1, &here));
                }
            }
        }

        let mut degree = 3u64;
        for comps in pb.values() {
            degree = degree.max(comps.iter().map(|c| c.degree).sum());
        }
        let mut budget: BTreeMap<&str, u64> = BTreeMap::new();
        for (to, pd) in image.values() {
            *budget.entry(to).or_default() += pd;
        }
        degree = degree.max(budget.values().copied().max().unwrap_or(0));
        for c in &curves {
            let comps = pb.entry(c.id.clone()).or_default();
            let sum: u64 = comps.iter().map(|x| x.degree).sum();
            if sum < degree {
                comps.push(comp(Target::Peripheral, degree - sum, "L"));
            }
        }

        let piece_map = pieces
            .iter()
            .map(|pc| PieceMapRecord {
                source: pc.id.clone(),
                image: image[&pc.id].0.clone(),
                parallel_degree: image[&pc.id].1,
            })
            .collect();
        let annulus = |id: &str, core: &str, rot: Q| RotationAnnulusCycle {
            id: id.into(),
            period: 1,
            rotation_number: rot,
            modulus: Q::frac(1, 2),
            core_curves: vec![core.into()],
        };
        let mut grotzsch = BTreeMap::new();
        grotzsch.insert("default".to_string(), Q::one());
        CoverModel {
            degree,
            curves,
            pieces,
            pullback: pb,
            piece_map,
            annuli: vec![
                annulus("A", "a", Q::frac(1, 3)),
                annulus("B", "b", Q::frac(2, 5)),
            ],
            rotation_disk_cycles: 0,
            orbit_portraits: BTreeMap::new(),
            claims_rational: None,
            grotzsch_constants: grotzsch,
        }
    }
}

/// Every family member: chain lengths 1..4, cycle periods 0..3, all block
/// templates and right-piece variants.
pub fn two_ring_family() -> Vec<TwoRingSpec> {
    let mut out = Vec::new();
    for chain in 1..=4 {
        for period in 0..=(chain - 1).min(3) {
            let templates: &[BlockTemplate] = if period == 0 {
                &[BlockTemplate::Single]
            } else {
                &[BlockTemplate::Single, BlockTemplate::Wide, BlockTemplate::Neutral]
            };
            for &blocks in templates {
                for siegel_curve in [None, Some(2), Some(1)] {
                    let n = out.len() as u64;
                    out.push(TwoRingSpec {
                        chain,
                        period,
                        blocks,
                        siegel_curve,
                        coincide_degree: 1 + n % 2,
                        return_degree: 2 + 2 * (n / 2 % 2),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{serialize_model, validate_model};

    #[test]
    fn family_is_large_and_valid() {
        let fam = two_ring_family();
        assert!(fam.len() >= 20);
        for spec in &fam {
            let m = spec.build();
            let r = validate_model(&m, 16);
            assert!(
                r.passed(),
                "{}: {:#?}",
                spec.name(),
                r.failures().collect::<Vec<_>>()
            );
            assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
        }
    }

    #[test]
    fn family_covers_required_shapes() {
        let fam = two_ring_family();
        for p in 1..=3 {
            assert!(fam.iter().any(|s| s.period == p));
        }
        for k in 1..=4 {
            assert!(fam.iter().any(|s| s.chain == k));
        }
        assert!(fam.iter().any(|s| s.period + 1 < s.chain));
    }

    #[test]
    fn obstructed_variant_validates() {
        assert!(validate_model(&two_ring_obstructed(), 16).passed());
    }
}
