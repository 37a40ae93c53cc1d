//! Splitting stable multicurves along the piece dynamics, the reduction
//! identity for leading eigenvalues, and the combination check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decompose::{self, PieceDynamics, RenormalizedKind};
use crate::error::{Error, Result};
use crate::model::CoverModel;
use crate::multicurve::{self, CurveSystem, Multicurve};
use crate::spectral::{self, CyclicReport, NonnegMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclePart {
    pub representative: String,
    pub period: usize,
    /// Members lying in the `k`-th piece after the representative.
    pub steps: Vec<Multicurve>,
}

impl CyclePart {
    /// Members in the representative piece.
    pub fn base(&self) -> &Multicurve {
        &self.steps[0]
    }

    pub fn len(&self) -> usize {
        self.steps.iter().map(Multicurve::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitMulticurve {
    pub c_gamma: Multicurve,
    pub c_s: Multicurve,
    /// One entry per piece cycle, ordered by representative.
    pub sigma: Vec<CyclePart>,
}

impl SplitMulticurve {
    /// Members in block order: `C_Γ`, `C_s`, then each cycle step by step.
    pub fn ordered(&self) -> Multicurve {
        let ids = self
            .c_gamma
            .ids()
            .iter()
            .chain(self.c_s.ids())
            .chain(self.sigma.iter().flat_map(|c| c.steps.iter().flat_map(|s| s.ids())))
            .cloned();
        Multicurve::from_ids(ids)
    }
}

pub fn split_multicurve(m: &CoverModel, c: &Multicurve) -> Result<SplitMulticurve> {
    let dynamics = decompose::piece_dynamics(m)?;
    split_with(m, c, &dynamics)
}

fn split_with(m: &CoverModel, c: &Multicurve, dynamics: &PieceDynamics) -> Result<SplitMulticurve> {
    for id in c.ids() {
        if m.curve(id).is_none() {
            return Err(Error::UnknownCurve(id.clone()));
        }
    }
    if let Some((curve, target)) = multicurve::stability_violation(m, c) {
        return Err(Error::Unstable { curve, target });
    }
    let gamma = multicurve::generate_gamma(m)?;
    let sigma_curves = decompose::sigma_curves(m);
    let mut c_gamma = Vec::new();
    let mut c_s = Vec::new();
    let mut steps: Vec<Vec<Vec<String>>> = dynamics
        .cycles
        .iter()
        .map(|cy| vec![Vec::new(); cy.period])
        .collect();
    for id in c.ids() {
        if gamma.contains(id) {
            c_gamma.push(id.clone());
            continue;
        }
        if sigma_curves.contains(id.as_str()) {
            return Err(Error::Reduction {
                block: "split".into(),
                detail: format!("`{id}` lies on a piece boundary but is not a generated curve"),
            });
        }
        let home = m.home_piece(id).ok_or_else(|| Error::CoreInMulticurve(id.clone()))?;
        match dynamics.position(home) {
            Some((cy, k)) => steps[cy][k].push(id.clone()),
            None => c_s.push(id.clone()),
        }
    }
    let sigma = dynamics
        .cycles
        .iter()
        .zip(steps)
        .map(|(cy, st)| CyclePart {
            representative: cy.representative.clone(),
            period: cy.period,
            steps: st.into_iter().map(Multicurve::from_ids).collect(),
        })
        .collect();
    Ok(SplitMulticurve {
        c_gamma: Multicurve::from_ids(c_gamma),
        c_s: Multicurve::from_ids(c_s),
        sigma,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleReduction {
    pub representative: String,
    pub period: usize,
    /// Step blocks `B_k` as exact grids.
    pub blocks: Vec<NonnegMatrix>,
    /// `B_0 B_1 ... B_{p-1}`.
    pub product: NonnegMatrix,
    /// Same matrix read off the composed renormalized pullback.
    pub renormalized: NonnegMatrix,
    pub renormalized_matches: bool,
    pub power_block_diagonal: bool,
    pub cyclic: CyclicReport,
    pub lambda_renormalized: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub split: SplitMulticurve,
    pub order: Multicurve,
    pub matrix: NonnegMatrix,
    /// Nonzero blocks found below the diagonal, as `row_block/col_block`.
    pub lower_violations: Vec<String>,
    pub reorder_invariant: bool,
    pub tail_block_size: usize,
    pub tail_nilpotent: bool,
    pub cycles: Vec<CycleReduction>,
    pub lambda: f64,
    pub lambda_gamma: f64,
    pub lambda_max_formula: f64,
    pub tol: f64,
    pub identity_holds: bool,
}

impl ReductionReport {
    pub fn block_triangular(&self) -> bool {
        self.lower_violations.is_empty()
    }

    pub fn cycles_consistent(&self) -> bool {
        self.cycles
            .iter()
            .all(|c| c.renormalized_matches && c.power_block_diagonal && c.cyclic.agree)
    }

    pub fn passed(&self) -> bool {
        self.block_triangular()
            && self.reorder_invariant
            && self.tail_nilpotent
            && self.cycles_consistent()
            && self.identity_holds
    }
}

fn indices(order: &Multicurve, part: &Multicurve) -> Vec<usize> {
    part.ids()
        .iter()
        .map(|id| order.index_of(id).expect("split parts come from the ordered multicurve"))
        .collect()
}

/// Estimates are taken an order of magnitude tighter than the comparison
/// tolerance so the max formula can be checked at `tol`.
fn estimate(w: &NonnegMatrix, tol: f64) -> Result<f64> {
    spectral::power_lambda(w, tol / 16.0)
}

pub fn verify_reduction_identity(m: &CoverModel, c: &Multicurve, tol: f64) -> Result<ReductionReport> {
    let dynamics = decompose::piece_dynamics(m)?;
    let split = split_with(m, c, &dynamics)?;
    let order = split.ordered();
    let w = multicurve::transition_matrix(m, &order)?;

    // (a) block upper-triangular shape
    let mut blocks: Vec<(String, Vec<usize>)> = vec![
        ("C_gamma".into(), indices(&order, &split.c_gamma)),
        ("C_s".into(), indices(&order, &split.c_s)),
    ];
    for part in &split.sigma {
        let all = Multicurve::from_ids(part.steps.iter().flat_map(|s| s.ids()).cloned());
        blocks.push((format!("cycle {}", part.representative), indices(&order, &all)));
    }
    let mut lower_violations = Vec::new();
    for (bi, (ri, rows)) in blocks.iter().enumerate() {
        for (cj, cols) in blocks[..bi].iter().map(|(n, c)| (n, c)) {
            if rows.iter().any(|&i| cols.iter().any(|&j| !w.get(i, j).is_zero())) {
                lower_violations.push(format!("{ri}/{cj}"));
            }
        }
    }
    let lambda = estimate(&w, tol)?;
    let original = multicurve::transition_matrix(m, c)?;
    let reorder_invariant = (estimate(&original, tol)? - lambda).abs() <= tol;

    // (b) tail block
    let tail = indices(&order, &split.c_s);
    let tail_nilpotent = spectral::is_nilpotent(&w.select(&tail, &tail))?;

    // (c) cycles
    let mut cycles = Vec::new();
    let mut contributions = Vec::new();
    for (ci, part) in split.sigma.iter().enumerate() {
        let p = part.period;
        let step_idx: Vec<Vec<usize>> = part.steps.iter().map(|s| indices(&order, s)).collect();
        let b: Vec<NonnegMatrix> = (0..p)
            .map(|k| w.select(&step_idx[k], &step_idx[(k + 1) % p]))
            .collect();
        let products: Vec<NonnegMatrix> = (0..p)
            .map(|k| {
                (1..p).try_fold(b[k].clone(), |acc, s| acc.mul(&b[(k + s) % p]))
            })
            .collect::<Result<_>>()?;
        let all: Vec<usize> = step_idx.iter().flatten().copied().collect();
        let wp = w.select(&all, &all).pow(p)?;
        let mut offsets = Vec::with_capacity(p);
        let mut acc = 0;
        for s in &step_idx {
            offsets.push(acc);
            acc += s.len();
        }
        let mut power_block_diagonal = true;
        for (k, rows) in step_idx.iter().enumerate() {
            for (l, cols) in step_idx.iter().enumerate() {
                for i in 0..rows.len() {
                    for j in 0..cols.len() {
                        let got = wp.get(offsets[k] + i, offsets[l] + j);
                        let ok = if k == l {
                            got == products[k].get(i, j)
                        } else {
                            got.is_zero()
                        };
                        power_block_diagonal &= ok;
                    }
                }
            }
        }

        let renorm = decompose::renormalize(m, &dynamics, ci)?;
        let system = renorm.curve_system();
        let base_idx: Vec<usize> = part
            .base()
            .ids()
            .iter()
            .map(|id| {
                system.ids.iter().position(|x| x == id).ok_or_else(|| Error::Reduction {
                    block: format!("cycle {}", part.representative),
                    detail: format!("`{id}` is missing from the renormalized curve universe"),
                })
            })
            .collect::<Result<_>>()?;
        let renormalized = system.matrix(&base_idx);
        let renormalized_matches = renormalized == products[0];
        let cyclic = spectral::cyclic_sp_invariance(&b, tol)?;
        let lambda_renormalized = estimate(&products[0], tol)?;
        let contribution = lambda_renormalized.powf(1.0 / p as f64);
        contributions.push(contribution);
        cycles.push(CycleReduction {
            representative: part.representative.clone(),
            period: p,
            blocks: b,
            product: products[0].clone(),
            renormalized,
            renormalized_matches,
            power_block_diagonal,
            cyclic,
            lambda_renormalized,
            contribution,
        });
    }

    // (d) the identity
    let g = indices(&order, &split.c_gamma);
    let lambda_gamma = estimate(&w.select(&g, &g), tol)?;
    let lambda_max_formula = contributions.iter().copied().fold(lambda_gamma, f64::max);
    let identity_holds = (lambda - lambda_max_formula).abs() <= tol;

    Ok(ReductionReport {
        tail_block_size: tail.len(),
        split,
        order,
        matrix: w,
        lower_violations,
        reorder_invariant,
        tail_nilpotent,
        cycles,
        lambda,
        lambda_gamma,
        lambda_max_formula,
        tol,
        identity_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleVerdict {
    pub representative: String,
    pub kind: RenormalizedKind,
    pub universe: Vec<String>,
    pub stable_count: usize,
    pub obstructed: bool,
    pub witness: Option<Multicurve>,
    pub witness_lambda: Option<f64>,
    /// Stable multicurve of the whole model built from the witness.
    pub lifted: Option<Multicurve>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinationReport {
    pub stable_count: usize,
    pub lhs_obstructed: bool,
    pub lhs_witness: Option<Multicurve>,
    pub lhs_witness_lambda: Option<f64>,
    /// Where the model-level witness obstructs: the generated part or a cycle.
    pub lhs_projection: Option<String>,
    pub gamma: Multicurve,
    pub gamma_lambda: f64,
    pub gamma_contracting: bool,
    pub cycles: Vec<CycleVerdict>,
    pub rhs_obstructed: bool,
    pub agree: bool,
}

pub fn check_combination(m: &CoverModel, cap: usize, tol: f64) -> Result<CombinationReport> {
    let entries = multicurve::enumerate_stable(m, cap, tol)?;
    let witness = entries
        .iter()
        .filter(|e| !e.contracting)
        .min_by_key(|e| e.multicurve.len());
    let dynamics = decompose::piece_dynamics(m)?;

    let lhs_projection = match witness {
        None => None,
        Some(e) => {
            let split = split_with(m, &e.multicurve, &dynamics)?;
            let gw = multicurve::transition_matrix(m, &split.c_gamma)?;
            if !spectral::is_contracting(&gw)? {
                Some(format!("generated part {}", split.c_gamma))
            } else {
                let order = split.ordered();
                let w = multicurve::transition_matrix(m, &order)?;
                let mut found = None;
                for part in &split.sigma {
                    let p = part.period;
                    let idx: Vec<Vec<usize>> = part.steps.iter().map(|s| indices(&order, s)).collect();
                    let mut prod = w.select(&idx[0], &idx[1 % p]);
                    for k in 1..p {
                        prod = prod.mul(&w.select(&idx[k], &idx[(k + 1) % p]))?;
                    }
                    if !spectral::is_contracting(&prod)? {
                        found = Some(format!("cycle {} on {}", part.representative, part.base()));
                        break;
                    }
                }
                found
            }
        }
    };

    let gamma = multicurve::generate_gamma(m)?;
    let gw = multicurve::transition_matrix(m, &gamma)?;
    let gamma_contracting = spectral::is_contracting(&gw)?;
    let gamma_lambda = spectral::power_lambda(&gw, tol)?;

    let model_system = CurveSystem::of_model(m);
    let mut cycles = Vec::new();
    for i in 0..dynamics.cycles.len() {
        let r = decompose::renormalize(m, &dynamics, i)?;
        let system = r.curve_system();
        let stable = system.enumerate_stable(cap, tol)?;
        let w = stable
            .iter()
            .filter(|e| !e.contracting)
            .min_by_key(|e| e.multicurve.len());
        let lifted = w.map(|e| {
            let seed: Vec<usize> = e
                .multicurve
                .ids()
                .iter()
                .filter_map(|id| model_system.ids.iter().position(|x| x == id))
                .collect();
            Multicurve::from_ids(
                model_system
                    .closure(&seed)
                    .into_iter()
                    .map(|k| model_system.ids[k].clone()),
            )
        });
        cycles.push(CycleVerdict {
            representative: r.cycle.representative.clone(),
            kind: r.kind,
            universe: r.curve_universe.clone(),
            stable_count: stable.len(),
            obstructed: w.is_some(),
            witness: w.map(|e| e.multicurve.clone()),
            witness_lambda: w.map(|e| e.lambda),
            lifted,
        });
    }
    let rhs_obstructed = !gamma_contracting || cycles.iter().any(|c| c.obstructed);
    let lhs_obstructed = witness.is_some();
    Ok(CombinationReport {
        stable_count: entries.len(),
        lhs_obstructed,
        lhs_witness: witness.map(|e| e.multicurve.clone()),
        lhs_witness_lambda: witness.map(|e| e.lambda),
        lhs_projection,
        gamma,
        gamma_lambda,
        gamma_contracting,
        cycles,
        rhs_obstructed,
        agree: lhs_obstructed == rhs_obstructed,
    })
}

/// Obstruction verdict by enumeration alone.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub stable: Vec<multicurve::StableEntry>,
    pub obstructed: bool,
    pub witnesses: Vec<Multicurve>,
}

pub fn obstruction(m: &CoverModel, cap: usize, tol: f64) -> Result<ObstructionReport> {
    let stable = multicurve::enumerate_stable(m, cap, tol)?;
    let witnesses: Vec<Multicurve> = stable
        .iter()
        .filter(|e| !e.contracting)
        .map(|e| e.multicurve.clone())
        .collect();
    Ok(ObstructionReport {
        obstructed: !witnesses.is_empty(),
        stable,
        witnesses,
    })
}

/// Summary of lifted witnesses per cycle, keyed by representative.
pub fn lifted_witnesses(r: &CombinationReport) -> BTreeMap<String, Multicurve> {
    r.cycles
        .iter()
        .filter_map(|c| c.lifted.clone().map(|l| (c.representative.clone(), l)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, BlockTemplate, TwoRingSpec};

    fn mc(m: &CoverModel, ids: &[&str]) -> Multicurve {
        Multicurve::new(m, ids.iter().copied()).unwrap()
    }

    #[test]
    fn gamma_splits_as_itself() {
        let m = fixtures::two_ring();
        let g = multicurve::generate_gamma(&m).unwrap();
        let s = split_multicurve(&m, &g).unwrap();
        assert_eq!(s.c_gamma, g);
        assert!(s.c_s.is_empty());
        assert!(s.sigma.iter().all(CyclePart::is_empty));
        let r = verify_reduction_identity(&m, &g, 1e-9).unwrap();
        assert!(r.passed());
        assert!((r.lambda - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn interior_cycle_curve_lands_in_sigma() {
        let m = fixtures::two_ring();
        let c = mc(&m, &["g1", "g2", "u"]);
        let s = split_multicurve(&m, &c).unwrap();
        let m2 = s.sigma.iter().find(|p| p.representative == "M2").unwrap();
        assert_eq!(m2.base().ids(), ["u"]);
        assert!(verify_reduction_identity(&m, &c, 1e-9).unwrap().passed());
    }

    #[test]
    fn empty_multicurve() {
        let m = fixtures::two_ring();
        let r = verify_reduction_identity(&m, &Multicurve::empty(), 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.lambda, 0.0);
    }

    #[test]
    fn unstable_input_is_rejected() {
        let m = fixtures::two_ring();
        assert!(matches!(
            split_multicurve(&m, &mc(&m, &["g2"])),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn period_two_blocks() {
        let spec = TwoRingSpec {
            chain: 3,
            period: 2,
            blocks: BlockTemplate::Single,
            siegel_curve: None,
            coincide_degree: 1,
            return_degree: 2,
        };
        let m = spec.build();
        let c = Multicurve::from_ids(m.interior_curves());
        let r = verify_reduction_identity(&m, &c, 1e-9).unwrap();
        assert!(r.passed(), "{r:#?}");
        let cyc = r.cycles.iter().find(|c| c.representative == "M1").unwrap();
        assert_eq!(cyc.blocks[0].to_grid(), vec![vec!["2"]]);
        assert_eq!(cyc.blocks[1].to_grid(), vec![vec!["1/8"]]);
        assert_eq!(cyc.product.to_grid(), vec![vec!["1/4"]]);
        assert!((cyc.contribution - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn combination_on_reference_models() {
        for (m, obstructed) in [
            (fixtures::shi(), false),
            (fixtures::two_ring(), false),
            (fixtures::two_ring_obstructed(), true),
        ] {
            let r = check_combination(&m, 16, 1e-9).unwrap();
            assert!(r.agree);
            assert_eq!(r.lhs_obstructed, obstructed);
            if obstructed {
                assert!(r.lhs_witness.is_some());
                assert!(r.lhs_projection.is_some());
                assert!(r.cycles.iter().any(|c| c.lifted.is_some()));
            }
        }
    }
}
