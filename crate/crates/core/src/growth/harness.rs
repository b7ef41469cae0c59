//! Cross-checks the six conditions against each other.

use alloc::vec::Vec;

use super::conditions::{classify, ConditionId, ConditionProbe, ConditionVerdict, Method, MethodChoice};
use super::convex::convexity_test;
use super::GrowthFunction;
use crate::ladder::{LadderParams, Verdict};
use crate::Result;

/// Two decisive verdicts that contradict the expected relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Disagreement {
    pub left: ConditionId,
    pub right: ConditionId,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub convex: bool,
    pub absolutely_continuous: bool,
    /// Closed-form verdicts in [`ConditionId::ALL`] order, when available.
    pub closed_form: Option<Vec<ConditionVerdict>>,
    /// Ladder verdicts in [`ConditionId::ALL`] order.
    pub numeric: Vec<ConditionVerdict>,
    /// Violated equivalences or implications.
    pub failures: Vec<Disagreement>,
    /// Conditions whose decisive ladder verdict contradicts the closed form.
    pub ladder_mismatches: Vec<ConditionId>,
    pub note: Option<&'static str>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn decisive_differ(a: Verdict, b: Verdict) -> bool {
    a.is_decisive() && b.is_decisive() && a != b
}

/// Which relations must hold:
/// - `F ⟺ B ⟺ C ⟺ D ⟺ A` always;
/// - `Y ⟺ F` when `Φ` is convex or absolutely continuous;
/// - otherwise only `Y ⇒ F` (a divergent `Y` forces a divergent `F`).
fn check(verdicts: &[ConditionVerdict], strict_y: bool, method: Method, out: &mut Vec<Disagreement>) {
    let get = |id: ConditionId| verdicts.iter().find(|v| v.id == id).map(|v| v.verdict);
    let group = [ConditionId::F, ConditionId::B, ConditionId::C, ConditionId::D, ConditionId::A];
    for (i, &l) in group.iter().enumerate() {
        for &r in &group[i + 1..] {
            if let (Some(a), Some(b)) = (get(l), get(r)) {
                if decisive_differ(a, b) {
                    out.push(Disagreement { left: l, right: r, method });
                }
            }
        }
    }
    if let (Some(y), Some(f)) = (get(ConditionId::Y), get(ConditionId::F)) {
        let bad = if strict_y { decisive_differ(y, f) } else { y == Verdict::Divergent && f == Verdict::Convergent };
        if bad {
            out.push(Disagreement { left: ConditionId::Y, right: ConditionId::F, method });
        }
    }
}

/// Classify all six conditions with default cutoffs, by closed form (when
/// the family has one) and by the numeric ladder, and check the relations
/// between them.
pub fn equivalence_harness(phi: &GrowthFunction, ladder: &LadderParams) -> Result<EquivalenceReport> {
    let convex = convexity_test(phi);
    let absolutely_continuous = phi.is_absolutely_continuous();
    let strict_y = convex || absolutely_continuous;
    let run = |choice: MethodChoice| -> Result<Vec<ConditionVerdict>> {
        ConditionId::ALL
            .iter()
            .map(|&id| {
                let probe = ConditionProbe::default_for(phi, id)?.with_ladder(*ladder).with_method(choice);
                classify(phi, &probe)
            })
            .collect()
    };
    let closed_form = if phi.has_closed_form() { Some(run(MethodChoice::ClosedForm)?) } else { None };
    let numeric = run(MethodChoice::NumericLadder)?;
    let mut failures = Vec::new();
    if let Some(c) = &closed_form {
        check(c, strict_y, Method::ClosedForm, &mut failures);
    }
    check(&numeric, strict_y, Method::NumericLadder, &mut failures);
    let ladder_mismatches = match &closed_form {
        Some(c) => {
            c.iter().zip(&numeric).filter(|(a, b)| decisive_differ(a.verdict, b.verdict)).map(|(a, _)| a.id).collect()
        }
        None => Vec::new(),
    };
    let note = if convex { None } else { Some("convexity required for full equivalence") };
    Ok(EquivalenceReport { convex, absolutely_continuous, closed_form, numeric, failures, ladder_mismatches, note })
}
