//! Search over position-shift IT strategies: TP1-admissible assignments per
//! case group, the coherent strategies, and their TP2 failures.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::model::{Operation, Position};
use crate::transform::{Family, Transform, TransformCase, TransformError};
use crate::verify::{check_tp2, fresh_operations, tp1_instance, tp2_instance, OperationDomain, Tp2Witness};

/// What a strategy does to the transformed operation in one case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShiftAction {
    MakeNop,
    ShiftMinus,
    Keep,
    ShiftPlus,
}

impl ShiftAction {
    pub const ALL: [ShiftAction; 4] =
        [ShiftAction::MakeNop, ShiftAction::ShiftMinus, ShiftAction::Keep, ShiftAction::ShiftPlus];

    pub fn apply(self, op: &Operation) -> Operation {
        match self {
            ShiftAction::MakeNop => Operation::Nop,
            ShiftAction::ShiftMinus => op.shifted(-1),
            ShiftAction::Keep => op.clone(),
            ShiftAction::ShiftPlus => op.shifted(1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ShiftAction::MakeNop => "MakeNop",
            ShiftAction::ShiftMinus => "ShiftMinus",
            ShiftAction::Keep => "Keep",
            ShiftAction::ShiftPlus => "ShiftPlus",
        }
    }

    fn code(self) -> char {
        match self {
            ShiftAction::MakeNop => 'N',
            ShiftAction::ShiftMinus => '-',
            ShiftAction::Keep => '0',
            ShiftAction::ShiftPlus => '+',
        }
    }

    /// `op` written symbolically, e.g. `Ins(p1+1,c1)`.
    fn render(self, kind: &str, index: u8) -> String {
        let pos = match self {
            ShiftAction::MakeNop => return "Nop()".to_string(),
            ShiftAction::ShiftMinus => format!("p{index}-1"),
            ShiftAction::Keep => format!("p{index}"),
            ShiftAction::ShiftPlus => format!("p{index}+1"),
        };
        match kind {
            "ins" => format!("Ins({pos},c{index})"),
            _ => format!("Del({pos})"),
        }
    }
}

impl fmt::Display for ShiftAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A total assignment of a [`ShiftAction`] to every [`TransformCase`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ITStrategy {
    pub table: [ShiftAction; 14],
}

impl Default for ITStrategy {
    fn default() -> Self {
        ITStrategy { table: [ShiftAction::Keep; 14] }
    }
}

impl ITStrategy {
    pub fn action(&self, case: TransformCase) -> ShiftAction {
        self.table[case.index()]
    }

    pub fn with(mut self, case: TransformCase, action: ShiftAction) -> Self {
        self.table[case.index()] = action;
        self
    }

    /// One character per case in [`TransformCase::ALL`] order:
    /// `N` Nop, `-` minus one, `0` keep, `+` plus one.
    pub fn code(&self) -> String {
        self.table.iter().map(|a| a.code()).collect()
    }

    /// Decodes a base-4 index in `0..4^14` into a strategy; case 0 is the
    /// most significant digit.
    pub fn from_index(mut index: u32) -> Self {
        let mut table = [ShiftAction::MakeNop; 14];
        for slot in table.iter_mut().rev() {
            *slot = ShiftAction::ALL[(index % 4) as usize];
            index /= 4;
        }
        ITStrategy { table }
    }
}

impl fmt::Display for ITStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "shift[{}]", self.code())
    }
}

impl Transform for ITStrategy {
    fn name(&self) -> String {
        self.to_string()
    }

    fn family(&self) -> Family {
        Family::Basic
    }

    fn transform(&self, o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
        Ok(match TransformCase::classify(o1, o2) {
            None if o1.is_nop() => Operation::Nop,
            None => o1.clone(),
            Some(case) => self.action(case).apply(o1),
        })
    }
}

/// The IT function a strategy induces.
pub fn strategy_as_it(s: ITStrategy) -> Box<dyn Transform> {
    Box::new(s)
}

/// Cases that a pair and its mirror can touch together. A TP1 instance
/// evaluates exactly one group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseGroup {
    InsInsApart,
    InsInsTieDistinct,
    InsInsTieEqual,
    DelDelApart,
    DelDelSame,
    InsBeforeDel,
    InsAfterDel,
    InsAtDel,
}

impl CaseGroup {
    pub const ALL: [CaseGroup; 8] = [
        CaseGroup::InsInsApart,
        CaseGroup::InsInsTieDistinct,
        CaseGroup::InsInsTieEqual,
        CaseGroup::DelDelApart,
        CaseGroup::DelDelSame,
        CaseGroup::InsBeforeDel,
        CaseGroup::InsAfterDel,
        CaseGroup::InsAtDel,
    ];

    /// The group's cases; the first is `IT(o1,o2)`'s case, the second (if
    /// any) its mirror.
    pub fn cases(self) -> &'static [TransformCase] {
        use TransformCase::*;
        match self {
            CaseGroup::InsInsApart => &[InsInsBefore, InsInsAfter],
            CaseGroup::InsInsTieDistinct => &[InsInsSameLess, InsInsSameGreater],
            CaseGroup::InsInsTieEqual => &[InsInsSameEqual],
            CaseGroup::DelDelApart => &[DelDelBefore, DelDelAfter],
            CaseGroup::DelDelSame => &[DelDelSame],
            CaseGroup::InsBeforeDel => &[InsDelBefore, DelInsAfter],
            CaseGroup::InsAfterDel => &[InsDelAfter, DelInsBefore],
            CaseGroup::InsAtDel => &[InsDelSame, DelInsSame],
        }
    }

    pub fn of(case: TransformCase) -> CaseGroup {
        *CaseGroup::ALL.iter().find(|g| g.cases().contains(&case)).expect("every case has a group")
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseGroup::InsInsApart => "ins/ins p1<p2",
            CaseGroup::InsInsTieDistinct => "ins/ins p1=p2 c1<c2",
            CaseGroup::InsInsTieEqual => "ins/ins p1=p2 c1=c2",
            CaseGroup::DelDelApart => "del/del p1<p2",
            CaseGroup::DelDelSame => "del/del p1=p2",
            CaseGroup::InsBeforeDel => "ins/del p1<p2",
            CaseGroup::InsAfterDel => "ins/del p1>p2",
            CaseGroup::InsAtDel => "ins/del p1=p2",
        }
    }

    /// Every joint assignment to the group's cases, ascending.
    pub fn assignments(self) -> Vec<Assignment> {
        let n = self.cases().len();
        let mut out: Vec<Assignment> = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    ShiftAction::ALL.iter().map(move |a| {
                        let mut next = prefix.clone();
                        next.push(*a);
                        next
                    })
                })
                .collect();
        }
        out
    }

    /// Symbolic `(IT(o1,o2), IT(o2,o1))` for an assignment.
    pub fn describe(self, assignment: &[ShiftAction]) -> (String, String) {
        let kinds = |case: TransformCase| -> &'static str {
            if case.label().starts_with("ins") {
                "ins"
            } else {
                "del"
            }
        };
        let cases = self.cases();
        let first = assignment[0].render(kinds(cases[0]), 1);
        let second = match cases.get(1) {
            Some(m) => assignment[1].render(kinds(*m), 2),
            None => assignment[0].render(kinds(cases[0]), 2),
        };
        (first, second)
    }

    pub fn restrict(self, s: &ITStrategy) -> Assignment {
        self.cases().iter().map(|c| s.action(*c)).collect()
    }
}

impl fmt::Display for CaseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Joint actions for a group's cases, in [`CaseGroup::cases`] order.
pub type Assignment = Vec<ShiftAction>;

/// Admissible joint assignments per case group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseConstraintSet {
    pub groups: BTreeMap<CaseGroup, Vec<Assignment>>,
}

impl CaseConstraintSet {
    pub fn admissible(&self, group: CaseGroup) -> &[Assignment] {
        self.groups.get(&group).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether every group restriction of `s` is admissible.
    pub fn admits(&self, s: &ITStrategy) -> bool {
        CaseGroup::ALL.iter().all(|g| self.admissible(*g).contains(&g.restrict(s)))
    }

    /// Cartesian product of the admissible sets; later groups vary fastest.
    pub fn strategies(&self) -> Vec<ITStrategy> {
        let mut out = vec![ITStrategy::default()];
        for group in CaseGroup::ALL {
            out = out
                .into_iter()
                .flat_map(|s| {
                    self.admissible(group).iter().map(move |a| {
                        group.cases().iter().zip(a).fold(s, |s, (c, act)| s.with(*c, *act))
                    })
                })
                .collect();
        }
        out
    }
}

fn group_admits(group: CaseGroup, assignment: &[ShiftAction], pairs: &[(Operation, Operation)], dom: &OperationDomain) -> bool {
    let s = group.cases().iter().zip(assignment).fold(ITStrategy::default(), |s, (c, a)| s.with(*c, *a));
    pairs.iter().all(|(o1, o2)| tp1_instance(&s, o1, o2, &dom.probe).is_none())
}

/// Tests every joint assignment of every group against all fresh domain
/// pairs hitting that group.
pub fn synthesize_tp1(dom: &OperationDomain) -> CaseConstraintSet {
    let ops = fresh_operations(dom, Family::Basic);
    let groups = CaseGroup::ALL
        .par_iter()
        .map(|group| {
            let pairs: Vec<(Operation, Operation)> = ops
                .iter()
                .flat_map(|o1| ops.iter().map(move |o2| (o1.clone(), o2.clone())))
                .filter(|(o1, o2)| TransformCase::classify(o1, o2).map(CaseGroup::of) == Some(*group))
                .collect();
            let admissible = group
                .assignments()
                .into_iter()
                .filter(|a| group_admits(*group, a, &pairs, dom))
                .collect();
            (*group, admissible)
        })
        .collect();
    CaseConstraintSet { groups }
}

/// Keeps only semantically meaningful assignments: concurrent deletes of
/// the same symbol must both become Nop.
pub fn coherence_filter(cs: &CaseConstraintSet) -> Vec<ITStrategy> {
    let mut kept = cs.clone();
    if let Some(same) = kept.groups.get_mut(&CaseGroup::DelDelSame) {
        same.retain(|a| a == &vec![ShiftAction::MakeNop]);
    }
    kept.strategies()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioClass {
    Scenario1,
    Scenario2,
    Other,
}

impl ScenarioClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioClass::Scenario1 => "scenario-1",
            ScenarioClass::Scenario2 => "scenario-2",
            ScenarioClass::Other => "other",
        }
    }
}

impl fmt::Display for ScenarioClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A blocking triple `(Del(p), Ins(.., c2), Ins(.., c3))` over a free
/// position `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicScenario {
    pub class: ScenarioClass,
    /// Offsets of `o2` and `o3` from `p`.
    pub offsets: (Position, Position),
}

impl SymbolicScenario {
    /// `(Del(p), Ins(p,c2), Ins(p+1,c3))`
    pub const FIRST: SymbolicScenario = SymbolicScenario { class: ScenarioClass::Scenario1, offsets: (0, 1) };
    /// `(Del(p), Ins(p+1,c2), Ins(p,c3))`
    pub const SECOND: SymbolicScenario = SymbolicScenario { class: ScenarioClass::Scenario2, offsets: (1, 0) };

    pub fn instantiate(&self, p: Position, c2: char, c3: char) -> (Operation, Operation, Operation) {
        (
            Operation::del(p),
            Operation::ins(p + self.offsets.0, c2),
            Operation::ins(p + self.offsets.1, c3),
        )
    }

    pub fn matches(&self, o1: &Operation, o2: &Operation, o3: &Operation) -> bool {
        match (o1, o2, o3) {
            (Operation::Del { pos }, Operation::Ins { pos: p2, .. }, Operation::Ins { pos: p3, .. }) => {
                *p2 == pos + self.offsets.0 && *p3 == pos + self.offsets.1
            }
            _ => false,
        }
    }

    /// `IT*(o3, [o2; IT(o1,o2)])`: the branch that never meets two inserts
    /// at the same position, and so fixes what the other branch must yield.
    pub fn forced_result<T: Transform + ?Sized>(
        &self,
        it: &T,
        p: Position,
        c2: char,
        c3: char,
    ) -> Result<Operation, TransformError> {
        let (o1, o2, o3) = self.instantiate(p, c2, c3);
        let o12 = it.transform(&o1, &o2)?;
        crate::transform::transform_along(it, &o3, [&o2, &o12])
    }

    /// The pair of equal-position inserts the other branch transforms.
    pub fn conflict_pair(&self, p: Position, c2: char, c3: char) -> (Operation, Operation) {
        (Operation::ins(p, c3), Operation::ins(p, c2))
    }

    /// Actions on the conflict case under which the instance satisfies TP2,
    /// every other case following `s`.
    pub fn required_actions(&self, s: &ITStrategy, p: Position, c2: char, c3: char) -> Vec<ShiftAction> {
        let (a, b) = self.conflict_pair(p, c2, c3);
        let case = TransformCase::classify(&a, &b).expect("conflict pair is ins/ins");
        let (o1, o2, o3) = self.instantiate(p, c2, c3);
        ShiftAction::ALL
            .into_iter()
            .filter(|act| tp2_instance(&s.with(case, *act), &o1, &o2, &o3).is_none())
            .collect()
    }
}

/// Scenario 1 or 2 if the triple, or the triple with `o1` and `o2`
/// exchanged, fits the pattern. TP2 is symmetric in `o1`/`o2`.
pub fn classify_witness(w: &Tp2Witness) -> ScenarioClass {
    for sc in [SymbolicScenario::FIRST, SymbolicScenario::SECOND] {
        if sc.matches(&w.o1, &w.o2, &w.o3) || sc.matches(&w.o2, &w.o1, &w.o3) {
            return sc.class;
        }
    }
    ScenarioClass::Other
}

/// Result of running both blocking chains under one strategy for one
/// character order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreCheck {
    pub strategy: ITStrategy,
    pub c2: char,
    pub c3: char,
    pub first_forced: Result<Operation, TransformError>,
    pub second_forced: Result<Operation, TransformError>,
    pub first_required: Vec<ShiftAction>,
    pub second_required: Vec<ShiftAction>,
}

impl CoreCheck {
    pub fn contradictory(&self) -> bool {
        !self.first_required.iter().any(|a| self.second_required.contains(a))
    }
}

/// Evaluates both chains at `p` for each character order of `(c2, c3)`
/// drawn from `chars`.
pub fn contradiction_core(strategies: &[ITStrategy], p: Position, chars: (char, char)) -> Vec<CoreCheck> {
    let (lo, hi) = if chars.0 < chars.1 { chars } else { (chars.1, chars.0) };
    let orders = [(lo, hi), (hi, lo), (lo, lo)];
    strategies
        .iter()
        .flat_map(|s| {
            orders.into_iter().map(move |(c2, c3)| CoreCheck {
                strategy: *s,
                c2,
                c3,
                first_forced: SymbolicScenario::FIRST.forced_result(s, p, c2, c3),
                second_forced: SymbolicScenario::SECOND.forced_result(s, p, c2, c3),
                first_required: SymbolicScenario::FIRST.required_actions(s, p, c2, c3),
                second_required: SymbolicScenario::SECOND.required_actions(s, p, c2, c3),
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ClassTally {
    pub count: usize,
    pub minimal: Tp2Witness,
}

#[derive(Clone, Debug)]
pub struct StrategyVerdict {
    pub strategy: ITStrategy,
    pub instances: usize,
    pub failures: usize,
    /// Least failing triple in `(kind, position, char)` order.
    pub minimal: Option<(Tp2Witness, ScenarioClass)>,
    pub classes: BTreeMap<ScenarioClass, ClassTally>,
}

impl StrategyVerdict {
    pub fn fails(&self) -> bool {
        self.failures > 0
    }
}

#[derive(Clone, Debug)]
pub struct ImpossibilityReport {
    pub domain: OperationDomain,
    pub verdicts: Vec<StrategyVerdict>,
}

impl ImpossibilityReport {
    /// True iff there is at least one strategy and every one fails TP2.
    pub fn all_fail(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(StrategyVerdict::fails)
    }

    pub fn classes_seen(&self) -> Vec<ScenarioClass> {
        let mut seen: Vec<_> = self.verdicts.iter().flat_map(|v| v.classes.keys().copied()).collect();
        seen.sort();
        seen.dedup();
        seen
    }
}

pub fn prove_impossibility(strategies: &[ITStrategy], dom: &OperationDomain) -> ImpossibilityReport {
    let verdicts = strategies
        .par_iter()
        .map(|s| {
            let report = check_tp2(s, dom);
            let mut classes: BTreeMap<ScenarioClass, ClassTally> = BTreeMap::new();
            for w in &report.witnesses {
                classes
                    .entry(classify_witness(w))
                    .and_modify(|t| t.count += 1)
                    .or_insert_with(|| ClassTally { count: 1, minimal: w.clone() });
            }
            StrategyVerdict {
                strategy: *s,
                instances: report.instances,
                failures: report.witnesses.len(),
                minimal: report.witnesses.first().map(|w| (w.clone(), classify_witness(w))),
                classes,
            }
        })
        .collect();
    ImpossibilityReport { domain: dom.clone(), verdicts }
}

/// Everything the synthesis run establishes, for text and JSON output.
#[derive(Clone, Debug)]
pub struct SynthesisReport {
    pub constraints: CaseConstraintSet,
    pub strategies: Vec<ITStrategy>,
    pub impossibility: ImpossibilityReport,
    pub core: Vec<CoreCheck>,
}

impl SynthesisReport {
    pub fn run(dom: &OperationDomain) -> Self {
        let constraints = synthesize_tp1(dom);
        let strategies = coherence_filter(&constraints);
        let impossibility = prove_impossibility(&strategies, dom);
        let chars = match dom.alphabet.as_slice() {
            [a, b, ..] => (*a, *b),
            [a] => (*a, *a),
            [] => ('a', 'b'),
        };
        let core = contradiction_core(&strategies, 1, chars);
        SynthesisReport { constraints, strategies, impossibility, core }
    }

    /// Whether some coherent strategy satisfies both properties on the domain.
    pub fn satisfiable(&self) -> bool {
        !self.impossibility.all_fail()
    }

    pub fn to_json(&self) -> Value {
        let admissible: serde_json::Map<String, Value> = CaseGroup::ALL
            .iter()
            .map(|g| {
                let rows: Vec<Value> = self
                    .constraints
                    .admissible(*g)
                    .iter()
                    .map(|a| {
                        let (first, second) = g.describe(a);
                        json!({
                            "actions": a.iter().map(|x| x.as_str()).collect::<Vec<_>>(),
                            "it_o1_o2": first,
                            "it_o2_o1": second,
                        })
                    })
                    .collect();
                (g.label().to_string(), Value::Array(rows))
            })
            .collect();
        let strategies: Vec<Value> = self
            .strategies
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let table: serde_json::Map<String, Value> = TransformCase::ALL
                    .iter()
                    .map(|c| (c.label().to_string(), json!(s.action(*c).as_str())))
                    .collect();
                json!({"index": i, "code": s.code(), "table": table})
            })
            .collect();
        let witnesses: Vec<Value> = self
            .impossibility
            .verdicts
            .iter()
            .enumerate()
            .map(|(i, v)| {
                json!({
                    "strategy": i,
                    "fails": v.fails(),
                    "instances": v.instances,
                    "failures": v.failures,
                    "minimal": v.minimal.as_ref().map(|(w, c)| witness_json(w, *c)),
                })
            })
            .collect();
        let classification: serde_json::Map<String, Value> = self
            .impossibility
            .verdicts
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let per: serde_json::Map<String, Value> = v
                    .classes
                    .iter()
                    .map(|(c, t)| (c.as_str().to_string(), json!({"count": t.count, "minimal": witness_json(&t.minimal, *c)})))
                    .collect();
                (format!("synth:{i}"), Value::Object(per))
            })
            .collect();
        let core: Vec<Value> = self
            .core
            .iter()
            .map(|c| {
                json!({
                    "strategy": c.strategy.code(),
                    "c2": c.c2.to_string(),
                    "c3": c.c3.to_string(),
                    "scenario_1_forced": result_string(&c.first_forced),
                    "scenario_2_forced": result_string(&c.second_forced),
                    "scenario_1_requires": c.first_required.iter().map(|a| a.as_str()).collect::<Vec<_>>(),
                    "scenario_2_requires": c.second_required.iter().map(|a| a.as_str()).collect::<Vec<_>>(),
                    "contradictory": c.contradictory(),
                })
            })
            .collect();
        let dom = &self.impossibility.domain;
        json!({
            "bounds": {
                "max_pos": dom.max_pos,
                "alphabet": dom.alphabet_string(),
                "probe": dom.probe.to_string(),
                "depth": dom.depth,
            },
            "tp1_admissible": admissible,
            "coherent_strategies": strategies,
            "tp2": {
                "all_fail": self.impossibility.all_fail(),
                "witnesses": witnesses,
                "classification": classification,
            },
            "contradiction_core": core,
            "tp1_tp2_satisfiable": self.satisfiable(),
        })
    }
}

fn result_string(r: &Result<Operation, TransformError>) -> String {
    match r {
        Ok(op) => op.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn witness_json(w: &Tp2Witness, class: ScenarioClass) -> Value {
    json!({
        "o1": w.o1.to_string(),
        "o2": w.o2.to_string(),
        "o3": w.o3.to_string(),
        "via_first": result_string(&w.via_first),
        "via_second": result_string(&w.via_second),
        "class": class.as_str(),
    })
}

fn witness_line(w: &Tp2Witness) -> String {
    format!(
        "({}, {}, {}) gives {} vs {}",
        w.o1,
        w.o2,
        w.o3,
        result_string(&w.via_first),
        result_string(&w.via_second)
    )
}

impl fmt::Display for SynthesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bounds: {}", self.impossibility.domain)?;
        writeln!(f, "TP1-admissible assignments:")?;
        for g in CaseGroup::ALL {
            for a in self.constraints.admissible(g) {
                let (first, second) = g.describe(a);
                writeln!(f, "  {:<20} IT(o1,o2)={:<14} IT(o2,o1)={}", g.label(), first, second)?;
            }
        }
        writeln!(f, "coherent strategies: {}", self.strategies.len())?;
        for (i, v) in self.impossibility.verdicts.iter().enumerate() {
            let verdict = if v.fails() { "fails" } else { "holds" };
            writeln!(
                f,
                "  synth:{i} {} TP2 {verdict} ({} of {} triples)",
                v.strategy.code(),
                v.failures,
                v.instances
            )?;
            if let Some((w, class)) = &v.minimal {
                writeln!(f, "    minimal [{class}] {}", witness_line(w))?;
            }
            for (class, tally) in &v.classes {
                writeln!(f, "    {class}: {} witnesses, least {}", tally.count, witness_line(&tally.minimal))?;
            }
        }
        let contradictory = self.core.iter().all(CoreCheck::contradictory);
        writeln!(f, "blocking scenarios require disjoint conflict actions: {}", if contradictory { "yes" } else { "no" })?;
        write!(f, "TP1∧TP2 satisfiable: {}", if self.satisfiable() { "yes" } else { "no" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ShiftAction::*;

    #[test]
    fn strategy_dispatch() {
        let s = ITStrategy::default().with(TransformCase::DelDelSame, MakeNop);
        assert_eq!(s.transform(&Operation::ins(0, 'a'), &Operation::ins(2, 'b')), Ok(Operation::ins(0, 'a')));
        assert_eq!(s.transform(&Operation::del(1), &Operation::del(1)), Ok(Operation::Nop));
        assert_eq!(s.transform(&Operation::del(1), &Operation::Nop), Ok(Operation::del(1)));
        assert_eq!(s.transform(&Operation::Nop, &Operation::del(1)), Ok(Operation::Nop));
        let plus = ITStrategy::default().with(TransformCase::InsInsSameLess, ShiftPlus);
        assert_eq!(plus.transform(&Operation::ins(1, 'a'), &Operation::ins(1, 'b')), Ok(Operation::ins(2, 'a')));
    }

    #[test]
    fn index_roundtrip() {
        assert_eq!(ITStrategy::from_index(0).table, [MakeNop; 14]);
        assert_eq!(ITStrategy::from_index(4u32.pow(14) - 1).table, [ShiftPlus; 14]);
        assert_eq!(ITStrategy::from_index(3).table[13], ShiftPlus);
    }

    #[test]
    fn groups_partition_cases() {
        let mut seen: Vec<_> = CaseGroup::ALL.iter().flat_map(|g| g.cases().iter().copied()).collect();
        seen.sort();
        assert_eq!(seen, TransformCase::ALL.to_vec());
        for g in CaseGroup::ALL {
            for c in g.cases() {
                assert_eq!(CaseGroup::of(c.mirror()), g);
            }
        }
        assert_eq!(CaseGroup::InsInsApart.assignments().len(), 16);
        assert_eq!(CaseGroup::DelDelSame.assignments().len(), 4);
    }

    #[test]
    fn describe_rows() {
        assert_eq!(
            CaseGroup::InsInsApart.describe(&[Keep, ShiftPlus]),
            ("Ins(p1,c1)".to_string(), "Ins(p2+1,c2)".to_string())
        );
        assert_eq!(
            CaseGroup::InsAfterDel.describe(&[ShiftMinus, Keep]),
            ("Ins(p1-1,c1)".to_string(), "Del(p2)".to_string())
        );
        assert_eq!(CaseGroup::DelDelSame.describe(&[MakeNop]), ("Nop()".to_string(), "Nop()".to_string()));
    }

    #[test]
    fn classification_examples() {
        let w = |o1, o2, o3| Tp2Witness {
            o1,
            o2,
            o3,
            o12: Ok(Operation::Nop),
            o21: Ok(Operation::Nop),
            via_first: Ok(Operation::Nop),
            via_second: Ok(Operation::Nop),
        };
        let d = Operation::del;
        let i = Operation::ins;
        assert_eq!(classify_witness(&w(d(1), i(1, 'x'), i(2, 'y'))), ScenarioClass::Scenario1);
        assert_eq!(classify_witness(&w(d(1), i(2, 'x'), i(1, 'y'))), ScenarioClass::Scenario2);
        assert_eq!(classify_witness(&w(d(0), d(1), i(3, 'z'))), ScenarioClass::Other);
        assert_eq!(classify_witness(&w(i(2, 'x'), d(1), i(1, 'y'))), ScenarioClass::Scenario2);
    }

    #[test]
    fn scenario_instances() {
        assert_eq!(
            SymbolicScenario::FIRST.instantiate(1, 'x', 'y'),
            (Operation::del(1), Operation::ins(1, 'x'), Operation::ins(2, 'y'))
        );
        assert_eq!(
            SymbolicScenario::SECOND.instantiate(1, 'x', 'y'),
            (Operation::del(1), Operation::ins(2, 'x'), Operation::ins(1, 'y'))
        );
    }
}
