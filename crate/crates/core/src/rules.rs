//! Meeting rules.
//!
//! A [`RuleSet`] is an ordered list of guard/action pairs. On every meeting
//! the first rule whose guard holds fires and the rest are skipped. The
//! built-in Labroche rule set is the default; any other set of rules can be
//! assembled and handed to the engine without touching it.

use std::fmt;

use crate::model::{Ant, LabelAllocator};

/// `true` iff the similarity strictly exceeds both templates.
pub fn acceptance(template_i: f64, template_j: f64, sim: f64) -> bool {
    sim > template_i && sim > template_j
}

/// `(1 - alpha) * x + alpha`
pub fn estimator_increase(x: f64, update_alpha: f64) -> f64 {
    ((1.0 - update_alpha) * x + update_alpha).min(1.0)
}

/// `(1 - alpha) * x`
pub fn estimator_decrease(x: f64, update_alpha: f64) -> f64 {
    (1.0 - update_alpha) * x
}

/// The two ants of one meeting plus everything a rule may read or change.
pub struct MeetingContext<'a> {
    pub ant_i: &'a mut Ant,
    pub ant_j: &'a mut Ant,
    pub sim: f64,
    pub accepted: bool,
    pub labels: &'a mut LabelAllocator,
    pub update_alpha: f64,
}

impl MeetingContext<'_> {
    pub fn same_colony(&self) -> bool {
        self.ant_i.label.is_some() && self.ant_i.label == self.ant_j.label
    }
}

type Guard = Box<dyn Fn(&MeetingContext<'_>) -> bool + Send + Sync>;
type Action = Box<dyn Fn(&mut MeetingContext<'_>) + Send + Sync>;

pub struct Rule {
    name: String,
    guard: Guard,
    action: Action,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        guard: impl Fn(&MeetingContext<'_>) -> bool + Send + Sync + 'static,
        action: impl Fn(&mut MeetingContext<'_>) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            guard: Box::new(guard),
            action: Box::new(action),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matches(&self, ctx: &MeetingContext<'_>) -> bool {
        (self.guard)(ctx)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule").field("name", &self.name).finish()
    }
}

#[derive(Debug)]
pub struct RuleSet {
    name: String,
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(name: impl Into<String>, rules: Vec<Rule>) -> Self {
        Self {
            name: name.into(),
            rules,
        }
    }

    /// Built-in rule sets by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "labroche" => Some(Self::labroche()),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: &'static [&'static str] = &["labroche"];

    pub fn labroche() -> Self {
        let rules = LabrocheRule::ALL
            .iter()
            .map(|&r| Rule::new(r.name(), move |ctx| r.guard(ctx), move |ctx| r.act(ctx)))
            .collect();
        Self::new("labroche", rules)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Fires the first matching rule and returns its position, or `None`
    /// when no guard holds (the meeting is then a no-op).
    pub fn apply(&self, ctx: &mut MeetingContext<'_>) -> Option<usize> {
        let idx = self.rules.iter().position(|r| r.matches(ctx))?;
        (self.rules[idx].action)(ctx);
        Some(idx)
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::labroche()
    }
}

/// The six Labroche meeting rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabrocheRule {
    /// Two unlabeled ants accept each other and found a new colony.
    NewColony,
    /// An unlabeled ant joins the colony of the ant it accepts.
    JoinColony,
    /// Colony mates accept each other.
    AcceptMate,
    /// Colony mates reject each other; the less integrated one leaves.
    RejectMate,
    /// Ants of different colonies accept each other; the weaker one switches.
    Absorb,
    /// Nothing happens.
    Default,
}

impl LabrocheRule {
    pub const ALL: [LabrocheRule; 6] = [
        LabrocheRule::NewColony,
        LabrocheRule::JoinColony,
        LabrocheRule::AcceptMate,
        LabrocheRule::RejectMate,
        LabrocheRule::Absorb,
        LabrocheRule::Default,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LabrocheRule::NewColony => "R1",
            LabrocheRule::JoinColony => "R2",
            LabrocheRule::AcceptMate => "R3",
            LabrocheRule::RejectMate => "R4",
            LabrocheRule::Absorb => "R5",
            LabrocheRule::Default => "R6",
        }
    }

    pub fn guard(self, ctx: &MeetingContext<'_>) -> bool {
        let (li, lj) = (ctx.ant_i.label, ctx.ant_j.label);
        match self {
            LabrocheRule::NewColony => ctx.accepted && li.is_none() && lj.is_none(),
            LabrocheRule::JoinColony => ctx.accepted && (li.is_none() != lj.is_none()),
            LabrocheRule::AcceptMate => ctx.accepted && ctx.same_colony(),
            LabrocheRule::RejectMate => !ctx.accepted && ctx.same_colony(),
            LabrocheRule::Absorb => ctx.accepted && li.is_some() && lj.is_some() && li != lj,
            LabrocheRule::Default => true,
        }
    }

    pub fn act(self, ctx: &mut MeetingContext<'_>) {
        let alpha = ctx.update_alpha;
        match self {
            LabrocheRule::NewColony => {
                let id = ctx.labels.fresh();
                ctx.ant_i.label = Some(id);
                ctx.ant_j.label = Some(id);
            }
            LabrocheRule::JoinColony => {
                if ctx.ant_i.label.is_none() {
                    ctx.ant_i.label = ctx.ant_j.label;
                } else {
                    ctx.ant_j.label = ctx.ant_i.label;
                }
            }
            LabrocheRule::AcceptMate => {
                for ant in [&mut *ctx.ant_i, &mut *ctx.ant_j] {
                    ant.m = estimator_increase(ant.m, alpha);
                    ant.m_plus = estimator_increase(ant.m_plus, alpha);
                }
            }
            LabrocheRule::RejectMate => {
                for ant in [&mut *ctx.ant_i, &mut *ctx.ant_j] {
                    ant.m = estimator_increase(ant.m, alpha);
                    ant.m_plus = estimator_decrease(ant.m_plus, alpha);
                }
                // Ties go against ant_j.
                if ctx.ant_i.m_plus < ctx.ant_j.m_plus {
                    ctx.ant_i.drop_label();
                } else {
                    ctx.ant_j.drop_label();
                }
            }
            LabrocheRule::Absorb => {
                ctx.ant_i.m = estimator_decrease(ctx.ant_i.m, alpha);
                ctx.ant_j.m = estimator_decrease(ctx.ant_j.m, alpha);
                if ctx.ant_i.m < ctx.ant_j.m {
                    ctx.ant_i.label = ctx.ant_j.label;
                } else {
                    ctx.ant_j.label = ctx.ant_i.label;
                }
            }
            LabrocheRule::Default => {}
        }
    }
}

/// Applies the Labroche rules directly and reports which one fired.
pub fn apply_labroche_rules(ctx: &mut MeetingContext<'_>) -> LabrocheRule {
    let rule = LabrocheRule::ALL
        .into_iter()
        .find(|r| r.guard(ctx))
        .unwrap_or(LabrocheRule::Default);
    rule.act(ctx);
    rule
}
