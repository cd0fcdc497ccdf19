use std::collections::HashSet;
use std::fmt;

use crate::term::{Quantifier, TermId, TermStore};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TriggerSel {
    /// Candidates with no smaller candidate inside them.
    #[default]
    Min,
    /// Candidates not contained in a larger candidate.
    Max,
}

impl std::str::FromStr for TriggerSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "min" => Ok(TriggerSel::Min),
            "max" => Ok(TriggerSel::Max),
            _ => Err(format!("unknown trigger selection `{s}` (expected min or max)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TriggerOptions {
    pub sel: TriggerSel,
    /// Put multi-pattern triggers ahead of single ones.
    pub multi_priority: bool,
    /// Build a multi-pattern trigger even when single triggers exist.
    pub multi_when_single: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trigger {
    pub patterns: Vec<TermId>,
    /// Bound variables covered by the patterns, sorted by id.
    pub vars: Vec<TermId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoTrigger;

impl fmt::Display for NoTrigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no uninterpreted application covers the bound variables")
    }
}

impl std::error::Error for NoTrigger {}

fn covers(store: &TermStore, patterns: &[TermId], vars: &[TermId]) -> bool {
    vars.iter()
        .all(|v| patterns.iter().any(|&p| store.free_vars(p).contains(v)))
}

/// Greedy cover of `vars` from `pool` (already in preference order), then
/// drops patterns made redundant by the others.
fn multi_cover(store: &TermStore, pool: &[TermId], vars: &[TermId]) -> Option<Vec<TermId>> {
    let mut chosen: Vec<TermId> = Vec::new();
    let mut uncovered: HashSet<TermId> = vars.iter().copied().collect();
    while !uncovered.is_empty() {
        let best = pool
            .iter()
            .filter(|p| !chosen.contains(p))
            .map(|&p| (store.free_vars(p).iter().filter(|v| uncovered.contains(v)).count(), p))
            .filter(|&(gain, _)| gain > 0)
            .fold(None, |acc: Option<(usize, TermId)>, cur| match acc {
                Some(a) if a.0 >= cur.0 => Some(a),
                _ => Some(cur),
            })?;
        for v in store.free_vars(best.1) {
            uncovered.remove(v);
        }
        chosen.push(best.1);
    }
    let mut i = chosen.len();
    while i > 0 {
        i -= 1;
        let rest: Vec<TermId> = chosen
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &p)| p)
            .collect();
        if !rest.is_empty() && covers(store, &rest, vars) {
            chosen.remove(i);
        }
    }
    chosen.sort_by_key(|&p| (store.tree_size(p), p));
    Some(chosen)
}

/// Heuristic triggers for `q`: single-pattern triggers ordered by (node
/// count, term id), then at most one multi-pattern trigger.
pub fn generate_triggers(store: &TermStore, q: &Quantifier, opts: &TriggerOptions) -> Result<Vec<Trigger>, NoTrigger> {
    let mut vars = q.bound_vars.clone();
    vars.sort();
    let mut candidates: Vec<TermId> = store
        .subterms(q.body)
        .into_iter()
        .filter(|&t| store.kind(t).is_uninterpreted_app() && !store.is_ground(t))
        .collect();
    if candidates.is_empty() {
        return Err(NoTrigger);
    }
    candidates.sort_by_key(|&p| (store.tree_size(p), p));
    let inside: Vec<HashSet<TermId>> = candidates
        .iter()
        .map(|&c| store.subterms(c).into_iter().filter(|&s| s != c).collect())
        .collect();
    let selected: Vec<TermId> = candidates
        .iter()
        .enumerate()
        .filter(|&(i, &c)| match opts.sel {
            TriggerSel::Min => !candidates.iter().any(|d| inside[i].contains(d)),
            TriggerSel::Max => !inside.iter().any(|s| s.contains(&c)),
        })
        .map(|(_, &c)| c)
        .collect();

    // Fall back to the full candidate set when the selected ones cannot
    // cover every variable.
    let pool = if covers(store, &selected, &vars) {
        selected
    } else if covers(store, &candidates, &vars) {
        candidates.clone()
    } else {
        return Err(NoTrigger);
    };

    let singles: Vec<Trigger> = pool
        .iter()
        .filter(|&&p| covers(store, &[p], &vars))
        .map(|&p| Trigger {
            patterns: vec![p],
            vars: vars.clone(),
        })
        .collect();
    let multi = if singles.is_empty() || opts.multi_when_single {
        let non_single: Vec<TermId> = pool.iter().copied().filter(|&p| !covers(store, &[p], &vars)).collect();
        multi_cover(store, &non_single, &vars)
            .filter(|m| m.len() > 1)
            .map(|patterns| Trigger {
                patterns,
                vars: vars.clone(),
            })
    } else {
        None
    };
    let mut out = Vec::new();
    if opts.multi_priority {
        out.extend(multi.clone());
        out.extend(singles);
    } else {
        out.extend(singles);
        out.extend(multi);
    }
    if out.is_empty() {
        return Err(NoTrigger);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Kind, SortId};

    struct Fx {
        s: TermStore,
    }

    impl Fx {
        fn new() -> Self {
            Fx { s: TermStore::new() }
        }
        fn forall(&mut self, vars: &[TermId], body: TermId) -> Quantifier {
            let mut ch = vars.to_vec();
            ch.push(body);
            let t = self.s.mk_term(Kind::Forall, None, &ch).unwrap();
            Quantifier::from_term(&self.s, t).unwrap()
        }
    }

    #[test]
    fn min_and_max_modes() {
        let mut fx = Fx::new();
        let u = fx.s.declare_sort("U");
        let f = fx.s.declare_fun("f", &[u], u);
        let r = fx.s.declare_fun("R", &[u, u], SortId::BOOL);
        let c = fx.s.declare_fun("c", &[], u);
        let c = fx.s.apply(c, &[]).unwrap();
        let x = fx.s.fresh_bound_var("x", u);
        let fx_ = fx.s.apply(f, &[x]).unwrap();
        let body = fx.s.apply(r, &[fx_, c]).unwrap();
        let q = fx.forall(&[x], body);
        let min = generate_triggers(&fx.s, &q, &TriggerOptions::default()).unwrap();
        assert_eq!(min[0].patterns, vec![fx_]);
        assert_eq!(min.len(), 1);
        let opts = TriggerOptions {
            sel: TriggerSel::Max,
            ..Default::default()
        };
        let max = generate_triggers(&fx.s, &q, &opts).unwrap();
        assert_eq!(max[0].patterns, vec![body]);
    }

    #[test]
    fn separate_variables_need_a_multi_trigger() {
        let mut fx = Fx::new();
        let u = fx.s.declare_sort("U");
        let g = fx.s.declare_fun("g", &[u], u);
        let h = fx.s.declare_fun("h", &[u], u);
        let sp = fx.s.declare_fun("S", &[u, u], SortId::BOOL);
        let x = fx.s.fresh_bound_var("x", u);
        let y = fx.s.fresh_bound_var("y", u);
        let gx = fx.s.apply(g, &[x]).unwrap();
        let hy = fx.s.apply(h, &[y]).unwrap();
        let body = fx.s.apply(sp, &[gx, hy]).unwrap();
        let q = fx.forall(&[x, y], body);
        let ts = generate_triggers(&fx.s, &q, &TriggerOptions::default()).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].patterns, vec![gx, hy]);

        let opts = TriggerOptions {
            sel: TriggerSel::Max,
            ..Default::default()
        };
        assert_eq!(generate_triggers(&fx.s, &q, &opts).unwrap()[0].patterns, vec![body]);
        let opts = TriggerOptions {
            multi_when_single: true,
            multi_priority: true,
            ..Default::default()
        };
        assert_eq!(generate_triggers(&fx.s, &q, &opts).unwrap()[0].patterns, vec![gx, hy]);
    }

    #[test]
    fn no_application_means_no_trigger() {
        let mut fx = Fx::new();
        let x = fx.s.fresh_bound_var("x", SortId::INT);
        let zero = fx.s.numeral(0);
        let body = fx.s.mk_term(Kind::Lt, None, &[x, zero]).unwrap();
        let q = fx.forall(&[x], body);
        assert_eq!(generate_triggers(&fx.s, &q, &TriggerOptions::default()), Err(NoTrigger));
    }
}
