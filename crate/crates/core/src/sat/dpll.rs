//! Watched-literal DPLL with chronological backtracking.
//!
//! Decisions always pick the lowest-index unassigned variable and try `true`
//! first, which makes the returned model a deterministic function of the
//! clause list and variable numbering.

use super::cnf::{Cnf, Lit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reason {
    Decision { flipped: bool },
    Implied,
}

struct State {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<(Lit, Reason)>,
    qhead: usize,
    decisions: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpllStats {
    pub decisions: u64,
    pub conflicts: u64,
}

/// Returns a total model (one value per variable) or `None` if unsatisfiable.
pub fn solve_cnf(cnf: &Cnf, assumptions: &[Lit]) -> (Option<Vec<bool>>, DpllStats) {
    let mut stats = DpllStats::default();
    let mut units = assumptions.to_vec();
    let mut clauses = Vec::new();
    for c in &cnf.clauses {
        let mut c = c.clone();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            continue;
        }
        match c.len() {
            0 => return (None, stats),
            1 => units.push(c[0]),
            _ => clauses.push(c),
        }
    }
    let n = cnf
        .num_vars
        .max(units.iter().map(|l| l.var() + 1).max().unwrap_or(0));
    let mut watches = vec![Vec::new(); 2 * n];
    for (i, c) in clauses.iter().enumerate() {
        watches[c[0].code()].push(i);
        watches[c[1].code()].push(i);
    }
    let mut st = State {
        clauses,
        watches,
        value: vec![None; n],
        trail: Vec::new(),
        qhead: 0,
        decisions: 0,
    };
    for &u in &units {
        match st.lit_value(u) {
            Some(true) => {}
            Some(false) => return (None, stats),
            None => st.enqueue(u, Reason::Implied),
        }
    }
    let mut next_var = 0usize;
    loop {
        if st.propagate() {
            stats.conflicts += 1;
            if !st.backtrack() {
                stats.decisions = st.decisions;
                return (None, stats);
            }
            // Implied literals below the flipped decision may have been undone.
            next_var = 0;
            continue;
        }
        while next_var < n && st.value[next_var].is_some() {
            next_var += 1;
        }
        if next_var == n {
            stats.decisions = st.decisions;
            let model = st.value.iter().map(|v| v.unwrap_or(false)).collect();
            return (Some(model), stats);
        }
        st.decisions += 1;
        st.enqueue(Lit::new(next_var, true), Reason::Decision { flipped: false });
    }
}

impl State {
    #[inline]
    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var()].map(|v| v == l.is_positive())
    }

    fn enqueue(&mut self, l: Lit, reason: Reason) {
        self.value[l.var()] = Some(l.is_positive());
        self.trail.push((l, reason));
    }

    /// Unit propagation; returns `true` on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead].0;
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if self.value[other.var()] == Some(other.is_positive()) {
                    i += 1;
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| {
                    let l = clause[k];
                    self.value[l.var()] != Some(!l.is_positive())
                });
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let nl = clause[1];
                    self.watches[nl.code()].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                i += 1;
                match self.lit_value(other) {
                    None => self.enqueue(other, Reason::Implied),
                    Some(false) => {
                        conflict = true;
                        break;
                    }
                    Some(true) => {}
                }
            }
            self.watches[falsified.code()].extend(ws);
            if conflict {
                return true;
            }
        }
        false
    }

    /// Undoes assignments up to the latest unflipped decision and flips it.
    /// Returns `false` when the search is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some((l, reason)) = self.trail.pop() {
            self.value[l.var()] = None;
            if let Reason::Decision { flipped: false } = reason {
                self.qhead = self.trail.len();
                self.enqueue(!l, Reason::Decision { flipped: true });
                return true;
            }
        }
        false
    }
}
