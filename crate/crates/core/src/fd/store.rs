use std::collections::{HashMap, VecDeque};

use num_integer::Integer;

use super::domain::{FdDomain, FD_LIMIT, INF, SUP};
use crate::error::EngineError;
use crate::term::VarId;

/// Optional lower and upper contribution of one linear term.
type Bounds = (Option<i128>, Option<i128>);

/// A normalized constraint, `Σ cᵢ·xᵢ ⋈ k` for the linear family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FdConstraint {
    LinEq(Vec<(i64, VarId)>, i64),
    LinNeq(Vec<(i64, VarId)>, i64),
    LinLe(Vec<(i64, VarId)>, i64),
    LinLt(Vec<(i64, VarId)>, i64),
    LinGe(Vec<(i64, VarId)>, i64),
    LinGt(Vec<(i64, VarId)>, i64),
    /// `r = x mod m` with floor semantics (sign follows `m`).
    Mod {
        x: VarId,
        m: i64,
        r: VarId,
    },
    /// `y = |x|`.
    Abs {
        x: VarId,
        y: VarId,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LinRel {
    Eq,
    Ne,
    Le,
}

#[derive(Clone, Debug)]
enum Propagator {
    Linear {
        terms: Vec<(i64, VarId)>,
        rel: LinRel,
        k: i64,
    },
    Mod {
        x: VarId,
        m: i64,
        r: VarId,
    },
    Abs {
        x: VarId,
        y: VarId,
    },
}

impl Propagator {
    fn vars(&self) -> Vec<VarId> {
        match self {
            Propagator::Linear { terms, .. } => terms.iter().map(|(_, v)| *v).collect(),
            Propagator::Mod { x, r, .. } => vec![*x, *r],
            Propagator::Abs { x, y } => vec![*x, *y],
        }
    }
}

#[derive(Clone, Debug)]
enum Trail {
    Dom(VarId, Option<FdDomain>),
    Watch(VarId),
}

/// Restore point for an [`FdStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FdMark {
    trail: usize,
    props: usize,
}

/// Marker error: some domain became empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent;

type Prop<T> = Result<T, Inconsistent>;

/// Domains of the constrained variables plus the propagator network.
#[derive(Clone, Debug, Default)]
pub struct FdStore {
    doms: HashMap<VarId, FdDomain>,
    props: Vec<Propagator>,
    watch: HashMap<VarId, Vec<usize>>,
    trail: Vec<Trail>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    changed: Vec<VarId>,
}

/// Largest domain for which `mod` propagation enumerates values.
const MOD_ENUM_CAP: u64 = 1 << 16;

fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

/// Edges `(from, to, w)` meaning `to - from <= w` when `p` relates two
/// variables through their difference only.
fn difference_edges(p: &Propagator) -> Option<Vec<(VarId, VarId, i128)>> {
    let Propagator::Linear { terms, rel, k } = p else {
        return None;
    };
    let [(c1, a), (c2, b)] = terms.as_slice() else {
        return None;
    };
    if *c1 != -*c2 || a == b {
        return None;
    }
    // normalize to a - b (rel) k / c with c > 0
    let (a, b, c) = if *c1 > 0 {
        (*a, *b, *c1 as i128)
    } else {
        (*b, *a, *c2 as i128)
    };
    let k = *k as i128;
    match rel {
        LinRel::Le => Some(vec![(b, a, Integer::div_floor(&k, &c))]),
        LinRel::Eq if k % c == 0 => Some(vec![(b, a, k / c), (a, b, -k / c)]),
        _ => None,
    }
}

fn clamp_bound(v: i128) -> i64 {
    v.clamp(-(FD_LIMIT as i128) - 1, FD_LIMIT as i128 + 1) as i64
}

impl FdStore {
    pub fn new() -> FdStore {
        FdStore::default()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.doms.contains_key(&v)
    }

    pub fn domain(&self, v: VarId) -> Option<&FdDomain> {
        self.doms.get(&v)
    }

    /// Registered variables in id order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.doms.keys().copied().collect();
        vs.sort();
        vs
    }

    pub fn constraint_count(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doms.is_empty() && self.props.is_empty()
    }

    /// Adds `v` with an unbounded domain if it is not yet known.
    pub fn register(&mut self, v: VarId) {
        if !self.doms.contains_key(&v) {
            self.trail.push(Trail::Dom(v, None));
            self.doms.insert(v, FdDomain::full());
        }
    }

    pub fn mark(&self) -> FdMark {
        FdMark {
            trail: self.trail.len(),
            props: self.props.len(),
        }
    }

    /// Restores every domain, registration and propagator to `mark`.
    pub fn restore(&mut self, mark: FdMark) {
        while self.trail.len() > mark.trail {
            match self.trail.pop().unwrap() {
                Trail::Dom(v, Some(d)) => {
                    self.doms.insert(v, d);
                }
                Trail::Dom(v, None) => {
                    self.doms.remove(&v);
                }
                Trail::Watch(v) => {
                    if let Some(ws) = self.watch.get_mut(&v) {
                        ws.pop();
                        if ws.is_empty() {
                            self.watch.remove(&v);
                        }
                    }
                }
            }
        }
        self.props.truncate(mark.props);
        self.queued.truncate(mark.props);
        self.queue.clear();
        for q in self.queued.iter_mut() {
            *q = false;
        }
        self.changed.clear();
    }

    /// Variables whose domain narrowed since the last call.
    pub fn take_changed(&mut self) -> Vec<VarId> {
        std::mem::take(&mut self.changed)
    }

    fn set_domain(&mut self, v: VarId, d: FdDomain) -> Prop<bool> {
        let old = self.doms.get(&v).cloned();
        if old.as_ref() == Some(&d) {
            return Ok(false);
        }
        if d.is_empty() {
            return Err(Inconsistent);
        }
        self.trail.push(Trail::Dom(v, old));
        self.doms.insert(v, d);
        self.changed.push(v);
        if let Some(ws) = self.watch.get(&v) {
            for &p in ws {
                if !self.queued[p] {
                    self.queued[p] = true;
                    self.queue.push_back(p);
                }
            }
        }
        Ok(true)
    }

    fn dom(&self, v: VarId) -> &FdDomain {
        self.doms.get(&v).expect("unregistered fd variable")
    }

    /// Intersects the domain of `v` with `d` and propagates.
    pub fn restrict(&mut self, v: VarId, d: &FdDomain) -> bool {
        self.register(v);
        let nd = self.dom(v).intersect(d);
        if self.set_domain(v, nd).is_err() {
            self.queue.clear();
            return false;
        }
        self.propagate()
    }

    /// Fixes `v` to `value` and propagates.
    pub fn fix(&mut self, v: VarId, value: i64) -> bool {
        self.restrict(v, &FdDomain::singleton(value))
    }

    /// Removes one value from the domain of `v` and propagates.
    pub fn exclude(&mut self, v: VarId, value: i64) -> bool {
        self.register(v);
        let nd = self.dom(v).remove(value);
        if self.set_domain(v, nd).is_err() {
            self.queue.clear();
            return false;
        }
        self.propagate()
    }

    /// Registers a constraint and propagates to fixpoint. Returns false on
    /// failure.
    pub fn post(&mut self, c: FdConstraint) -> Result<bool, EngineError> {
        let check = |terms: &[(i64, VarId)], k: i64| -> Result<(), EngineError> {
            if k.abs() > FD_LIMIT || terms.iter().any(|(c, _)| c.abs() > FD_LIMIT) {
                return Err(EngineError::Representation(
                    "finite-domain constant out of range".into(),
                ));
            }
            Ok(())
        };
        let prop = match c {
            FdConstraint::LinEq(t, k) => {
                check(&t, k)?;
                linear(t, LinRel::Eq, k)
            }
            FdConstraint::LinNeq(t, k) => {
                check(&t, k)?;
                linear(t, LinRel::Ne, k)
            }
            FdConstraint::LinLe(t, k) => {
                check(&t, k)?;
                linear(t, LinRel::Le, k)
            }
            FdConstraint::LinLt(t, k) => {
                check(&t, k)?;
                linear(t, LinRel::Le, k - 1)
            }
            FdConstraint::LinGe(t, k) => {
                check(&t, k)?;
                linear(negate(t), LinRel::Le, -k)
            }
            FdConstraint::LinGt(t, k) => {
                check(&t, k)?;
                linear(negate(t), LinRel::Le, -k - 1)
            }
            FdConstraint::Mod { x, m, r } => {
                if m == 0 {
                    return Err(EngineError::ZeroDivisor);
                }
                Propagator::Mod { x, m, r }
            }
            FdConstraint::Abs { x, y } => Propagator::Abs { x, y },
        };
        if let Propagator::Linear { terms, rel, k } = &prop {
            if terms.is_empty() {
                let holds = match rel {
                    LinRel::Eq => *k == 0,
                    LinRel::Ne => *k != 0,
                    LinRel::Le => 0 <= *k,
                };
                return Ok(holds);
            }
        }
        if let Propagator::Linear {
            terms,
            rel: LinRel::Eq,
            k,
        } = &prop
        {
            let g = terms.iter().fold(0i64, |g, (c, _)| Integer::gcd(&g, c));
            if k % g != 0 {
                return Ok(false);
            }
        }
        if difference_edges(&prop).is_some() && self.negative_cycle(&prop) {
            return Ok(false);
        }
        let id = self.props.len();
        for v in prop.vars() {
            self.register(v);
            let ws = self.watch.entry(v).or_default();
            if ws.last() != Some(&id) {
                ws.push(id);
                self.trail.push(Trail::Watch(v));
            }
        }
        self.props.push(prop);
        self.queued.push(true);
        self.queue.push_back(id);
        Ok(self.propagate())
    }

    /// Bellman-Ford over every difference constraint plus `extra`. Bounds
    /// propagation cannot refute cycles such as `x < y, y < x` while the
    /// domains are unbounded; this catches them.
    fn negative_cycle(&self, extra: &Propagator) -> bool {
        let edges: Vec<(VarId, VarId, i128)> = self
            .props
            .iter()
            .chain(std::iter::once(extra))
            .filter_map(difference_edges)
            .flatten()
            .collect();
        let mut dist: HashMap<VarId, i128> = HashMap::new();
        for &(a, b, _) in &edges {
            dist.insert(a, 0);
            dist.insert(b, 0);
        }
        for _ in 0..=dist.len() {
            let mut relaxed = false;
            for &(from, to, w) in &edges {
                let cand = dist[&from] + w;
                if cand < dist[&to] {
                    dist.insert(to, cand);
                    relaxed = true;
                }
            }
            if !relaxed {
                return false;
            }
        }
        true
    }

    /// Runs queued propagators until no domain changes. Returns false on
    /// failure.
    pub fn propagate(&mut self) -> bool {
        while let Some(p) = self.queue.pop_front() {
            self.queued[p] = false;
            let prop = self.props[p].clone();
            if self.run(&prop).is_err() {
                for &q in &self.queue {
                    self.queued[q] = false;
                }
                self.queue.clear();
                return false;
            }
        }
        true
    }

    fn run(&mut self, prop: &Propagator) -> Prop<()> {
        match prop {
            Propagator::Linear { terms, rel, k } => match rel {
                LinRel::Ne => self.run_ne(terms, *k),
                _ => {
                    while self.run_bounds(terms, *rel == LinRel::Eq, *k)? {}
                    Ok(())
                }
            },
            Propagator::Mod { x, m, r } => self.run_mod(*x, *m, *r),
            Propagator::Abs { x, y } => {
                loop {
                    let ny = self.dom(*y).intersect(&self.dom(*x).abs_image());
                    let a = self.set_domain(*y, ny)?;
                    let dy = self.dom(*y).clone();
                    let nx = self.dom(*x).intersect(&dy.union(&dy.negate()));
                    let b = self.set_domain(*x, nx)?;
                    if !a && !b {
                        break;
                    }
                }
                Ok(())
            }
        }
    }

    fn run_ne(&mut self, terms: &[(i64, VarId)], k: i64) -> Prop<()> {
        let mut free = None;
        let mut rest = k as i128;
        for &(c, v) in terms {
            match self.dom(v).value() {
                Some(x) => rest -= c as i128 * x as i128,
                None if free.is_none() => free = Some((c, v)),
                None => return Ok(()),
            }
        }
        match free {
            None => {
                if rest == 0 {
                    Err(Inconsistent)
                } else {
                    Ok(())
                }
            }
            Some((c, v)) => {
                let c = c as i128;
                if rest % c == 0 {
                    let val = rest / c;
                    if val.abs() <= FD_LIMIT as i128 {
                        let nd = self.dom(v).remove(val as i64);
                        self.set_domain(v, nd)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// One bounds-consistency pass over `Σ c·x ≤ k` (or `= k`). Returns
    /// whether any domain changed.
    fn run_bounds(&mut self, terms: &[(i64, VarId)], eq: bool, k: i64) -> Prop<bool> {
        // per-term bounds of c*x; None means unbounded in that direction
        let bounds: Vec<(Option<i128>, Option<i128>)> = terms
            .iter()
            .map(|&(c, v)| {
                let d = self.dom(v);
                let lo = (d.min() != INF).then(|| d.min() as i128 * c as i128);
                let hi = (d.max() != SUP).then(|| d.max() as i128 * c as i128);
                if c >= 0 {
                    (lo, hi)
                } else {
                    (hi, lo)
                }
            })
            .collect();
        let sum = |pick: fn(&Bounds) -> Option<i128>| {
            let mut total: i128 = 0;
            let mut unbounded = 0usize;
            for b in &bounds {
                match pick(b).and_then(|x| total.checked_add(x)) {
                    Some(t) => total = t,
                    None => unbounded += 1,
                }
            }
            (total, unbounded)
        };
        let (min_sum, min_inf) = sum(|b| b.0);
        let (max_sum, max_inf) = sum(|b| b.1);
        let mut changed = false;
        for (i, &(c, v)) in terms.iter().enumerate() {
            let (lo_i, hi_i) = bounds[i];
            // bounds of the other terms
            let rest_min = match lo_i {
                Some(l) if min_inf == 0 => Some(min_sum - l),
                None if min_inf == 1 => Some(min_sum),
                _ => None,
            };
            let rest_max = match hi_i {
                Some(h) if max_inf == 0 => Some(max_sum - h),
                None if max_inf == 1 => Some(max_sum),
                _ => None,
            };
            // c*x <= k - rest_min ; for equality also c*x >= k - rest_max
            let upper = rest_min.map(|r| k as i128 - r);
            let lower = if eq { rest_max.map(|r| k as i128 - r) } else { None };
            let c = c as i128;
            let (xlo, xhi) = if c > 0 {
                (lower.map(|l| ceil_div(l, c)), upper.map(|u| floor_div(u, c)))
            } else {
                (upper.map(|u| ceil_div(u, c)), lower.map(|l| floor_div(l, c)))
            };
            let d = self.dom(v);
            let lo = xlo.map(clamp_bound).unwrap_or(INF);
            let hi = xhi.map(clamp_bound).unwrap_or(SUP);
            if (lo != INF && lo > d.min()) || (hi != SUP && hi < d.max()) {
                let nd = d.restrict(lo, hi);
                changed |= self.set_domain(v, nd)?;
            }
        }
        Ok(changed)
    }

    fn run_mod(&mut self, x: VarId, m: i64, r: VarId) -> Prop<()> {
        let (rlo, rhi) = if m > 0 { (0, m - 1) } else { (m + 1, 0) };
        let nr = self.dom(r).restrict(rlo, rhi);
        self.set_domain(r, nr)?;
        let dx = self.dom(x).clone();
        match dx.size() {
            Some(n) if n <= MOD_ENUM_CAP => {
                let dr = self.dom(r).clone();
                let keep: Vec<i64> = dx.values().filter(|v| dr.contains(v.mod_floor(&m))).collect();
                let mut rs: Vec<i64> = keep.iter().map(|v| v.mod_floor(&m)).collect();
                rs.sort_unstable();
                rs.dedup();
                self.set_domain(x, FdDomain::from_sorted_values(&keep))?;
                self.set_domain(r, FdDomain::from_sorted_values(&rs))?;
            }
            _ => {
                if let Some(v) = dx.value() {
                    self.set_domain(r, self.dom(r).intersect(&FdDomain::singleton(v.mod_floor(&m))))?;
                }
            }
        }
        Ok(())
    }

    /// Enumerates the assignments of `vars` by depth-first search
    /// interleaved with propagation.
    pub fn label(&mut self, vars: &[VarId], strategy: LabelStrategy) -> Result<Labeling<'_>, EngineError> {
        for v in vars {
            match self.doms.get(v) {
                Some(d) if d.is_finite() || d.is_empty() => {}
                _ => return Err(EngineError::UnboundedDomain),
            }
        }
        Ok(Labeling {
            store: self,
            vars: vars.to_vec(),
            strategy,
            stack: Vec::new(),
            state: LabelState::Fresh,
        })
    }

    /// Variables connected to `seeds` through shared propagators, in
    /// discovery order, seeds first.
    pub fn component(&self, seeds: &[VarId]) -> Vec<VarId> {
        let mut seen: Vec<VarId> = Vec::new();
        let mut stack: Vec<VarId> = seeds.iter().rev().copied().collect();
        let mut done_props = vec![false; self.props.len()];
        while let Some(v) = stack.pop() {
            if seen.contains(&v) || !self.doms.contains_key(&v) {
                continue;
            }
            seen.push(v);
            for &p in self.watch.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if !done_props[p] {
                    done_props[p] = true;
                    stack.extend(self.props[p].vars().into_iter().rev());
                }
            }
        }
        seen
    }

    /// Picks the next variable to label, or `None` when all are fixed.
    pub fn select_var(&self, vars: &[VarId], select: VarSelect) -> Option<VarId> {
        let open = vars
            .iter()
            .copied()
            .filter(|v| self.doms.get(v).is_some_and(|d| d.value().is_none()));
        match select {
            VarSelect::Leftmost => open.into_iter().next(),
            VarSelect::FirstFail => open.min_by_key(|v| self.dom(*v).size().unwrap_or(u64::MAX)),
        }
    }
}

fn linear(terms: Vec<(i64, VarId)>, rel: LinRel, k: i64) -> Propagator {
    let mut merged: Vec<(i64, VarId)> = Vec::new();
    for (c, v) in terms {
        match merged.iter_mut().find(|(_, w)| *w == v) {
            Some(e) => e.0 += c,
            None => merged.push((c, v)),
        }
    }
    merged.retain(|(c, _)| *c != 0);
    Propagator::Linear { terms: merged, rel, k }
}

fn negate(terms: Vec<(i64, VarId)>) -> Vec<(i64, VarId)> {
    terms.into_iter().map(|(c, v)| (-c, v)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VarSelect {
    #[default]
    Leftmost,
    FirstFail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ValueOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct LabelStrategy {
    pub select: VarSelect,
    pub order: ValueOrder,
}

impl LabelStrategy {
    pub fn first_fail() -> Self {
        LabelStrategy {
            select: VarSelect::FirstFail,
            order: ValueOrder::Ascending,
        }
    }
}

struct Frame {
    mark: FdMark,
    var: VarId,
    values: Vec<i64>,
    next: usize,
}

enum LabelState {
    Fresh,
    Running,
    Done,
}

/// Iterator over ground assignments produced by [`FdStore::label`]. When
/// exhausted the store is back at its pre-labeling state.
pub struct Labeling<'s> {
    store: &'s mut FdStore,
    vars: Vec<VarId>,
    strategy: LabelStrategy,
    stack: Vec<Frame>,
    state: LabelState,
}

impl Labeling<'_> {
    fn push_frame(&mut self) -> Option<Vec<i64>> {
        match self.store.select_var(&self.vars, self.strategy.select) {
            None => Some(self.vars.iter().map(|v| self.store.dom(*v).value().unwrap()).collect()),
            Some(var) => {
                let mut values: Vec<i64> = self.store.dom(var).values().collect();
                if self.strategy.order == ValueOrder::Descending {
                    values.reverse();
                }
                self.stack.push(Frame {
                    mark: self.store.mark(),
                    var,
                    values,
                    next: 0,
                });
                None
            }
        }
    }

    /// Advances the deepest frame to its next consistent value.
    fn search(&mut self) -> Option<Vec<i64>> {
        loop {
            let frame = self.stack.last_mut()?;
            if frame.next >= frame.values.len() {
                let mark = frame.mark;
                self.stack.pop();
                self.store.restore(mark);
                continue;
            }
            let value = frame.values[frame.next];
            frame.next += 1;
            let (mark, var) = (frame.mark, frame.var);
            self.store.restore(mark);
            if !self.store.fix(var, value) {
                continue;
            }
            if let Some(sol) = self.push_frame() {
                return Some(sol);
            }
        }
    }
}

impl Iterator for Labeling<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        match self.state {
            LabelState::Done => None,
            LabelState::Fresh => {
                self.state = LabelState::Running;
                let base = self.store.mark();
                if !self.store.propagate() {
                    self.store.restore(base);
                    self.state = LabelState::Done;
                    return None;
                }
                if self.vars.iter().any(|v| self.store.dom(*v).is_empty()) {
                    self.state = LabelState::Done;
                    return None;
                }
                if let Some(sol) = self.push_frame() {
                    // nothing to label; a single solution
                    self.state = LabelState::Done;
                    return Some(sol);
                }
                let out = self.search();
                if out.is_none() {
                    self.state = LabelState::Done;
                }
                out
            }
            LabelState::Running => {
                let out = self.search();
                if out.is_none() {
                    self.state = LabelState::Done;
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId(n)
    }

    #[test]
    fn bounds_of_sum() {
        // {X+Y #= 5, X in 0..5, Y in 3..9} -> X in 0..2, Y in 3..5
        let mut s = FdStore::new();
        assert!(s.restrict(v(0), &FdDomain::range(0, 5)));
        assert!(s.restrict(v(1), &FdDomain::range(3, 9)));
        assert!(s.post(FdConstraint::LinEq(vec![(1, v(0)), (1, v(1))], 5)).unwrap());
        assert_eq!(s.domain(v(0)).unwrap(), &FdDomain::range(0, 2));
        assert_eq!(s.domain(v(1)).unwrap(), &FdDomain::range(3, 5));
    }

    #[test]
    fn ordering_constraint_bounds() {
        // Digit4 #> Digit3, both in 0..9
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(0, 9));
        s.restrict(v(1), &FdDomain::range(0, 9));
        assert!(s.post(FdConstraint::LinGt(vec![(1, v(0)), (-1, v(1))], 0)).unwrap());
        assert_eq!(s.domain(v(0)).unwrap(), &FdDomain::range(1, 9));
        assert_eq!(s.domain(v(1)).unwrap(), &FdDomain::range(0, 8));
    }

    #[test]
    fn antisymmetry_fails() {
        let mut s = FdStore::new();
        assert!(s.post(FdConstraint::LinGt(vec![(1, v(0)), (-1, v(1))], 0)).unwrap());
        // unbounded domains: bounds propagation cannot refute X > Y, Y > X
        // without finite bounds, so give them some
        s.restrict(v(0), &FdDomain::range(-100, 100));
        let ok = s.post(FdConstraint::LinGt(vec![(1, v(1)), (-1, v(0))], 0)).unwrap();
        assert!(!ok);
    }

    #[test]
    fn disequality_with_ground_side() {
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(3, 3));
        assert!(!s.post(FdConstraint::LinNeq(vec![(1, v(0))], 3)).unwrap());
    }

    #[test]
    fn mod_pruning() {
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(0, 9));
        assert!(s.post(FdConstraint::Mod { x: v(0), m: 2, r: v(1) }).unwrap());
        assert!(s.post(FdConstraint::LinNeq(vec![(1, v(1))], 0)).unwrap());
        assert_eq!(s.domain(v(0)).unwrap().to_string(), "1\\/3\\/5\\/7\\/9");
    }

    #[test]
    fn abs_both_directions() {
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(-2, 7));
        assert!(s.post(FdConstraint::Abs { x: v(0), y: v(1) }).unwrap());
        assert_eq!(s.domain(v(1)).unwrap(), &FdDomain::range(0, 7));
        assert!(s.restrict(v(1), &FdDomain::range(5, 9)));
        assert_eq!(s.domain(v(0)).unwrap(), &FdDomain::range(5, 7));
    }

    #[test]
    fn labeling_order_and_restore() {
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(0, 1));
        s.restrict(v(1), &FdDomain::range(0, 1));
        let snapshot: Vec<_> = s.vars().iter().map(|x| s.domain(*x).cloned()).collect();
        let sols: Vec<_> = s.label(&[v(0), v(1)], LabelStrategy::default()).unwrap().collect();
        assert_eq!(sols, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let after: Vec<_> = s.vars().iter().map(|x| s.domain(*x).cloned()).collect();
        assert_eq!(snapshot, after);
    }

    #[test]
    fn labeling_empty_and_unbounded() {
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(0, 9));
        assert!(!s.post(FdConstraint::LinGt(vec![(1, v(0))], 9)).unwrap());
        let mut s = FdStore::new();
        s.register(v(0));
        assert!(matches!(
            s.label(&[v(0)], LabelStrategy::default()),
            Err(EngineError::UnboundedDomain)
        ));
    }

    #[test]
    fn mark_restore_exact() {
        let mut s = FdStore::new();
        s.restrict(v(0), &FdDomain::range(0, 9));
        s.restrict(v(1), &FdDomain::range(0, 9));
        let m = s.mark();
        let before = (s.domain(v(0)).cloned(), s.domain(v(1)).cloned(), s.constraint_count());
        s.post(FdConstraint::LinEq(vec![(1, v(0)), (1, v(1)), (1, v(2))], 3))
            .unwrap();
        s.fix(v(0), 2);
        s.restore(m);
        let after = (s.domain(v(0)).cloned(), s.domain(v(1)).cloned(), s.constraint_count());
        assert_eq!(before, after);
        assert!(!s.contains(v(2)));
    }
}
