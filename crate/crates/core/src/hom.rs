//! Homomorphism search, query evaluation and isomorphism tests.
//!
//! The search is a backtracking join. Small sources pick the next atom with
//! the fewest candidates at every step; large ones use a fixed order that
//! follows already-bound terms.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::ops::{ControlFlow, Range};

use crate::logic::{Atom, Instance, Mapping, Query, Term};

/// Above this many source atoms the atom order is fixed up front.
const DYNAMIC_LIMIT: usize = 24;

/// A match of one disjunct of a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub disjunct: usize,
    pub mapping: Mapping,
}

type Compat<'a> = &'a dyn Fn(&Term, &Term) -> bool;

/// Configurable search for homomorphisms from `src` into `target`.
pub struct Matcher<'a> {
    src: &'a [Atom],
    target: &'a Instance,
    injective: bool,
    ranges: Option<&'a [Range<usize>]>,
    compat: Option<Compat<'a>>,
}

impl<'a> Matcher<'a> {
    pub fn new(src: &'a [Atom], target: &'a Instance) -> Self {
        Matcher {
            src,
            target,
            injective: false,
            ranges: None,
            compat: None,
        }
    }

    /// Distinct non-constant source terms must get distinct images.
    pub fn injective(mut self, yes: bool) -> Self {
        self.injective = yes;
        self
    }

    /// Restricts the image of source atom `i` to target indices in `ranges[i]`.
    pub fn ranges(mut self, ranges: &'a [Range<usize>]) -> Self {
        self.ranges = Some(ranges);
        self
    }

    /// Extra admissibility test for binding a source term to a target term.
    pub fn compat(mut self, f: Compat<'a>) -> Self {
        self.compat = Some(f);
        self
    }

    /// Calls `f` with every extension of `seed`, together with the target
    /// index of each source atom's image. Breaks when `f` does.
    pub fn for_each<F>(&self, seed: &Mapping, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&Mapping, &[usize]) -> ControlFlow<()>,
    {
        let mut binding: HashMap<Term, Term> = HashMap::new();
        let mut used = HashSet::new();
        for (k, v) in seed.iter() {
            binding.insert(k.clone(), v.clone());
            if self.injective && !used.insert(v.clone()) {
                return ControlFlow::Continue(());
            }
        }
        let order = if self.src.len() > DYNAMIC_LIMIT {
            Some(self.static_order(&binding))
        } else {
            None
        };
        let mut s = Search {
            m: self,
            binding,
            used,
            image: vec![usize::MAX; self.src.len()],
            assigned: vec![false; self.src.len()],
            order,
        };
        s.run(0, &mut f)
    }

    pub fn first(&self, seed: &Mapping) -> Option<Mapping> {
        let mut out = None;
        let _ = self.for_each(seed, |m, _| {
            out = Some(m.clone());
            ControlFlow::Break(())
        });
        out
    }

    pub fn all(&self, seed: &Mapping) -> Vec<Mapping> {
        let mut out = Vec::new();
        let _ = self.for_each(seed, |m, _| {
            out.push(m.clone());
            ControlFlow::Continue(())
        });
        out
    }

    fn key_term<'t>(&self, s: &'t Term, binding: &'t HashMap<Term, Term>) -> Option<&'t Term> {
        match s {
            Term::Constant(_) => Some(s),
            _ => binding.get(s),
        }
    }

    fn candidates(&self, i: usize, binding: &HashMap<Term, Term>) -> &'a [usize] {
        let a = &self.src[i];
        let mut best = self.target.with_predicate(&a.predicate);
        for (j, s) in a.args.iter().enumerate() {
            if let Some(t) = self.key_term(s, binding) {
                let l = self.target.with_argument(&a.predicate, j, t);
                if l.len() < best.len() {
                    best = l;
                }
            }
        }
        best
    }

    fn static_order(&self, seed: &HashMap<Term, Term>) -> Vec<usize> {
        let n = self.src.len();
        let mut occurs: HashMap<&Term, Vec<usize>> = HashMap::new();
        let mut bound_count = vec![0usize; n];
        for (i, a) in self.src.iter().enumerate() {
            for t in &a.args {
                if t.is_constant() || seed.contains_key(t) {
                    bound_count[i] += 1;
                } else {
                    occurs.entry(t).or_default().push(i);
                }
            }
        }
        let size = |i: usize| self.target.with_predicate(&self.src[i].predicate).len();
        let mut heap: BinaryHeap<(usize, std::cmp::Reverse<usize>, std::cmp::Reverse<usize>)> = (0..n)
            .map(|i| (bound_count[i], std::cmp::Reverse(size(i)), std::cmp::Reverse(i)))
            .collect();
        let mut placed = vec![false; n];
        let mut bound: HashSet<&Term> = HashSet::new();
        let mut order = Vec::with_capacity(n);
        while let Some((c, _, std::cmp::Reverse(i))) = heap.pop() {
            if placed[i] || c != bound_count[i] {
                continue;
            }
            placed[i] = true;
            order.push(i);
            for t in &self.src[i].args {
                if occurs.contains_key(t) && bound.insert(t) {
                    for &k in &occurs[t] {
                        if !placed[k] {
                            bound_count[k] += self.src[k].args.iter().filter(|x| *x == t).count();
                            heap.push((bound_count[k], std::cmp::Reverse(size(k)), std::cmp::Reverse(k)));
                        }
                    }
                }
            }
        }
        order
    }
}

struct Search<'m, 'a> {
    m: &'m Matcher<'a>,
    binding: HashMap<Term, Term>,
    used: HashSet<Term>,
    image: Vec<usize>,
    assigned: Vec<bool>,
    order: Option<Vec<usize>>,
}

impl<'m, 'a> Search<'m, 'a> {
    fn run<F>(&mut self, depth: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Mapping, &[usize]) -> ControlFlow<()>,
    {
        let n = self.m.src.len();
        if depth == n {
            let mapping: Mapping = self.binding.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            return f(&mapping, &self.image);
        }
        let (i, cands) = match &self.order {
            Some(order) => {
                let i = order[depth];
                (i, self.m.candidates(i, &self.binding))
            }
            None => {
                let mut best: Option<(usize, &'a [usize])> = None;
                for i in (0..n).filter(|&i| !self.assigned[i]) {
                    let c = self.m.candidates(i, &self.binding);
                    if c.is_empty() {
                        return ControlFlow::Continue(());
                    }
                    if best.is_none_or(|(_, b)| c.len() < b.len()) {
                        best = Some((i, c));
                    }
                }
                best.expect("an unassigned atom remains")
            }
        };
        let range = self.m.ranges.map(|r| r[i].clone());
        for &idx in cands {
            if let Some(r) = &range {
                if !r.contains(&idx) {
                    continue;
                }
            }
            if let Some(trail) = self.bind(i, idx) {
                self.assigned[i] = true;
                self.image[i] = idx;
                let flow = self.run(depth + 1, f);
                self.assigned[i] = false;
                self.unbind(trail);
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    fn bind(&mut self, i: usize, idx: usize) -> Option<Vec<Term>> {
        let src = &self.m.src[i];
        let tgt = self.m.target.get(idx);
        if src.args.len() != tgt.args.len() {
            return None;
        }
        let mut trail = Vec::new();
        for (s, t) in src.args.iter().zip(&tgt.args) {
            let ok = match s {
                Term::Constant(_) => s == t,
                _ => match self.binding.get(s) {
                    Some(b) => b == t,
                    None => {
                        let admissible =
                            self.m.compat.is_none_or(|c| c(s, t)) && (!self.m.injective || !self.used.contains(t));
                        if admissible {
                            self.binding.insert(s.clone(), t.clone());
                            if self.m.injective {
                                self.used.insert(t.clone());
                            }
                            trail.push(s.clone());
                        }
                        admissible
                    }
                },
            };
            if !ok {
                self.unbind(trail);
                return None;
            }
        }
        Some(trail)
    }

    fn unbind(&mut self, trail: Vec<Term>) {
        for s in trail {
            if let Some(t) = self.binding.remove(&s) {
                if self.m.injective {
                    self.used.remove(&t);
                }
            }
        }
    }
}

/// Some homomorphism from `src` into `target` extending `seed`.
pub fn find_homomorphism(src: &[Atom], target: &Instance, seed: &Mapping) -> Option<Mapping> {
    Matcher::new(src, target).first(seed)
}

/// Every homomorphism from `src` into `target` extending `seed`.
pub fn all_homomorphisms(src: &[Atom], target: &Instance, seed: &Mapping) -> Vec<Mapping> {
    Matcher::new(src, target).all(seed)
}

/// First disjunct (in order) with a match, and that match.
pub fn satisfies_query(inst: &Instance, q: &Query) -> Option<Witness> {
    q.disjuncts.iter().enumerate().find_map(|(d, atoms)| {
        find_homomorphism(atoms, inst, &Mapping::new()).map(|mapping| Witness { disjunct: d, mapping })
    })
}

/// A bijective renaming of variables and nulls (constants fixed) taking `a`
/// onto `b`.
pub fn isomorphism(a: &Instance, b: &Instance) -> Option<Mapping> {
    if a.len() != b.len() {
        return None;
    }
    let mut pa: Vec<_> = a.iter().map(|x| (&x.predicate, x.arity())).collect();
    let mut pb: Vec<_> = b.iter().map(|x| (&x.predicate, x.arity())).collect();
    pa.sort();
    pb.sort();
    if pa != pb {
        return None;
    }
    let (ca, cb) = refine_together(a, b)?;
    let compat =
        |s: &Term, t: &Term| s.is_variable() == t.is_variable() && s.is_null() == t.is_null() && ca.get(s) == cb.get(t);
    let src = a.to_vec();
    Matcher::new(&src, b)
        .injective(true)
        .compat(&compat)
        .first(&Mapping::new())
}

pub fn isomorphic(a: &Instance, b: &Instance) -> bool {
    isomorphism(a, b).is_some()
}

pub fn isomorphic_atoms(a: &[Atom], b: &[Atom]) -> bool {
    isomorphic(
        &Instance::from_atoms(a.iter().cloned()),
        &Instance::from_atoms(b.iter().cloned()),
    )
}

fn hash_of<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

fn initial_colors(i: &Instance) -> HashMap<Term, u64> {
    i.terms()
        .into_iter()
        .filter(|t| !t.is_constant())
        .map(|t| {
            let c = if t.is_variable() { 1 } else { 2 };
            (t, c)
        })
        .collect()
}

fn refine_step(i: &Instance, colors: &HashMap<Term, u64>) -> HashMap<Term, u64> {
    let mut contrib: HashMap<&Term, Vec<u64>> = HashMap::new();
    for a in i.iter() {
        let args: Vec<u64> = a
            .args
            .iter()
            .map(|t| match t {
                Term::Constant(c) => hash_of(&("c", c)),
                _ => colors[t],
            })
            .collect();
        let sig = hash_of(&(&a.predicate, &args));
        for (p, t) in a.args.iter().enumerate() {
            if !t.is_constant() {
                contrib.entry(t).or_default().push(hash_of(&(sig, p)));
            }
        }
    }
    colors
        .iter()
        .map(|(t, c)| {
            let mut v = contrib.remove(t).unwrap_or_default();
            v.sort_unstable();
            (t.clone(), hash_of(&(c, v)))
        })
        .collect()
}

fn histogram(colors: &HashMap<Term, u64>) -> Vec<u64> {
    let mut v: Vec<u64> = colors.values().copied().collect();
    v.sort_unstable();
    v
}

fn distinct(colors: &HashMap<Term, u64>) -> usize {
    colors.values().collect::<HashSet<_>>().len()
}

/// Colour refinement run in lockstep on both sides; `None` when the colour
/// histograms diverge, which rules out an isomorphism.
fn refine_together(a: &Instance, b: &Instance) -> Option<(HashMap<Term, u64>, HashMap<Term, u64>)> {
    let mut ca = initial_colors(a);
    let mut cb = initial_colors(b);
    let mut classes = distinct(&ca);
    loop {
        if histogram(&ca) != histogram(&cb) {
            return None;
        }
        let na = refine_step(a, &ca);
        let nb = refine_step(b, &cb);
        let k = distinct(&na);
        ca = na;
        cb = nb;
        if k == classes {
            return (histogram(&ca) == histogram(&cb)).then_some((ca, cb));
        }
        classes = k;
    }
}
