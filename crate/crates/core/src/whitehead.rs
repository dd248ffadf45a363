//! Whitehead graphs, Whitehead automorphisms and the separable/diskbusting
//! decision for systems of cyclic words.
//!
//! Edge convention: each cyclically adjacent pair `c1 c2` of a word gives an
//! edge between `c1` and `c2^-1`, where a letter doubles as the signed vertex
//! of its generator.
//!
//! Type II action of `(A, a)`: `a` is fixed and every other generator maps as
//! `x -> [a^-1 if x- in A] x [a if x+ in A]`.

use std::collections::{HashMap, HashSet, VecDeque};

use serde_json::json;
use thiserror::Error;

use crate::words::{Alphabet, CyclicWord, Letter, Morphism, Word, WordError};

pub type SignedVertex = Letter;

pub const DEFAULT_DECIDE_BOUND: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WhiteheadError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("empty word system")]
    EmptySystem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: SignedVertex,
    pub v: SignedVertex,
    /// `(word index, position)` of the adjacency that produced the edge.
    pub source: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhiteheadGraph {
    rank: usize,
    edges: Vec<Edge>,
}

impl WhiteheadGraph {
    pub fn from_words(words: &[CyclicWord], rank: usize) -> WhiteheadGraph {
        let mut edges = Vec::new();
        for (wi, w) in words.iter().enumerate() {
            let l = w.letters();
            for i in 0..l.len() {
                let next = l[(i + 1) % l.len()];
                edges.push(Edge { u: l[i], v: next.inverse(), source: Some((wi, i)) });
            }
        }
        WhiteheadGraph { rank, edges }
    }

    pub fn from_edges(rank: usize, pairs: &[(SignedVertex, SignedVertex)]) -> WhiteheadGraph {
        let edges = pairs.iter().map(|&(u, v)| Edge { u, v, source: None }).collect();
        WhiteheadGraph { rank, edges }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = SignedVertex> {
        (0..2 * self.rank).map(Letter::from_index)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; 2 * self.rank];
        for e in &self.edges {
            d[e.u.index()] += 1;
            d[e.v.index()] += 1;
        }
        d
    }

    pub fn degree(&self, v: SignedVertex) -> usize {
        self.degrees()[v.index()]
    }

    pub fn isolated(&self) -> Vec<SignedVertex> {
        let d = self.degrees();
        self.vertices().filter(|v| d[v.index()] == 0).collect()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); 2 * self.rank];
        for e in &self.edges {
            let (a, b) = (e.u.index(), e.v.index());
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected components in vertex order. Isolated vertices form singleton
    /// components unless `ignore_isolated` is set, in which case they are
    /// dropped.
    pub fn components(&self, ignore_isolated: bool) -> Vec<Vec<SignedVertex>> {
        self.components_without(None, ignore_isolated)
    }

    fn components_without(&self, removed: Option<usize>, ignore_isolated: bool) -> Vec<Vec<SignedVertex>> {
        let adj = self.adjacency();
        let deg = self.degrees();
        let n = 2 * self.rank;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || Some(s) == removed || (ignore_isolated && deg[s] == 0) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &y in &adj[x] {
                    if !seen[y] && Some(y) != removed {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp.into_iter().map(Letter::from_index).collect());
        }
        out
    }

    pub fn is_connected(&self, ignore_isolated: bool) -> bool {
        self.components(ignore_isolated).len() <= 1
    }

    /// Articulation points among non-isolated vertices, in vertex order.
    pub fn cut_vertices(&self) -> Vec<SignedVertex> {
        let adj = self.adjacency();
        let n = adj.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut is_cut = vec![false; n];
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX || adj[root].is_empty() {
                continue;
            }
            // iterative DFS: (vertex, parent, next neighbour index)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            while let Some(&mut (x, parent, ref mut next)) = stack.last_mut() {
                if let Some(&y) = adj[x].get(*next) {
                    *next += 1;
                    if disc[y] == usize::MAX {
                        disc[y] = timer;
                        low[y] = timer;
                        timer += 1;
                        if x == root {
                            root_children += 1;
                        }
                        stack.push((y, x, 0));
                    } else if y != parent {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[x]);
                        if parent != root && low[x] >= disc[parent] {
                            is_cut[parent] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        (0..n).filter(|&i| is_cut[i]).map(Letter::from_index).collect()
    }

    /// Components of the graph with `v` removed, isolated vertices ignored.
    pub fn branches_at(&self, v: SignedVertex) -> Vec<Vec<SignedVertex>> {
        self.components_without(Some(v.index()), true)
    }

    /// Edges with exactly one end in `set`.
    pub fn capacity(&self, set: &[SignedVertex]) -> usize {
        let mut inside = vec![false; 2 * self.rank];
        for v in set {
            inside[v.index()] = true;
        }
        self.edges.iter().filter(|e| inside[e.u.index()] != inside[e.v.index()]).count()
    }

    pub fn to_dot(&self, alphabet: &Alphabet, words: &[String]) -> String {
        let mut s = String::from("graph whitehead {\n");
        s.push_str(&format!("  label=\"{}\";\n", words.join(", ")));
        for v in self.vertices() {
            s.push_str(&format!("  \"{}\";\n", alphabet.vertex_name(v)));
        }
        for e in &self.edges {
            s.push_str(&format!("  \"{}\" -- \"{}\";\n", alphabet.vertex_name(e.u), alphabet.vertex_name(e.v)));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, alphabet: &Alphabet, words: &[String]) -> serde_json::Value {
        let vertices: Vec<String> = self.vertices().map(|v| alphabet.vertex_name(v)).collect();
        let edges: Vec<[String; 2]> = self
            .edges
            .iter()
            .map(|e| [alphabet.vertex_name(e.u), alphabet.vertex_name(e.v)])
            .collect();
        json!({ "vertices": vertices, "edges": edges, "words": words })
    }
}

pub fn build_graph(words: &[CyclicWord], alphabet: &Alphabet) -> Result<WhiteheadGraph, WhiteheadError> {
    for w in words {
        alphabet.check(w.letters())?;
    }
    Ok(WhiteheadGraph::from_words(words, alphabet.rank()))
}

pub fn is_connected(g: &WhiteheadGraph, ignore_isolated: bool) -> bool {
    g.is_connected(ignore_isolated)
}

pub fn cut_vertices(g: &WhiteheadGraph) -> Vec<SignedVertex> {
    g.cut_vertices()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WhiteheadMove {
    /// Generator `i` maps to the single letter `images[i]`.
    TypeI { images: Vec<Letter> },
    /// `set` is sorted and contains `a` but not `a^-1`.
    TypeII { set: Vec<SignedVertex>, a: SignedVertex },
}

impl WhiteheadMove {
    pub fn type_i(images: Vec<Letter>) -> Result<WhiteheadMove, WhiteheadError> {
        let mut hit = vec![false; images.len()];
        for l in &images {
            match hit.get_mut(l.gen as usize) {
                Some(h) if !*h => *h = true,
                _ => return Err(WhiteheadError::InvalidMove("type I images must permute the generators".into())),
            }
        }
        Ok(WhiteheadMove::TypeI { images })
    }

    pub fn type_ii(mut set: Vec<SignedVertex>, a: SignedVertex) -> Result<WhiteheadMove, WhiteheadError> {
        set.sort_unstable();
        set.dedup();
        if !set.contains(&a) {
            return Err(WhiteheadError::InvalidMove("a must belong to A".into()));
        }
        if set.contains(&a.inverse()) {
            return Err(WhiteheadError::InvalidMove("a^-1 must not belong to A".into()));
        }
        Ok(WhiteheadMove::TypeII { set, a })
    }

    fn max_gen(&self) -> u32 {
        match self {
            WhiteheadMove::TypeI { images } => images.len().saturating_sub(1) as u32,
            WhiteheadMove::TypeII { set, .. } => set.iter().map(|v| v.gen).max().unwrap_or(0),
        }
    }

    pub fn automorphism(&self, rank: usize) -> Result<Morphism, WhiteheadError> {
        match self {
            WhiteheadMove::TypeI { images } => {
                if images.len() != rank {
                    return Err(WhiteheadError::InvalidMove(format!(
                        "type I move has {} images for rank {rank}",
                        images.len()
                    )));
                }
                Ok(Morphism { images: images.iter().map(|&l| Word::letter(l)).collect() })
            }
            WhiteheadMove::TypeII { set, a } => {
                if self.max_gen() as usize >= rank {
                    return Err(WordError::OutOfRange { gen: self.max_gen(), rank }.into());
                }
                let images = (0..rank as u32)
                    .map(|g| {
                        if g == a.gen {
                            return Word::generator(g);
                        }
                        let mut w = Vec::with_capacity(3);
                        if set.contains(&Letter::neg(g)) {
                            w.push(a.inverse());
                        }
                        w.push(Letter::pos(g));
                        if set.contains(&Letter::pos(g)) {
                            w.push(*a);
                        }
                        Word::new(w)
                    })
                    .collect();
                Ok(Morphism { images })
            }
        }
    }

    pub fn inverse(&self) -> WhiteheadMove {
        match self {
            WhiteheadMove::TypeI { images } => {
                let mut inv = vec![Letter::pos(0); images.len()];
                for (i, l) in images.iter().enumerate() {
                    inv[l.gen as usize] = Letter { gen: i as u32, sign: l.sign };
                }
                WhiteheadMove::TypeI { images: inv }
            }
            WhiteheadMove::TypeII { set, a } => {
                let mut s: Vec<_> = set.iter().copied().filter(|v| v != a).collect();
                s.push(a.inverse());
                s.sort_unstable();
                WhiteheadMove::TypeII { set: s, a: a.inverse() }
            }
        }
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        match self {
            WhiteheadMove::TypeI { images } => {
                let parts: Vec<String> = images.iter().map(|l| alphabet.format(&[*l])).collect();
                format!("perm[{}]", parts.join(","))
            }
            WhiteheadMove::TypeII { set, a } => {
                let parts: Vec<String> = set.iter().map(|v| alphabet.vertex_name(*v)).collect();
                format!("({{{}}},{})", parts.join(","), alphabet.vertex_name(*a))
            }
        }
    }

    /// Parses `({x+,y-},x+)`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<WhiteheadMove, WhiteheadError> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || WhiteheadError::InvalidMove(format!("cannot parse move `{text}`; expected ({{v,...}},v)"));
        let inner = t.strip_prefix("({").and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let (set_part, a_part) = inner.split_once("},").ok_or_else(bad)?;
        let vertex = |s: &str| {
            alphabet
                .parse_vertex(s)
                .ok_or_else(|| WhiteheadError::InvalidMove(format!("unknown vertex `{s}`")))
        };
        let set = set_part
            .split(',')
            .filter(|s| !s.is_empty())
            .map(vertex)
            .collect::<Result<Vec<_>, _>>()?;
        WhiteheadMove::type_ii(set, vertex(a_part)?)
    }
}

/// All `(A, a)` pairs with `a in A`, `a^-1 not in A`: `2r * 2^(2r-2)` moves.
pub fn raw_type_ii_moves(rank: usize) -> Vec<WhiteheadMove> {
    let mut out = Vec::new();
    for ai in 0..2 * rank {
        let a = Letter::from_index(ai);
        out.extend(subsets_with(rank, a).into_iter().map(|set| WhiteheadMove::TypeII { set, a }));
    }
    out
}

fn subsets_with(rank: usize, a: Letter) -> Vec<Vec<SignedVertex>> {
    let free: Vec<Letter> = (0..2 * rank).map(Letter::from_index).filter(|v| v.gen != a.gen).collect();
    (0u64..1 << free.len())
        .map(|mask| {
            let mut s: Vec<Letter> = (0..free.len()).filter(|i| mask >> i & 1 == 1).map(|i| free[i]).collect();
            s.push(a);
            s.sort_unstable();
            s
        })
        .collect()
}

/// Type II moves up to the symmetries that do not change cyclic words:
/// `(A, a)` and `(V - A, a^-1)` differ by an inner automorphism, so only
/// positive `a` is kept, and `A = {a}` and `A = V - {a^-1}` are dropped.
/// Sorted by `(|A|, a, A)`.
pub fn enumerate_moves(rank: usize) -> Vec<WhiteheadMove> {
    let mut out = Vec::new();
    for g in 0..rank as u32 {
        let a = Letter::pos(g);
        for set in subsets_with(rank, a) {
            if set.len() == 1 || set.len() == 2 * rank - 1 {
                continue;
            }
            out.push((set.len(), a, set));
        }
    }
    out.sort();
    out.into_iter().map(|(_, a, set)| WhiteheadMove::TypeII { set, a }).collect()
}

pub fn apply_move(
    m: &WhiteheadMove,
    words: &[CyclicWord],
    rank: usize,
) -> Result<(Vec<CyclicWord>, Morphism), WhiteheadError> {
    let phi = m.automorphism(rank)?;
    let out = words.iter().map(|w| phi.apply_cyclic(w)).collect::<Result<_, _>>()?;
    Ok((out, phi))
}

pub fn total_length(words: &[CyclicWord]) -> usize {
    words.iter().map(CyclicWord::len).sum()
}

/// `cap(A, V - A) - deg(a)`: the length change of a Type II move read off
/// the Whitehead graph. Only used as a cross-check; moves are applied
/// directly.
pub fn predicted_length_change(g: &WhiteheadGraph, set: &[SignedVertex], a: SignedVertex) -> i64 {
    g.capacity(set) as i64 - g.degree(a) as i64
}

/// Greedy descent: apply the shortening move with the largest gain (first in
/// move order on ties) until none shortens the system.
pub fn minimize(words: &[CyclicWord], rank: usize) -> Result<(Vec<CyclicWord>, Vec<WhiteheadMove>), WhiteheadError> {
    let moves = enumerate_moves(rank);
    let mut cur = words.to_vec();
    let mut len = total_length(&cur);
    let mut trace = Vec::new();
    loop {
        let mut best: Option<(usize, &WhiteheadMove, Vec<CyclicWord>)> = None;
        for m in &moves {
            let (next, _) = apply_move(m, &cur, rank)?;
            let l = total_length(&next);
            if l < len && best.as_ref().is_none_or(|b| l < b.0) {
                best = Some((l, m, next));
            }
        }
        match best {
            Some((l, m, next)) => {
                trace.push(m.clone());
                cur = next;
                len = l;
            }
            None => return Ok((cur, trace)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Diskbusting,
    Separable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Diskbusting => "Diskbusting",
            Verdict::Separable => "Separable",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Move at a cut vertex: `A` is a branch plus the cut vertex.
    CutVertex,
    /// Move off a component that is not closed under inversion.
    Component,
    /// Step found by the fallback search.
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub kind: StepKind,
    pub mv: WhiteheadMove,
    pub length_before: usize,
    pub length_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// After the automorphism every word omits `generator`.
    Omits { generator: u32 },
    /// After the automorphism the graph splits into components closed under
    /// inversion; `blocks` lists the generators of each.
    Partition { blocks: Vec<Vec<u32>> },
    /// Search budget used up.
    Exhausted { bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionResult {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
    pub witness: Option<Witness>,
    /// Composite of the trace moves; maps the input system to `final_words`.
    pub automorphism: Morphism,
    pub final_words: Vec<CyclicWord>,
    pub states: usize,
}

impl DecisionResult {
    pub fn omitted(&self) -> Option<u32> {
        match self.witness {
            Some(Witness::Omits { generator }) => Some(generator),
            _ => None,
        }
    }

    pub fn cut_vertex_moves(&self) -> usize {
        self.trace.iter().filter(|s| s.kind == StepKind::CutVertex).count()
    }

    /// Re-derives the verdict evidence from the input system.
    pub fn verify(&self, input: &[CyclicWord]) -> bool {
        let rank = self.automorphism.rank();
        let Ok(image) = input.iter().map(|w| self.automorphism.apply_cyclic(w)).collect::<Result<Vec<_>, _>>()
        else {
            return false;
        };
        if image != self.final_words {
            return false;
        }
        let g = WhiteheadGraph::from_words(&image, rank);
        match (&self.verdict, &self.witness) {
            (Verdict::Separable, Some(Witness::Omits { generator })) => omits_generator(&image, *generator),
            (Verdict::Separable, Some(Witness::Partition { .. })) => {
                let comps = g.components(false);
                comps.len() > 1 && comps.iter().all(|c| c.iter().all(|v| c.contains(&v.inverse())))
            }
            (Verdict::Diskbusting, None) => {
                (0..rank as u32).all(|x| !omits_generator(&image, x)) && g.is_connected(false) && g.cut_vertices().is_empty()
            }
            (Verdict::Inconclusive, Some(Witness::Exhausted { .. })) => true,
            _ => false,
        }
    }
}

pub fn omits_generator(words: &[CyclicWord], g: u32) -> bool {
    !words.iter().any(|w| w.contains_gen(g))
}

fn system_key(words: &[CyclicWord]) -> Vec<CyclicWord> {
    let mut k = words.to_vec();
    k.sort();
    k
}

enum Local {
    Done(Verdict, Option<Witness>),
    Move(StepKind, WhiteheadMove),
}

/// One step of the graph-driven procedure on a system.
fn local_step(words: &[CyclicWord], rank: usize) -> Local {
    if let Some(g) = (0..rank as u32).find(|&g| omits_generator(words, g)) {
        return Local::Done(Verdict::Separable, Some(Witness::Omits { generator: g }));
    }
    let graph = WhiteheadGraph::from_words(words, rank);
    let comps = graph.components(false);
    if comps.len() > 1 {
        for comp in &comps {
            if let Some(&a) = comp.iter().find(|v| !comp.contains(&v.inverse())) {
                let mv = WhiteheadMove::TypeII { set: comp.clone(), a };
                return Local::Move(StepKind::Component, mv);
            }
        }
        let blocks = comps.iter().map(|c| c.iter().filter(|v| v.is_pos()).map(|v| v.gen).collect()).collect();
        return Local::Done(Verdict::Separable, Some(Witness::Partition { blocks }));
    }
    let Some(&v) = graph.cut_vertices().first() else {
        return Local::Done(Verdict::Diskbusting, None);
    };
    let branch = graph
        .branches_at(v)
        .into_iter()
        .filter(|b| !b.contains(&v.inverse()))
        .min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)))
        .expect("a cut vertex has a branch avoiding its inverse");
    let mut set = branch;
    set.push(v);
    set.sort_unstable();
    Local::Move(StepKind::CutVertex, WhiteheadMove::TypeII { set, a: v })
}

fn is_terminal(words: &[CyclicWord], rank: usize) -> Option<(Verdict, Option<Witness>)> {
    match local_step(words, rank) {
        Local::Done(v, w) => Some((v, w)),
        Local::Move(..) => None,
    }
}

/// Decides whether a system of cyclic words is separable (some free splitting
/// carries every word into a factor) or diskbusting.
///
/// The system is driven by its Whitehead graph: components that are not
/// closed under inversion and cut vertices each yield a shortening Type II
/// move. When a move fails to shorten, a breadth-first search over
/// non-lengthening moves takes over until `bound` states have been seen.
pub fn decide_separable(words: &[CyclicWord], rank: usize, bound: usize) -> Result<DecisionResult, WhiteheadError> {
    if words.is_empty() {
        return Err(WhiteheadError::EmptySystem);
    }
    for w in words {
        if let Some(l) = w.letters().iter().find(|l| l.gen as usize >= rank) {
            return Err(WordError::OutOfRange { gen: l.gen, rank }.into());
        }
    }
    let mut cur = words.to_vec();
    let mut phi = Morphism::identity(rank);
    let mut trace = Vec::new();
    let mut visited: HashSet<Vec<CyclicWord>> = HashSet::new();
    let mut states = 0;
    loop {
        states += 1;
        let fresh = visited.insert(system_key(&cur));
        if states > bound {
            return Ok(DecisionResult {
                verdict: Verdict::Inconclusive,
                trace,
                witness: Some(Witness::Exhausted { bound }),
                automorphism: phi,
                final_words: cur,
                states,
            });
        }
        let step = match local_step(&cur, rank) {
            Local::Done(verdict, witness) => {
                return Ok(DecisionResult { verdict, trace, witness, automorphism: phi, final_words: cur, states });
            }
            Local::Move(kind, mv) if fresh => {
                let (next, aut) = apply_move(&mv, &cur, rank)?;
                let before = total_length(&cur);
                let after = total_length(&next);
                (after < before).then_some((kind, mv, next, aut, before, after))
            }
            Local::Move(..) => None,
        };
        match step {
            Some((kind, mv, next, aut, before, after)) => {
                trace.push(TraceStep { kind, mv, length_before: before, length_after: after });
                phi = phi.then(&aut)?;
                cur = next;
            }
            None => {
                let budget = bound.saturating_sub(states);
                match search(&cur, rank, budget)? {
                    SearchOutcome::Found(path, next, verdict) => {
                        states += path.len();
                        let mut before = total_length(&cur);
                        for mv in path {
                            let (_, aut) = apply_move(&mv, &cur, rank)?;
                            cur = cur.iter().map(|w| aut.apply_cyclic(w)).collect::<Result<_, _>>()?;
                            let after = total_length(&cur);
                            trace.push(TraceStep { kind: StepKind::Search, mv, length_before: before, length_after: after });
                            phi = phi.then(&aut)?;
                            before = after;
                        }
                        debug_assert_eq!(cur, next);
                        if let Some((verdict, witness)) = verdict {
                            return Ok(DecisionResult { verdict, trace, witness, automorphism: phi, final_words: cur, states });
                        }
                    }
                    SearchOutcome::Exhausted(seen) => {
                        return Ok(DecisionResult {
                            verdict: Verdict::Inconclusive,
                            trace,
                            witness: Some(Witness::Exhausted { bound }),
                            automorphism: phi,
                            final_words: cur,
                            states: states + seen,
                        });
                    }
                }
            }
        }
    }
}

enum SearchOutcome {
    /// Path to a state that is either terminal or strictly shorter.
    Found(Vec<WhiteheadMove>, Vec<CyclicWord>, Option<(Verdict, Option<Witness>)>),
    Exhausted(usize),
}

fn search(start: &[CyclicWord], rank: usize, budget: usize) -> Result<SearchOutcome, WhiteheadError> {
    let moves = enumerate_moves(rank);
    let len0 = total_length(start);
    let mut parent: HashMap<Vec<CyclicWord>, Option<(Vec<CyclicWord>, usize)>> = HashMap::new();
    parent.insert(system_key(start), None);
    let mut queue = VecDeque::from([start.to_vec()]);
    let path_to = |parent: &HashMap<Vec<CyclicWord>, Option<(Vec<CyclicWord>, usize)>>, end: &[CyclicWord]| {
        let mut path = Vec::new();
        let mut k = system_key(end);
        while let Some(Some((prev, mi))) = parent.get(&k) {
            path.push(moves[*mi].clone());
            k = system_key(prev);
        }
        path.reverse();
        path
    };
    while let Some(cur) = queue.pop_front() {
        for (mi, mv) in moves.iter().enumerate() {
            if parent.len() >= budget {
                return Ok(SearchOutcome::Exhausted(parent.len()));
            }
            let (next, _) = apply_move(mv, &cur, rank)?;
            let l = total_length(&next);
            if l > len0 || parent.contains_key(&system_key(&next)) {
                continue;
            }
            parent.insert(system_key(&next), Some((cur.clone(), mi)));
            let terminal = is_terminal(&next, rank);
            if l < len0 || terminal.is_some() {
                let path = path_to(&parent, &next);
                return Ok(SearchOutcome::Found(path, next, terminal));
            }
            queue.push_back(next);
        }
    }
    Ok(SearchOutcome::Exhausted(parent.len()))
}
