#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use vhk_core::words::{Alphabet, CyclicWord, Letter, Word};

/// Letters as nonzero integers: generator g is `g+1`, its inverse `-(g+1)`.
pub type Raw = Vec<i32>;

pub fn free_reduce(w: &[i32]) -> Raw {
    let mut out: Raw = Vec::with_capacity(w.len());
    for &c in w {
        if out.last() == Some(&-c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

pub fn cyclic_core(w: &[i32]) -> Raw {
    let mut v = free_reduce(w);
    while v.len() >= 2 && v[0] == -v[v.len() - 1] {
        v.remove(0);
        v.pop();
    }
    v
}

/// Least rotation under the letter order generator-major, inverse first.
pub fn canonical(w: &[i32]) -> Raw {
    let core = cyclic_core(w);
    let key = |r: &Raw| r.iter().map(|&c| (c.abs(), c > 0)).collect::<Vec<_>>();
    (0..core.len().max(1))
        .map(|i| core[i.min(core.len())..].iter().chain(&core[..i.min(core.len())]).copied().collect::<Raw>())
        .min_by_key(key)
        .unwrap_or_default()
}

pub fn to_raw(w: &CyclicWord) -> Raw {
    w.letters().iter().map(|l| if l.is_pos() { l.gen as i32 + 1 } else { -(l.gen as i32 + 1) }).collect()
}

pub fn from_raw(w: &[i32]) -> CyclicWord {
    CyclicWord::new(letters_of(w))
}

pub fn letters_of(w: &[i32]) -> Vec<Letter> {
    w.iter()
        .map(|&c| {
            let g = c.unsigned_abs() - 1;
            if c > 0 {
                Letter::pos(g)
            } else {
                Letter::neg(g)
            }
        })
        .collect()
}

pub fn word_from_raw(w: &[i32]) -> Word {
    Word::new(letters_of(w))
}

/// Every Type II move as (subset of vertices encoded as ints, a), a in A,
/// a^-1 not in A, nontrivial.
pub fn type_ii_moves(rank: usize) -> Vec<(Vec<i32>, i32)> {
    let verts: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    let mut out = Vec::new();
    for &a in &verts {
        let others: Vec<i32> = verts.iter().copied().filter(|&v| v != a && v != -a).collect();
        for mask in 0u32..(1 << others.len()) {
            let mut set = vec![a];
            set.extend(others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v));
            out.push((set, a));
        }
    }
    out
}

/// Independent implementation of a Type II move on raw words:
/// x -> (a^-1 if x^-1 in A) x (a if x in A), a fixed.
pub fn apply_raw(words: &[Raw], set: &[i32], a: i32) -> Vec<Raw> {
    let image = |c: i32| -> Raw {
        if c == a || c == -a {
            return vec![c];
        }
        let g = c.abs();
        let mut img = Vec::new();
        if set.contains(&-g) {
            img.push(-a);
        }
        img.push(g);
        if set.contains(&g) {
            img.push(a);
        }
        if c > 0 {
            img
        } else {
            img.iter().rev().map(|&x| -x).collect()
        }
    };
    words.iter().map(|w| canonical(&w.iter().flat_map(|&c| image(c)).collect::<Raw>())).collect()
}

fn graph_disconnected(words: &[Raw], rank: usize) -> bool {
    let n = 2 * rank;
    let idx = |c: i32| (2 * (c.unsigned_abs() as usize - 1)) + usize::from(c > 0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for w in words {
        for i in 0..w.len() {
            let (u, v) = (w[i], -w[(i + 1) % w.len()]);
            let (ru, rv) = (find(&mut parent, idx(u)), find(&mut parent, idx(v)));
            parent[ru] = rv;
        }
    }
    let roots: BTreeSet<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    roots.len() > 1
}

fn omits(words: &[Raw], rank: usize) -> bool {
    (1..=rank as i32).any(|g| words.iter().all(|w| !w.contains(&g) && !w.contains(&-g)))
}

pub fn total(words: &[Raw]) -> usize {
    words.iter().map(Vec::len).sum()
}

/// `Some(true)` for separable, `Some(false)` for diskbusting, `None` if the
/// orbit exceeded `cap` states. Explores every system reachable through
/// non-length-increasing Type II moves.
pub fn orbit_oracle(words: &[Raw], rank: usize, cap: usize) -> Option<bool> {
    let moves = type_ii_moves(rank);
    let start: Vec<Raw> = words.iter().map(|w| canonical(w)).collect();
    let mut seen: BTreeSet<Vec<Raw>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let key = |ws: &[Raw]| {
        let mut k = ws.to_vec();
        k.sort();
        k
    };
    seen.insert(key(&start));
    queue.push_back(start);
    while let Some(ws) = queue.pop_front() {
        if omits(&ws, rank) || graph_disconnected(&ws, rank) {
            return Some(true);
        }
        let len = total(&ws);
        for (set, a) in &moves {
            let next = apply_raw(&ws, set, *a);
            if total(&next) <= len && seen.insert(key(&next)) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(next);
            }
        }
    }
    Some(false)
}

/// Every cyclically reduced word of length exactly `len`, one per rotation class.
pub fn cyclic_words_of_length(rank: usize, len: usize) -> Vec<Raw> {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    let mut out = BTreeSet::new();
    let mut stack: Vec<Raw> = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        if w.len() == len {
            if len == 0 || w[0] != -w[len - 1] {
                out.insert(canonical(&w));
            }
            continue;
        }
        for &c in &letters {
            if w.last() != Some(&-c) {
                let mut n = w.clone();
                n.push(c);
                stack.push(n);
            }
        }
    }
    out.into_iter().collect()
}

pub fn random_raw<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Raw {
    let len = rng.gen_range(1..=max_len);
    let w: Raw = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=rank as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    cyclic_core(&w)
}

/// Random nonempty system of cyclic words over `rank` generators.
pub fn random_system<R: Rng>(rng: &mut R, rank: usize, max_total: usize) -> Vec<CyclicWord> {
    loop {
        let count = rng.gen_range(1..=3usize);
        let mut ws = Vec::new();
        let mut budget = max_total;
        for _ in 0..count {
            if budget == 0 {
                break;
            }
            let w = random_raw(rng, rank, budget);
            budget -= w.len().min(budget);
            if !w.is_empty() {
                ws.push(from_raw(&w));
            }
        }
        if !ws.is_empty() {
            return ws;
        }
    }
}

pub fn alphabet(rank: usize) -> Alphabet {
    let names = ["x", "y", "z", "u", "v", "w"];
    Alphabet::new(&names[..rank]).unwrap()
}

/// Occurrences of each signed letter in the words, indexed `2g + pos`.
pub fn letter_counts(words: &[CyclicWord], rank: usize) -> Vec<usize> {
    let mut c = vec![0; 2 * rank];
    for w in words {
        for l in w.letters() {
            c[l.index()] += 1;
        }
    }
    c
}

/// Applies up to `steps` random Whitehead moves (Type II or signed
/// permutations), redrawing any move that would push the total length past
/// `max_total`.
pub fn scramble<R: Rng>(rng: &mut R, words: &[CyclicWord], rank: usize, steps: usize, max_total: usize) -> Vec<CyclicWord> {
    use vhk_core::whitehead::{apply_move, raw_type_ii_moves, total_length, WhiteheadMove};
    let type_ii = raw_type_ii_moves(rank);
    let mut cur = words.to_vec();
    for _ in 0..steps {
        for _attempt in 0..20 {
            let mv = if type_ii.is_empty() || rng.gen_bool(0.2) {
                let mut perm: Vec<u32> = (0..rank as u32).collect();
                for i in (1..perm.len()).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                let images = perm.iter().map(|&g| if rng.gen_bool(0.5) { Letter::pos(g) } else { Letter::neg(g) }).collect();
                WhiteheadMove::type_i(images).unwrap()
            } else {
                type_ii[rng.gen_range(0..type_ii.len())].clone()
            };
            let (next, _) = apply_move(&mv, &cur, rank).unwrap();
            if total_length(&next) <= max_total {
                cur = next;
                break;
            }
        }
    }
    cur
}
