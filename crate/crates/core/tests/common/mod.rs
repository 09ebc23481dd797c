//! Independent brute-force minimax that judges positions by graph structure
//! instead of winning-set lists.

use std::collections::HashMap;
use wcg_core::graph::{Edge, UnionFind, Vertex};
use wcg_core::solver::{edge_universe, Tau};

#[derive(Clone, Copy)]
pub enum Goal {
    Connected,
    PerfectMatching,
}

fn client_wins(goal: Goal, n: usize, client: &[Edge]) -> bool {
    match goal {
        Goal::Connected => {
            let mut uf = UnionFind::new(n);
            let joins = client.iter().filter(|e| uf.union(e.lo() as usize, e.hi() as usize)).count();
            joins == n - 1
        }
        Goal::PerfectMatching => {
            fn search(left: &mut Vec<bool>, client: &[Edge]) -> bool {
                let Some(v) = left.iter().position(|&x| x) else { return true };
                left[v] = false;
                for e in client.iter().filter(|e| e.touches(v as Vertex)) {
                    let u = e.other(v as Vertex).unwrap() as usize;
                    if left[u] {
                        left[u] = false;
                        if search(left, client) {
                            return true;
                        }
                        left[u] = true;
                    }
                }
                left[v] = true;
                false
            }
            search(&mut vec![true; n], client)
        }
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = subsets(&items[1..], k - 1);
    for s in &mut out {
        s.insert(0, items[0]);
    }
    out.extend(subsets(&items[1..], k));
    out
}

/// Minimum number of further rounds Waiter needs, or `None` if she cannot win.
fn oracle(goal: Goal, n: usize, bias: usize, owner: &mut Vec<u8>, memo: &mut HashMap<Vec<u8>, Option<u32>>) -> Option<u32> {
    let edges = edge_universe(n);
    let client: Vec<Edge> = (0..edges.len()).filter(|&i| owner[i] == 2).map(|i| edges[i]).collect();
    if client_wins(goal, n, &client) {
        return Some(0);
    }
    if let Some(v) = memo.get(owner) {
        return *v;
    }
    let reachable: Vec<Edge> = (0..edges.len()).filter(|&i| owner[i] != 1).map(|i| edges[i]).collect();
    if !client_wins(goal, n, &reachable) {
        memo.insert(owner.clone(), None);
        return None;
    }
    let free: Vec<usize> = (0..edges.len()).filter(|&i| owner[i] == 0).collect();
    let width = (bias + 1).min(free.len());
    let mut best: Option<u32> = None;
    if width > 0 {
        for offer in subsets(&free, width) {
            let mut worst = Some(0);
            for &pick in &offer {
                for &x in &offer {
                    owner[x] = if x == pick { 2 } else { 1 };
                }
                let v = oracle(goal, n, bias, owner, memo);
                for &x in &offer {
                    owner[x] = 0;
                }
                worst = match (worst, v) {
                    (Some(a), Some(b)) => Some(a.max(b + 1)),
                    _ => None,
                };
                if worst.is_none() {
                    break;
                }
            }
            best = match (best, worst) {
                (None, w) => w,
                (b, None) => b,
                (Some(a), Some(b)) => Some(a.min(b)),
            };
        }
    }
    memo.insert(owner.clone(), best);
    best
}

pub fn brute(goal: Goal, n: usize, bias: usize) -> Tau {
    let mut owner = vec![0u8; edge_universe(n).len()];
    match oracle(goal, n, bias, &mut owner, &mut HashMap::new()) {
        Some(r) => Tau::Rounds(r),
        None => Tau::Unwinnable,
    }
}
