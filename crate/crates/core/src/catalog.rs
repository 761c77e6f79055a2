//! Every graph on a few vertices, one per isomorphism class.
//!
//! Classes are built by vertex extension and deduplicated by a canonical
//! adjacency key: colour refinement orders the vertices, and the key is the
//! smallest upper-triangle bit string over permutations inside colour cells.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::StaticGraph;

pub const CATALOG_MAX_N: usize = 8;

type Adj = Vec<u16>;

fn key(adj: &[u16], order: &[usize]) -> u64 {
    let n = order.len();
    let mut k = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            k = k << 1 | (adj[order[i]] >> order[j] & 1) as u64;
        }
    }
    k
}

fn refine(adj: &[u16]) -> Vec<usize> {
    let n = adj.len();
    let mut colour: Vec<usize> = adj.iter().map(|r| r.count_ones() as usize).collect();
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|u| {
                let mut s: Vec<usize> = (0..n).filter(|&v| adj[u] >> v & 1 == 1).map(|v| colour[v]).collect();
                s.sort_unstable();
                (colour[u], s)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sig.iter().collect();
        let index: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sig.iter().map(|s| index.binary_search(&s).unwrap()).collect();
        let before = colour.iter().collect::<BTreeSet<_>>().len();
        if index.len() == before {
            return next;
        }
        colour = next;
    }
}

fn permute_cells(cells: &[Vec<usize>], at: usize, order: &mut Vec<usize>, adj: &[u16], best: &mut u64) {
    if at == cells.len() {
        *best = (*best).min(key(adj, order));
        return;
    }
    let mut cell = cells[at].clone();
    let len = cell.len();
    heap_permutations(&mut cell, len, &mut |perm| {
        let len = order.len();
        order.extend_from_slice(perm);
        permute_cells(cells, at + 1, order, adj, best);
        order.truncate(len);
    });
}

fn heap_permutations(a: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(a);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(a, k - 1, f);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permutations(a, k - 1, f);
}

fn canonical(adj: &[u16]) -> u64 {
    let colour = refine(adj);
    let classes = colour.iter().max().map_or(0, |c| c + 1);
    let mut cells = vec![Vec::new(); classes];
    for (u, &c) in colour.iter().enumerate() {
        cells[c].push(u);
    }
    let mut best = u64::MAX;
    permute_cells(&cells, 0, &mut Vec::with_capacity(adj.len()), adj, &mut best);
    best
}

fn from_key(n: usize, k: u64) -> Adj {
    let mut adj = vec![0u16; n];
    let mut bit = (n * n.saturating_sub(1) / 2) as u32;
    for i in 0..n {
        for j in i + 1..n {
            bit -= 1;
            if k >> bit & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

fn to_graph(adj: &[u16]) -> StaticGraph {
    let n = adj.len();
    let edges = (0..n).flat_map(|u| (u + 1..n).filter(move |&v| adj[u] >> v & 1 == 1).map(move |v| (u, v)));
    StaticGraph::from_edges(n, edges.collect::<Vec<_>>()).expect("catalog edges are simple")
}

fn keys(n: usize) -> Vec<u64> {
    if n <= 1 {
        return vec![0];
    }
    let smaller = keys(n - 1);
    let found: BTreeSet<u64> = smaller
        .par_iter()
        .flat_map_iter(|&k| {
            let base = from_key(n - 1, k);
            (0u16..1 << (n - 1)).map(move |nbrs| {
                let mut adj = base.clone();
                adj.push(nbrs);
                for (v, row) in adj.iter_mut().enumerate().take(n - 1) {
                    *row |= (nbrs >> v & 1) << (n - 1);
                }
                canonical(&adj)
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    found.into_iter().collect()
}

/// One representative of every isomorphism class on `n` vertices, in a
/// fixed order.
pub fn all_graphs(n: usize) -> Result<Vec<StaticGraph>> {
    if n > CATALOG_MAX_N {
        return Err(Error::Capability(format!("graph catalog stops at n = {CATALOG_MAX_N}")));
    }
    Ok(keys(n).into_iter().map(|k| to_graph(&from_key(n, k))).collect())
}

pub fn connected_graphs(n: usize) -> Result<Vec<StaticGraph>> {
    Ok(all_graphs(n)?.into_iter().filter(|g| g.is_connected()).collect())
}

/// Connected classes for every size in `lo..=hi`.
pub fn connected_graphs_up_to(lo: usize, hi: usize) -> Result<Vec<StaticGraph>> {
    let mut out = Vec::new();
    for n in lo..=hi {
        out.extend(connected_graphs(n)?);
    }
    Ok(out)
}
