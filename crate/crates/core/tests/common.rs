#![allow(dead_code)]

use gdfractal_core::construct::{build_gdifs, GdIfs, ParamPoint};
use gdfractal_core::digraph::Digraph;
use gdfractal_core::exactnum::{Monomial, NumericContext, Rational, Sign, SignedMonomial};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Out-neighbour lists; every vertex has out-degree 2 or 3.
pub fn adjacency(max_vertices: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1..=max_vertices).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0..n, 2..=3), n))
}

pub fn graph(adj: &[Vec<usize>]) -> Digraph {
    let edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(v, outs)| outs.iter().map(move |&w| (v + 1, w + 1)))
        .collect();
    Digraph::numbered(adj.len(), &edges).unwrap()
}

/// Ratio `±1/k` with `k > 3` and positive fractional gaps per edge slot.
#[derive(Clone, Debug)]
pub struct RandomSystem {
    pub adj: Vec<Vec<usize>>,
    pub dens: Vec<u64>,
    pub negative: Vec<bool>,
    pub gaps: Vec<(u64, u64)>,
}

pub fn system(max_vertices: usize) -> impl Strategy<Value = RandomSystem> {
    adjacency(max_vertices).prop_flat_map(|adj| {
        let e: usize = adj.iter().map(Vec::len).sum();
        (
            Just(adj),
            prop::collection::vec(4u64..12, e),
            prop::collection::vec(any::<bool>(), e),
            prop::collection::vec((1u64..6, 1u64..8), e),
        )
            .prop_map(|(adj, dens, negative, gaps)| RandomSystem { adj, dens, negative, gaps })
    })
}

impl RandomSystem {
    pub fn point(&self) -> ParamPoint {
        let g = graph(&self.adj);
        let ratios = (0..g.edge_count())
            .map(|e| {
                let sign = if self.negative[e] { Sign::Negative } else { Sign::Positive };
                SignedMonomial::new(sign, Monomial::ratio(1, self.dens[e]))
            })
            .collect();
        let mut slot = 0;
        let gaps = (0..g.vertex_count())
            .map(|v| {
                (1..g.out_degree(v))
                    .map(|_| {
                        let (a, b) = self.gaps[slot];
                        slot += 1;
                        Some(Monomial::ratio(a, b))
                    })
                    .collect()
            })
            .collect();
        ParamPoint::new(g, ratios, gaps).unwrap()
    }

    pub fn build(&self) -> GdIfs {
        build_gdifs(&self.point(), &NumericContext::default()).unwrap()
    }
}
