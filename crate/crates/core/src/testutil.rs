//! Small synthetic benchmarks for unit tests.

use crate::kgstore::{Benchmark, NamedTriple};

fn t(h: String, r: &str, tl: String) -> NamedTriple {
    (h, r.to_owned(), tl)
}

/// Chain-structured graph over `n` entities prefixed by `p`: `next` links
/// neighbours, `skip` links every even entity two ahead, `back` points
/// every third link backwards.
pub fn chain(p: &str, n: usize) -> Vec<NamedTriple> {
    let e = |i: usize| format!("{p}{i}");
    let mut out = Vec::new();
    for i in 0..n - 1 {
        out.push(t(e(i), "next", e(i + 1)));
        if i % 3 == 0 {
            out.push(t(e(i + 1), "back", e(i)));
        }
    }
    for i in (0..n - 2).step_by(2) {
        out.push(t(e(i), "skip", e(i + 2)));
    }
    out
}

/// Roughly fifty training triples; a few `skip` facts are held out for
/// validation and a disjoint copy of the chain forms the test side.
pub fn toy_benchmark() -> Benchmark {
    let mut train = chain("a", 30);
    let valid: Vec<NamedTriple> = train.iter().filter(|x| x.1 == "skip").step_by(3).cloned().collect();
    train.retain(|x| !valid.contains(x));
    let mut graph = chain("b", 20);
    let test: Vec<NamedTriple> = graph.iter().filter(|x| x.1 == "skip").step_by(2).cloned().collect();
    graph.retain(|x| !test.contains(x));
    Benchmark::from_named(&train, &valid, &graph, &test).expect("toy benchmark")
}
