//! Reverse-mode differentiation over vector-valued nodes.
//!
//! A [`Tape`] borrows a [`ParamStore`] read-only and records every operation
//! of a forward pass as a node holding its value. Scalars are 1-element
//! vectors. [`Tape::backward`] walks the nodes in reverse and returns one
//! gradient matrix per registered parameter, zero for parameters the loss
//! never touched.

use super::matrix::{leaky, matvec_unchecked, softmax_unchecked, Matrix};
use super::NumError;

/// Handle to a registered parameter tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub usize);

/// Named parameter tensors in registration order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    names: Vec<String>,
    tensors: Vec<Matrix>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, tensor: Matrix) -> ParamId {
        self.names.push(name.into());
        self.tensors.push(tensor);
        ParamId(self.tensors.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &Matrix {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Matrix {
        &mut self.tensors[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &str, &Matrix)> {
        self.names
            .iter()
            .zip(&self.tensors)
            .enumerate()
            .map(|(i, (n, t))| (ParamId(i), n.as_str(), t))
    }

    pub fn tensors(&self) -> &[Matrix] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Matrix] {
        &mut self.tensors
    }

    pub fn zeros_like(&self) -> Gradients {
        Gradients {
            tensors: self.tensors.iter().map(|t| Matrix::zeros(t.rows(), t.cols())).collect(),
        }
    }
}

/// One gradient tensor per parameter, shapes identical to the store.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    tensors: Vec<Matrix>,
}

impl Gradients {
    pub fn get(&self, id: ParamId) -> &Matrix {
        &self.tensors[id.0]
    }

    pub fn tensors(&self) -> &[Matrix] {
        &self.tensors
    }

    /// Adds `other` into `self` entrywise.
    pub fn accumulate(&mut self, other: &Gradients) -> Result<(), NumError> {
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            a.add_scaled(b, 1.0)?;
        }
        Ok(())
    }
}

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Clone, Debug)]
enum Op {
    Input,
    Row { param: ParamId, row: usize },
    MatVec { param: ParamId, x: usize },
    Sum(Vec<usize>),
    Sub(usize, usize),
    Relu(usize),
    LeakyRelu(usize, f64),
    Dot(usize, usize),
    Softmax(usize),
    Stack(Vec<usize>),
    Index(usize, usize),
    Scale { x: usize, s: usize },
    Concat(usize, usize),
}

impl Op {
    fn inputs(&self) -> Vec<usize> {
        match self {
            Op::Input | Op::Row { .. } => vec![],
            Op::MatVec { x, .. } => vec![*x],
            Op::Sum(xs) | Op::Stack(xs) => xs.clone(),
            Op::Sub(a, b) | Op::Dot(a, b) | Op::Concat(a, b) => vec![*a, *b],
            Op::Relu(x) | Op::LeakyRelu(x, _) | Op::Softmax(x) | Op::Index(x, _) => vec![*x],
            Op::Scale { x, s } => vec![*x, *s],
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    value: Vec<f64>,
    op: Op,
}

/// Operation recorder for one forward pass.
pub struct Tape<'p> {
    params: &'p ParamStore,
    nodes: Vec<Node>,
}

impl<'p> Tape<'p> {
    pub fn new(params: &'p ParamStore) -> Self {
        Self {
            params,
            nodes: Vec::new(),
        }
    }

    pub fn params(&self) -> &'p ParamStore {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &[f64] {
        &self.nodes[v.0].value
    }

    /// Value of a 1-element node.
    pub fn scalar(&self, v: Var) -> f64 {
        self.nodes[v.0].value[0]
    }

    fn push(&mut self, value: Vec<f64>, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    fn check(&self, op: &'static str, value: &[f64]) -> Result<(), NumError> {
        super::matrix::check_finite(op, value)
    }

    fn node(&self, v: Var) -> Result<&Node, NumError> {
        self.nodes.get(v.0).ok_or(NumError::UnknownNode(v.0))
    }

    /// Constant input; receives no parameter gradient.
    pub fn input(&mut self, value: Vec<f64>) -> Result<Var, NumError> {
        self.check("input", &value)?;
        Ok(self.push(value, Op::Input))
    }

    /// Row `row` of parameter `param`, e.g. an embedding lookup.
    pub fn row(&mut self, param: ParamId, row: usize) -> Result<Var, NumError> {
        let m = self.params.get(param);
        if row >= m.rows() {
            return Err(NumError::Shape {
                op: "row",
                expected: m.rows(),
                actual: row,
            });
        }
        let value = m.row(row).to_vec();
        self.check("row", &value)?;
        Ok(self.push(value, Op::Row { param, row }))
    }

    pub fn matvec(&mut self, param: ParamId, x: Var) -> Result<Var, NumError> {
        let m = self.params.get(param);
        let xv = &self.node(x)?.value;
        if m.cols() != xv.len() {
            return Err(NumError::Shape {
                op: "matvec",
                expected: m.cols(),
                actual: xv.len(),
            });
        }
        let value = matvec_unchecked(m, xv);
        self.check("matvec", &value)?;
        Ok(self.push(value, Op::MatVec { param, x: x.0 }))
    }

    /// Elementwise sum of equally sized vectors.
    pub fn sum(&mut self, xs: &[Var]) -> Result<Var, NumError> {
        let first = xs.first().ok_or(NumError::Empty { op: "sum" })?;
        let mut value = self.node(*first)?.value.clone();
        for x in &xs[1..] {
            let xv = &self.node(*x)?.value;
            if xv.len() != value.len() {
                return Err(NumError::Shape {
                    op: "sum",
                    expected: value.len(),
                    actual: xv.len(),
                });
            }
            for (a, b) in value.iter_mut().zip(xv) {
                *a += b;
            }
        }
        self.check("sum", &value)?;
        Ok(self.push(value, Op::Sum(xs.iter().map(|v| v.0).collect())))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        self.sum(&[a, b])
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        let av = &self.node(a)?.value;
        let bv = &self.node(b)?.value;
        if av.len() != bv.len() {
            return Err(NumError::Shape {
                op: "sub",
                expected: av.len(),
                actual: bv.len(),
            });
        }
        let value: Vec<f64> = av.iter().zip(bv).map(|(x, y)| x - y).collect();
        self.check("sub", &value)?;
        Ok(self.push(value, Op::Sub(a.0, b.0)))
    }

    pub fn relu(&mut self, x: Var) -> Result<Var, NumError> {
        let value = self.node(x)?.value.iter().map(|v| v.max(0.0)).collect();
        Ok(self.push(value, Op::Relu(x.0)))
    }

    pub fn leaky_relu(&mut self, x: Var, slope: f64) -> Result<Var, NumError> {
        let value = self.node(x)?.value.iter().map(|&v| leaky(v, slope)).collect();
        Ok(self.push(value, Op::LeakyRelu(x.0, slope)))
    }

    /// Scalar inner product.
    pub fn dot(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        let av = &self.node(a)?.value;
        let bv = &self.node(b)?.value;
        if av.len() != bv.len() {
            return Err(NumError::Shape {
                op: "dot",
                expected: av.len(),
                actual: bv.len(),
            });
        }
        let value = vec![av.iter().zip(bv).map(|(x, y)| x * y).sum()];
        self.check("dot", &value)?;
        Ok(self.push(value, Op::Dot(a.0, b.0)))
    }

    pub fn softmax(&mut self, x: Var) -> Result<Var, NumError> {
        let xv = &self.node(x)?.value;
        if xv.is_empty() {
            return Err(NumError::Empty { op: "softmax" });
        }
        let value = softmax_unchecked(xv);
        self.check("softmax", &value)?;
        Ok(self.push(value, Op::Softmax(x.0)))
    }

    /// Packs scalar nodes into one vector.
    pub fn stack(&mut self, scalars: &[Var]) -> Result<Var, NumError> {
        if scalars.is_empty() {
            return Err(NumError::Empty { op: "stack" });
        }
        let mut value = Vec::with_capacity(scalars.len());
        for s in scalars {
            let sv = &self.node(*s)?.value;
            if sv.len() != 1 {
                return Err(NumError::Shape {
                    op: "stack",
                    expected: 1,
                    actual: sv.len(),
                });
            }
            value.push(sv[0]);
        }
        Ok(self.push(value, Op::Stack(scalars.iter().map(|v| v.0).collect())))
    }

    pub fn index(&mut self, x: Var, i: usize) -> Result<Var, NumError> {
        let xv = &self.node(x)?.value;
        let value = *xv.get(i).ok_or(NumError::Shape {
            op: "index",
            expected: xv.len(),
            actual: i,
        })?;
        Ok(self.push(vec![value], Op::Index(x.0, i)))
    }

    /// Vector `x` times scalar node `s`.
    pub fn scale(&mut self, x: Var, s: Var) -> Result<Var, NumError> {
        let sv = &self.node(s)?.value;
        if sv.len() != 1 {
            return Err(NumError::Shape {
                op: "scale",
                expected: 1,
                actual: sv.len(),
            });
        }
        let factor = sv[0];
        let value: Vec<f64> = self.node(x)?.value.iter().map(|v| v * factor).collect();
        self.check("scale", &value)?;
        Ok(self.push(value, Op::Scale { x: x.0, s: s.0 }))
    }

    pub fn concat(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        let mut value = self.node(a)?.value.clone();
        value.extend_from_slice(&self.node(b)?.value);
        Ok(self.push(value, Op::Concat(a.0, b.0)))
    }

    /// Gradients of the scalar node `loss` with respect to every parameter.
    pub fn backward(&self, loss: Var) -> Result<Gradients, NumError> {
        let root = self.node(loss)?;
        if root.value.len() != 1 {
            return Err(NumError::Shape {
                op: "backward",
                expected: 1,
                actual: root.value.len(),
            });
        }
        for (i, node) in self.nodes.iter().enumerate().take(loss.0 + 1) {
            if node.op.inputs().iter().any(|&j| j >= i) {
                return Err(NumError::Cycle(i));
            }
        }

        let mut grads = self.params.zeros_like();
        let mut adj: Vec<Option<Vec<f64>>> = vec![None; loss.0 + 1];
        adj[loss.0] = Some(vec![1.0]);

        for i in (0..=loss.0).rev() {
            let Some(g) = adj[i].take() else { continue };
            let node = &self.nodes[i];
            match &node.op {
                Op::Input => {}
                Op::Row { param, row } => {
                    let target = grads.tensors[param.0].row_mut(*row);
                    for (t, gv) in target.iter_mut().zip(&g) {
                        *t += gv;
                    }
                }
                Op::MatVec { param, x } => {
                    let m = self.params.get(*param);
                    let xv = &self.nodes[*x].value;
                    let gm = &mut grads.tensors[param.0];
                    let mut gx = vec![0.0; m.cols()];
                    for (r, gr) in g.iter().enumerate() {
                        if *gr == 0.0 {
                            continue;
                        }
                        let grow = gm.row_mut(r);
                        for c in 0..xv.len() {
                            grow[c] += gr * xv[c];
                        }
                        for (c, w) in m.row(r).iter().enumerate() {
                            gx[c] += gr * w;
                        }
                    }
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Sum(xs) => {
                    for x in xs {
                        accumulate(&mut adj, *x, &g);
                    }
                }
                Op::Sub(a, b) => {
                    accumulate(&mut adj, *a, &g);
                    let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                    accumulate(&mut adj, *b, &neg);
                }
                Op::Relu(x) => {
                    let xv = &self.nodes[*x].value;
                    let gx: Vec<f64> = g
                        .iter()
                        .zip(xv)
                        .map(|(gv, v)| if *v > 0.0 { *gv } else { 0.0 })
                        .collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::LeakyRelu(x, slope) => {
                    let xv = &self.nodes[*x].value;
                    let gx: Vec<f64> = g
                        .iter()
                        .zip(xv)
                        .map(|(gv, v)| if *v > 0.0 { *gv } else { slope * gv })
                        .collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Dot(a, b) => {
                    let av = &self.nodes[*a].value;
                    let bv = &self.nodes[*b].value;
                    let ga: Vec<f64> = bv.iter().map(|v| v * g[0]).collect();
                    let gb: Vec<f64> = av.iter().map(|v| v * g[0]).collect();
                    accumulate(&mut adj, *a, &ga);
                    accumulate(&mut adj, *b, &gb);
                }
                Op::Softmax(x) => {
                    let y = &node.value;
                    let inner: f64 = g.iter().zip(y).map(|(gv, yv)| gv * yv).sum();
                    let gx: Vec<f64> = y.iter().zip(&g).map(|(yv, gv)| yv * (gv - inner)).collect();
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Stack(xs) => {
                    for (x, gv) in xs.iter().zip(&g) {
                        accumulate(&mut adj, *x, &[*gv]);
                    }
                }
                Op::Index(x, idx) => {
                    let mut gx = vec![0.0; self.nodes[*x].value.len()];
                    gx[*idx] = g[0];
                    accumulate(&mut adj, *x, &gx);
                }
                Op::Scale { x, s } => {
                    let xv = &self.nodes[*x].value;
                    let factor = self.nodes[*s].value[0];
                    let gx: Vec<f64> = g.iter().map(|gv| gv * factor).collect();
                    let gs: f64 = g.iter().zip(xv).map(|(gv, v)| gv * v).sum();
                    accumulate(&mut adj, *x, &gx);
                    accumulate(&mut adj, *s, &[gs]);
                }
                Op::Concat(a, b) => {
                    let split = self.nodes[*a].value.len();
                    accumulate(&mut adj, *a, &g[..split]);
                    accumulate(&mut adj, *b, &g[split..]);
                }
            }
        }
        Ok(grads)
    }
}

fn accumulate(adj: &mut [Option<Vec<f64>>], idx: usize, g: &[f64]) {
    match &mut adj[idx] {
        Some(existing) => {
            for (e, v) in existing.iter_mut().zip(g) {
                *e += v;
            }
        }
        slot @ None => *slot = Some(g.to_vec()),
    }
}
