//! Second-order forward jets with a layer-granular reverse sweep.
//!
//! A [`Jet`] carries a scalar together with its first and second derivative
//! with respect to the (scalar) network input. Pushing the seed `(x, 1, 0)`
//! through the affine and tanh layers yields `(u, u_x, u_xx)` at the output.
//! Every layer visited is recorded on a [`Tape`]; replaying it backwards with
//! the adjoint of the output jet gives the gradient of any scalar built from
//! `u`, `u_x`, `u_xx` with respect to all weights and biases.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::real::Real;

/// Value with first and second input-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet<T> {
    pub fn new(value: T, d1: T, d2: T) -> Self {
        Jet { value, d1, d2 }
    }

    pub fn constant(c: T) -> Self {
        Jet::new(c, T::zero(), T::zero())
    }

    /// The independent variable itself: `(x, 1, 0)`.
    pub fn seed(x: T) -> Self {
        Jet::new(x, T::one(), T::zero())
    }

    pub fn zero() -> Self {
        Jet::constant(T::zero())
    }

    pub fn scale(self, k: T) -> Self {
        Jet::new(self.value * k, self.d1 * k, self.d2 * k)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Jet::new(self.value + rhs.value, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Jet::new(self.value - rhs.value, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet::new(-self.value, -self.d1, -self.d2)
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

/// Borrowed view of one affine layer: `rows × cols` row-major weights and
/// `rows` biases.
#[derive(Debug, Clone, Copy)]
pub struct LayerRef<'a, T> {
    pub weights: &'a [T],
    pub bias: &'a [T],
    pub rows: usize,
    pub cols: usize,
}

impl<'a, T: Real> LayerRef<'a, T> {
    pub fn new(weights: &'a [T], bias: &'a [T], rows: usize, cols: usize) -> Result<Self> {
        if weights.len() != rows * cols {
            return Err(Error::Dimension {
                context: "layer weights",
                expected: rows * cols,
                actual: weights.len(),
            });
        }
        if bias.len() != rows {
            return Err(Error::Dimension {
                context: "layer bias",
                expected: rows,
                actual: bias.len(),
            });
        }
        Ok(LayerRef {
            weights,
            bias,
            rows,
            cols,
        })
    }
}

/// `s = W a + b` propagated componentwise: the bias only enters the value.
pub fn jet_affine<T: Real>(layer: LayerRef<'_, T>, input: &[Jet<T>]) -> Result<Vec<Jet<T>>> {
    if input.len() != layer.cols {
        return Err(Error::Dimension {
            context: "affine input",
            expected: layer.cols,
            actual: input.len(),
        });
    }
    let mut out = Vec::with_capacity(layer.rows);
    affine_into(&layer, input, &mut out);
    Ok(out)
}

/// Elementwise tanh with the second-order chain rule.
pub fn jet_tanh<T: Real>(input: &[Jet<T>]) -> Vec<Jet<T>> {
    input.iter().map(|&s| tanh_jet(s).0).collect()
}

#[inline]
fn affine_into<T: Real>(layer: &LayerRef<'_, T>, input: &[Jet<T>], out: &mut Vec<Jet<T>>) {
    out.clear();
    for (row, &b) in layer.weights.chunks_exact(layer.cols).zip(layer.bias) {
        let mut v = T::zero();
        let mut d1 = T::zero();
        let mut d2 = T::zero();
        for (&w, a) in row.iter().zip(input) {
            v += w * a.value;
            d1 += w * a.d1;
            d2 += w * a.d2;
        }
        out.push(Jet::new(v + b, d1, d2));
    }
}

/// Returns the output jet and `tanh(s.value)`.
#[inline]
fn tanh_jet<T: Real>(s: Jet<T>) -> (Jet<T>, T) {
    let f = s.value.tanh();
    let df = T::one() - f * f;
    let two = T::one() + T::one();
    let ddf = -two * f * df;
    (
        Jet::new(f, df * s.d1, ddf * s.d1 * s.d1 + df * s.d2),
        f,
    )
}

#[derive(Debug, Clone, Copy)]
enum NodeKind {
    /// Parameters live at `offset..offset + rows*cols` (weights) followed by
    /// `rows` biases in the flat parameter vector.
    Affine { offset: usize, rows: usize },
    Tanh,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    kind: NodeKind,
    start: usize,
    len: usize,
}

/// Record of one jet-forward pass, one node per layer.
///
/// Affine nodes keep their input jets; tanh nodes keep their input jets and
/// the activations. Buffers are reused across passes via [`Tape::clear`].
#[derive(Debug, Clone, Default)]
pub struct Tape<T> {
    nodes: Vec<Node>,
    jets: Vec<Jet<T>>,
    acts: Vec<T>,
    // scratch for the forward and reverse sweeps
    cur: Vec<Jet<T>>,
    next: Vec<Jet<T>>,
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Tape {
            nodes: Vec::new(),
            jets: Vec::new(),
            acts: Vec::new(),
            cur: Vec::new(),
            next: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
        self.jets.clear();
        self.acts.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Starts a pass from the given input jets.
    pub(crate) fn begin(&mut self, input: &[Jet<T>]) {
        self.clear();
        self.cur.clear();
        self.cur.extend_from_slice(input);
    }

    /// Applies the affine layer stored at `offset` of `params` to the current
    /// jets and records it.
    pub(crate) fn affine(&mut self, params: &[T], offset: usize, rows: usize) {
        let cols = self.cur.len();
        let weights = &params[offset..offset + rows * cols];
        let bias = &params[offset + rows * cols..offset + rows * cols + rows];
        let layer = LayerRef {
            weights,
            bias,
            rows,
            cols,
        };
        let start = self.jets.len();
        self.jets.extend_from_slice(&self.cur);
        self.nodes.push(Node {
            kind: NodeKind::Affine { offset, rows },
            start,
            len: cols,
        });
        affine_into(&layer, &self.cur, &mut self.next);
        std::mem::swap(&mut self.cur, &mut self.next);
    }

    pub(crate) fn tanh(&mut self) {
        let start = self.jets.len();
        self.nodes.push(Node {
            kind: NodeKind::Tanh,
            start,
            len: self.cur.len(),
        });
        self.jets.extend_from_slice(&self.cur);
        // acts is indexed like jets; affine nodes leave a gap
        self.acts.resize(start, T::zero());
        for s in self.cur.iter_mut() {
            let (a, f) = tanh_jet(*s);
            self.acts.push(f);
            *s = a;
        }
    }

    /// Current (last) layer output.
    pub(crate) fn output(&self) -> &[Jet<T>] {
        &self.cur
    }

    /// Reverse sweep: accumulates `∂L/∂θ` into `grad`, where `seed` holds
    /// `(∂L/∂u, ∂L/∂u_x, ∂L/∂u_xx)` for the single network output.
    ///
    /// `params` and `grad` use the flat layout the forward pass was recorded
    /// against. Gradients are added to whatever `grad` already holds.
    pub fn backward(&mut self, params: &[T], seed: Jet<T>, grad: &mut [T]) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyTape);
        }
        if grad.len() != params.len() {
            return Err(Error::Dimension {
                context: "gradient buffer",
                expected: params.len(),
                actual: grad.len(),
            });
        }
        let two = T::one() + T::one();
        let mut adj = std::mem::take(&mut self.cur);
        let mut prev = std::mem::take(&mut self.next);
        adj.clear();
        adj.push(seed);

        for (pos, node) in self.nodes.iter().enumerate().rev() {
            let inputs = &self.jets[node.start..node.start + node.len];
            match node.kind {
                NodeKind::Tanh => {
                    let acts = &self.acts[node.start..node.start + node.len];
                    for ((a, s), &f) in adj.iter_mut().zip(inputs).zip(acts) {
                        let df = T::one() - f * f;
                        let ddf = -two * f * df;
                        let dddf = -two * df * (T::one() - (two + T::one()) * f * f);
                        let value = a.value * df
                            + a.d1 * ddf * s.d1
                            + a.d2 * (dddf * s.d1 * s.d1 + ddf * s.d2);
                        let d1 = a.d1 * df + a.d2 * two * ddf * s.d1;
                        let d2 = a.d2 * df;
                        *a = Jet::new(value, d1, d2);
                    }
                }
                NodeKind::Affine { offset, rows } => {
                    let cols = node.len;
                    debug_assert_eq!(adj.len(), rows);
                    let w_end = offset + rows * cols;
                    let (gw, gb) = grad[offset..w_end + rows].split_at_mut(rows * cols);
                    for ((g_row, gb_i), s) in gw.chunks_exact_mut(cols).zip(gb.iter_mut()).zip(&adj) {
                        *gb_i += s.value;
                        for (g, a) in g_row.iter_mut().zip(inputs) {
                            *g += s.value * a.value + s.d1 * a.d1 + s.d2 * a.d2;
                        }
                    }
                    if pos > 0 {
                        let weights = &params[offset..w_end];
                        prev.clear();
                        prev.resize(cols, Jet::zero());
                        for (row, s) in weights.chunks_exact(cols).zip(&adj) {
                            for (p, &w) in prev.iter_mut().zip(row) {
                                p.value += w * s.value;
                                p.d1 += w * s.d1;
                                p.d2 += w * s.d2;
                            }
                        }
                        std::mem::swap(&mut adj, &mut prev);
                    }
                }
            }
        }
        self.cur = adj;
        self.next = prev;
        Ok(())
    }
}
