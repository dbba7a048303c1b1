//! Core circuit types: nodes, elements, netlists and rational transfer
//! functions. Nothing here simulates; construction and validation only.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::Scalar;

/// Index reserved for the ground node.
pub const GROUND: usize = 0;

/// A named circuit node. Index 0 is ground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeId {
    pub name: String,
    pub index: usize,
}

impl NodeId {
    pub fn is_ground(&self) -> bool {
        self.index == GROUND
    }
}

/// Returns true for the two accepted spellings of the ground node.
pub fn is_ground_name(name: &str) -> bool {
    name == "0" || name.eq_ignore_ascii_case("gnd")
}

/// Element payload. Node fields are indices into the owning netlist's node
/// table.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind<T> {
    Resistor { a: usize, b: usize, ohms: T },
    Capacitor { a: usize, b: usize, farads: T },
    /// Independent voltage source, `pos − neg = volts`. The label names the
    /// filter input it drives.
    VSource { pos: usize, neg: usize, volts: T, label: String },
    /// Balanced-output second-generation current conveyor:
    /// `Vx = B·Vy`, `Iy = 0`, `Iz+ = K·Ix`, `Iz− = −K·Ix`, with every port
    /// current taken as flowing into the device.
    Ccii { y: usize, x: usize, z_plus: usize, z_minus: usize, b: T, k: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element<T> {
    pub name: String,
    pub kind: ElementKind<T>,
}

impl<T: Scalar> Element<T> {
    pub fn resistor(name: impl Into<String>, a: usize, b: usize, ohms: T) -> Self {
        Self { name: name.into(), kind: ElementKind::Resistor { a, b, ohms } }
    }

    pub fn capacitor(name: impl Into<String>, a: usize, b: usize, farads: T) -> Self {
        Self { name: name.into(), kind: ElementKind::Capacitor { a, b, farads } }
    }

    pub fn vsource(
        name: impl Into<String>,
        pos: usize,
        neg: usize,
        volts: T,
        label: impl Into<String>,
    ) -> Self {
        Self { name: name.into(), kind: ElementKind::VSource { pos, neg, volts, label: label.into() } }
    }

    /// Ideal conveyor (`B = K = 1`).
    pub fn ccii(name: impl Into<String>, y: usize, x: usize, z_plus: usize, z_minus: usize) -> Self {
        Self::ccii_with_gains(name, y, x, z_plus, z_minus, T::one(), T::one())
    }

    pub fn ccii_with_gains(
        name: impl Into<String>,
        y: usize,
        x: usize,
        z_plus: usize,
        z_minus: usize,
        b: T,
        k: T,
    ) -> Self {
        Self { name: name.into(), kind: ElementKind::Ccii { y, x, z_plus, z_minus, b, k } }
    }

    /// Node indices in port order.
    pub fn nodes(&self) -> Vec<usize> {
        match self.kind {
            ElementKind::Resistor { a, b, .. } | ElementKind::Capacitor { a, b, .. } => vec![a, b],
            ElementKind::VSource { pos, neg, .. } => vec![pos, neg],
            ElementKind::Ccii { y, x, z_plus, z_minus, .. } => vec![y, x, z_plus, z_minus],
        }
    }

    /// SPICE letter for this element kind.
    pub fn letter(&self) -> char {
        match self.kind {
            ElementKind::Resistor { .. } => 'R',
            ElementKind::Capacitor { .. } => 'C',
            ElementKind::VSource { .. } => 'V',
            ElementKind::Ccii { .. } => 'X',
        }
    }

    fn cast<U: Scalar>(&self) -> Element<U> {
        let c = |v: T| U::from_f64(v.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan);
        let kind = match &self.kind {
            ElementKind::Resistor { a, b, ohms } => ElementKind::Resistor { a: *a, b: *b, ohms: c(*ohms) },
            ElementKind::Capacitor { a, b, farads } => {
                ElementKind::Capacitor { a: *a, b: *b, farads: c(*farads) }
            }
            ElementKind::VSource { pos, neg, volts, label } => {
                ElementKind::VSource { pos: *pos, neg: *neg, volts: c(*volts), label: label.clone() }
            }
            ElementKind::Ccii { y, x, z_plus, z_minus, b, k } => ElementKind::Ccii {
                y: *y,
                x: *x,
                z_plus: *z_plus,
                z_minus: *z_minus,
                b: c(*b),
                k: c(*k),
            },
        };
        Element { name: self.name.clone(), kind }
    }
}

/// A validation failure. [`validate`] reports every one it finds.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("unknown node: element {element} references node index {index}")]
    UnknownNode { element: String, index: usize },
    #[error("nonpositive element value in {element}")]
    NonPositiveValue { element: String },
    #[error("non-finite value in {element}")]
    NonFiniteValue { element: String },
    #[error("element name {element:?} must start with '{expected}'")]
    BadElementName { element: String, expected: char },
    #[error("duplicate element name {element}")]
    DuplicateElement { element: String },
    #[error("invalid node name {name:?}")]
    BadNodeName { name: String },
    #[error("invalid source label {label:?} on {element}")]
    BadLabel { element: String, label: String },
    #[error("dangling node {name}: no element connects to it")]
    DanglingNode { name: String },
    #[error("netlist has no voltage source")]
    NoSource,
    #[error("output node is missing or is ground")]
    BadOutput,
    #[error("node {name} has no path to ground")]
    FloatingNode { name: String },
}

/// Circuit description: elements over a node table whose index 0 is ground.
#[derive(Debug, Clone)]
pub struct Netlist<T> {
    title: String,
    /// Node names; `nodes[0]` is ground and always `"0"`.
    nodes: Vec<String>,
    elements: Vec<Element<T>>,
    output: usize,
}

impl<T: Scalar> Netlist<T> {
    /// Assembles a netlist without checking it. `nodes` lists the non-ground
    /// node names for indices `1..=nodes.len()`. Run [`validate`] before
    /// simulating.
    pub fn from_parts(
        title: impl Into<String>,
        nodes: Vec<String>,
        elements: Vec<Element<T>>,
        output: usize,
    ) -> Self {
        let mut table = Vec::with_capacity(nodes.len() + 1);
        table.push("0".to_string());
        table.extend(nodes);
        Self { title: normalize_title(&title.into()), nodes: table, elements, output }
    }

    pub fn builder(title: impl Into<String>) -> NetlistBuilder<T> {
        NetlistBuilder::new(title)
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn elements(&self) -> &[Element<T>] {
        &self.elements
    }

    /// Number of non-ground nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node(&self, index: usize) -> Option<NodeId> {
        self.nodes.get(index).map(|name| NodeId { name: name.clone(), index })
    }

    pub fn node_name(&self, index: usize) -> Option<&str> {
        self.nodes.get(index).map(String::as_str)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        if is_ground_name(name) {
            return Some(GROUND);
        }
        self.nodes.iter().position(|n| n == name)
    }

    /// All nodes including ground.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().map(|(index, name)| NodeId { name: name.clone(), index })
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn output_node(&self) -> Option<NodeId> {
        self.node(self.output)
    }

    /// Input label → index of the driving source in [`Self::elements`].
    pub fn inputs(&self) -> BTreeMap<String, usize> {
        self.elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match &e.kind {
                ElementKind::VSource { label, .. } => Some((label.clone(), i)),
                _ => None,
            })
            .collect()
    }

    pub fn vsource_count(&self) -> usize {
        self.count(|k| matches!(k, ElementKind::VSource { .. }))
    }

    pub fn ccii_count(&self) -> usize {
        self.count(|k| matches!(k, ElementKind::Ccii { .. }))
    }

    pub fn resistor_count(&self) -> usize {
        self.count(|k| matches!(k, ElementKind::Resistor { .. }))
    }

    /// Number of capacitors; an upper bound on the transfer-function order.
    pub fn capacitor_count(&self) -> usize {
        self.count(|k| matches!(k, ElementKind::Capacitor { .. }))
    }

    fn count(&self, pred: impl Fn(&ElementKind<T>) -> bool) -> usize {
        self.elements.iter().filter(|e| pred(&e.kind)).count()
    }

    pub fn element(&self, name: &str) -> Option<&Element<T>> {
        self.elements.iter().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    /// Same circuit with component values converted to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Netlist<U> {
        Netlist {
            title: self.title.clone(),
            nodes: self.nodes.clone(),
            elements: self.elements.iter().map(Element::cast).collect(),
            output: self.output,
        }
    }

    fn resolved(&self, e: &Element<T>) -> Vec<Option<&str>> {
        e.nodes().into_iter().map(|i| self.node_name(i)).collect()
    }
}

/// Element-wise equality on node *names*, so two netlists whose node tables
/// were interned in a different order still compare equal.
impl<T: Scalar> PartialEq for Netlist<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.title != other.title
            || self.elements.len() != other.elements.len()
            || self.node_name(self.output) != other.node_name(other.output)
        {
            return false;
        }
        self.elements.iter().zip(&other.elements).all(|(a, b)| {
            let same_values = match (&a.kind, &b.kind) {
                (ElementKind::Resistor { ohms: x, .. }, ElementKind::Resistor { ohms: y, .. }) => x == y,
                (ElementKind::Capacitor { farads: x, .. }, ElementKind::Capacitor { farads: y, .. }) => {
                    x == y
                }
                (
                    ElementKind::VSource { volts: x, label: l1, .. },
                    ElementKind::VSource { volts: y, label: l2, .. },
                ) => x == y && l1 == l2,
                (
                    ElementKind::Ccii { b: b1, k: k1, .. },
                    ElementKind::Ccii { b: b2, k: k2, .. },
                ) => b1 == b2 && k1 == k2,
                _ => false,
            };
            same_values && a.name == b.name && self.resolved(a) == other.resolved(b)
        })
    }
}

/// Titles are single-line, whitespace-collapsed and end at the first `;`.
fn normalize_title(raw: &str) -> String {
    let head = raw.split([';', '\n', '\r']).next().unwrap_or("");
    head.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Incremental netlist construction with node-name interning.
#[derive(Debug, Clone)]
pub struct NetlistBuilder<T> {
    title: String,
    nodes: Vec<String>,
    elements: Vec<Element<T>>,
}

impl<T: Scalar> NetlistBuilder<T> {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: normalize_title(&title.into()), nodes: vec!["0".to_string()], elements: Vec::new() }
    }

    pub fn set_title(&mut self, title: impl Into<String>) -> &mut Self {
        self.title = normalize_title(&title.into());
        self
    }

    /// Interns a node name and returns its index (`0` and `gnd` map to ground).
    pub fn node(&mut self, name: &str) -> usize {
        if is_ground_name(name) {
            return GROUND;
        }
        if let Some(i) = self.nodes.iter().position(|n| n == name) {
            return i;
        }
        self.nodes.push(name.to_string());
        self.nodes.len() - 1
    }

    pub fn resistor(&mut self, name: &str, a: &str, b: &str, ohms: T) -> &mut Self {
        let (a, b) = (self.node(a), self.node(b));
        self.elements.push(Element::resistor(name, a, b, ohms));
        self
    }

    pub fn capacitor(&mut self, name: &str, a: &str, b: &str, farads: T) -> &mut Self {
        let (a, b) = (self.node(a), self.node(b));
        self.elements.push(Element::capacitor(name, a, b, farads));
        self
    }

    pub fn vsource(&mut self, name: &str, pos: &str, neg: &str, volts: T, label: &str) -> &mut Self {
        let (p, n) = (self.node(pos), self.node(neg));
        self.elements.push(Element::vsource(name, p, n, volts, label));
        self
    }

    #[allow(clippy::too_many_arguments)]
    pub fn ccii(
        &mut self,
        name: &str,
        y: &str,
        x: &str,
        z_plus: &str,
        z_minus: &str,
        b: T,
        k: T,
    ) -> &mut Self {
        let ports = [self.node(y), self.node(x), self.node(z_plus), self.node(z_minus)];
        self.elements.push(Element::ccii_with_gains(name, ports[0], ports[1], ports[2], ports[3], b, k));
        self
    }

    pub fn push(&mut self, element: Element<T>) -> &mut Self {
        self.elements.push(element);
        self
    }

    /// Finishes the netlist with `output` as the observed node.
    pub fn build(&mut self, output: &str) -> Netlist<T> {
        let out = self.node(output);
        Netlist {
            title: self.title.clone(),
            nodes: self.nodes.clone(),
            elements: self.elements.clone(),
            output: out,
        }
    }
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == ';' || c == '=')
}

/// Checks every netlist invariant and returns all violations found.
pub fn validate<T: Scalar>(netlist: &Netlist<T>) -> Result<(), Vec<ValidationError>> {
    let mut errors = Vec::new();
    let n = netlist.nodes.len();

    for name in &netlist.nodes[1..] {
        if !valid_token(name) || is_ground_name(name) || name.starts_with('*') {
            errors.push(ValidationError::BadNodeName { name: name.clone() });
        }
    }

    let mut seen = HashSet::new();
    let mut used = vec![false; n];
    used[GROUND] = true;
    // union-find over the node-element incidence graph
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    for e in &netlist.elements {
        let expected = e.letter();
        let first = e.name.chars().next();
        if !valid_token(&e.name) || first.map(|c| c.to_ascii_uppercase()) != Some(expected) {
            errors.push(ValidationError::BadElementName { element: e.name.clone(), expected });
        }
        if !seen.insert(e.name.to_ascii_uppercase()) {
            errors.push(ValidationError::DuplicateElement { element: e.name.clone() });
        }

        let mut valid_nodes = Vec::new();
        for idx in e.nodes() {
            if idx >= n {
                errors.push(ValidationError::UnknownNode { element: e.name.clone(), index: idx });
            } else {
                used[idx] = true;
                valid_nodes.push(idx);
            }
        }
        for w in valid_nodes.windows(2) {
            let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[ra] = rb;
        }

        let name = || e.name.clone();
        match &e.kind {
            ElementKind::Resistor { ohms: v, .. } | ElementKind::Capacitor { farads: v, .. } => {
                if !v.is_finite() {
                    errors.push(ValidationError::NonFiniteValue { element: name() });
                } else if *v <= T::zero() {
                    errors.push(ValidationError::NonPositiveValue { element: name() });
                }
            }
            ElementKind::VSource { volts, label, .. } => {
                if !volts.is_finite() {
                    errors.push(ValidationError::NonFiniteValue { element: name() });
                }
                if !valid_token(label) {
                    errors.push(ValidationError::BadLabel { element: name(), label: label.clone() });
                }
            }
            ElementKind::Ccii { b, k, .. } => {
                if !b.is_finite() || !k.is_finite() {
                    errors.push(ValidationError::NonFiniteValue { element: name() });
                }
            }
        }
    }

    if netlist.vsource_count() == 0 {
        errors.push(ValidationError::NoSource);
    }
    if netlist.output == GROUND || netlist.output >= n {
        errors.push(ValidationError::BadOutput);
    }

    let ground_root = find(&mut parent, GROUND);
    for i in 1..n {
        if !used[i] {
            errors.push(ValidationError::DanglingNode { name: netlist.nodes[i].clone() });
        } else if find(&mut parent, i) != ground_root {
            errors.push(ValidationError::FloatingNode { name: netlist.nodes[i].clone() });
        }
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("evaluation at pole (omega = {omega} rad/s)")]
    AtPole { omega: f64 },
}

/// Ratio of real polynomials in `s`, coefficients stored in ascending powers.
///
/// Construction canonicalizes once: numerical dust is trimmed and the
/// denominator is made monic. Trimming compares `|c_i|·σ^i` against the
/// largest such term of the same polynomial, where `σ` is the frequency
/// scale set by the denominator's lowest and highest nonzero coefficients.
/// With `σ = 1` this is the plain `|c| < tol·max|c|` rule; the scaling keeps
/// physically meaningful high-order terms of high-frequency designs.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTf<T> {
    num: Vec<T>,
    den: Vec<T>,
}

fn strip_trailing_zeros<T: Scalar>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Frequency scale from the denominator's extreme nonzero coefficients.
fn freq_scale<T: Scalar>(den: &[T]) -> T {
    let lo = den.iter().position(|c| !c.is_zero());
    let hi = den.iter().rposition(|c| !c.is_zero());
    match (lo, hi) {
        (Some(lo), Some(hi)) if hi > lo => {
            (den[lo].abs() / den[hi].abs()).powf(T::one() / T::from_usize(hi - lo).unwrap())
        }
        _ => T::one(),
    }
}

fn weights<T: Scalar>(p: &[T], sigma: T) -> Vec<T> {
    let mut scale = T::one();
    p.iter()
        .map(|c| {
            let w = c.abs() * scale;
            scale = scale * sigma;
            w
        })
        .collect()
}

fn trim<T: Scalar>(p: &mut Vec<T>, sigma: T) {
    let w = weights(p, sigma);
    let max = w.iter().fold(T::zero(), |m, &x| m.max(x));
    let cutoff = T::trim_tol() * max;
    for (c, wi) in p.iter_mut().zip(w) {
        if wi < cutoff {
            *c = T::zero();
        }
    }
    strip_trailing_zeros(p);
}

fn horner<T: Scalar>(p: &[T], s: Complex<T>) -> Complex<T> {
    p.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * s + c)
}

impl<T: Scalar> RationalTf<T> {
    /// Builds and canonicalizes `num(s)/den(s)` (ascending coefficients).
    pub fn new(num: Vec<T>, den: Vec<T>) -> Result<Self, TfError> {
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(TfError::NonFinite);
        }
        let (mut num, mut den) = (num, den);
        strip_trailing_zeros(&mut den);
        if den.is_empty() {
            return Err(TfError::ZeroDenominator);
        }
        let sigma = freq_scale(&den);
        trim(&mut den, sigma);
        trim(&mut num, sigma);
        if num.len() > den.len() {
            return Err(TfError::Improper { num: num.len() - 1, den: den.len() - 1 });
        }
        let lead = *den.last().expect("nonempty denominator");
        if lead != T::one() {
            num.iter_mut().for_each(|c| *c = *c / lead);
            den.iter_mut().for_each(|c| *c = *c / lead);
        }
        Ok(Self { num, den })
    }

    /// Re-runs canonicalization; a fixed point for any constructed value.
    pub fn canonicalize(&self) -> Self {
        Self::new(self.num.clone(), self.den.clone()).expect("canonical form stays valid")
    }

    /// Numerator coefficients, ascending; empty for the zero function.
    pub fn num(&self) -> &[T] {
        &self.num
    }

    /// Monic denominator coefficients, ascending.
    pub fn den(&self) -> &[T] {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    /// Frequency scale used for trimming and coefficient comparison.
    pub fn freq_scale(&self) -> T {
        freq_scale(&self.den)
    }

    /// Value at an arbitrary complex frequency.
    pub fn eval_s(&self, s: Complex<T>) -> Complex<T> {
        horner(&self.num, s) / horner(&self.den, s)
    }

    /// Complex gain at `s = jω`.
    pub fn evaluate(&self, omega: T) -> Result<Complex<T>, TfError> {
        let s = Complex::new(T::zero(), omega);
        let d = horner(&self.den, s);
        let mut scale = T::zero();
        let mut pow = T::one();
        for c in &self.den {
            scale = scale + c.abs() * pow;
            pow = pow * omega.abs();
        }
        if d.norm() <= T::lit(16.0) * T::epsilon() * scale {
            return Err(TfError::AtPole { omega: omega.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(horner(&self.num, s) / d)
    }

    /// `ω₀ = (|d_0| / |d_n|)^(1/n)`, the pole-pair magnitude for a biquad.
    pub fn omega0(&self) -> T {
        let n = self.order();
        if n == 0 {
            return T::zero();
        }
        (self.den[0].abs() / self.den[n].abs()).powf(T::one() / T::from_usize(n).unwrap())
    }

    /// Roots of a denominator of degree ≤ 2.
    pub fn poles(&self) -> Vec<Complex<T>> {
        match self.den.as_slice() {
            [_] => vec![],
            [c0, c1] => vec![Complex::new(-*c0 / *c1, T::zero())],
            [c0, c1, c2] => {
                let two = T::lit(2.0);
                let disc = Complex::new(*c1 * *c1 - T::lit(4.0) * *c0 * *c2, T::zero()).sqrt();
                let b = Complex::new(-*c1, T::zero());
                vec![(b + disc) / (*c2 * two), (b - disc) / (*c2 * two)]
            }
            _ => unimplemented!("root finding above second order"),
        }
    }

    /// Largest per-coefficient relative deviation of `self` from `reference`.
    ///
    /// Where the reference coefficient is exactly zero the deviation is
    /// measured against the polynomial's largest frequency-scaled term.
    /// Returns infinity when the polynomial degrees differ after padding
    /// would hide a genuinely missing term.
    pub fn max_coeff_rel_error(&self, reference: &Self) -> T {
        let sigma = reference.freq_scale();
        let poly_err = |a: &[T], b: &[T]| -> T {
            let len = a.len().max(b.len());
            let pad = |p: &[T]| {
                let mut v = p.to_vec();
                v.resize(len, T::zero());
                v
            };
            let (a, b) = (pad(a), pad(b));
            let wb = weights(&b, sigma);
            let max = wb.iter().fold(T::zero(), |m, &x| m.max(x));
            let mut err = T::zero();
            let mut scale = T::one();
            for i in 0..len {
                let e = if !b[i].is_zero() {
                    (a[i] - b[i]).abs() / b[i].abs()
                } else if max.is_zero() {
                    if a[i].is_zero() { T::zero() } else { T::infinity() }
                } else {
                    a[i].abs() * scale / max
                };
                err = err.max(e);
                scale = scale * sigma;
            }
            err
        };
        poly_err(&self.num, &reference.num).max(poly_err(&self.den, &reference.den))
    }
}

impl<T: Scalar> fmt::Display for RationalTf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = |p: &[T]| {
            if p.is_empty() {
                return "0".to_string();
            }
            p.iter()
                .enumerate()
                .map(|(i, c)| match i {
                    0 => format!("{c:e}"),
                    1 => format!("{c:e}·s"),
                    _ => format!("{c:e}·s^{i}"),
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(f, "({}) / ({})", poly(&self.num), poly(&self.den))
    }
}
