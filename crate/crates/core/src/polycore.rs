//! Exact bivariate polynomials over the rationals, together with the
//! differential operators (gradient, both curls), the Poincaré and Koszul
//! operators, and exact integration over cells and edges.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;
pub type Point = [Rational; 2];

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn point(x: Rational, y: Rational) -> Point {
    [x, y]
}

pub fn ipoint(x: i64, y: i64) -> Point {
    [int(x), int(y)]
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: fall back to a scaled division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Bivariate polynomial stored as a sparse map `(a, b) -> c` for `c x1^a x2^b`.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn monomial(a: u32, b: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    /// Affine polynomial `c0 + c1 x1 + c2 x2`.
    pub fn affine(c0: Rational, c1: Rational, c2: Rational) -> Self {
        let mut p = Self::constant(c0);
        p.add_term(1, 0, c1);
        p.add_term(0, 1, c2);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in it {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((a, b)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Rational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    /// Largest per-variable degree, the natural degree for `Q_r` spaces.
    pub fn max_partial_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a.max(b)).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|(&(a, b), c)| ((a - 1, b), c * int(a as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), c)| ((a, b - 1), c * int(b as i64))),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, p: &Point) -> Rational {
        let mut s = Rational::zero();
        for (&(a, b), c) in &self.terms {
            s += c * num_traits::pow(p[0].clone(), a as usize) * num_traits::pow(p[1].clone(), b as usize);
        }
        s
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| to_f64(c) * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    /// Substitutes `x1 -> px`, `x2 -> py`.
    pub fn substitute(&self, px: &Polynomial, py: &Polynomial) -> Polynomial {
        let max_a = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_b = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut xp = vec![Self::one()];
        for i in 0..max_a as usize {
            let next = &xp[i] * px;
            xp.push(next);
        }
        let mut yp = vec![Self::one()];
        for i in 0..max_b as usize {
            let next = &yp[i] * py;
            yp.push(next);
        }
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            let t = (&xp[a as usize] * &yp[b as usize]).scale(c);
            out = &out + &t;
        }
        out
    }

    /// `q(x) = p(x + c)`: re-expresses `p` in a frame whose origin sits at `c`.
    pub fn translate(&self, c: &Point) -> Polynomial {
        let px = Self::affine(c[0].clone(), Rational::one(), Rational::zero());
        let py = Self::affine(c[1].clone(), Rational::zero(), Rational::one());
        self.substitute(&px, &py)
    }

    /// Coefficients in `s` of `p(a + s d)`, lowest degree first.
    pub fn restrict_to_segment(&self, a: &Point, d: &Point) -> Univariate {
        let px = Univariate::new(vec![a[0].clone(), d[0].clone()]);
        let py = Univariate::new(vec![a[1].clone(), d[1].clone()]);
        let mut out = Univariate::zero();
        for (&(ea, eb), c) in &self.terms {
            let t = px.pow(ea).mul(&py.pow(eb)).scale(c);
            out = out.add(&t);
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag = c.abs();
            let mono = match (a, b) {
                (0, 0) => String::new(),
                _ => {
                    let mut s = Vec::new();
                    if a > 0 {
                        s.push(if a == 1 { "x1".to_string() } else { format!("x1^{a}") });
                    }
                    if b > 0 {
                        s.push(if b == 1 { "x2".to_string() } else { format!("x2^{b}") });
                    }
                    s.join("*")
                }
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&int(-1))
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(Polynomial);
owned_ops!(VectorField);

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

/// Dense univariate polynomial used for edge restrictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Univariate {
    pub coeffs: Vec<Rational>,
}

impl Univariate {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, o: &Univariate) -> Univariate {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                let b = o.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                a + b
            })
            .collect();
        Univariate::new(c)
    }

    pub fn mul(&self, o: &Univariate) -> Univariate {
        if self.is_zero() || o.is_zero() {
            return Univariate::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Univariate::new(c)
    }

    pub fn scale(&self, s: &Rational) -> Univariate {
        Univariate::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, n: u32) -> Univariate {
        let mut out = Univariate::new(vec![Rational::one()]);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, s: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Univariate {
        let mut c = vec![Rational::zero()];
        for (i, a) in self.coeffs.iter().enumerate() {
            c.push(a / int(i as i64 + 1));
        }
        Univariate::new(c)
    }

    pub fn integrate_unit(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, a)| acc + a / int(i as i64 + 1))
    }

    /// Shifted Legendre polynomial of degree `n` on `[0, 1]`.
    pub fn legendre01(n: usize) -> Univariate {
        // P_n(2s - 1) via the three-term recurrence in s
        let t = Univariate::new(vec![int(-1), int(2)]);
        let mut p0 = Univariate::new(vec![Rational::one()]);
        if n == 0 {
            return p0;
        }
        let mut p1 = t.clone();
        for m in 1..n {
            let m = m as i64;
            let a = t.mul(&p1).scale(&rat(2 * m + 1, m + 1));
            let b = p0.scale(&rat(-m, m + 1));
            p0 = p1;
            p1 = a.add(&b);
        }
        p1
    }
}

/// Vector field `(c1, c2)` with polynomial components.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct VectorField {
    pub c1: Polynomial,
    pub c2: Polynomial,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c1, self.c2)
    }
}

impl VectorField {
    pub fn new(c1: Polynomial, c2: Polynomial) -> Self {
        Self { c1, c2 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(a: Rational, b: Rational) -> Self {
        Self::new(Polynomial::constant(a), Polynomial::constant(b))
    }

    /// Position vector `x = (x1, x2)`.
    pub fn position() -> Self {
        Self::new(Polynomial::x(), Polynomial::y())
    }

    /// Rotated position `x_perp = (-x2, x1)`.
    pub fn x_perp() -> Self {
        Self::new(-Polynomial::y(), Polynomial::x())
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c2.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.c1.scale(c), self.c2.scale(c))
    }

    pub fn mul_scalar(&self, p: &Polynomial) -> Self {
        Self::new(&self.c1 * p, &self.c2 * p)
    }

    pub fn dot(&self, o: &VectorField) -> Polynomial {
        &(&self.c1 * &o.c1) + &(&self.c2 * &o.c2)
    }

    pub fn dot_const(&self, v: &Point) -> Polynomial {
        &self.c1.scale(&v[0]) + &self.c2.scale(&v[1])
    }

    pub fn degree(&self) -> Option<u32> {
        self.c1.degree().max(self.c2.degree())
    }

    pub fn translate(&self, c: &Point) -> Self {
        Self::new(self.c1.translate(c), self.c2.translate(c))
    }

    pub fn eval(&self, p: &Point) -> [Rational; 2] {
        [self.c1.eval(p), self.c2.eval(p)]
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> [f64; 2] {
        [self.c1.eval_f64(x, y), self.c2.eval_f64(x, y)]
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, o: &VectorField) -> VectorField {
        VectorField::new(&self.c1 + &o.c1, &self.c2 + &o.c2)
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, o: &VectorField) -> VectorField {
        VectorField::new(&self.c1 - &o.c1, &self.c2 - &o.c2)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField::new(-&self.c1, -&self.c2)
    }
}

pub fn grad(p: &Polynomial) -> VectorField {
    VectorField::new(p.dx(), p.dy())
}

/// `(d2 p, -d1 p)`.
pub fn curl_scalar(p: &Polynomial) -> VectorField {
    VectorField::new(p.dy(), -p.dx())
}

/// `d1 u2 - d2 u1`.
pub fn curl_vec(u: &VectorField) -> Polynomial {
    &u.c2.dx() - &u.c1.dy()
}

pub fn div(u: &VectorField) -> Polynomial {
    &u.c1.dx() + &u.c2.dy()
}

/// `p u = int_0^1 t x_perp u(tx) dt`, by the monomial rule
/// `p(x1^a x2^b) = x_perp x1^a x2^b / (a + b + 2)`.
pub fn poincare(u: &Polynomial) -> VectorField {
    let scaled = Polynomial::from_terms(
        u.terms()
            .map(|(&(a, b), c)| ((a, b), c / int((a + b + 2) as i64))),
    );
    koszul(&scaled)
}

pub fn koszul(u: &Polynomial) -> VectorField {
    VectorField::x_perp().mul_scalar(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Triangle,
    Rectangle,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Triangle => "tri",
            Shape::Rectangle => "rect",
        }
    }

    pub fn num_vertices(self) -> usize {
        match self {
            Shape::Triangle => 3,
            Shape::Rectangle => 4,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Triangle or axis-aligned rectangle with counterclockwise rational vertices.
/// Edge `i` runs from vertex `i` to vertex `i + 1` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellGeometry {
    shape: Shape,
    vertices: Vec<Point>,
}

fn cross(a: &Point, b: &Point) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn sub_pt(a: &Point, b: &Point) -> Point {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

impl CellGeometry {
    pub fn triangle(v: [Point; 3]) -> Result<Self, Error> {
        let cell = Self { shape: Shape::Triangle, vertices: v.to_vec() };
        if !cell.signed_area().is_positive() {
            return Err(Error::DegenerateCell("triangle must have positive signed area".into()));
        }
        Ok(cell)
    }

    /// Rectangle `(xl, xr) x (yd, yu)`, vertices starting at the lower left.
    pub fn rectangle(xl: Rational, xr: Rational, yd: Rational, yu: Rational) -> Result<Self, Error> {
        if xr <= xl || yu <= yd {
            return Err(Error::DegenerateCell("rectangle must have positive extent".into()));
        }
        let vertices = vec![
            [xl.clone(), yd.clone()],
            [xr.clone(), yd],
            [xr, yu.clone()],
            [xl, yu],
        ];
        Ok(Self { shape: Shape::Rectangle, vertices })
    }

    /// Triangle with vertices (0,0), (1,0), (0,1).
    pub fn reference_triangle() -> Self {
        Self::triangle([ipoint(0, 0), ipoint(1, 0), ipoint(0, 1)]).expect("valid")
    }

    /// Square (-1,1)^2.
    pub fn reference_rectangle() -> Self {
        Self::rectangle(int(-1), int(1), int(-1), int(1)).expect("valid")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        (i, (i + 1) % self.vertices.len())
    }

    pub fn edge_start(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    /// Unnormalized tangent `b - a`.
    pub fn edge_vector(&self, i: usize) -> Point {
        let (a, b) = self.edge(i);
        sub_pt(&self.vertices[b], &self.vertices[a])
    }

    pub fn edge_length_sq(&self, i: usize) -> Rational {
        let d = self.edge_vector(i);
        &d[0] * &d[0] + &d[1] * &d[1]
    }

    pub fn signed_area(&self) -> Rational {
        let n = self.vertices.len();
        let mut s = Rational::zero();
        for i in 0..n {
            s += cross(&self.vertices[i], &self.vertices[(i + 1) % n]);
        }
        s / int(2)
    }

    pub fn barycenter(&self) -> Point {
        let n = int(self.vertices.len() as i64);
        let mut c = [Rational::zero(), Rational::zero()];
        for v in &self.vertices {
            c[0] += &v[0];
            c[1] += &v[1];
        }
        [&c[0] / &n, &c[1] / &n]
    }

    /// `(xl, xr, yd, yu)` of a rectangle.
    pub fn bounds(&self) -> Option<[Rational; 4]> {
        match self.shape {
            Shape::Rectangle => Some([
                self.vertices[0][0].clone(),
                self.vertices[2][0].clone(),
                self.vertices[0][1].clone(),
                self.vertices[2][1].clone(),
            ]),
            Shape::Triangle => None,
        }
    }

    pub fn translate(&self, c: &Point) -> Self {
        Self {
            shape: self.shape,
            vertices: self.vertices.iter().map(|v| [&v[0] + &c[0], &v[1] + &c[1]]).collect(),
        }
    }

    /// Barycentric coordinates of a triangle as affine polynomials.
    pub fn barycentric(&self) -> Option<[Polynomial; 3]> {
        if self.shape != Shape::Triangle {
            return None;
        }
        let v = &self.vertices;
        let twice = self.signed_area() * int(2);
        let lam = |i: usize| {
            // lambda_i = cross(v_j - x, v_k - x) / twice
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let c0 = cross(&v[j], &v[k]);
            let c1 = &v[j][1] - &v[k][1];
            let c2 = &v[k][0] - &v[j][0];
            Polynomial::affine(c0 / &twice, c1 / &twice, c2 / &twice)
        };
        Some([lam(0), lam(1), lam(2)])
    }
}

/// Exact `int_K p dA`.
pub fn integrate_cell(p: &Polynomial, cell: &CellGeometry) -> Rational {
    match cell.shape() {
        Shape::Rectangle => {
            let [xl, xr, yd, yu] = cell.bounds().expect("rectangle");
            let mom = |lo: &Rational, hi: &Rational, e: u32| {
                let e1 = e as usize + 1;
                (num_traits::pow(hi.clone(), e1) - num_traits::pow(lo.clone(), e1)) / int(e1 as i64)
            };
            p.terms()
                .map(|(&(a, b), c)| c * mom(&xl, &xr, a) * mom(&yd, &yu, b))
                .fold(Rational::zero(), |s, t| s + t)
        }
        Shape::Triangle => {
            let v = cell.vertices();
            let e1 = sub_pt(&v[1], &v[0]);
            let e2 = sub_pt(&v[2], &v[0]);
            let px = Polynomial::affine(v[0][0].clone(), e1[0].clone(), e2[0].clone());
            let py = Polynomial::affine(v[0][1].clone(), e1[1].clone(), e2[1].clone());
            let q = p.substitute(&px, &py);
            let jac = cross(&e1, &e2).abs();
            let s = q
                .terms()
                .map(|(&(a, b), c)| c * simplex_moment(a, b))
                .fold(Rational::zero(), |s, t| s + t);
            s * jac
        }
    }
}

/// `int over the unit simplex of xi^a eta^b = a! b! / (a + b + 2)!`.
fn simplex_moment(a: u32, b: u32) -> Rational {
    let fact = |n: u32| (1..=n as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    Rational::new(fact(a) * fact(b), fact(a + b + 2))
}

/// Line integral `int_e p ds = factor * sqrt(length_sq)`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIntegral {
    pub factor: Rational,
    pub length_sq: Rational,
}

impl EdgeIntegral {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.factor) * to_f64(&self.length_sq).sqrt()
    }
}

pub fn integrate_edge(p: &Polynomial, cell: &CellGeometry, edge: usize) -> EdgeIntegral {
    EdgeIntegral {
        factor: p.restrict_to_segment(cell.edge_start(edge), &cell.edge_vector(edge)).integrate_unit(),
        length_sq: cell.edge_length_sq(edge),
    }
}

/// Same as [`integrate_edge`] for an arbitrary segment `a -> b`.
pub fn integrate_segment(p: &Polynomial, a: &Point, b: &Point) -> EdgeIntegral {
    let d = sub_pt(b, a);
    EdgeIntegral {
        factor: p.restrict_to_segment(a, &d).integrate_unit(),
        length_sq: &d[0] * &d[0] + &d[1] * &d[1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grad_of_product() {
        let p = &Polynomial::x() * &Polynomial::y();
        assert_eq!(grad(&p), VectorField::new(Polynomial::y(), Polynomial::x()));
        assert!(grad(&Polynomial::constant(rat(3, 7))).is_zero());
    }

    #[test]
    fn curl_conventions() {
        assert_eq!(
            curl_scalar(&Polynomial::x()),
            VectorField::constant(int(0), int(-1))
        );
        assert_eq!(curl_vec(&VectorField::x_perp()), Polynomial::constant(int(2)));
        let p = Polynomial::monomial(2, 1, int(1));
        assert_eq!(curl_vec(&curl_scalar(&p)), Polynomial::monomial(0, 1, int(-2)));
        let q = Polynomial::monomial(3, 2, int(1));
        assert!(curl_vec(&grad(&q)).is_zero());
    }

    #[test]
    fn poincare_of_constant() {
        let v = poincare(&Polynomial::one());
        assert_eq!(v, VectorField::new(Polynomial::monomial(0, 1, rat(-1, 2)), Polynomial::monomial(1, 0, rat(1, 2))));
        let u = Polynomial::monomial(2, 1, int(1));
        assert_eq!(curl_vec(&poincare(&u)), u);
    }

    #[test]
    fn koszul_scaling() {
        assert_eq!(koszul(&Polynomial::one()), VectorField::x_perp());
        let u = Polynomial::monomial(3, 1, rat(2, 5));
        assert_eq!(curl_vec(&koszul(&u)), u.scale(&int(6)));
        assert_eq!(poincare(&u), koszul(&u).scale(&rat(1, 6)));
    }

    #[test]
    fn cell_integrals() {
        let t = CellGeometry::reference_triangle();
        assert_eq!(integrate_cell(&Polynomial::one(), &t), rat(1, 2));
        let [l1, l2, l3] = t.barycentric().unwrap();
        let bt = &(&l1 * &l2) * &l3;
        assert_eq!(integrate_cell(&bt, &t), rat(1, 120));
        let r = CellGeometry::reference_rectangle();
        assert_eq!(integrate_cell(&Polynomial::monomial(2, 2, int(1)), &r), rat(4, 9));
    }

    #[test]
    fn edge_integrals() {
        let e = integrate_segment(&Polynomial::one(), &ipoint(0, 0), &ipoint(1, 0));
        assert_eq!(e.factor, int(1));
        assert_eq!(e.length_sq, int(1));
        let e = integrate_segment(&Polynomial::x(), &ipoint(0, 0), &ipoint(0, 1));
        assert!(e.factor.is_zero());
        let e = integrate_segment(&Polynomial::x(), &ipoint(1, 0), &ipoint(0, 1));
        assert_eq!(e.factor, rat(1, 2));
        assert_eq!(e.length_sq, int(2));
        assert!((e.to_f64() - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn barycentric_partition_of_unity() {
        let t = CellGeometry::triangle([ipoint(1, 1), [rat(7, 2), int(2)], [int(0), rat(9, 4)]]).unwrap();
        let l = t.barycentric().unwrap();
        let s = &(&l[0] + &l[1]) + &l[2];
        assert_eq!(s, Polynomial::one());
        for (i, v) in t.vertices().iter().enumerate() {
            for (j, lj) in l.iter().enumerate() {
                assert_eq!(lj.eval(v), if i == j { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn legendre_is_orthogonal() {
        for m in 0..5 {
            for n in 0..5 {
                let ip = Univariate::legendre01(m).mul(&Univariate::legendre01(n)).integrate_unit();
                if m == n {
                    assert_eq!(ip, rat(1, 2 * m as i64 + 1));
                } else {
                    assert!(ip.is_zero());
                }
            }
        }
    }

    #[test]
    fn translate_roundtrip() {
        let p = &Polynomial::monomial(3, 1, rat(2, 3)) + &Polynomial::monomial(0, 2, int(-5));
        let c = [rat(1, 3), rat(-2, 7)];
        let back = p.translate(&c).translate(&[-c[0].clone(), -c[1].clone()]);
        assert_eq!(back, p);
        let pt = [rat(1, 5), rat(4, 9)];
        let shifted = [&pt[0] + &c[0], &pt[1] + &c[1]];
        assert_eq!(p.translate(&c).eval(&pt), p.eval(&shifted));
    }
}
