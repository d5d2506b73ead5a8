//! Pole loci of rational expressions.
//!
//! A pole locus is an affine complex hyperplane `a·z + b = 0` with an order.
//! In ℂ¹ it is a point. Denominators are factored structurally (products and
//! powers) and each factor is expanded to a polynomial; linear factors give
//! one locus, univariate factors are solved numerically.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::functions::expr::{Expr, Var};
use crate::scalar::{czero, CPoint, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct Pole<T: Real> {
    /// Coefficients `a` of the locus `a·z + b = 0`.
    pub normal: [C<T>; 2],
    pub offset: C<T>,
    pub order: u32,
}

impl<T: Real> Pole<T> {
    /// Point pole `z_k = root`.
    pub fn at_coordinate(coord: usize, root: C<T>, order: u32) -> Self {
        let mut normal = [czero(), czero()];
        normal[coord] = C::new(T::one(), T::zero());
        Pole { normal, offset: -root, order }
    }

    fn normal_norm(&self) -> T {
        (self.normal[0].norm_sqr() + self.normal[1].norm_sqr()).sqrt()
    }

    /// Euclidean distance from `z` to the locus.
    pub fn distance(&self, z: &CPoint<T>) -> T {
        let v = self.normal[0] * z[0] + self.normal[1] * z[1] + self.offset;
        v.norm() / self.normal_norm()
    }

    /// Locus of `z ↦ g(z − s)` when `self` is a locus of `g`.
    pub fn shifted(&self, s: &CPoint<T>) -> Self {
        let mut p = self.clone();
        p.offset = self.offset - (self.normal[0] * s[0] + self.normal[1] * s[1]);
        p
    }

    /// `Some(k)` when the locus constrains only coordinate `k`.
    pub fn coordinate(&self) -> Option<usize> {
        let tiny = T::lit(1e-14) * self.normal_norm();
        match (self.normal[0].norm() > tiny, self.normal[1].norm() > tiny) {
            (true, false) => Some(0),
            (false, true) => Some(1),
            _ => None,
        }
    }

    /// For coordinate-aligned loci, the value of that coordinate on the locus.
    pub fn coordinate_root(&self) -> Option<(usize, C<T>)> {
        self.coordinate().map(|k| (k, -self.offset / self.normal[k]))
    }

    /// Orthogonal projection of `z` onto the locus.
    pub fn project(&self, z: &CPoint<T>) -> CPoint<T> {
        let v = self.normal[0] * z[0] + self.normal[1] * z[1] + self.offset;
        let nn = self.normal[0].norm_sqr() + self.normal[1].norm_sqr();
        let t = v / C::new(nn, T::zero());
        [z[0] - t * self.normal[0].conj(), z[1] - t * self.normal[1].conj()]
    }

    fn same_locus(&self, other: &Self) -> bool {
        // compare normalized representations
        let k = if self.normal[0].norm() >= self.normal[1].norm() { 0 } else { 1 };
        if other.normal[k].norm() == T::zero() {
            return false;
        }
        let s = self.normal[k];
        let o = other.normal[k];
        let tol = T::lit(1e-7);
        (0..2).all(|j| (self.normal[j] / s - other.normal[j] / o).norm() < tol)
            && (self.offset / s - other.offset / o).norm() < tol * (T::one() + (self.offset / s).norm())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Combine {
    Sum,
    Max,
}

fn merge<T: Real>(mut a: Vec<Pole<T>>, b: Vec<Pole<T>>, how: Combine) -> Vec<Pole<T>> {
    for p in b {
        if let Some(q) = a.iter_mut().find(|q| q.same_locus(&p)) {
            q.order = match how {
                Combine::Sum => q.order + p.order,
                Combine::Max => q.order.max(p.order),
            };
        } else {
            a.push(p);
        }
    }
    a
}

/// Pole loci of a holomorphic rational expression (orders are upper bounds:
/// cancellation against numerator zeros is not detected).
pub fn pole_loci<T: Real>(e: &Expr<T>) -> Result<Vec<Pole<T>>> {
    match e {
        Expr::Const(_) | Expr::Var(_) => Ok(Vec::new()),
        Expr::Add(a, b) | Expr::Sub(a, b) => Ok(merge(pole_loci(a)?, pole_loci(b)?, Combine::Max)),
        Expr::Mul(a, b) => Ok(merge(pole_loci(a)?, pole_loci(b)?, Combine::Sum)),
        Expr::Neg(a) => pole_loci(a),
        Expr::Div(a, b) => {
            let p = merge(pole_loci(a)?, pole_loci(b)?, Combine::Max);
            Ok(merge(p, zero_loci(b)?, Combine::Sum))
        }
        Expr::Pow(a, n) if *n >= 0 => Ok(scale_orders(pole_loci(a)?, *n as u32)),
        Expr::Pow(a, n) => {
            let p = pole_loci(a)?;
            Ok(merge(p, scale_orders(zero_loci(a)?, n.unsigned_abs()), Combine::Sum))
        }
    }
}

fn scale_orders<T: Real>(v: Vec<Pole<T>>, n: u32) -> Vec<Pole<T>> {
    v.into_iter()
        .filter(|_| n > 0)
        .map(|mut p| {
            p.order *= n;
            p
        })
        .collect()
}

/// Zero loci of an expression used as a denominator.
fn zero_loci<T: Real>(e: &Expr<T>) -> Result<Vec<Pole<T>>> {
    match e {
        Expr::Mul(a, b) => Ok(merge(zero_loci(a)?, zero_loci(b)?, Combine::Sum)),
        Expr::Neg(a) => zero_loci(a),
        Expr::Div(a, _) => zero_loci(a),
        Expr::Pow(a, n) if *n > 0 => Ok(scale_orders(zero_loci(a)?, *n as u32)),
        Expr::Pow(_, _) => Ok(Vec::new()),
        Expr::Const(c) if *c != czero() => Ok(Vec::new()),
        _ => {
            let poly = Poly::from_expr(e)
                .ok_or_else(|| Error::Unsupported(format!("denominator '{e}' is not a polynomial in z")))?;
            poly.zero_loci()
        }
    }
}

/// Multivariate polynomial in `z1`, `z2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Real> {
    terms: BTreeMap<[u32; 2], C<T>>,
}

impl<T: Real> Poly<T> {
    fn constant(c: C<T>) -> Self {
        let mut terms = BTreeMap::new();
        if c != czero() {
            terms.insert([0, 0], c);
        }
        Poly { terms }
    }

    pub fn from_expr(e: &Expr<T>) -> Option<Self> {
        match e {
            Expr::Const(c) => Some(Self::constant(*c)),
            Expr::Var(Var::Z(k)) => {
                let mut m = [0, 0];
                m[*k] = 1;
                Some(Poly { terms: BTreeMap::from([(m, C::new(T::one(), T::zero()))]) })
            }
            Expr::Var(Var::Zbar(_)) => None,
            Expr::Add(a, b) => Some(Self::from_expr(a)?.plus(&Self::from_expr(b)?, T::one())),
            Expr::Sub(a, b) => Some(Self::from_expr(a)?.plus(&Self::from_expr(b)?, -T::one())),
            Expr::Mul(a, b) => Some(Self::from_expr(a)?.times(&Self::from_expr(b)?)),
            Expr::Neg(a) => Some(Self::constant(C::new(T::zero(), T::zero())).plus(&Self::from_expr(a)?, -T::one())),
            Expr::Pow(a, n) if *n >= 0 => {
                let base = Self::from_expr(a)?;
                let mut acc = Self::constant(C::new(T::one(), T::zero()));
                for _ in 0..*n {
                    acc = acc.times(&base);
                }
                Some(acc)
            }
            Expr::Div(a, b) => {
                // only division by a nonzero constant stays polynomial
                let d = match **b {
                    Expr::Const(c) if c != czero() => c,
                    _ => return None,
                };
                let mut p = Self::from_expr(a)?;
                for v in p.terms.values_mut() {
                    *v = *v / d;
                }
                Some(p)
            }
            Expr::Pow(..) => None,
        }
    }

    fn plus(&self, other: &Self, sign: T) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let e = terms.entry(*m).or_insert_with(czero);
            *e = *e + *c * sign;
        }
        terms.retain(|_, c| *c != czero());
        Poly { terms }
    }

    fn times(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = [ma[0] + mb[0], ma[1] + mb[1]];
                let e = terms.entry(m).or_insert_with(czero);
                *e = *e + *ca * *cb;
            }
        }
        terms.retain(|_, c: &mut C<T>| *c != czero());
        Poly { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m[0] + m[1]).max().unwrap_or(0)
    }

    fn zero_loci(&self) -> Result<Vec<Pole<T>>> {
        if self.terms.is_empty() {
            return Err(Error::Unsupported("denominator is identically zero".into()));
        }
        match self.degree() {
            0 => Ok(Vec::new()),
            1 => {
                let get = |m: [u32; 2]| self.terms.get(&m).copied().unwrap_or_else(czero);
                Ok(vec![Pole { normal: [get([1, 0]), get([0, 1])], offset: get([0, 0]), order: 1 }])
            }
            _ => {
                let uses: Vec<usize> = (0..2).filter(|&k| self.terms.keys().any(|m| m[k] > 0)).collect();
                if uses.len() != 1 {
                    return Err(Error::Unsupported("nonlinear denominator in several variables".into()));
                }
                let k = uses[0];
                let deg = self.degree() as usize;
                let mut coeffs = vec![czero(); deg + 1];
                for (m, c) in &self.terms {
                    coeffs[m[k] as usize] = *c;
                }
                Ok(cluster_roots(&poly_roots(&coeffs))
                    .into_iter()
                    .map(|(r, mult)| Pole::at_coordinate(k, r, mult))
                    .collect())
            }
        }
    }
}

/// Roots of `Σ c_j t^j` by Durand–Kerner; exact zero roots are split off first.
pub fn poly_roots<T: Real>(coeffs: &[C<T>]) -> Vec<C<T>> {
    let mut c: Vec<C<T>> = coeffs.to_vec();
    while c.last().is_some_and(|v| *v == czero()) {
        c.pop();
    }
    let mut roots = Vec::new();
    let lead_zeros = c.iter().take_while(|v| **v == czero()).count();
    roots.extend(std::iter::repeat_n(czero(), lead_zeros));
    let c: Vec<C<T>> = c[lead_zeros..].to_vec();
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return roots;
    }
    let lead = c[deg];
    let monic: Vec<C<T>> = c.iter().map(|v| *v / lead).collect();
    let bound = T::one() + monic[..deg].iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let seed = C::new(T::lit(0.4), T::lit(0.9));
    let mut z: Vec<C<T>> = (0..deg).map(|j| seed.powi(j as i32) * bound).collect();
    let eval = |t: C<T>| monic.iter().rev().fold(czero::<T>(), |acc, a| acc * t + *a);
    for _ in 0..1000 {
        let mut delta = T::zero();
        for i in 0..deg {
            let mut den = C::new(T::one(), T::zero());
            for j in 0..deg {
                if i != j {
                    den = den * (z[i] - z[j]);
                }
            }
            if den == czero() {
                den = C::new(T::epsilon(), T::zero());
            }
            let step: C<T> = eval(z[i]) / den;
            z[i] = z[i] - step;
            delta = delta.max(step.norm());
        }
        if delta <= T::epsilon() * bound {
            break;
        }
    }
    roots.extend(z);
    roots
}

/// Groups numerically coincident roots (multiple roots converge only to about
/// `sqrt(eps)`) and returns cluster means with multiplicities.
fn cluster_roots<T: Real>(roots: &[C<T>]) -> Vec<(C<T>, u32)> {
    let tol = T::lit(1e-5);
    let mut out: Vec<(C<T>, u32, C<T>)> = Vec::new();
    for r in roots {
        if let Some(cl) = out.iter_mut().find(|(c, _, _)| (*c - *r).norm() <= tol * (T::one() + r.norm())) {
            cl.1 += 1;
            cl.2 = cl.2 + *r;
            cl.0 = cl.2 / T::from_u32(cl.1).unwrap();
        } else {
            out.push((*r, 1, *r));
        }
    }
    out.into_iter().map(|(c, m, _)| (c, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::expr::parse;

    fn loci(src: &str, dim: usize) -> Vec<Pole<f64>> {
        pole_loci(&parse::<f64>(src, dim).unwrap()).unwrap()
    }

    #[test]
    fn double_pole_at_origin() {
        let p = loci("1/z^2", 1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].order, 2);
        let (k, r) = p[0].coordinate_root().unwrap();
        assert_eq!(k, 0);
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn simple_and_expanded_denominators() {
        let p = loci("1/(z-1)", 1);
        assert_eq!(p[0].order, 1);
        assert!((p[0].coordinate_root().unwrap().1 - C::new(1.0, 0.0)).norm() < 1e-15);

        // (z+0.5)^2 expanded: double root found numerically
        let q = loci("1/(z^2 + z + 0.25)", 1);
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].order, 2);
        assert!((q[0].coordinate_root().unwrap().1 - C::new(-0.5, 0.0)).norm() < 1e-6);

        let r = loci("z/((z-2i)*(z+1))^3", 1);
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|p| p.order == 3));
    }

    #[test]
    fn polynomials_have_no_poles() {
        assert!(loci("z^3 - 2*z + 1", 1).is_empty());
        assert!(loci("z1*z2 + 1", 2).is_empty());
    }

    #[test]
    fn affine_loci_in_two_variables() {
        let p = loci("1/z1^2", 2);
        assert_eq!(p[0].coordinate(), Some(0));
        assert_eq!(p[0].order, 2);
        let q = loci("1/(z1 - z2 + 1)", 2);
        assert_eq!(q[0].coordinate(), None);
        let z = [C::new(0.0, 0.0), C::new(0.0, 0.0)];
        // distance from origin to {z1 − z2 + 1 = 0} is 1/√2
        assert!((q[0].distance(&z) - 0.5_f64.sqrt()).abs() < 1e-15);
        let proj = q[0].project(&z);
        assert!(q[0].distance(&proj) < 1e-15);
    }

    #[test]
    fn shifting_moves_the_locus() {
        let p = loci("1/z^2", 1).remove(0);
        let s = [C::new(0.1, 0.1), C::new(0.0, 0.0)];
        let q = p.shifted(&s);
        assert!((q.coordinate_root().unwrap().1 - s[0]).norm() < 1e-16);
    }

    #[test]
    fn durand_kerner_cubic() {
        // (t − 1)(t − 2)(t + 3) = t³ − 7t + 6
        let c = [C::new(6.0, 0.0), C::new(-7.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let mut r: Vec<f64> = poly_roots(&c).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
