//! Finite-dimensional algebras, coalgebras and Hopf algebras given by
//! structure constants, with exhaustive axiom checks.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::invert;
use crate::report::ValidationReport;
use crate::space::BasedSpace;
use crate::sparse::{permutation_matrix, SparseMatrix, SparseVec};
use crate::tensor::StructureTensor;

/// `space^{⊗k}` with tensor labels.
pub fn tensor_power(space: &BasedSpace, k: usize) -> BasedSpace {
    let fs: Vec<&BasedSpace> = (0..k).map(|_| space).collect();
    BasedSpace::tensor(&fs)
}

fn check_shape(what: &str, m: &SparseMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::ShapeMismatch(format!(
            "{what}: expected {rows}x{cols}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraData {
    pub space: BasedSpace,
    pub mul: StructureTensor,
    pub unit: SparseVec,
    unit_t: StructureTensor,
}

impl AlgebraData {
    /// `mul` is `d x d²` with column `a*d + b` holding `a·b`.
    pub fn new(space: BasedSpace, mul: SparseMatrix, unit: SparseVec) -> Result<Self> {
        let d = space.dim();
        check_shape("product", &mul, d, d * d)?;
        if unit.max_index().is_some_and(|m| m >= d) {
            return Err(Error::ShapeMismatch("unit outside the space".into()));
        }
        Ok(AlgebraData {
            mul: StructureTensor::new(vec![d, d], vec![d], mul),
            unit_t: StructureTensor::element(vec![d], unit.clone()),
            space,
            unit,
        })
    }

    /// The ground field.
    pub fn ground() -> Self {
        AlgebraData::new(
            BasedSpace::ground(),
            SparseMatrix::identity(1),
            SparseVec::unit(0),
        )
        .expect("ground algebra")
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn mul_matrix(&self) -> &SparseMatrix {
        self.mul.matrix()
    }

    pub fn unit_matrix(&self) -> SparseMatrix {
        SparseMatrix::column_vector(self.dim(), self.unit.clone())
    }

    pub fn unit_tensor(&self) -> &StructureTensor {
        &self.unit_t
    }

    pub fn product(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let d = self.dim();
        let mut pairs = Vec::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let xy = x * y;
                for (k, c) in self.mul_matrix().column(i * d + j).iter() {
                    pairs.push((k, c * &xy));
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// Matrix of left multiplication by `a`.
    pub fn left_mul(&self, a: &SparseVec) -> SparseMatrix {
        let d = self.dim();
        SparseMatrix::from_columns(d, (0..d).map(|j| self.product(a, &SparseVec::unit(j))).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraData {
    pub space: BasedSpace,
    pub comul: StructureTensor,
    pub counit: SparseVec,
    counit_t: StructureTensor,
}

impl CoalgebraData {
    /// `comul` is `d² x d`; `counit` lists the values on the basis.
    pub fn new(space: BasedSpace, comul: SparseMatrix, counit: SparseVec) -> Result<Self> {
        let d = space.dim();
        check_shape("coproduct", &comul, d * d, d)?;
        if counit.max_index().is_some_and(|m| m >= d) {
            return Err(Error::ShapeMismatch("counit outside the space".into()));
        }
        Ok(CoalgebraData {
            comul: StructureTensor::new(vec![d], vec![d, d], comul),
            counit_t: StructureTensor::functional(vec![d], &counit),
            space,
            counit,
        })
    }

    pub fn ground() -> Self {
        CoalgebraData::new(
            BasedSpace::ground(),
            SparseMatrix::identity(1),
            SparseVec::unit(0),
        )
        .expect("ground coalgebra")
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn comul_matrix(&self) -> &SparseMatrix {
        self.comul.matrix()
    }

    pub fn counit_matrix(&self) -> SparseMatrix {
        SparseMatrix::row_vector(self.dim(), &self.counit)
    }

    pub fn counit_tensor(&self) -> &StructureTensor {
        &self.counit_t
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfData {
    pub alg: AlgebraData,
    pub coalg: CoalgebraData,
    pub antipode: SparseMatrix,
    /// Zero when the antipode is singular; validation then reports it.
    pub antipode_inv: SparseMatrix,
    s_t: StructureTensor,
    sinv_t: StructureTensor,
}

impl HopfData {
    /// Assembles a Hopf algebra; the inverse antipode is computed when not supplied.
    pub fn new(
        alg: AlgebraData,
        coalg: CoalgebraData,
        antipode: SparseMatrix,
        antipode_inv: Option<SparseMatrix>,
    ) -> Result<Self> {
        let d = alg.dim();
        if coalg.space != alg.space {
            return Err(Error::ShapeMismatch("algebra and coalgebra bases differ".into()));
        }
        check_shape("antipode", &antipode, d, d)?;
        let antipode_inv = match antipode_inv {
            Some(m) => {
                check_shape("inverse antipode", &m, d, d)?;
                m
            }
            None => invert(&antipode).unwrap_or_else(|| SparseMatrix::zeros(d, d)),
        };
        Ok(HopfData {
            s_t: StructureTensor::linear(antipode.clone()),
            sinv_t: StructureTensor::linear(antipode_inv.clone()),
            alg,
            coalg,
            antipode,
            antipode_inv,
        })
    }

    pub fn ground() -> Self {
        HopfData::new(
            AlgebraData::ground(),
            CoalgebraData::ground(),
            SparseMatrix::identity(1),
            None,
        )
        .expect("ground Hopf algebra")
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn space(&self) -> &BasedSpace {
        &self.alg.space
    }

    pub fn mul(&self) -> &StructureTensor {
        &self.alg.mul
    }

    pub fn unit(&self) -> &StructureTensor {
        self.alg.unit_tensor()
    }

    pub fn comul(&self) -> &StructureTensor {
        &self.coalg.comul
    }

    pub fn counit(&self) -> &StructureTensor {
        self.coalg.counit_tensor()
    }

    pub fn s(&self) -> &StructureTensor {
        &self.s_t
    }

    pub fn s_inv(&self) -> &StructureTensor {
        &self.sinv_t
    }

    pub fn unit_vec(&self) -> &SparseVec {
        &self.alg.unit
    }

    pub fn counit_vec(&self) -> &SparseVec {
        &self.coalg.counit
    }
}

pub fn validate_algebra(a: &AlgebraData) -> ValidationReport {
    let d = a.dim();
    let id = SparseMatrix::identity(d);
    let mu = a.mul_matrix();
    let eta = a.unit_matrix();
    let mut r = ValidationReport::new("algebra");
    let a3 = tensor_power(&a.space, 3);
    let lhs = SparseMatrix::chain(&[mu, &mu.kron(&id)]);
    let rhs = SparseMatrix::chain(&[mu, &id.kron(mu)]);
    r.compare("associativity", &lhs, &rhs, &a3, &a.space);
    r.compare("left unit", &SparseMatrix::chain(&[mu, &eta.kron(&id)]), &id, &a.space, &a.space);
    r.compare("right unit", &SparseMatrix::chain(&[mu, &id.kron(&eta)]), &id, &a.space, &a.space);
    r
}

pub fn validate_coalgebra(c: &CoalgebraData) -> ValidationReport {
    let d = c.dim();
    let id = SparseMatrix::identity(d);
    let delta = c.comul_matrix();
    let eps = c.counit_matrix();
    let mut r = ValidationReport::new("coalgebra");
    let c3 = tensor_power(&c.space, 3);
    let lhs = SparseMatrix::chain(&[&delta.kron(&id), delta]);
    let rhs = SparseMatrix::chain(&[&id.kron(delta), delta]);
    r.compare("coassociativity", &lhs, &rhs, &c.space, &c3);
    r.compare("left counit", &SparseMatrix::chain(&[&eps.kron(&id), delta]), &id, &c.space, &c.space);
    r.compare("right counit", &SparseMatrix::chain(&[&id.kron(&eps), delta]), &id, &c.space, &c.space);
    r
}

pub fn validate_hopf(h: &HopfData) -> ValidationReport {
    let d = h.dim();
    let sp = h.space();
    let id = SparseMatrix::identity(d);
    let mu = h.alg.mul_matrix();
    let eta = h.alg.unit_matrix();
    let delta = h.coalg.comul_matrix();
    let eps = h.coalg.counit_matrix();
    let s = &h.antipode;
    let mut r = ValidationReport::new("hopf");
    r.absorb(validate_algebra(&h.alg));
    r.absorb(validate_coalgebra(&h.coalg));
    let h2 = tensor_power(sp, 2);
    let middle = permutation_matrix(&[d, d, d, d], &[0, 2, 1, 3]);
    let lhs = SparseMatrix::chain(&[delta, mu]);
    let rhs = SparseMatrix::chain(&[&mu.kron(mu), &middle, &delta.kron(delta)]);
    r.compare("coproduct multiplicative", &lhs, &rhs, &h2, &h2);
    let ground = BasedSpace::ground();
    r.compare("coproduct unital", &delta.compose(&eta).unwrap(), &eta.kron(&eta), &ground, &h2);
    r.compare("counit multiplicative", &eps.compose(mu).unwrap(), &eps.kron(&eps), &h2, &ground);
    r.compare("counit unital", &eps.compose(&eta).unwrap(), &SparseMatrix::identity(1), &ground, &ground);
    let ee = eta.compose(&eps).unwrap();
    r.compare("left antipode", &SparseMatrix::chain(&[mu, &s.kron(&id), delta]), &ee, sp, sp);
    r.compare("right antipode", &SparseMatrix::chain(&[mu, &id.kron(s), delta]), &ee, sp, sp);
    r.compare("inverse antipode (left)", &h.antipode_inv.compose(s).unwrap(), &id, sp, sp);
    r.compare("inverse antipode (right)", &s.compose(&h.antipode_inv).unwrap(), &id, sp, sp);
    r
}

/// `Δ^{(k-1)}`: the map `C -> C^{⊗k}` applying the coproduct `k-1` times,
/// always splitting the first factor. Checked against splitting the last factor.
pub fn iterated_coproduct(c: &CoalgebraData, k: usize) -> Result<StructureTensor> {
    assert!(k >= 1, "at least one output factor");
    let d = c.dim();
    let delta = c.comul_matrix();
    let mut left = SparseMatrix::identity(d);
    let mut right = SparseMatrix::identity(d);
    for j in 1..k {
        let rest = SparseMatrix::identity(d.pow((j - 1) as u32));
        left = delta.kron(&rest).compose(&left)?;
        right = rest.kron(delta).compose(&right)?;
    }
    if left != right {
        return Err(Error::BracketingMismatch { order: k });
    }
    Ok(StructureTensor::new(vec![d], vec![d; k], left))
}

/// A character `δ` and a group-like `σ` on a Hopf algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPair {
    pub hopf: Arc<HopfData>,
    pub delta: SparseVec,
    pub sigma: SparseVec,
}

impl ModularPair {
    pub fn new(hopf: Arc<HopfData>, delta: SparseVec, sigma: SparseVec) -> Self {
        ModularPair { hopf, delta, sigma }
    }

    /// The pair `(ε, 1)`.
    pub fn trivial(hopf: Arc<HopfData>) -> Self {
        let delta = hopf.counit_vec().clone();
        let sigma = hopf.unit_vec().clone();
        ModularPair { hopf, delta, sigma }
    }

    pub fn delta_tensor(&self) -> StructureTensor {
        StructureTensor::functional(vec![self.hopf.dim()], &self.delta)
    }

    pub fn sigma_tensor(&self) -> StructureTensor {
        StructureTensor::element(vec![self.hopf.dim()], self.sigma.clone())
    }

    /// Character, group-like and `δ(σ) = 1` conditions.
    pub fn validate_structure(&self) -> ValidationReport {
        let h = &*self.hopf;
        let d = h.dim();
        let sp = h.space();
        let ground = BasedSpace::ground();
        let mut r = ValidationReport::new("modular pair");
        let delta = SparseMatrix::row_vector(d, &self.delta);
        let sigma = SparseMatrix::column_vector(d, self.sigma.clone());
        r.compare(
            "character multiplicative",
            &delta.compose(h.alg.mul_matrix()).unwrap(),
            &delta.kron(&delta),
            &tensor_power(sp, 2),
            &ground,
        );
        r.compare(
            "character unital",
            &delta.compose(&h.alg.unit_matrix()).unwrap(),
            &SparseMatrix::identity(1),
            &ground,
            &ground,
        );
        r.compare(
            "group-like coproduct",
            &h.coalg.comul_matrix().compose(&sigma).unwrap(),
            &sigma.kron(&sigma),
            &ground,
            &tensor_power(sp, 2),
        );
        r.compare(
            "group-like counit",
            &h.coalg.counit_matrix().compose(&sigma).unwrap(),
            &SparseMatrix::identity(1),
            &ground,
            &ground,
        );
        r.compare(
            "delta(sigma) = 1",
            &delta.compose(&sigma).unwrap(),
            &SparseMatrix::identity(1),
            &ground,
            &ground,
        );
        r
    }
}

/// Matrix of `h ↦ δ(h⁽¹⁾) S(h⁽²⁾)`.
pub fn twisted_antipode(mp: &ModularPair) -> SparseMatrix {
    let h = &*mp.hopf;
    let delta = SparseMatrix::row_vector(h.dim(), &mp.delta);
    SparseMatrix::chain(&[&h.antipode, &delta.kron(&SparseMatrix::identity(h.dim())), h.coalg.comul_matrix()])
}

/// Matrix of `h ↦ σ h σ⁻¹`, with `σ⁻¹ = S(σ)`.
pub fn adjoint_by(h: &HopfData, sigma: &SparseVec) -> SparseMatrix {
    let inv = h.antipode.mul_vec(sigma);
    let d = h.dim();
    SparseMatrix::from_columns(
        d,
        (0..d)
            .map(|j| h.alg.product(&h.alg.product(sigma, &SparseVec::unit(j)), &inv))
            .collect(),
    )
}

/// The two readings of the involution condition, reported side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionReadings {
    /// `S̃_δ = Ad σ`
    pub literal: bool,
    /// `S̃_δ² = Ad σ`
    pub squared: bool,
}

pub fn involution_readings(mp: &ModularPair) -> InvolutionReadings {
    let st = twisted_antipode(mp);
    let ad = adjoint_by(&mp.hopf, &mp.sigma);
    InvolutionReadings {
        literal: st == ad,
        squared: st.compose(&st).unwrap() == ad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic_group_algebra, element, sign_character, sweedler};
    use crate::scalar::Scalar;
    use crate::tensor::Terms;

    fn kz2_with_mul(gg: usize) -> AlgebraData {
        let sp = BasedSpace::new(["e", "g"]).unwrap();
        let t = vec![
            (0, 0, Scalar::one()),
            (1, 1, Scalar::one()),
            (1, 2, Scalar::one()),
            (gg, 3, Scalar::one()),
        ];
        AlgebraData::new(sp, SparseMatrix::from_triplets(2, 4, t).unwrap(), SparseVec::unit(0)).unwrap()
    }

    #[test]
    fn group_algebra_products() {
        assert!(validate_algebra(&kz2_with_mul(0)).is_valid());
        // g·g = g gives the split algebra with idempotent g: still associative and unital.
        assert!(validate_algebra(&kz2_with_mul(1)).is_valid());
        assert!(validate_algebra(&AlgebraData::ground()).is_valid());
    }

    #[test]
    fn broken_associativity_is_pinpointed() {
        // cyclic group of order 3 with g·g2 corrupted to g
        let sp = BasedSpace::new(["e", "g", "g2"]).unwrap();
        let mut t = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let c = if (a, b) == (1, 2) { 1 } else { (a + b) % 3 };
                t.push((c, a * 3 + b, Scalar::one()));
            }
        }
        let a = AlgebraData::new(sp, SparseMatrix::from_triplets(3, 9, t).unwrap(), SparseVec::unit(0)).unwrap();
        let r = validate_algebra(&a);
        assert!(r.violations.iter().any(|v| v.law == "associativity" && v.witness == "g|g|g"));
        assert!(!r.failed_laws().contains(&"left unit"));
    }

    #[test]
    fn coalgebra_examples() {
        let h = cyclic_group_algebra(2);
        assert!(validate_coalgebra(&h.coalg).is_valid());
        let sp = BasedSpace::new(["e", "g"]).unwrap();
        let bad = CoalgebraData::new(
            sp,
            SparseMatrix::from_triplets(4, 2, vec![(0, 0, Scalar::one()), (2, 1, Scalar::one())]).unwrap(),
            SparseVec::from_pairs(vec![(0, Scalar::one()), (1, Scalar::one())]),
        )
        .unwrap();
        let r = validate_coalgebra(&bad);
        assert!(r.failed_laws().contains(&"left counit"));
        assert!(validate_coalgebra(&CoalgebraData::ground()).is_valid());
    }

    #[test]
    fn hopf_examples() {
        assert!(validate_hopf(&cyclic_group_algebra(2)).is_valid());
        assert!(validate_hopf(&cyclic_group_algebra(3)).is_valid());
        let h4 = sweedler();
        assert!(validate_hopf(&h4).is_valid(), "{}", validate_hopf(&h4));
        let mut broken = sweedler();
        let s = SparseMatrix::from_triplets(
            4,
            4,
            vec![
                (0, 0, Scalar::one()),
                (1, 1, Scalar::one()),
                (2, 2, Scalar::one()),
                (2, 3, Scalar::one()),
            ],
        )
        .unwrap();
        broken = HopfData::new(broken.alg.clone(), broken.coalg.clone(), s, None).unwrap();
        let r = validate_hopf(&broken);
        assert!(r.failed_laws().contains(&"left antipode"));
    }

    #[test]
    fn antipode_consequences() {
        for h in [cyclic_group_algebra(2), cyclic_group_algebra(3), sweedler()] {
            let eps = h.coalg.counit_matrix();
            assert_eq!(eps.compose(&h.antipode).unwrap(), eps);
            assert_eq!(h.antipode.mul_vec(h.unit_vec()), h.unit_vec().clone());
        }
        let h = cyclic_group_algebra(3);
        assert_eq!(h.antipode.pow(2), SparseMatrix::identity(3));
    }

    #[test]
    fn iterated_coproducts() {
        let h4 = sweedler();
        let one = iterated_coproduct(&h4.coalg, 1).unwrap();
        assert_eq!(one.matrix(), &SparseMatrix::identity(4));
        let h = cyclic_group_algebra(2);
        let d3 = iterated_coproduct(&h.coalg, 3).unwrap();
        assert_eq!(d3.at(1), &[(vec![1, 1, 1], Scalar::one())]);
        let d3 = iterated_coproduct(&h4.coalg, 3).unwrap();
        let mut got: Vec<_> = d3.at(2).to_vec();
        got.sort();
        // x⊗1⊗1 + g⊗x⊗1 + g⊗g⊗x
        let mut want = vec![
            (vec![2, 0, 0], Scalar::one()),
            (vec![1, 2, 0], Scalar::one()),
            (vec![1, 1, 2], Scalar::one()),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn counit_contraction_of_iterated_coproduct() {
        for h in [cyclic_group_algebra(3), sweedler()] {
            for k in 2..5 {
                let big = iterated_coproduct(&h.coalg, k).unwrap();
                let small = iterated_coproduct(&h.coalg, k - 1).unwrap();
                for slot in 0..k {
                    for i in 0..h.dim() {
                        let t = Terms::from_items(big.at(i).to_vec()).apply(h.counit(), &[slot], 0);
                        let dims = vec![h.dim(); k - 1];
                        let want = Terms::from_items(small.at(i).to_vec()).flatten(&dims);
                        assert_eq!(t.flatten(&dims), want);
                    }
                }
            }
        }
    }

    #[test]
    fn twisted_antipode_examples() {
        let h2 = Arc::new(cyclic_group_algebra(2));
        let mp = ModularPair::trivial(h2.clone());
        assert_eq!(twisted_antipode(&mp), h2.antipode);
        let h4 = Arc::new(sweedler());
        let mp = ModularPair::new(h4.clone(), sign_character(&h4), element(&h4, "1"));
        assert!(mp.validate_structure().is_valid());
        let st = twisted_antipode(&mp);
        assert_eq!(st.mul_vec(&element(&h4, "x")), element(&h4, "gx"));
        let readings = involution_readings(&mp);
        assert!(readings.squared);
    }
}
