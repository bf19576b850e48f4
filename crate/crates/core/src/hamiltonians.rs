//! ANNNI chain and Kitaev-Heisenberg ladder Hamiltonians.
//!
//! Both models are written with spin operators `S = sigma / 2`, so every
//! two-site term carries a factor 1/4 and every field term a factor 1/2 when
//! expanded into Pauli strings.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spin_ops::{Pauli, PauliString, SparseOperator};

/// Couplings of the open ANNNI chain, with `J1 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnniParams {
    pub n: usize,
    /// `J2 / J1`
    pub k: f64,
    /// `h / J1`
    pub g: f64,
}

impl AnnniParams {
    pub fn new(n: usize, k: f64, g: f64) -> Result<Self> {
        let p = AnnniParams { n, k, g };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams("ANNNI chain needs at least 2 sites"));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParams("ANNNI k must be finite and non-negative"));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParams("ANNNI g must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Kitaev-Heisenberg ladder with `L` rungs, `K = sin(phi)`, `J = cos(phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KhParams {
    pub l: usize,
    pub phi: f64,
}

impl KhParams {
    pub fn new(l: usize, phi: f64) -> Result<Self> {
        let p = KhParams { l, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 4 || self.l % 2 != 0 {
            return Err(Error::InvalidParams("ladder length L must be even and at least 4"));
        }
        if !(self.phi >= 0.0 && self.phi < 2.0 * PI) {
            return Err(Error::InvalidParams("phi must lie in [0, 2pi)"));
        }
        Ok(())
    }

    pub fn kitaev(&self) -> f64 {
        libm::sin(self.phi)
    }

    pub fn heisenberg(&self) -> f64 {
        libm::cos(self.phi)
    }

    pub fn n_sites(&self) -> usize {
        2 * self.l
    }
}

/// Qubit index of the spin on `rung` (0-based) and `leg` (0 or 1).
///
/// Rungs are stored consecutively: `(rung 0, leg 0), (rung 0, leg 1),
/// (rung 1, leg 0), ...`.
#[inline]
pub fn ladder_site(rung: usize, leg: usize) -> usize {
    2 * rung + leg
}

fn two_site(n: usize, a: usize, b: usize, p: Pauli) -> PauliString {
    PauliString::from_sites(n, &[(a, p), (b, p)]).expect("sites checked by caller")
}

/// Pauli-string expansion of the ANNNI Hamiltonian (open boundaries).
pub fn annni_terms(p: &AnnniParams) -> Result<Vec<(f64, PauliString)>> {
    p.validate()?;
    let n = p.n;
    let mut terms = Vec::with_capacity(3 * n);
    for i in 0..n - 1 {
        terms.push((-0.25, two_site(n, i, i + 1, Pauli::Z)));
    }
    for i in 0..n.saturating_sub(2) {
        terms.push((0.25 * p.k, two_site(n, i, i + 2, Pauli::Z)));
    }
    for i in 0..n {
        let x = PauliString::from_sites(n, &[(i, Pauli::X)])?;
        terms.push((-0.5 * p.g, x));
    }
    Ok(terms)
}

pub fn build_annni(p: &AnnniParams) -> Result<SparseOperator> {
    SparseOperator::from_pauli_terms(p.n, &annni_terms(p)?)
}

/// Coupling type of a ladder bond.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BondKind {
    /// Bond-dependent `S^g S^g` term.
    Kitaev(Pauli),
    /// `S . S` term.
    Heisenberg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub kind: BondKind,
}

/// All bonds of the periodic ladder with `l` rungs.
///
/// With 1-based rung index `i`: leg 0 carries x-bonds on `(2i-1, 2i)` and
/// y-bonds on `(2i, 2i+1)`; leg 1 has the pattern shifted by one; every rung
/// is a z-bond. Heisenberg couplings sit on every leg bond and every rung.
pub fn kh_bonds(l: usize) -> Result<Vec<Bond>> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::InvalidParams("ladder length L must be even and at least 4"));
    }
    let mut bonds = Vec::new();
    // 0-based rung r pairs with r + 1 (mod l); 1-based (2i-1, 2i) is r even.
    for r in 0..l {
        let next = (r + 1) % l;
        let leg0 = if r % 2 == 0 { Pauli::X } else { Pauli::Y };
        let leg1 = if r % 2 == 0 { Pauli::Y } else { Pauli::X };
        bonds.push(Bond {
            a: ladder_site(r, 0),
            b: ladder_site(next, 0),
            kind: BondKind::Kitaev(leg0),
        });
        bonds.push(Bond {
            a: ladder_site(r, 1),
            b: ladder_site(next, 1),
            kind: BondKind::Kitaev(leg1),
        });
    }
    for r in 0..l {
        bonds.push(Bond {
            a: ladder_site(r, 0),
            b: ladder_site(r, 1),
            kind: BondKind::Kitaev(Pauli::Z),
        });
    }
    for leg in 0..2 {
        for r in 0..l {
            bonds.push(Bond {
                a: ladder_site(r, leg),
                b: ladder_site((r + 1) % l, leg),
                kind: BondKind::Heisenberg,
            });
        }
    }
    for r in 0..l {
        bonds.push(Bond { a: ladder_site(r, 0), b: ladder_site(r, 1), kind: BondKind::Heisenberg });
    }
    Ok(bonds)
}

pub fn kitaev_heisenberg_terms(p: &KhParams) -> Result<Vec<(f64, PauliString)>> {
    p.validate()?;
    let n = p.n_sites();
    let (k, j) = (p.kitaev(), p.heisenberg());
    let mut terms = Vec::new();
    for bond in kh_bonds(p.l)? {
        match bond.kind {
            BondKind::Kitaev(g) => terms.push((0.25 * k, two_site(n, bond.a, bond.b, g))),
            BondKind::Heisenberg => {
                for g in Pauli::MEASUREMENT_BASES {
                    terms.push((0.25 * j, two_site(n, bond.a, bond.b, g)));
                }
            }
        }
    }
    Ok(terms)
}

pub fn build_kitaev_heisenberg(p: &KhParams) -> Result<SparseOperator> {
    SparseOperator::from_pauli_terms(p.n_sites(), &kitaev_heisenberg_terms(p)?)
}
