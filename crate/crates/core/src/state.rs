//! Pure states of one photon over path ⊗ polarization.
//!
//! Everything downstream (post-selection, readout, the acceptance oracles) is
//! checked against the plain complex arithmetic in this module, so it stays
//! small and explicit: no matrices, just four (or two) amplitudes.
//!
//! States are compared up to a global phase; see [`fidelity`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex probability amplitude.
pub type Amplitude = Complex64;

const ZERO: Amplitude = Amplitude::new(0.0, 0.0);
const ONE: Amplitude = Amplitude::new(1.0, 0.0);

/// Common operations on the two finite-dimensional state kinds.
pub trait PureState: Sized + Copy {
    fn amplitudes(&self) -> &[Amplitude];
    fn amplitudes_mut(&mut self) -> &mut [Amplitude];

    fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    fn norm(&self) -> f64 {
        // hypot-style accumulation keeps tiny post-selected amplitudes exact
        self.amplitudes()
            .iter()
            .fold(0.0_f64, |acc, a| acc.hypot(a.re).hypot(a.im))
    }

    fn scale(mut self, factor: Amplitude) -> Self {
        for a in self.amplitudes_mut() {
            *a *= factor;
        }
        self
    }

    /// Returns the unit-norm state and the input's Euclidean norm.
    fn normalize(self) -> Result<(Self, f64)> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NullState);
        }
        Ok((self.scale(Amplitude::new(1.0 / norm, 0.0)), norm))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    fn inner(&self, other: &Self) -> Amplitude {
        self.amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨basis|self⟩|²` for normalized states.
    fn probability_of(&self, basis: &Self) -> f64 {
        basis.inner(self).norm_sqr().min(1.0)
    }
}

/// `⟨a|b⟩`.
pub fn inner_product<S: PureState>(a: &S, b: &S) -> Amplitude {
    a.inner(b)
}

/// Born-rule probability of finding `state` in `basis_state`.
pub fn projector_probability<S: PureState>(state: &S, basis_state: &S) -> f64 {
    state.probability_of(basis_state)
}

/// `|⟨a|b⟩|²` of two normalized states; 1 iff equal up to global phase.
pub fn fidelity<S: PureState>(a: &S, b: &S) -> f64 {
    a.inner(b).norm_sqr()
}

/// Polarization pointer over the `{H, V}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    amps: [Amplitude; 2],
}

impl PolarizationState {
    pub const fn new(h: Amplitude, v: Amplitude) -> Self {
        Self { amps: [h, v] }
    }

    pub const fn h() -> Self {
        Self::new(ONE, ZERO)
    }

    pub const fn v() -> Self {
        Self::new(ZERO, ONE)
    }

    /// `(|H⟩ + |V⟩)/√2`
    pub const fn plus() -> Self {
        Self::new(
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
        )
    }

    /// `(|H⟩ − |V⟩)/√2`
    pub const fn minus() -> Self {
        Self::new(
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
            Amplitude::new(-FRAC_1_SQRT_2, 0.0),
        )
    }

    /// Right circular, `(|H⟩ + i|V⟩)/√2`.
    pub const fn right() -> Self {
        Self::new(
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
            Amplitude::new(0.0, FRAC_1_SQRT_2),
        )
    }

    /// Left circular, `(|H⟩ − i|V⟩)/√2`.
    pub const fn left() -> Self {
        Self::new(
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
            Amplitude::new(0.0, -FRAC_1_SQRT_2),
        )
    }

    pub fn a_h(&self) -> Amplitude {
        self.amps[0]
    }

    pub fn a_v(&self) -> Amplitude {
        self.amps[1]
    }

    /// Phase of `aV` relative to `aH`, in `(−π, π]`.
    ///
    /// Taken as `arg(aV·conj(aH))` so that two tiny amplitudes never get
    /// subtracted.
    pub fn relative_phase(&self) -> f64 {
        (self.a_v() * self.a_h().conj()).arg()
    }
}

impl PureState for PolarizationState {
    fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }
}

/// Which-arm path state between the two beam splitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Up,
    Down,
}

/// Polarization basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pol {
    H,
    V,
}

/// Joint path ⊗ polarization state.
///
/// Amplitudes are stored in the fixed order `u⊗H, u⊗V, d⊗H, d⊗V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    amps: [Amplitude; 4],
}

impl JointState {
    pub const fn new(amps: [Amplitude; 4]) -> Self {
        Self { amps }
    }

    /// `|path⟩ ⊗ |pol⟩` for arbitrary (unnormalized) path coefficients.
    pub fn product(up: Amplitude, down: Amplitude, pol: &PolarizationState) -> Self {
        Self::new([
            up * pol.a_h(),
            up * pol.a_v(),
            down * pol.a_h(),
            down * pol.a_v(),
        ])
    }

    pub fn to_array(&self) -> [Amplitude; 4] {
        self.amps
    }

    pub const fn index_of(path: Path, pol: Pol) -> usize {
        let p = match path {
            Path::Up => 0,
            Path::Down => 2,
        };
        let q = match pol {
            Pol::H => 0,
            Pol::V => 1,
        };
        p + q
    }

    /// Exchanges the `u` and `d` halves.
    pub fn swap_paths(&self) -> Self {
        let [uh, uv, dh, dv] = self.amps;
        Self::new([dh, dv, uh, uv])
    }

    /// Partial inner product `⟨path|Ψ⟩` with the path bra given by its
    /// (complex) coefficients on `u` and `d`; leaves an unnormalized pointer.
    pub fn project_path(&self, up: Amplitude, down: Amplitude) -> PolarizationState {
        let [uh, uv, dh, dv] = self.amps;
        PolarizationState::new(
            up.conj() * uh + down.conj() * dh,
            up.conj() * uv + down.conj() * dv,
        )
    }

    /// Reduced polarization weight `Σ_path |⟨path, pol|Ψ⟩|²` along `pol_state`.
    pub fn polarization_probability(&self, pol_state: &PolarizationState) -> f64 {
        let up = self.project_path(ONE, ZERO);
        let down = self.project_path(ZERO, ONE);
        pol_state.inner(&up).norm_sqr() + pol_state.inner(&down).norm_sqr()
    }

    /// Reduced path weight along the path state `up|u⟩ + down|d⟩`.
    pub fn path_probability(&self, up: Amplitude, down: Amplitude) -> f64 {
        self.project_path(up, down).norm_sqr()
    }
}

impl Index<(Path, Pol)> for JointState {
    type Output = Amplitude;

    fn index(&self, (path, pol): (Path, Pol)) -> &Amplitude {
        &self.amps[Self::index_of(path, pol)]
    }
}

impl IndexMut<(Path, Pol)> for JointState {
    fn index_mut(&mut self, (path, pol): (Path, Pol)) -> &mut Amplitude {
        &mut self.amps[Self::index_of(path, pol)]
    }
}

impl PureState for JointState {
    fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }
}
