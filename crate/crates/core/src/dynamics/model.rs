//! Equations of motion of the linearized vertical model.
//!
//! The carriage rests on two trolleys through the second suspension tier
//! (`c_k`, `b_k`) at longitudinal positions `+a_k` (front) and `-a_k`
//! (rear). Each trolley rests on two wheelsets through the first tier
//! (`c_t`, `b_t`) at `±a_t`. Positive pitch raises the front end.
//!
//! [`rhs`] evaluates the equations term by term; [`assemble_system`] builds
//! the equivalent `M q̈ + C q̇ + K q = B_c η̇ + B_k η` matrices. The two are
//! written independently and cross-checked in tests.

use nalgebra::{SMatrix, SVector};

use super::excitation::ExcitationSample;
use super::params::VehicleParams;
use super::state::{StateDerivative, VehicleState};
use crate::error::{Error, Result};

pub type Matrix6 = SMatrix<f64, 6, 6>;
pub type Matrix6x4 = SMatrix<f64, 6, 4>;
pub type Vector6 = SVector<f64, 6>;

/// Right-hand side of the first-order system: velocities are copied,
/// accelerations come from the six force balances.
pub fn rhs(state: &VehicleState, exc: &ExcitationSample, p: &VehicleParams) -> Result<StateDerivative> {
    if !exc.eta.iter().chain(&exc.eta_dot).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("excitation sample"));
    }
    let d = rhs_unchecked(state, exc, p);
    if d.ddq.iter().all(|v| v.is_finite()) {
        Ok(d)
    } else {
        Err(Error::NonFinite("state derivative"))
    }
}

pub(crate) fn rhs_unchecked(state: &VehicleState, exc: &ExcitationSample, p: &VehicleParams) -> StateDerivative {
    let [zk, pk, z1, p1, z2, p2] = *state.displacements();
    let [vzk, wpk, vz1, wp1, vz2, wp2] = *state.velocities();
    let ExcitationSample { eta, eta_dot } = *exc;
    let at2 = p.a_t * p.a_t;

    // Carriage heave and pitch.
    let f_zk = -p.b_k * (2.0 * vzk - vz1 - vz2) - p.c_k * (2.0 * zk - z1 - z2);
    let f_pk = -p.a_k * p.b_k * (2.0 * p.a_k * wpk - vz1 + vz2) - p.a_k * p.c_k * (2.0 * p.a_k * pk - z1 + z2);

    // Front trolley: the carriage attachment point sits at +a_k.
    let f_z1 =
        p.b_k * (vzk - vz1 + p.a_k * wpk) + p.c_k * (zk - z1 + p.a_k * pk) - 2.0 * p.b_t * vz1 - 2.0 * p.c_t * z1
            + p.b_t * (eta_dot[0] + eta_dot[1])
            + p.c_t * (eta[0] + eta[1]);
    let f_p1 = -2.0 * at2 * p.b_t * wp1 - 2.0 * at2 * p.c_t * p1
        + p.a_t * (p.b_t * (eta_dot[0] - eta_dot[1]) + p.c_t * (eta[0] - eta[1]));

    // Rear trolley: attachment point at -a_k.
    let f_z2 =
        p.b_k * (vzk - vz2 - p.a_k * wpk) + p.c_k * (zk - z2 - p.a_k * pk) - 2.0 * p.b_t * vz2 - 2.0 * p.c_t * z2
            + p.b_t * (eta_dot[2] + eta_dot[3])
            + p.c_t * (eta[2] + eta[3]);
    let f_p2 = -2.0 * at2 * p.b_t * wp2 - 2.0 * at2 * p.c_t * p2
        + p.a_t * (p.b_t * (eta_dot[2] - eta_dot[3]) + p.c_t * (eta[2] - eta[3]));

    StateDerivative {
        dq: *state.velocities(),
        ddq: [
            f_zk / p.m_k,
            f_pk / p.j_k,
            f_z1 / p.m_t,
            f_p1 / p.j_t,
            f_z2 / p.m_t,
            f_p2 / p.j_t,
        ],
    }
}

/// Matrix form of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    /// Diagonal of the mass/inertia matrix.
    pub mass: Vector6,
    pub damping: Matrix6,
    pub stiffness: Matrix6,
    /// Input map for the rail rates η̇.
    pub input_rate: Matrix6x4,
    /// Input map for the rail displacements η.
    pub input_disp: Matrix6x4,
}

pub fn assemble_system(p: &VehicleParams) -> Result<SystemMatrices> {
    p.validate()?;
    Ok(assemble_unchecked(p))
}

/// Builds the matrices for any parameter set, including degenerate ones
/// (zero stiffness or damping).
pub(crate) fn assemble_unchecked(p: &VehicleParams) -> SystemMatrices {
    let mass = Vector6::from([p.m_k, p.j_k, p.m_t, p.j_t, p.m_t, p.j_t]);
    let damping = coupling_matrix(p.b_k, p.b_t, p.a_k, p.a_t);
    let stiffness = coupling_matrix(p.c_k, p.c_t, p.a_k, p.a_t);

    let input = |first_tier: f64| {
        let mut b = Matrix6x4::zeros();
        // rows: z_1, phi_1, z_2, phi_2; columns: wheelsets 1..4
        b[(2, 0)] = first_tier;
        b[(2, 1)] = first_tier;
        b[(3, 0)] = p.a_t * first_tier;
        b[(3, 1)] = -p.a_t * first_tier;
        b[(4, 2)] = first_tier;
        b[(4, 3)] = first_tier;
        b[(5, 2)] = p.a_t * first_tier;
        b[(5, 3)] = -p.a_t * first_tier;
        b
    };

    SystemMatrices {
        mass,
        damping,
        stiffness,
        input_rate: input(p.b_t),
        input_disp: input(p.c_t),
    }
}

/// Damping and stiffness share one sparsity pattern: `second` is the
/// carriage tier coefficient, `first` the trolley tier coefficient.
fn coupling_matrix(second: f64, first: f64, a_k: f64, a_t: f64) -> Matrix6 {
    let (zk, pk, z1, p1, z2, p2) = (0, 1, 2, 3, 4, 5);
    let mut m = Matrix6::zeros();
    m[(zk, zk)] = 2.0 * second;
    m[(zk, z1)] = -second;
    m[(zk, z2)] = -second;

    m[(pk, pk)] = 2.0 * a_k * a_k * second;
    m[(pk, z1)] = -a_k * second;
    m[(pk, z2)] = a_k * second;

    m[(z1, zk)] = -second;
    m[(z1, pk)] = -a_k * second;
    m[(z1, z1)] = second + 2.0 * first;

    m[(z2, zk)] = -second;
    m[(z2, pk)] = a_k * second;
    m[(z2, z2)] = second + 2.0 * first;

    m[(p1, p1)] = 2.0 * a_t * a_t * first;
    m[(p2, p2)] = 2.0 * a_t * a_t * first;
    m
}

impl SystemMatrices {
    /// Accelerations `M⁻¹(−C q̇ − K q + B_c η̇ + B_k η)`.
    pub fn accelerations(&self, state: &VehicleState, exc: &ExcitationSample) -> Vector6 {
        let q = Vector6::from(*state.displacements());
        let qdot = Vector6::from(*state.velocities());
        let eta = SVector::<f64, 4>::from(exc.eta);
        let eta_dot = SVector::<f64, 4>::from(exc.eta_dot);
        let force = -(self.damping * qdot) - self.stiffness * q + self.input_rate * eta_dot + self.input_disp * eta;
        force.component_div(&self.mass)
    }

    /// Largest |A − Aᵀ| relative to the largest |A| entry, for C and K.
    pub fn asymmetry(&self) -> f64 {
        let rel = |m: &Matrix6| {
            let scale = m.amax();
            if scale == 0.0 {
                0.0
            } else {
                (m - m.transpose()).amax() / scale
            }
        };
        rel(&self.damping).max(rel(&self.stiffness))
    }

    /// Whether every leading principal minor of K is strictly positive.
    pub fn stiffness_is_positive_definite(&self) -> bool {
        (1..=6).all(|k| {
            let minor = self.stiffness.view((0, 0), (k, k)).clone_owned();
            minor.determinant() > 0.0
        })
    }

    /// Rate of change of mechanical energy `½q̇ᵀMq̇ + ½qᵀKq` along unforced
    /// motion, evaluated from the matrices: `q̇ᵀ(M q̈ + K q)`.
    pub fn unforced_power(&self, state: &VehicleState) -> f64 {
        let q = Vector6::from(*state.displacements());
        let qdot = Vector6::from(*state.velocities());
        let qddot = self.accelerations(state, &ExcitationSample::default());
        qdot.dot(&(qddot.component_mul(&self.mass) + self.stiffness * q))
    }

    /// Dissipation `q̇ᵀ C q̇`.
    pub fn dissipation(&self, state: &VehicleState) -> f64 {
        let qdot = Vector6::from(*state.velocities());
        qdot.dot(&(self.damping * qdot))
    }
}
