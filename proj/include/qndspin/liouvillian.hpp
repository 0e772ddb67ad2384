#pragma once

#include "qndspin/reservoir.hpp"
#include "qndspin/spin_system.hpp"

#include <Eigen/Dense>
#include <array>

// Classical master-equation generators over the fixed 6-state basis
// {2P: up-up, ~up-down, ~down-up, down-down; 1P: up, down}.

namespace qnd {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

struct Liouvillian {
    std::array<std::string, 6> basis;
    Matrix6d l = Matrix6d::Zero(); // 1/s; columns sum to zero
};

struct StateVector {
    Vector6d rho = Vector6d::Zero();
    void validate(double tol = 1e-9) const; // nonnegative, sums to 1
    double p_up() const { return rho[0] + rho[2] + rho[4]; }
};

StateVector basis_state(int index);

// Exchange-coupled electrons (T=0 + T>0 + T1 blocks); flip-flop is not an
// electron-electron channel and a nonzero gamma_ff is rejected.
Liouvillian assemble_ee(double s, double c, const RateSet& rates);

// Nucleus hyperfine-coupled to an electron (T=0 + T>0 + T1/flip-flop blocks).
Liouvillian assemble_en(double s, double c, const RateSet& rates);

// Anisotropic hyperfine: all 8 loading and 8 unloading transitions, scaled by
// the selection-rule amplitudes; reduces to assemble_en entrywise when the
// dipolar tensor vanishes. Only the four tunnel rates are defined for this
// generator; nonzero gamma_t1/gamma_ff is rejected.
Liouvillian assemble_aniso(const TunnelingMatrix& m, const RateSet& rates);

// Resonant-tunneling stage with gin_down = gout_down = gamma_rt: the 4-state
// generator over {~down-Up, down-Down, Up, Down} and the effective 2-state
// nuclear generator with symmetric rate gamma_rt * s^2.
struct RtGenerators {
    Eigen::Matrix4d four_state;
    Eigen::Matrix2d effective;
};
RtGenerators assemble_rt(double s, double gamma_rt);

// Kind-dispatching assembly from a diagonalized system.
Liouvillian assemble(const EigenBasis& basis, const RateSet& rates);

} // namespace qnd
