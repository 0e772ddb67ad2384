#pragma once

#include "qndspin/liouvillian.hpp"
#include "qndspin/spin_system.hpp"

#include <stdexcept>
#include <vector>

// Flip-rate extraction from cycle-end series, stationary distributions, and
// hybridization parameter sweeps.

namespace qnd {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateStationaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlipRateFit {
    double gamma_up = 0.0;   // rate at which an up state is flipped, 1/s
    double gamma_down = 0.0; // rate at which a down state is flipped, 1/s
    double residual_rms = 0.0;
    double equilibrium_p_up = 0.0; // gamma_down / (gamma_up + gamma_down)
    // Set when a series resolves no decay and the corresponding rate is
    // reported as 0 (a lower bound, not a measurement).
    bool lower_bound_warning = false;
    int iterations = 0;
};

struct Series {
    std::vector<double> t;    // strictly increasing, s
    std::vector<double> p_up; // P(up) samples
};

// Joint nonlinear least squares of the two-state closed-form solution over
// (gamma_up, gamma_down); both series share parameters. Either series may be
// empty (single-trajectory fit).
FlipRateFit fit_flip_rates(const Series& from_up, const Series& from_down);

// Null vector of a generator with a unique zero eigenvalue, normalized to a
// probability vector. A degenerate null space raises
// DegenerateStationaryError listing the decoupled blocks.
Eigen::VectorXd stationary_state(const Eigen::MatrixXd& l);
StateVector stationary_state(const Liouvillian& l);

// Fixed point of a linear cycle map (eigenvector at eigenvalue 1).
StateVector stationary_map(const Matrix6d& map);

// Grid of selection-rule amplitudes for the anisotropic system over magnetic
// field and D_xz; splittings are derived as eps_e = gamma_e * B0 and
// eps_n = gamma_n * B0.
struct SweepResult {
    std::vector<double> b0;     // T
    std::vector<double> dxz;    // Hz
    Eigen::MatrixXd m_up_dndn;  // M_{Up, ~down-Down}, indexed (ib0, idxz)
    Eigen::MatrixXd m_up_updn;  // M_{Up, ~up-Down}
};

SweepResult sweep_hybridization(const SpinSystemSpec& base,
                                double b0_min, double b0_max, int nb0,
                                double dxz_min, double dxz_max, int ndxz,
                                double gamma_n, double gamma_e, int jobs = 1);

} // namespace qnd
