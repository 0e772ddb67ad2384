#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

// Two-particle spin Hamiltonians of a data qubit coupled to a tunnel-read
// ancilla, their eigenbases, and the tunneling selection-rule amplitudes.
//
// The product basis is fixed globally as {up-up, up-down, down-up, down-down},
// where the first arrow is the ancilla (electron for electron-nuclear kinds)
// and the second the data qubit (nucleus). All energies are in Hz, all rates
// in 1/s.

namespace qnd {

enum class SystemKind { IsingEE, HeisenbergEE, HyperfineEN, AnisotropicEN };

std::string to_string(SystemKind k);

struct SpinSystemSpec {
    SystemKind kind = SystemKind::IsingEE;
    double eps_a = 0.0;    // ancilla (electron) splitting, Hz
    double eps_d = 0.0;    // data (nuclear) splitting, Hz; may be negative
    double coupling = 0.0; // J_I, J_H or A_I, Hz
    // Dipolar tensor D(i,j): row i = data/nuclear axis, column j =
    // ancilla/electron axis, so D(x,z) multiplies S_z I_x. Only used for
    // AnisotropicEN. Components involving a single y axis would make the
    // Hamiltonian complex and are rejected.
    Eigen::Matrix3d dipolar = Eigen::Matrix3d::Zero();
    // Allows eps_a == eps_d for exchange-coupled electrons; the antiparallel
    // doublet is then labeled S/T instead of by dominant product component.
    bool degenerate_mode = false;

    bool is_electron_nuclear() const {
        return kind == SystemKind::HyperfineEN || kind == SystemKind::AnisotropicEN;
    }
    void validate() const; // throws std::invalid_argument
};

struct EigenBasis {
    SystemKind kind = SystemKind::IsingEE;
    std::array<std::string, 4> labels_2p;
    Eigen::Vector4d energies_2p; // relative, common offset excluded
    // Row k holds the coefficients of eigenstate k in the product basis.
    Eigen::Matrix4d amplitudes;
    std::array<std::string, 2> labels_1p;
    Eigen::Vector2d energies_1p;
    // Hybridization angle of the antiparallel doublet, tan(2*theta) =
    // coupling / (eps_a - eps_d). NaN for AnisotropicEN.
    double theta = 0.0;

    double s() const { return std::sin(theta); }
    double c() const { return std::cos(theta); }
};

enum class Channel { Up, Down, Forbidden };

// Squared transition matrix elements |<1P| a_up + a_down |2P>|^2 and the
// chemical-potential group each allowed transition belongs to.
struct TunnelingMatrix {
    Eigen::Matrix<double, 2, 4> m;
    std::array<std::array<Channel, 4>, 2> channel;
};

struct Transition {
    int i1p = 0;
    int i2p = 0;
    double mu = 0.0; // offset + E(2P) - E(1P), Hz
    Channel channel = Channel::Forbidden;
};

Eigen::Matrix4d build_hamiltonian(const SpinSystemSpec& spec);

EigenBasis diagonalize(const Eigen::Matrix4d& h, const SpinSystemSpec& spec);

TunnelingMatrix transition_amplitudes(const EigenBasis& basis);

// Chemical potentials of all allowed transitions; offset = E_C + E_A.
std::vector<Transition> chemical_potentials(const EigenBasis& basis, double offset);

} // namespace qnd
