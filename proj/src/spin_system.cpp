#include "qndspin/spin_system.hpp"

#include <cmath>
#include <stdexcept>

namespace qnd {

namespace {

Eigen::Matrix2d pauli_half(char axis) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    switch (axis) {
    case 'x':
        m << 0.0, 0.5, 0.5, 0.0;
        break;
    case 'z':
        m << 0.5, 0.0, 0.0, -0.5;
        break;
    default:
        throw std::logic_error("unsupported axis");
    }
    return m;
}

Eigen::Matrix4d kron2(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
    Eigen::Matrix4d out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

// S_y (x) I_y is real even though S_y itself is not.
Eigen::Matrix4d kron_yy() {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 3) = -0.25;
    m(1, 2) = 0.25;
    m(2, 1) = 0.25;
    m(3, 0) = -0.25;
    return m;
}

const std::array<std::string, 4> kLabels2pEE = {"upA_upD", "upA_dnD", "dnA_upD", "dnA_dnD"};
const std::array<std::string, 2> kLabels1pEE = {"upD", "dnD"};
const std::array<std::string, 4> kLabels2pEN = {"up_Up", "up_Dn", "dn_Up", "dn_Dn"};
const std::array<std::string, 2> kLabels1pEN = {"Up", "Dn"};

} // namespace

std::string to_string(SystemKind k) {
    switch (k) {
    case SystemKind::IsingEE: return "ising_ee";
    case SystemKind::HeisenbergEE: return "heisenberg_ee";
    case SystemKind::HyperfineEN: return "hyperfine_en";
    case SystemKind::AnisotropicEN: return "anisotropic_en";
    }
    return "?";
}

void SpinSystemSpec::validate() const {
    const bool has_dipolar = dipolar.cwiseAbs().maxCoeff() > 0.0;
    if (has_dipolar && kind != SystemKind::AnisotropicEN)
        throw std::invalid_argument("dipolar tensor requires kind anisotropic_en");
    if (kind == SystemKind::AnisotropicEN) {
        // x=0, y=1, z=2; any single-y component makes H complex.
        for (const auto [i, j] : {std::pair{0, 1}, {1, 0}, {1, 2}, {2, 1}}) {
            if (dipolar(i, j) != 0.0)
                throw std::invalid_argument(
                    "dipolar components mixing one y axis are not representable "
                    "as a real Hamiltonian");
        }
    }
    if (kind == SystemKind::HeisenbergEE && eps_a == eps_d && !degenerate_mode)
        throw std::invalid_argument(
            "eps_a == eps_d requires degenerate_mode for heisenberg_ee");
}

Eigen::Matrix4d build_hamiltonian(const SpinSystemSpec& spec) {
    spec.validate();
    const Eigen::Matrix2d sx = pauli_half('x');
    const Eigen::Matrix2d sz = pauli_half('z');
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();

    Eigen::Matrix4d h = spec.eps_a * kron2(sz, id) + spec.eps_d * kron2(id, sz);

    switch (spec.kind) {
    case SystemKind::IsingEE:
        h += spec.coupling * kron2(sz, sz);
        break;
    case SystemKind::HeisenbergEE:
    case SystemKind::HyperfineEN:
    case SystemKind::AnisotropicEN:
        h += spec.coupling * (kron2(sx, sx) + kron_yy() + kron2(sz, sz));
        break;
    }

    if (spec.kind == SystemKind::AnisotropicEN) {
        const std::array<Eigen::Matrix2d, 3> ops = {sx, Eigen::Matrix2d::Zero(), sz};
        for (int i = 0; i < 3; ++i) {     // data/nuclear axis
            for (int j = 0; j < 3; ++j) { // ancilla/electron axis
                const double d = spec.dipolar(i, j);
                if (d == 0.0)
                    continue;
                if (i == 1 && j == 1)
                    h += d * kron_yy();
                else
                    h += d * kron2(ops[static_cast<size_t>(j)], ops[static_cast<size_t>(i)]);
            }
        }
    }
    return h;
}

EigenBasis diagonalize(const Eigen::Matrix4d& h, const SpinSystemSpec& spec) {
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + h.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("hamiltonian must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");

    const Eigen::Vector4d evals = solver.eigenvalues();
    const Eigen::Matrix4d evecs = solver.eigenvectors(); // columns

    EigenBasis basis;
    basis.kind = spec.kind;
    basis.labels_2p = spec.is_electron_nuclear() ? kLabels2pEN : kLabels2pEE;
    basis.labels_1p = spec.is_electron_nuclear() ? kLabels1pEN : kLabels1pEE;

    // Assign each eigenvector to its dominant product component.
    std::array<int, 4> slot_of_state{-1, -1, -1, -1}; // product index -> eigenstate
    std::array<bool, 4> ambiguous{};
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4d a = evecs.col(k).cwiseAbs();
        int p0to;
        a.maxCoeff(&p0to);
        double second = 0.0;
        for (int i = 0; i < 4; ++i)
            if (i != p0to)
                second = std::max(second, a[i]);
        ambiguous[static_cast<size_t>(k)] = second / a[p0to] > 1.0 - 1e-9;
        if (slot_of_state[static_cast<size_t>(p0to)] >= 0) {
            // Two eigenstates dominated by the same product state.
            ambiguous[static_cast<size_t>(k)] = true;
            ambiguous[static_cast<size_t>(slot_of_state[static_cast<size_t>(p0to)])] = true;
        } else {
            slot_of_state[static_cast<size_t>(p0to)] = k;
        }
    }

    const bool any_ambiguous = ambiguous[0] || ambiguous[1] || ambiguous[2] || ambiguous[3];
    if (any_ambiguous && !spec.degenerate_mode)
        throw std::runtime_error(
            "degenerate labeling: eigenstate has no dominant product component "
            "(enable degenerate_mode for the eps_a == eps_d scenario)");

    if (any_ambiguous) {
        // S/T labeling of the antiparallel doublet: eigenvectors supported on
        // the {up-down, down-up} pair with equal weight.
        if (ambiguous[0] || ambiguous[3] || slot_of_state[0] < 0 || slot_of_state[3] < 0)
            throw std::runtime_error("degenerate labeling outside the antiparallel doublet");
        std::array<int, 2> pair{};
        int n = 0;
        for (int k = 0; k < 4; ++k)
            if (ambiguous[static_cast<size_t>(k)])
                pair[static_cast<size_t>(n++)] = k;
        if (n != 2)
            throw std::runtime_error("degenerate labeling outside the antiparallel doublet");
        // Singlet has opposite-sign components on up-down / down-up.
        const int k0 = pair[0], k1 = pair[1];
        const bool k0_singlet = evecs(1, k0) * evecs(2, k0) < 0.0;
        slot_of_state[1] = k0_singlet ? k0 : k1; // S in the ~up-down slot
        slot_of_state[2] = k0_singlet ? k1 : k0; // T in the ~down-up slot
        basis.labels_2p[1] = "S";
        basis.labels_2p[2] = "T";
    }

    for (int p = 0; p < 4; ++p) {
        const int k = slot_of_state[static_cast<size_t>(p)];
        if (k < 0)
            throw std::runtime_error("eigenstate labeling is not a bijection");
        Eigen::Vector4d v = evecs.col(k);
        int dom;
        v.cwiseAbs().maxCoeff(&dom);
        if (v[dom] < 0.0)
            v = -v;
        basis.amplitudes.row(p) = v.transpose();
        basis.energies_2p[p] = evals[k];
    }
    if (any_ambiguous) {
        // Sign convention: S has a positive up-down component.
        if (basis.amplitudes(1, 1) < 0.0)
            basis.amplitudes.row(1) *= -1.0;
        if (basis.amplitudes(2, 1) < 0.0)
            basis.amplitudes.row(2) *= -1.0;
    }

    basis.energies_1p << 0.5 * spec.eps_d, -0.5 * spec.eps_d;

    switch (spec.kind) {
    case SystemKind::IsingEE:
        basis.theta = 0.0;
        break;
    case SystemKind::HeisenbergEE:
    case SystemKind::HyperfineEN:
        basis.theta = 0.5 * std::atan2(spec.coupling, spec.eps_a - spec.eps_d);
        break;
    case SystemKind::AnisotropicEN:
        basis.theta = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    return basis;
}

TunnelingMatrix transition_amplitudes(const EigenBasis& basis) {
    TunnelingMatrix tm;
    for (int r = 0; r < 2; ++r) { // 1P state: data/nuclear component r
        for (int k = 0; k < 4; ++k) {
            // Coherent amplitude sum over the tunneling electron spin: the
            // 2P eigenstate components on |up r> (index r) and |down r>
            // (index 2 + r).
            const double amp = basis.amplitudes(k, r) + basis.amplitudes(k, 2 + r);
            const double m = amp * amp;
            tm.m(r, k) = m;
            if (m < 1e-24) {
                tm.channel[static_cast<size_t>(r)][static_cast<size_t>(k)] = Channel::Forbidden;
            } else {
                // The reservoir channel follows the transition energy, which
                // is dominated by the electron Zeeman term of the 2P state.
                const double w_up = basis.amplitudes(k, 0) * basis.amplitudes(k, 0) +
                                    basis.amplitudes(k, 1) * basis.amplitudes(k, 1);
                tm.channel[static_cast<size_t>(r)][static_cast<size_t>(k)] =
                    w_up >= 0.5 ? Channel::Up : Channel::Down;
            }
        }
    }
    return tm;
}

std::vector<Transition> chemical_potentials(const EigenBasis& basis, double offset) {
    if (offset < 0.0)
        throw std::invalid_argument("offset E_C + E_A must be nonnegative");
    const TunnelingMatrix tm = transition_amplitudes(basis);
    std::vector<Transition> out;
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 4; ++k) {
            const Channel ch = tm.channel[static_cast<size_t>(r)][static_cast<size_t>(k)];
            if (ch == Channel::Forbidden)
                continue;
            Transition t;
            t.i1p = r;
            t.i2p = k;
            t.mu = offset + basis.energies_2p[k] - basis.energies_1p[r];
            t.channel = ch;
            out.push_back(t);
        }
    }
    return out;
}

} // namespace qnd
