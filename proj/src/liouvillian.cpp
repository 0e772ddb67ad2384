#include "qndspin/liouvillian.hpp"

#include <cmath>
#include <stdexcept>

namespace qnd {

namespace {

std::array<std::string, 6> default_basis(bool electron_nuclear) {
    if (electron_nuclear)
        return {"up_Up", "up_Dn", "dn_Up", "dn_Dn", "Up", "Dn"};
    return {"upA_upD", "upA_dnD", "dnA_upD", "dnA_dnD", "upD", "dnD"};
}

void check_hybridization(double s, double c) {
    if (std::abs(s * s + c * c - 1.0) > 1e-9)
        throw std::invalid_argument("s^2 + c^2 must equal 1");
}

} // namespace

void StateVector::validate(double tol) const {
    if (rho.minCoeff() < -tol)
        throw std::invalid_argument("populations must be nonnegative");
    if (std::abs(rho.sum() - 1.0) > tol)
        throw std::invalid_argument("populations must sum to 1");
}

StateVector basis_state(int index) {
    if (index < 0 || index > 5)
        throw std::invalid_argument("basis index out of range");
    StateVector sv;
    sv.rho[index] = 1.0;
    return sv;
}

Liouvillian assemble_ee(double s, double c, const RateSet& rates) {
    check_hybridization(s, c);
    rates.validate();
    if (rates.gamma_ff != 0.0)
        throw std::invalid_argument(
            "flip-flop relaxation is not an electron-electron channel");

    const double s2 = s * s, c2 = c * c;
    const double u = rates.gout_up, d = rates.gin_down;
    const double od = rates.gout_down, iu = rates.gin_up;
    const double g1 = rates.gamma_t1;

    Liouvillian lv;
    lv.basis = default_basis(false);
    Matrix6d& l = lv.l;

    // Unload-up / load-down block.
    l(4, 0) += u;
    l(0, 0) -= u;
    l(5, 1) += u * c2;
    l(1, 1) -= u * c2;
    l(5, 2) += u * s2;
    l(2, 2) -= u * s2;
    l(1, 4) += d * s2;
    l(2, 4) += d * c2;
    l(4, 4) -= d;
    l(3, 5) += d;
    l(5, 5) -= d;

    // Thermally activated load-up / unload-down block.
    l(0, 4) += iu;
    l(1, 5) += iu * c2;
    l(2, 5) += iu * s2;
    l(4, 4) -= iu;
    l(5, 5) -= iu;
    l(4, 1) += od * s2;
    l(1, 1) -= od * s2;
    l(4, 2) += od * c2;
    l(2, 2) -= od * c2;
    l(5, 3) += od;
    l(3, 3) -= od;

    // Electron T1 relaxation of either dot and of the remaining 1P electron.
    l(1, 0) += g1;
    l(2, 0) += g1;
    l(0, 0) -= 2.0 * g1;
    l(3, 1) += g1;
    l(1, 1) -= g1;
    l(3, 2) += g1;
    l(2, 2) -= g1;
    l(5, 4) += g1;
    l(4, 4) -= g1;

    return lv;
}

Liouvillian assemble_en(double s, double c, const RateSet& rates) {
    check_hybridization(s, c);
    rates.validate();

    const double s2 = s * s, c2 = c * c;
    const double u = rates.gout_up, d = rates.gin_down;
    const double od = rates.gout_down, iu = rates.gin_up;
    const double g1 = rates.gamma_t1, ff = rates.gamma_ff;

    Liouvillian lv;
    lv.basis = default_basis(true);
    Matrix6d& l = lv.l;

    // Unload-up: only the electron-up 2P states empty at T = 0.
    l(4, 0) += u;
    l(0, 0) -= u;
    l(4, 1) += u * s2;
    l(5, 1) += u * c2;
    l(1, 1) -= u;

    // Load-down into the electron-down 2P states.
    l(2, 4) += d * c2;
    l(4, 4) -= d * c2;
    l(2, 5) += d * s2;
    l(3, 5) += d;
    l(5, 5) -= d * (1.0 + s2);

    // Thermally activated load-up / unload-down.
    l(0, 4) += iu;
    l(1, 4) += iu * s2;
    l(4, 4) -= iu * (1.0 + s2);
    l(1, 5) += iu * c2;
    l(5, 5) -= iu * c2;
    l(4, 2) += od * c2;
    l(5, 2) += od * s2;
    l(2, 2) -= od;
    l(5, 3) += od;
    l(3, 3) -= od;

    // Electron T1 (2P states only; the 1P states are nuclear) and flip-flop.
    l(1, 0) += g1 * s2;
    l(2, 0) += g1 * c2;
    l(0, 0) -= g1;
    l(3, 1) += g1 * c2;
    l(1, 1) -= g1 * c2;
    l(3, 2) += g1 * s2;
    l(2, 2) -= g1 * s2;
    l(2, 1) += ff;
    l(1, 1) -= ff;

    return lv;
}

Liouvillian assemble_aniso(const TunnelingMatrix& m, const RateSet& rates) {
    rates.validate();
    if (rates.gamma_t1 != 0.0 || rates.gamma_ff != 0.0)
        throw std::invalid_argument(
            "relaxation channels are not defined for the anisotropic generator");

    Liouvillian lv;
    lv.basis = default_basis(true);
    Matrix6d& l = lv.l;

    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 4; ++k) {
            const Channel ch = m.channel[static_cast<size_t>(r)][static_cast<size_t>(k)];
            if (ch == Channel::Forbidden)
                continue;
            const double amp = m.m(r, k);
            const double gin = ch == Channel::Up ? rates.gin_up : rates.gin_down;
            const double gout = ch == Channel::Up ? rates.gout_up : rates.gout_down;
            l(4 + r, k) += gout * amp;
            l(k, k) -= gout * amp;
            l(k, 4 + r) += gin * amp;
            l(4 + r, 4 + r) -= gin * amp;
        }
    }
    return lv;
}

RtGenerators assemble_rt(double s, double gamma_rt) {
    if (gamma_rt < 0.0 || !std::isfinite(gamma_rt))
        throw std::invalid_argument("gamma_rt must be finite and nonnegative");
    const double s2 = s * s;
    const double c2 = 1.0 - s2;
    const double g = gamma_rt;

    RtGenerators rt;
    // Basis {~down-Up, down-Down, Up, Down}.
    rt.four_state << -g, 0.0, g * c2, g * s2,
        0.0, -g, 0.0, g,
        g * c2, 0.0, -g * c2, 0.0,
        g * s2, g, 0.0, -g * (1.0 + s2);
    // The donor is ionized half the time in the fast charge equilibrium, so
    // the effective nuclear flip rate is g*s2/2 each way (total rate g*s2).
    const double eff = 0.5 * g * s2;
    rt.effective << -eff, eff,
        eff, -eff;
    return rt;
}

Liouvillian assemble(const EigenBasis& basis, const RateSet& rates) {
    Liouvillian lv;
    switch (basis.kind) {
    case SystemKind::IsingEE:
    case SystemKind::HeisenbergEE:
        lv = assemble_ee(basis.s(), basis.c(), rates);
        break;
    case SystemKind::HyperfineEN:
        lv = assemble_en(basis.s(), basis.c(), rates);
        break;
    case SystemKind::AnisotropicEN:
        lv = assemble_aniso(transition_amplitudes(basis), rates);
        break;
    }
    for (int i = 0; i < 4; ++i)
        lv.basis[static_cast<size_t>(i)] = basis.labels_2p[static_cast<size_t>(i)];
    for (int i = 0; i < 2; ++i)
        lv.basis[static_cast<size_t>(4 + i)] = basis.labels_1p[static_cast<size_t>(i)];
    return lv;
}

} // namespace qnd
