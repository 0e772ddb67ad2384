#include "qndspin/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace qnd {

namespace {

struct Model {
    // P(up)(t) for the two-state telegraph process with flip rates
    // gamma_up (up -> down) and gamma_down (down -> up).
    double gu, gd;
    double gamma() const { return gu + gd; }
    double p_inf() const { return gd / (gu + gd); }

    double value(double t, bool from_up) const {
        const double e = std::exp(-gamma() * t);
        const double p = p_inf();
        return from_up ? p + (1.0 - p) * e : p * (1.0 - e);
    }
    // d/d(gu), d/d(gd)
    std::pair<double, double> grad(double t, bool from_up) const {
        const double g = gamma();
        const double e = std::exp(-g * t);
        const double p = p_inf();
        const double dp_gu = -p / g;
        const double dp_gd = (1.0 - p) / g;
        if (from_up) {
            const double de = -(1.0 - p) * t * e;
            return {(1.0 - e) * dp_gu + de, (1.0 - e) * dp_gd + de};
        }
        const double de = p * t * e;
        return {(1.0 - e) * dp_gu + de, (1.0 - e) * dp_gd + de};
    }
};

void check_series(const Series& s, const char* name) {
    if (s.t.size() != s.p_up.size())
        throw FitError(std::string(name) + ": time and value lengths differ");
    for (size_t i = 0; i + 1 < s.t.size(); ++i)
        if (!(s.t[i] < s.t[i + 1]))
            throw FitError(std::string(name) + ": times must be strictly increasing");
}

} // namespace

FlipRateFit fit_flip_rates(const Series& from_up, const Series& from_down) {
    check_series(from_up, "from_up");
    check_series(from_down, "from_down");
    const size_t n = from_up.t.size() + from_down.t.size();
    if (n < 3)
        throw FitError("need at least 3 samples across both series");

    double t_max = 0.0;
    for (double t : from_up.t)
        t_max = std::max(t_max, t);
    for (double t : from_down.t)
        t_max = std::max(t_max, t);
    if (t_max <= 0.0)
        throw FitError("series span no time");

    // Initial guess: equilibrium from the tail values, total rate from the
    // magnitude of the observed decay.
    double p_tail = 0.5;
    if (!from_up.p_up.empty() && !from_down.p_up.empty())
        p_tail = 0.5 * (from_up.p_up.back() + from_down.p_up.back());
    else if (!from_up.p_up.empty())
        p_tail = from_up.p_up.back();
    else
        p_tail = from_down.p_up.back();
    p_tail = std::clamp(p_tail, 1e-6, 1.0 - 1e-6);

    const auto residual_norm = [&](const Model& m) {
        double ss = 0.0;
        for (size_t i = 0; i < from_up.t.size(); ++i) {
            const double r = m.value(from_up.t[i], true) - from_up.p_up[i];
            ss += r * r;
        }
        for (size_t i = 0; i < from_down.t.size(); ++i) {
            const double r = m.value(from_down.t[i], false) - from_down.p_up[i];
            ss += r * r;
        }
        return ss;
    };

    // Several total-rate starting points guard against flat series.
    Model best{0.0, 0.0};
    double best_ss = std::numeric_limits<double>::infinity();
    for (double g0 : {0.1 / t_max, 1.0 / t_max, 10.0 / t_max, 100.0 / t_max}) {
        const Model m{g0 * (1.0 - p_tail), g0 * p_tail};
        const double ss = residual_norm(m);
        if (ss < best_ss) {
            best_ss = ss;
            best = m;
        }
    }

    Model m = best;
    double lambda = 1e-3;
    int iterations = 0;
    const int max_iter = 500;
    const double floor = 1e-300;

    for (; iterations < max_iter; ++iterations) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        auto accumulate = [&](const Series& s, bool from_up_side) {
            for (size_t i = 0; i < s.t.size(); ++i) {
                const double r = m.value(s.t[i], from_up_side) - s.p_up[i];
                const auto [ju, jd] = m.grad(s.t[i], from_up_side);
                const Eigen::Vector2d j(ju, jd);
                jtj += j * j.transpose();
                jtr += j * r;
            }
        };
        accumulate(from_up, true);
        accumulate(from_down, false);

        const double ss = residual_norm(m);
        bool stepped = false;
        for (int attempt = 0; attempt < 50; ++attempt) {
            Eigen::Matrix2d a = jtj;
            a(0, 0) += lambda * std::max(jtj(0, 0), 1e-30);
            a(1, 1) += lambda * std::max(jtj(1, 1), 1e-30);
            const Eigen::Vector2d step = a.ldlt().solve(-jtr);
            if (!step.allFinite())
                break;
            Model trial{std::max(m.gu + step[0], floor), std::max(m.gd + step[1], floor)};
            const double trial_ss = residual_norm(trial);
            if (trial_ss <= ss) {
                // Rates below the reporting threshold are published as zero,
                // so their slow geometric decay toward the floor must not
                // block convergence.
                const double scale = 1e-10 / t_max;
                const auto rel_of = [&](double from, double to) {
                    if (from < scale && to < scale)
                        return 0.0;
                    return std::abs(to - from) / std::max(from, floor);
                };
                const double rel =
                    std::max(rel_of(m.gu, trial.gu), rel_of(m.gd, trial.gd));
                const bool flat = (ss - trial_ss) <= 1e-9 * (ss + 1e-300);
                m = trial;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < 1e-12 || flat) {
                    FlipRateFit fit;
                    fit.gamma_up = m.gu;
                    fit.gamma_down = m.gd;
                    fit.residual_rms = std::sqrt(residual_norm(m) / static_cast<double>(n));
                    fit.equilibrium_p_up = m.p_inf();
                    fit.iterations = iterations + 1;
                    fit.lower_bound_warning =
                        m.gu * t_max < 1e-9 || m.gd * t_max < 1e-9;
                    if (fit.lower_bound_warning) {
                        if (m.gu * t_max < 1e-9)
                            fit.gamma_up = 0.0;
                        if (m.gd * t_max < 1e-9)
                            fit.gamma_down = 0.0;
                    }
                    return fit;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // Converged at the current point (no downhill step exists).
            FlipRateFit fit;
            fit.gamma_up = m.gu;
            fit.gamma_down = m.gd;
            fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
            fit.equilibrium_p_up = m.p_inf();
            fit.iterations = iterations + 1;
            fit.lower_bound_warning = m.gu * t_max < 1e-9 || m.gd * t_max < 1e-9;
            if (m.gu * t_max < 1e-9)
                fit.gamma_up = 0.0;
            if (m.gd * t_max < 1e-9)
                fit.gamma_down = 0.0;
            return fit;
        }
    }
    throw FitError("flip-rate fit did not converge");
}

namespace {

std::vector<std::vector<int>> connected_blocks(const Eigen::MatrixXd& l) {
    const int n = static_cast<int>(l.rows());
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    const double scale = std::max(l.cwiseAbs().maxCoeff(), 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && (std::abs(l(i, j)) > 1e-14 * scale || std::abs(l(j, i)) > 1e-14 * scale))
                parent[static_cast<size_t>(find(i))] = find(j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i)
        groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups)
        out.push_back(std::move(members));
    return out;
}

} // namespace

Eigen::VectorXd stationary_state(const Eigen::MatrixXd& l) {
    if (l.rows() != l.cols() || l.rows() == 0)
        throw std::invalid_argument("generator must be square");
    const int n = static_cast<int>(l.rows());
    const double scale = std::max(l.cwiseAbs().maxCoeff(), 1e-300);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(l);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition of generator failed");

    std::vector<int> zero_modes;
    for (int k = 0; k < n; ++k)
        if (std::abs(solver.eigenvalues()[k]) < 1e-9 * scale)
            zero_modes.push_back(k);

    if (zero_modes.size() > 1) {
        std::ostringstream msg;
        msg << "stationary state is not unique; decoupled blocks:";
        for (const auto& block : connected_blocks(l)) {
            msg << " {";
            for (size_t i = 0; i < block.size(); ++i)
                msg << (i ? "," : "") << block[i];
            msg << "}";
        }
        throw DegenerateStationaryError(msg.str());
    }
    if (zero_modes.empty())
        throw std::runtime_error("generator has no stationary state (columns must sum to 0)");

    Eigen::VectorXd v = solver.eigenvectors().col(zero_modes[0]).real();
    const double total = v.sum();
    if (std::abs(total) < 1e-12)
        throw std::runtime_error("null vector has zero total population");
    v /= total;
    for (int i = 0; i < n; ++i)
        if (v[i] < 0.0 && v[i] > -1e-10)
            v[i] = 0.0;
    if (v.minCoeff() < 0.0)
        throw std::runtime_error("stationary vector has negative populations");
    return v;
}

StateVector stationary_state(const Liouvillian& l) {
    StateVector sv;
    sv.rho = stationary_state(Eigen::MatrixXd(l.l));
    return sv;
}

StateVector stationary_map(const Matrix6d& map) {
    const Eigen::MatrixXd dense = map;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition of cycle map failed");
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
        const double dist = std::abs(solver.eigenvalues()[k] - std::complex<double>(1.0, 0.0));
        if (dist < best_dist) {
            best_dist = dist;
            best = k;
        }
    }
    if (best_dist > 1e-9)
        throw std::runtime_error("cycle map has no fixed point (eigenvalue 1 missing)");
    Eigen::VectorXd v = solver.eigenvectors().col(best).real();
    const double total = v.sum();
    if (std::abs(total) < 1e-12)
        throw std::runtime_error("fixed point has zero total population");
    v /= total;
    StateVector sv;
    sv.rho = v;
    for (int i = 0; i < 6; ++i)
        if (sv.rho[i] < 0.0 && sv.rho[i] > -1e-10)
            sv.rho[i] = 0.0;
    return sv;
}

SweepResult sweep_hybridization(const SpinSystemSpec& base,
                                double b0_min, double b0_max, int nb0,
                                double dxz_min, double dxz_max, int ndxz,
                                double gamma_n, double gamma_e, int jobs) {
    if (nb0 < 1 || ndxz < 1)
        throw std::invalid_argument("sweep needs at least one point per axis");
    if (base.kind != SystemKind::AnisotropicEN)
        throw std::invalid_argument("hybridization sweep is defined for anisotropic_en");

    SweepResult res;
    res.b0.resize(static_cast<size_t>(nb0));
    res.dxz.resize(static_cast<size_t>(ndxz));
    for (int i = 0; i < nb0; ++i)
        res.b0[static_cast<size_t>(i)] =
            nb0 == 1 ? b0_min : b0_min + (b0_max - b0_min) * i / (nb0 - 1);
    for (int j = 0; j < ndxz; ++j)
        res.dxz[static_cast<size_t>(j)] =
            ndxz == 1 ? dxz_min : dxz_min + (dxz_max - dxz_min) * j / (ndxz - 1);
    res.m_up_dndn.resize(nb0, ndxz);
    res.m_up_updn.resize(nb0, ndxz);

    auto worker = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            for (int j = 0; j < ndxz; ++j) {
                SpinSystemSpec spec = base;
                spec.eps_a = gamma_e * res.b0[static_cast<size_t>(i)];
                spec.eps_d = gamma_n * res.b0[static_cast<size_t>(i)];
                spec.dipolar(0, 2) = res.dxz[static_cast<size_t>(j)];
                const EigenBasis basis = diagonalize(build_hamiltonian(spec), spec);
                const TunnelingMatrix tm = transition_amplitudes(basis);
                res.m_up_dndn(i, j) = tm.m(0, 3);
                res.m_up_updn(i, j) = tm.m(0, 1);
            }
        }
    };

    jobs = std::clamp(jobs, 1, nb0);
    if (jobs == 1) {
        worker(0, nb0);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (nb0 + jobs - 1) / jobs;
        for (int k = 0; k < jobs; ++k) {
            const int lo = k * chunk;
            const int hi = std::min(nb0, lo + chunk);
            if (lo < hi)
                pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool)
            th.join();
    }
    return res;
}

} // namespace qnd
