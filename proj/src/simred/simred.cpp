#include "pesym/simred/simred.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "pesym/simred/ode.hpp"

namespace pesym::simred {

void ModelParams::validate() const {
    if (!(m >= 0)) throw std::invalid_argument("m must be nonnegative");
    if (!(alpha_s > 0 && alpha_s < 1)) throw std::invalid_argument("alpha_s must lie in (0, 1)");
    if (!(c_inf > 0)) throw std::invalid_argument("c_inf must be positive");
    if (!(omega0 > 0)) throw std::invalid_argument("omega0 must be positive");
    if (!(q0 > 0)) throw std::invalid_argument("q0 must be positive");
    if (n < 0 || n > 2) throw std::invalid_argument("radial index n must be 0, 1 or 2");
}

void ModelParams::require_closed_form() const {
    validate();
    if (beta != 1.0) throw std::invalid_argument("closed-form profiles need beta = 1");
}

double ModelParams::amplitude() const { return std::pow(alpha_s, 1.0 - m); }

namespace {

void check_omega(double omega, const ModelParams& p) {
    if (!(omega >= 0.0 && omega <= p.omega0 * (1 + 1e-12)))
        throw std::domain_error("omega = " + std::to_string(omega) + " outside [0, omega0]");
}

double psi_coefficient(const ModelParams& p) { return p.amplitude() * p.q0 / (16.0 * (p.n + 3)); }
double psi_ratio(const ModelParams& p) { return (p.n + 5.0) / (p.n + 1.0); }

}  // namespace

double exact_phi(double w, const ModelParams& p) {
    check_omega(w, p);
    return p.amplitude() / 4.0 * (p.omega0 * p.omega0 - w * w);
}

double exact_dphi(double w, const ModelParams& p) {
    check_omega(w, p);
    return -p.amplitude() * w / 2.0;
}

double exact_ddphi(double w, const ModelParams& p) {
    check_omega(w, p);
    return -p.amplitude() / 2.0;
}

// psi = c (P - w^2)(k P - w^2) = c (k P^2 - (k + 1) P w^2 + w^4), P = omega0^2.
double exact_psi(double w, const ModelParams& p) {
    check_omega(w, p);
    p.require_closed_form();
    const double P = p.omega0 * p.omega0;
    return psi_coefficient(p) * (P - w * w) * (psi_ratio(p) * P - w * w);
}

double exact_dpsi(double w, const ModelParams& p) {
    check_omega(w, p);
    p.require_closed_form();
    const double P = p.omega0 * p.omega0, k = psi_ratio(p);
    return psi_coefficient(p) * (-2.0 * (k + 1) * P * w + 4.0 * w * w * w);
}

double exact_ddpsi(double w, const ModelParams& p) {
    check_omega(w, p);
    p.require_closed_form();
    const double P = p.omega0 * p.omega0, k = psi_ratio(p);
    return psi_coefficient(p) * (-2.0 * (k + 1) * P + 12.0 * w * w);
}

double f_of_phi(double phi, const ModelParams& p) {
    if (!(phi + p.alpha_s > 0)) throw std::domain_error("f needs phi + alpha_s > 0");
    const double m = p.m, a = p.alpha_s, A = p.amplitude(), w2 = p.omega0 * p.omega0, n = p.n;
    const double bracket = (m + (n + 1) / 2.0) * A * std::pow(phi + a, m) -
                           m * std::pow(a, 2.0 - m) / 4.0 * (std::pow(a, -m) * w2 + 4.0) * std::pow(phi + a, m - 1.0) -
                           phi + A / 4.0 * w2;
    return p.q0 * std::pow(a, m - 1.0) / (n + 3) * phi * (phi + A * w2 / (n + 1)) * bracket;
}

double g_of_phi(double phi, const ModelParams& p) { return p.q0 * phi; }

double cubic_root1(const ModelParams& p) { return p.alpha_s * (1.0 - p.omega0 * p.omega0); }
double cubic_root2(const ModelParams& p) { return p.alpha_s * (6.0 + p.omega0 * p.omega0) / 4.0; }

double f_cubic(double phi, const ModelParams& p) {
    const double a = phi + p.alpha_s;
    return p.q0 / (3.0 * p.alpha_s) * (a - p.alpha_s) * (a - cubic_root1(p)) * (cubic_root2(p) - a);
}

Source exact_f(const ModelParams& p) {
    // Same formula as f_of_phi with the constants hoisted and one pow per call.
    const double m = p.m, a = p.alpha_s, A = p.amplitude(), w2 = p.omega0 * p.omega0, n = p.n;
    const double lead = p.q0 * std::pow(a, m - 1.0) / (n + 3), shift = A * w2 / (n + 1);
    const double c1 = (m + (n + 1) / 2.0) * A, c2 = m * std::pow(a, 2.0 - m) / 4.0 * (std::pow(a, -m) * w2 + 4.0);
    const double c3 = A / 4.0 * w2;
    return [=](double phi) {
        const double b = phi + a;
        if (!(b > 0)) throw std::domain_error("f needs phi + alpha_s > 0");
        const double bm = m == 0.0 ? 1.0 : (m == 1.0 ? b : std::pow(b, m));
        return lead * phi * (phi + shift) * (c1 * bm - c2 * bm / b - phi + c3);
    };
}

Source exact_g(const ModelParams& p) {
    return [p](double phi) { return g_of_phi(phi, p); };
}

double phi_max(const ModelParams& p) { return p.amplitude() * p.omega0 * p.omega0 / 4.0; }

Fields exact_fields(double t, double r, const ModelParams& p) {
    p.require_closed_form();
    if (!(t > 0)) throw std::domain_error("exact fields need t > 0");
    const double R = p.omega0 * std::sqrt(t);
    if (!(r >= 0 && r <= R * (1 + 1e-12))) throw std::domain_error("r outside [0, R(t)]");
    const double w = std::min(r / std::sqrt(t), p.omega0);
    return {p.alpha_s + exact_phi(w, p), p.c_inf - t * exact_psi(w, p), R};
}

double source_S(double alpha, double c, const ModelParams& p, const Source& f) {
    return f(alpha - p.alpha_s) * std::pow(p.c_inf - c, -p.beta);
}

double source_Q(double alpha, double c, const ModelParams& p, const Source& g) {
    return g(alpha - p.alpha_s) * std::pow(p.c_inf - c, 1.0 - p.beta);
}

Residuals reduced_residuals(const ProfilePoint& pt, const ModelParams& p, const Source& f, const Source& g) {
    if (p.beta > 0 && pt.psi == 0.0) throw std::domain_error("psi vanishes where psi^(-beta) is needed");
    const double n = p.n, b = pt.phi + p.alpha_s;
    const double D = std::pow(b, p.m);
    const double dD = p.m == 0.0 ? 0.0 : p.m * std::pow(b, p.m - 1.0);
    const double radial1 = pt.omega > 0 ? n / pt.omega * D * pt.dphi : n * D * pt.ddphi;
    const double radial2 = pt.omega > 0 ? n / pt.omega * pt.dpsi : n * pt.ddpsi;
    Residuals r;
    r.r1 = D * pt.ddphi + dD * pt.dphi * pt.dphi + radial1 + pt.omega / 2.0 * pt.dphi +
           f(pt.phi) * std::pow(pt.psi, -p.beta);
    r.r2 = pt.ddpsi + radial2 + g(pt.phi) * std::pow(pt.psi, 1.0 - p.beta);
    return r;
}

ProfilePoint exact_point(double w, const ModelParams& p) {
    return {w, exact_phi(w, p), exact_dphi(w, p), exact_ddphi(w, p), exact_psi(w, p), exact_dpsi(w, p), exact_ddpsi(w, p)};
}

SimilarityProfile exact_profile(const ModelParams& p, int points) {
    if (points < 2) throw std::invalid_argument("a profile needs at least two points");
    SimilarityProfile out;
    for (int i = 0; i < points; ++i) {
        const double w = p.omega0 * i / (points - 1);
        out.omega.push_back(w);
        out.phi.push_back(exact_phi(w, p));
        out.psi.push_back(exact_psi(w, p));
        out.dphi.push_back(exact_dphi(w, p));
        out.dpsi.push_back(exact_dpsi(w, p));
    }
    return out;
}

namespace {

/// The reduced pair as a first-order system in (phi, phi', psi, psi').
struct Reduced {
    const ModelParams& p;
    const Source& f;
    const Source& g;

    double diffusivity(double phi) const { return std::pow(phi + p.alpha_s, p.m); }
    double diffusivity_slope(double phi) const {
        return p.m == 0.0 ? 0.0 : p.m * std::pow(phi + p.alpha_s, p.m - 1.0);
    }

    void rhs(double w, const State& y, State& dy) const {
        if (!(y[0] + p.alpha_s > 0) || !(y[2] > 0)) throw std::domain_error("shooting left the domain");
        const double D = diffusivity(y[0]), n = p.n;
        dy[0] = y[1];
        dy[1] = -(diffusivity_slope(y[0]) * y[1] * y[1] + n / w * D * y[1] + w / 2.0 * y[1] +
                  f(y[0]) * std::pow(y[2], -p.beta)) / D;
        dy[2] = y[3];
        dy[3] = -n / w * y[3] - g(y[0]) * std::pow(y[2], 1.0 - p.beta);
    }

    /// State just off the origin from the regularized second derivatives.
    State from_origin(double phi0, double psi0, double eps) const {
        const double a = -f(phi0) * std::pow(psi0, -p.beta) / ((p.n + 1) * diffusivity(phi0));
        const double c = -g(phi0) * std::pow(psi0, 1.0 - p.beta) / (p.n + 1);
        return {phi0 + 0.5 * a * eps * eps, a * eps, psi0 + 0.5 * c * eps * eps, c * eps};
    }

    /// Limit of f(phi) psi^(-beta) at the front, where phi and psi vanish linearly.
    double front_source(double dphi, double dpsi) const {
        if (p.beta < 1.0) return 0.0;
        if (p.beta > 1.0) throw std::domain_error("f psi^(-beta) is unbounded at the front for beta > 1");
        const double h = 1e-6;
        const double df0 = (f(h) - f(-h)) / (2 * h);
        return df0 * dphi / dpsi;
    }

    /// State a distance h inside the front, by a second-order Taylor step from
    /// phi = psi = 0 with the Stefan slope and psi'(omega0) = s.
    State from_front(double omega0, double s, double h) const {
        const double dphi = -p.amplitude() * omega0 / 2.0;
        const double D = diffusivity(0.0), n = p.n;
        const double ddphi =
            -(diffusivity_slope(0.0) * dphi * dphi + n / omega0 * D * dphi + omega0 / 2.0 * dphi + front_source(dphi, s)) / D;
        const double g0 = p.beta == 1.0 ? g(0.0) : 0.0;
        const double ddpsi = -n / omega0 * s - g0;
        return {-h * dphi + 0.5 * h * h * ddphi, dphi - h * ddphi, -h * s + 0.5 * h * h * ddpsi, s - h * ddpsi};
    }

    Rhs forward() const {
        return [this](double w, const State& y, State& dy) { rhs(w, y, dy); };
    }
    /// The same system in sigma = -omega, for integrating towards the origin.
    Rhs backward() const {
        return [this](double sg, const State& y, State& dy) {
            rhs(-sg, y, dy);
            for (auto& v : dy) v = -v;
        };
    }
};

const StepGuard& positive_guard() {
    static const StepGuard guard = [](double, const State& y) { return y[2] > 0; };
    return guard;
}

/// Unknowns: phi(0), psi(0), omega0, psi'(omega0).
using Unknowns = Eigen::Vector4d;

struct Sides {
    State left;   ///< integrated from the origin to the matching point
    State right;  ///< integrated from the front to the matching point
};

Sides integrate_sides(const Reduced& sys, const Unknowns& z, const ShootOptions& opt) {
    const double w0 = z[2], wm = 0.5 * w0, h = opt.gap * w0;
    if (!(wm > opt.start)) throw std::domain_error("front guess too close to the origin");
    Sides s;
    s.left = integrate_rk45(sys.forward(), sys.from_origin(z[0], z[1], opt.start), opt.start, wm, {}, positive_guard()).y;
    s.right = integrate_rk45(sys.backward(), sys.from_front(w0, z[3], h), -(w0 - h), -wm, {}, positive_guard()).y;
    return s;
}

Unknowns mismatch(const Reduced& sys, const Unknowns& z, const ShootOptions& opt) {
    const auto s = integrate_sides(sys, z, opt);
    Unknowns d;
    for (int i = 0; i < 4; ++i) d[i] = s.left[static_cast<std::size_t>(i)] - s.right[static_cast<std::size_t>(i)];
    return d;
}

}  // namespace

ShootResult shoot_reduced(const ModelParams& p, const Source& f, const Source& g, const ShootGuess& guess,
                          const ShootOptions& opt) {
    p.validate();
    if (!(guess.psi0 > 0) || !(guess.omega0 > 0)) throw std::invalid_argument("shooting guess needs psi0, omega0 > 0");
    const Reduced sys{p, f, g};
    // psi is roughly quadratic in omega, which fixes a starting slope at the front.
    Unknowns z(guess.phi0, guess.psi0, guess.omega0, -2.0 * guess.psi0 / guess.omega0);
    Unknowns d = mismatch(sys, z, opt);
    auto norm = [](const Unknowns& v) { return v.cwiseAbs().maxCoeff(); };
    ShootResult res;
    for (int it = 0; it < opt.max_iterations && norm(d) >= opt.tol; ++it) {
        res.iterations = it + 1;
        Eigen::Matrix4d J;
        for (int j = 0; j < 4; ++j) {
            Unknowns zp = z;
            const double h = 1e-7 * std::max(1.0, std::fabs(z[j]));
            zp[j] += h;
            J.col(j) = (mismatch(sys, zp, opt) - d) / h;
        }
        const Unknowns step = J.fullPivLu().solve(-d);
        bool moved = false;
        double lambda = 1.0;
        for (int k = 0; k < 30 && !moved; ++k, lambda /= 2) {
            const Unknowns trial = z + lambda * step;
            if (!(trial[1] > 0) || !(trial[2] > 0) || !(trial[3] < 0) || !(trial[0] + p.alpha_s > 0)) continue;
            try {
                const Unknowns dt = mismatch(sys, trial, opt);
                if (norm(dt) < norm(d)) {
                    z = trial;
                    d = dt;
                    moved = true;
                }
            } catch (const std::exception&) {
                // Left the domain: shorten the step.
            }
        }
        if (!moved) throw std::runtime_error("shooting: Newton step failed to reduce the defect");
    }
    if (!(norm(d) < opt.tol))
        throw std::runtime_error("shooting: no convergence after " + std::to_string(opt.max_iterations) +
                                 " iterations (defect " + std::to_string(norm(d)) + ")");
    res.phi0 = z[0];
    res.psi0 = z[1];
    res.omega0 = z[2];
    res.defect = norm(d);

    // Profile on a uniform grid: the inner half from the origin, the outer half from the front.
    const int N = std::max(opt.profile_points, 2);
    const double w0 = res.omega0, wm = 0.5 * w0, gap = opt.gap * w0;
    std::vector<State> nodes(static_cast<std::size_t>(N));
    State y = sys.from_origin(res.phi0, res.psi0, opt.start);
    double w = opt.start;
    for (int i = 0; i < N; ++i) {
        const double wi = w0 * i / (N - 1);
        if (wi > wm) break;
        if (i == 0) {
            nodes[0] = {res.phi0, 0.0, res.psi0, 0.0};
            continue;
        }
        y = integrate_rk45(sys.forward(), y, w, wi, {}, positive_guard()).y;
        w = wi;
        nodes[static_cast<std::size_t>(i)] = y;
    }
    y = sys.from_front(w0, z[3], gap);
    w = w0 - gap;
    for (int i = N - 1; i >= 0; --i) {
        const double wi = w0 * i / (N - 1);
        if (wi <= wm) break;
        if (i == N - 1) {
            nodes[static_cast<std::size_t>(i)] = {0.0, -p.amplitude() * w0 / 2.0, 0.0, z[3]};
        } else if (wi >= w) {
            nodes[static_cast<std::size_t>(i)] = sys.from_front(w0, z[3], w0 - wi);
        } else {
            y = integrate_rk45(sys.backward(), y, -w, -wi, {}, positive_guard()).y;
            w = wi;
            nodes[static_cast<std::size_t>(i)] = y;
        }
    }
    auto& prof = res.profile;
    for (int i = 0; i < N; ++i) {
        const auto& s = nodes[static_cast<std::size_t>(i)];
        prof.omega.push_back(w0 * i / (N - 1));
        prof.phi.push_back(s[0]);
        prof.dphi.push_back(s[1]);
        prof.psi.push_back(s[2]);
        prof.dpsi.push_back(s[3]);
    }
    return res;
}

}  // namespace pesym::simred
