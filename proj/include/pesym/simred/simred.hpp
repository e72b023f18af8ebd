#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pesym::simred {

/// Tumour model constants. alpha_s is the natural cell concentration, c_inf the
/// ambient nutrient level, n the radial index (0 planar, 1 cylinder, 2 sphere).
struct ModelParams {
    double m = 1.0;
    double alpha_s = 0.5;
    double c_inf = 2.0;
    double omega0 = 1.0;
    double q0 = 0.5;
    int n = 0;
    double beta = 1.0;

    /// Throws std::invalid_argument on any violated range.
    void validate() const;
    /// Throws std::invalid_argument unless beta = 1 (the closed-form case).
    void require_closed_form() const;
    /// alpha_s^(1 - m), the amplitude of the quadratic profile.
    double amplitude() const;
};

using Source = std::function<double(double phi)>;

double exact_phi(double omega, const ModelParams& p);
double exact_dphi(double omega, const ModelParams& p);
double exact_ddphi(double omega, const ModelParams& p);
double exact_psi(double omega, const ModelParams& p);
double exact_dpsi(double omega, const ModelParams& p);
double exact_ddpsi(double omega, const ModelParams& p);

/// The cell source f compatible with the quadratic profile.
double f_of_phi(double phi, const ModelParams& p);
/// The uptake g = q0 phi.
double g_of_phi(double phi, const ModelParams& p);
/// Constant-diffusion (m = 0) source written as a cubic in alpha = phi + alpha_s,
/// with roots alpha_s, alpha_1 = alpha_s (1 - omega0^2) and alpha_2 = alpha_s (6 + omega0^2) / 4.
double f_cubic(double phi, const ModelParams& p);
double cubic_root1(const ModelParams& p);
double cubic_root2(const ModelParams& p);

Source exact_f(const ModelParams& p);
Source exact_g(const ModelParams& p);

/// phi_max = alpha_s^(1 - m) omega0^2 / 4, the top of the profile.
double phi_max(const ModelParams& p);

struct Fields {
    double alpha = 0.0;
    double c = 0.0;
    double R = 0.0;
};
/// Cell and nutrient concentrations of the exact solution; r must lie in [0, omega0 sqrt(t)].
Fields exact_fields(double t, double r, const ModelParams& p);

/// Source terms of the moving-boundary problem in the original variables:
/// S = f(alpha - alpha_s) (c_inf - c)^(-beta), Q = g(alpha - alpha_s) (c_inf - c)^(1 - beta).
double source_S(double alpha, double c, const ModelParams& p, const Source& f);
double source_Q(double alpha, double c, const ModelParams& p, const Source& g);

struct ProfilePoint {
    double omega = 0.0;
    double phi = 0.0, dphi = 0.0, ddphi = 0.0;
    double psi = 0.0, dpsi = 0.0, ddpsi = 0.0;
};

struct Residuals {
    double r1 = 0.0;
    double r2 = 0.0;
};

/// Residuals of the reduced ODE pair; at omega = 0 the (n/omega) u' terms take
/// their limit n u''. Throws std::domain_error when psi = 0 with beta > 0.
Residuals reduced_residuals(const ProfilePoint& pt, const ModelParams& p, const Source& f, const Source& g);

ProfilePoint exact_point(double omega, const ModelParams& p);

struct SimilarityProfile {
    std::vector<double> omega, phi, psi, dphi, dpsi;
};

/// Closed-form profile on `points` equally spaced nodes of [0, omega0].
SimilarityProfile exact_profile(const ModelParams& p, int points);

struct ShootGuess {
    double phi0 = 0.0;
    double psi0 = 0.0;
    double omega0 = 1.0;
};

struct ShootOptions {
    double tol = 1e-10;     ///< terminal defect (max norm)
    int max_iterations = 50;
    double start = 1e-6;    ///< integration starts here, reached by a Taylor step
    double gap = 1e-4;      ///< relative distance to the front covered by a Taylor step
    int profile_points = 201;
};

struct ShootResult {
    double phi0 = 0.0;
    double psi0 = 0.0;
    double omega0 = 0.0;
    double defect = 0.0;
    int iterations = 0;
    SimilarityProfile profile;
};

/// Two-sided Newton shooting for phi(omega0) = psi(omega0) = 0 and
/// phi'(omega0) = -alpha_s^(1-m) omega0 / 2: the origin side is parameterized by
/// (phi(0), psi(0)), the front side by (omega0, psi'(omega0)), and the four values
/// meet at omega0 / 2. Throws std::runtime_error when Newton
/// fails to reach opt.tol within opt.max_iterations.
ShootResult shoot_reduced(const ModelParams& p, const Source& f, const Source& g, const ShootGuess& guess,
                          const ShootOptions& opt = {});

}  // namespace pesym::simred
