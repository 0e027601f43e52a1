#pragma once

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "magnon/linearization.hpp"

namespace magnon {

// H = wa a+a + wb b+b + i g1 (a b+ - a+ b) + i g2 (a+ b+ - a b)
struct HopfieldParams {
    double omega_a = 0, omega_b = 0; // rad/s
    double g1 = 0, g2 = 0;
};

// Nambu ordering (a, b, a+, b+); row j gives B_j = W a + X b + Y a+ + Z b+
struct BogoliubovModes {
    double omega_lower = 0, omega_upper = 0;
    Eigen::Vector4cd lower, upper;

    // full transform: rows B_L, B_U, B_L+, B_U+ in terms of (a, b, a+, b+)
    Eigen::Matrix4cd transform() const;
    Eigen::Matrix4cd inverse() const;
};

enum class Phase { normal, critical, superradiant };
const char* to_string(Phase ph);

HopfieldParams coupling_strengths(const LinearizedDynamics& lin);

std::pair<double, double> coupled_eigenfrequencies(const HopfieldParams& hp);

BogoliubovModes bogoliubov_transform(const HopfieldParams& hp);

struct ModeWeights {
    double w, x, y, z; // |W|^2, |X|^2, |Y|^2, |Z|^2
};
std::array<ModeWeights, 2> mode_weights(const BogoliubovModes& m);

// left side of the normal-phase condition (>0 normal)
double phase_expression(const HopfieldParams& hp);
Phase phase_boundary(const HopfieldParams& hp);

struct BlochSiegert {
    double vbss = 0, vrss = 0;
    bool dominant = false;
};
BlochSiegert vbss_vrss(const HopfieldParams& hp);

struct NormalizedCouplings {
    double h_cross = 0; // T
    double omega0 = 0;  // rad/s
    double g1_ratio = 0, g2_ratio = 0;
    bool discontinuous = false;
};

struct CrossingOptions {
    double h_max = 2000;
    double scan_step = 0.5;
    double tol = 1e-6;
};

NormalizedCouplings normalized_couplings(const MaterialParams& p, double theta_deg, const CrossingOptions& opt = {});

} // namespace magnon
