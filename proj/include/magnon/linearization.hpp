#pragma once

#include <Eigen/Dense>

#include "magnon/spin_model.hpp"

namespace magnon {

// state ordering (dF_x, dF_y, dG_x, dG_y) with x = a, y = +/-b (crystal frame)
struct LinearizedDynamics {
    double a_x = 0, a_y = 0, b_x = 0, b_y = 0, d_xy = 0, d_yx = 0; // Tesla
    double gamma = 0;
    double sin_beta = 0;
    double prefactor = 0; // 2 gamma sin(beta_z)
    Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d jacobian = Eigen::Matrix4d::Zero(); // raw finite-difference result
    double structure_residual = 0;

    static Eigen::Matrix4d template_matrix(double ax, double ay, double bx, double by, double dxy, double dyx);
};

struct ModeFrequencies {
    double omega_minus = 0, omega_plus = 0; // rad/s
    double omega_fm = 0, omega_afm = 0;
};

struct LinearizeOptions {
    double step = 1e-6;
    double structure_tol = 1e-8;
};

LinearizedDynamics linearize(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& eq,
                             const LinearizeOptions& opt = {});

// fills omega_minus/omega_plus; checks against eigenvalues of lin.matrix
ModeFrequencies coupled_frequencies(const LinearizedDynamics& lin);
// fills omega_fm/omega_afm
ModeFrequencies decoupled_frequencies(const LinearizedDynamics& lin);
ModeFrequencies mode_frequencies(const LinearizedDynamics& lin);

// |[M, Sigma]|_F, Sigma = diag(-1,-1,1,1)
double symmetry_check(const LinearizedDynamics& lin);

// angular frequencies from a direct eigen-solve of lin.matrix, ascending
Eigen::Vector2d matrix_frequencies(const Eigen::Matrix4d& m);

} // namespace magnon
