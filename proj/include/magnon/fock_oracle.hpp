#pragma once

#include <vector>

#include <Eigen/Dense>

#include "magnon/hopfield.hpp"
#include "magnon/squeezing.hpp"

namespace magnon {

// two-mode number basis, index = na * (cutoff+1) + nb; the b mode is gauge-rotated
// (b -> -i b') so the Hamiltonian is real
struct FockGroundState {
    int cutoff = 0;
    Eigen::VectorXd amplitudes; // full (cutoff+1)^2 vector in the rotated gauge
};

struct ConvergenceReport {
    int cutoff = 0, reference_cutoff = 0;
    double gap_change = 0;      // relative, max over both gaps
    double variance_change = 0; // absolute
    bool converged = false;
};

struct FockResult {
    FockGroundState ground;
    double ground_energy = 0;
    double gap_lower = 0, gap_upper = 0; // rad/s
};

struct TruncatedSpace {
    int cutoff = 60;
    FockResult result;
    ConvergenceReport convergence_report;
};

constexpr int max_cutoff = 120;

// dense real-symmetric Hamiltonian (frequencies divided by `scale`)
Eigen::MatrixXd fock_hamiltonian(const HopfieldParams& hp, int cutoff, double scale = 1.0);

FockResult build_and_diagonalize(const HopfieldParams& hp, int cutoff);

double oracle_variance(const FockGroundState& gs, const SqueezingQuery& q);

// min over all quadratures, from the ground-state covariance
double oracle_min_variance(const FockGroundState& gs);

// runs cutoff and cutoff-10; converged when changes < tol
TruncatedSpace converge(const HopfieldParams& hp, int cutoff, double tol = 1e-6);

} // namespace magnon
