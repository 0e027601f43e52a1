#pragma once

#include <complex>

#include "magnon/hopfield.hpp"

namespace magnon {

// c = alpha a + beta b, X = (e^{i phi} c + h.c.) / 2
struct SqueezingQuery {
    double alpha = 1;
    std::complex<double> beta{0, 0};
    double phi = 0;

    void validate() const;
    static SqueezingQuery from_angles(double chi, double psi, double phi);
};

struct SqueezingResult {
    double min_variance = 0.25;
    SqueezingQuery optimal;
    double suppression_db = 0;
    double orthogonal_variance = 0.25;
    double orthogonal_db = 0;
    double orthogonal_phi = 0;
};

// ground-state second moments <psi_i psi_j> over (a, b, a+, b+)
Eigen::Matrix4cd ground_moments(const BogoliubovModes& m);

double quadrature_variance(const BogoliubovModes& m, const SqueezingQuery& q);

SqueezingResult minimize_variance(const BogoliubovModes& m);

struct OrthogonalResult {
    double variance = 0.25;
    double phi = 0;
    double db = 0;
};
OrthogonalResult orthogonal_squeezing(const BogoliubovModes& m, const SqueezingQuery& optimal_c);

double to_db(double variance);

} // namespace magnon
