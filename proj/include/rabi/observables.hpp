#pragma once

#include <vector>

#include "rabi/model.hpp"

namespace rabi {

// Every reported quantity extracted from one state. Chain vectors are
// indexed by photon number: chain_plus[n] holds P(|g,n>) for even n and
// P(|e,n>) for odd n; chain_minus holds the complementary assignment.
struct ObservableSet {
    double mean_photon = 0.0;
    double p_g = 0.0, p_e = 0.0;
    double purity = 1.0;
    std::vector<double> photon_dist;   // size n_max + 1
    std::vector<double> chain_plus;    // size n_max + 1
    std::vector<double> chain_minus;   // size n_max + 1
    double parity_expectation = 0.0;
};

ObservableSet measure(const DensityMatrix& rho, const FockSpace& space);
ObservableSet measure(const PureState& psi, const FockSpace& space);

// Displacement operator exp(alpha a^dag - conj(alpha) a) on the mode factor
// alone ((n_max+1) x (n_max+1)), built by scaling-and-squaring expm.
Eigen::MatrixXcd displacement(const FockSpace& space, cplx alpha);

// chi(alpha) = Tr[rho D(alpha)], D acting on the mode factor. Sets
// *truncation_warning when |alpha|^2 > n_max/4 (displacement may leave the
// truncated space).
cplx char_function(const DensityMatrix& rho, const FockSpace& space, cplx alpha,
                   bool* truncation_warning = nullptr);
cplx char_function(const PureState& psi, const FockSpace& space, cplx alpha,
                   bool* truncation_warning = nullptr);

// (1/2) ||a - b||_1 via the spectrum of the Hermitian difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace rabi
