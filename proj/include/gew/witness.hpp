#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gew/matrix.hpp"

namespace gew {

/// G = rho1 - rho2 - <rho1, rho1 - rho2> 1: the hyperplane through rho1
/// orthogonal to rho1 - rho2, negative on rho2.
struct GeometricOperator {
    DensityMatrix rho1;
    DensityMatrix rho2;
    CMat g;
};

/// Throws std::invalid_argument if the states coincide (HS distance <= 1e-12)
/// or have different dimensions.
GeometricOperator geometric_operator(const DensityMatrix& rho1, const DensityMatrix& rho2);

struct SeeSawOptions {
    std::size_t restarts = 32;
    std::uint64_t seed = 42;
    std::size_t jobs = 1;  // 0: hardware concurrency
    std::size_t max_iterations = 5000;
    double tolerance = 1e-12;
};

/// Best pure product state psi (x) phi found for min <psi phi|C|psi phi>.
struct ProductOptimum {
    std::vector<cplx> psi;
    std::vector<cplx> phi;
    double value = 0.0;
    /// value = delta mu (1 + s_min); absent when the identity part of C is not positive.
    std::optional<double> s_min;
    std::size_t restarts_used = 0;
    bool converged = false;
    /// True when every restart's objective was non-increasing.
    bool monotone = true;
    /// Objective after each iteration of the winning restart.
    std::vector<double> history;
};

/// Multi-start see-saw: alternately replace each party's vector by the lowest
/// eigenvector of the operator reduced on the other party. Starting vectors
/// come from a single mt19937_64 stream, so the result does not depend on
/// options.jobs. Throws std::invalid_argument for non-Hermitian C.
ProductOptimum min_product_expectation(const CMat& c, Dims dims, const SeeSawOptions& options = {});

inline constexpr double kWitnessTol = 1e-8;
inline constexpr double kOptimalTol = 1e-6;

struct WitnessReport {
    /// min over product states >= -1e-8 ||C||_2
    bool witness = false;
    /// some state has negative expectation (C has a negative eigenvalue)
    bool detecting = false;
    /// witness, detecting, and |min| <= 1e-6 ||C||_2
    bool optimal = false;
    double min_eigenvalue = 0.0;
    double spectral_norm = 0.0;
    ProductOptimum optimum;
};

WitnessReport is_witness(const CMat& c, Dims dims, const SeeSawOptions& options = {});

/// rho_lambda = lambda rho + (1 - lambda) rho~.
class ShiftFamily {
public:
    /// Throws std::invalid_argument when the dimensions differ.
    ShiftFamily(DensityMatrix rho, DensityMatrix rho_tilde);

    const DensityMatrix& rho() const { return rho_; }
    const DensityMatrix& rho_tilde() const { return rho_tilde_; }
    Dims dims() const { return rho_.dims(); }
    double length() const;
    CMat state(double lambda) const;

private:
    DensityMatrix rho_;
    DensityMatrix rho_tilde_;
};

/// G_lambda with rho1 = rho_lambda and rho2 = rho, evaluated as
/// (1-l)(rho~ - rho) - <rho_l, (1-l)(rho~ - rho)> 1.
/// Throws std::invalid_argument for lambda outside [0, 1) or a degenerate family.
GeometricOperator shift_operator(const ShiftFamily& family, double lambda);

enum class ShiftMode { outside_in, inside_out };

std::string to_string(ShiftMode mode);

/// Raised when the witness predicate does not change between the probed
/// endpoints, or the family has zero length.
class NoBracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShiftProbe {
    double lambda;
    double min_value;
    bool witness;
};

struct CrossingReport {
    ShiftMode mode = ShiftMode::outside_in;
    /// Witness-side end of the final bracket.
    double lambda_star = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    /// Witness status of G_lambda at the upper end of the domain.
    bool witness_above = true;
    std::vector<ShiftProbe> probes;
    /// See-saw result of G_{lambda_star}.
    ProductOptimum optimum;
    std::size_t iterations = 0;
};

/// Bisection on lambda of is_witness(G_lambda) over [0, 1 - tol]; at most 80
/// iterations, final bracket width <= tol. Both modes bracket the same
/// predicate; outside_in reads lambda_star as the start of the entangled
/// segment (lambda_star, 1], inside_out as the position where the minimum of
/// S reaches -1.
CrossingReport find_witness_crossing(const ShiftFamily& family, ShiftMode mode, double tol = 1e-6,
                                     const SeeSawOptions& options = {});

}  // namespace gew
