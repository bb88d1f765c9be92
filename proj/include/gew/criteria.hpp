#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gew/matrix.hpp"

namespace gew {

enum class Label { invalid_state, npt_entangled, bound_entangled, ppt_undecided, separable_asserted };

/// Upper-case label name, e.g. "BOUND_ENTANGLED".
std::string to_string(Label label);

struct Evidence {
    std::string criterion;
    double margin;
};

struct Verdict {
    Label label = Label::ppt_undecided;
    std::vector<Evidence> evidence;
    /// Smallest eigenvalue of the input; NaN if it is not Hermitian.
    double min_eigenvalue = 0.0;
    /// NaN when the input is not Hermitian or the dims do not factor it.
    double ppt_margin = 0.0;
    double realignment_sum = 0.0;
    /// Tr(C rho) for each supplied witness candidate.
    std::vector<double> witness_values;
    /// Why the input is not a state; empty otherwise.
    std::string defect;
};

inline constexpr double kCriterionTol = 1e-10;

/// Smallest eigenvalue of rho^Gamma; PPT iff >= -1e-10.
double ppt_check(const DensityMatrix& rho);
/// Sum of singular values of the realigned state; > 1 + 1e-10 certifies entanglement.
double realignment_check(const DensityMatrix& rho);

/// Rules in order: not a state -> INVALID_STATE; PPT margin < -1e-10 ->
/// NPT_ENTANGLED; realignment sum > 1 + 1e-10 or some Tr(C rho) < -1e-10 ->
/// BOUND_ENTANGLED; separable_assertion -> SEPARABLE_ASSERTED; otherwise
/// PPT_UNDECIDED. Witness candidates must match the state size.
Verdict classify(const CMat& rho, Dims dims, std::span<const CMat> witnesses = {},
                 bool separable_assertion = false);
Verdict classify(const DensityMatrix& rho, std::span<const CMat> witnesses = {}, bool separable_assertion = false);

/// {label, ppt_margin, realignment_sum, witness_values[], evidence[], ...}; NaN is written as null.
nlohmann::json to_json(const Verdict& v);

}  // namespace gew
