#include "gew/criteria.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gew {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string to_string(Label label) {
    switch (label) {
        case Label::invalid_state: return "INVALID_STATE";
        case Label::npt_entangled: return "NPT_ENTANGLED";
        case Label::bound_entangled: return "BOUND_ENTANGLED";
        case Label::ppt_undecided: return "PPT_UNDECIDED";
        case Label::separable_asserted: return "SEPARABLE_ASSERTED";
    }
    return "UNKNOWN";
}

double ppt_check(const DensityMatrix& rho) { return min_eigenvalue(partial_transpose(rho)); }

double realignment_check(const DensityMatrix& rho) { return realignment_sum(rho.mat(), rho.dims()); }

Verdict classify(const CMat& rho, Dims dims, std::span<const CMat> witnesses, bool separable_assertion) {
    Verdict v;
    v.defect = DensityMatrix::defect(rho, dims);
    const bool factors = rho.is_square() && dims.total() == rho.rows();
    const bool hermitian = factors && rho.all_finite() && is_hermitian(rho);
    v.min_eigenvalue = hermitian ? min_eigenvalue(rho) : kNaN;
    v.ppt_margin = hermitian ? ppt_margin(rho, dims) : kNaN;
    v.realignment_sum = factors && rho.all_finite() ? realignment_sum(rho, dims) : kNaN;
    for (const auto& c : witnesses) {
        if (!factors || c.rows() != rho.rows() || c.cols() != rho.cols())
            throw std::invalid_argument("classify: witness size does not match the state");
        v.witness_values.push_back(hs_inner(c, rho).real());
    }

    v.evidence.push_back({"positivity", v.min_eigenvalue});
    if (!v.defect.empty()) {
        v.label = Label::invalid_state;
        return v;
    }
    v.evidence.push_back({"ppt", v.ppt_margin});
    if (v.ppt_margin < -kCriterionTol) {
        v.label = Label::npt_entangled;
        return v;
    }
    // Evidence margins are >= 0 when the criterion is satisfied.
    v.evidence.push_back({"realignment", 1.0 - v.realignment_sum});
    bool entangled = v.realignment_sum > 1.0 + kCriterionTol;
    for (std::size_t k = 0; k < v.witness_values.size(); ++k) {
        v.evidence.push_back({"witness[" + std::to_string(k) + "]", v.witness_values[k]});
        entangled = entangled || v.witness_values[k] < -kCriterionTol;
    }
    if (entangled)
        v.label = Label::bound_entangled;
    else if (separable_assertion)
        v.label = Label::separable_asserted;
    else
        v.label = Label::ppt_undecided;
    return v;
}

Verdict classify(const DensityMatrix& rho, std::span<const CMat> witnesses, bool separable_assertion) {
    return classify(rho.mat(), rho.dims(), witnesses, separable_assertion);
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j;
    j["label"] = to_string(v.label);
    j["ppt_margin"] = number(v.ppt_margin);
    j["realignment_sum"] = number(v.realignment_sum);
    j["witness_values"] = nlohmann::json::array();
    for (double w : v.witness_values) j["witness_values"].push_back(number(w));
    j["min_eigenvalue"] = number(v.min_eigenvalue);
    j["evidence"] = nlohmann::json::array();
    for (const auto& e : v.evidence) j["evidence"].push_back({{"criterion", e.criterion}, {"margin", number(e.margin)}});
    if (!v.defect.empty()) j["defect"] = v.defect;
    return j;
}

}  // namespace gew
