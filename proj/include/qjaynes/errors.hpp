// Error taxonomy shared by all qjaynes modules.
#pragma once

#include <stdexcept>
#include <string>

namespace qjaynes {

enum class errc {
    not_density_matrix,
    degenerate_observable,
    inconsistent_data,
    empty_constraint_set,
    out_of_family_range,
    invalid_delta,
    not_pure,
    invalid_method,
    inconsistent_ensemble,
    invalid_budget,
    too_large,
    invalid_argument,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::not_density_matrix: return "not_density_matrix";
        case errc::degenerate_observable: return "degenerate_observable";
        case errc::inconsistent_data: return "inconsistent_data";
        case errc::empty_constraint_set: return "empty_constraint_set";
        case errc::out_of_family_range: return "out_of_family_range";
        case errc::invalid_delta: return "invalid_delta";
        case errc::not_pure: return "not_pure";
        case errc::invalid_method: return "invalid_method";
        case errc::inconsistent_ensemble: return "inconsistent_ensemble";
        case errc::invalid_budget: return "invalid_budget";
        case errc::too_large: return "too_large";
        case errc::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qjaynes
