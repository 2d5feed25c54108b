#pragma once
#include <stdexcept>
#include <string>

namespace horoconv {

// Exception hierarchy mirroring the CLI exit codes:
//   2 spec / input error, 3 domain violation, 4 eigenvalue bound, 5 solver singularity.
struct spec_error : std::runtime_error {
    explicit spec_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct domain_violation : std::runtime_error {
    explicit domain_violation(const std::string& msg) : std::runtime_error(msg) {}
};

struct eigenvalue_bound_error : std::runtime_error {
    explicit eigenvalue_bound_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct solver_singularity : std::runtime_error {
    explicit solver_singularity(const std::string& msg) : std::runtime_error(msg) {}
};

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const spec_error*>(&e)) return 2;
    if (dynamic_cast<const domain_violation*>(&e)) return 3;
    if (dynamic_cast<const eigenvalue_bound_error*>(&e)) return 4;
    if (dynamic_cast<const solver_singularity*>(&e)) return 5;
    return 2;
}

} // namespace horoconv
