// Error taxonomy shared by all modules.
//
//   config_error     bad user input (mesh spec, option ranges, malformed files)
//   domain_error     parameters outside the mathematical validity region
//                    (non-integrable weight, lambda past the threshold, ...)
//   divergence_error an iteration/quadrature that cannot converge by design
//                    (e.g. bubble mass with too slow decay)
//   internal_error   "should never happen" invariant breaches
#pragma once
#include <stdexcept>
#include <string>

namespace vmf {

struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

struct internal_error : std::logic_error {
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

inline void require_config(bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
}

inline void require_domain(bool ok, const std::string& what) {
    if (!ok) throw domain_error(what);
}

} // namespace vmf
