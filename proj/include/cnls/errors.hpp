#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace cnls {

/// Base of all toolkit errors. `kind()` is the stable name used in serialized reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what, nlohmann::json detail = {})
        : std::runtime_error(what), kind_(std::move(kind)), detail_(std::move(detail)) {}

    const std::string& kind() const { return kind_; }
    const nlohmann::json& detail() const { return detail_; }

    nlohmann::json to_json() const {
        return {{"error", kind_}, {"message", what()}, {"detail", detail_}};
    }

private:
    std::string kind_;
    nlohmann::json detail_;
};

#define CNLS_DEFINE_ERROR(Name)                                                   \
    class Name : public Error {                                                   \
    public:                                                                       \
        explicit Name(const std::string& what, nlohmann::json detail = {})        \
            : Error(#Name, what, std::move(detail)) {}                            \
    }

// Configuration gates (exit code 2 from the CLI).
CNLS_DEFINE_ERROR(ConfigError);

// poly_algebra
CNLS_DEFINE_ERROR(ParseError);
CNLS_DEFINE_ERROR(DegreeTooLow);
CNLS_DEFINE_ERROR(NonZeroMomentum);
CNLS_DEFINE_ERROR(MassBracketNonzero);

// birkhoff
CNLS_DEFINE_ERROR(ResidualNonzero);
CNLS_DEFINE_ERROR(NormEscape);
CNLS_DEFINE_ERROR(SmallnessGate);

// effective
CNLS_DEFINE_ERROR(DegenerateModes);

// nonres
CNLS_DEFINE_ERROR(ViolationFound);
CNLS_DEFINE_ERROR(HypothesisViolated);

// dynamics
CNLS_DEFINE_ERROR(DriftExceeded);
CNLS_DEFINE_ERROR(NoGrowthWindow);

#undef CNLS_DEFINE_ERROR

}  // namespace cnls
