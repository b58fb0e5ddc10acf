#ifndef COMBOFILTER_ERRORS_HPP
#define COMBOFILTER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace combofilter {

/// Invalid experiment configuration. `field()` is the dotted path of the
/// offending key, e.g. "combiner.rho_a".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace combofilter

#endif  // COMBOFILTER_ERRORS_HPP
