#ifndef ZIPFMF_ERRORS_HPP
#define ZIPFMF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zipfmf {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input files that cannot be parsed or violate the rating scale.
struct ParseError : Error {
    using Error::Error;
};

// The exponent statistic is undefined: all x_i equal x_max, so the
// log-sum denominator vanishes.
struct DegenerateDistribution : Error {
    using Error::Error;
};

// A factor row norm fell below the representable threshold (1e-12).
struct NumericalDegeneracy : Error {
    using Error::Error;
};

// Training produced a non-finite loss or non-finite factors.
struct Diverged : Error {
    Diverged(const std::string& msg, int epoch) : Error(msg), epoch(epoch) {}
    int epoch;
};

}  // namespace zipfmf

#endif
