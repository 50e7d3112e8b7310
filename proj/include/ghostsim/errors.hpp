#ifndef GHOSTSIM_ERRORS_HPP
#define GHOSTSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ghostsim {

/// Base class for all ghostsim errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& msg) : Error("invalid parameters: " + msg) {}
};

class SamplingTooCoarse : public Error {
public:
    explicit SamplingTooCoarse(const std::string& msg) : Error("sampling too coarse: " + msg) {}
};

class GridMismatch : public Error {
public:
    explicit GridMismatch(const std::string& msg) : Error("grid mismatch: " + msg) {}
};

class GridTooSmall : public Error {
public:
    explicit GridTooSmall(const std::string& msg) : Error("grid too small: " + msg) {}
};

class NotLowBrightness : public Error {
public:
    explicit NotLowBrightness(const std::string& msg) : Error("not low brightness: " + msg) {}
};

class BrightnessRegimeAmbiguous : public Error {
public:
    explicit BrightnessRegimeAmbiguous(const std::string& msg)
        : Error("brightness regime ambiguous: " + msg) {}
};

class NonPositiveSpectrum : public Error {
public:
    explicit NonPositiveSpectrum(const std::string& msg) : Error("non-positive spectrum: " + msg) {}
};

class IntermediateRegime : public Error {
public:
    explicit IntermediateRegime(const std::string& msg) : Error("intermediate regime: " + msg) {}
};

class RegionTooLarge : public Error {
public:
    explicit RegionTooLarge(const std::string& msg) : Error("region too large: " + msg) {}
};

class NoPeak : public Error {
public:
    explicit NoPeak(const std::string& msg) : Error("no peak: " + msg) {}
};

class ToleranceUnreachable : public Error {
public:
    explicit ToleranceUnreachable(const std::string& msg) : Error("tolerance unreachable: " + msg) {}
};

class NonclassicalState : public Error {
public:
    explicit NonclassicalState(const std::string& msg) : Error("nonclassical state: " + msg) {}
};

class InsufficientSamples : public Error {
public:
    explicit InsufficientSamples(const std::string& msg) : Error("insufficient samples: " + msg) {}
};

class RateOverflow : public Error {
public:
    explicit RateOverflow(const std::string& msg) : Error("rate overflow: " + msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

} // namespace ghostsim

#endif // GHOSTSIM_ERRORS_HPP
